#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <tuple>

#include "errors.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "simulate.hpp"

namespace hazclust {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Empty field for undefined values so that CSV readers see NA.
std::string num(double v) { return std::isnan(v) ? std::string() : format_number(v); }

std::string flag(bool b) { return b ? "1" : "0"; }

void check_grid_fits(int n, int k, int C, double gamma, const std::string& where) {
    if (gamma == 0.0) return;
    if (k > n - 2) {
        fail(ErrorKind::Config, where + ": k=" + std::to_string(k) + " exceeds N-2=" + std::to_string(n - 2));
    }
    if (C >= n) fail(ErrorKind::Config, where + ": C=" + std::to_string(C) + " must be below N=" + std::to_string(n));
}

// Index with the best silhouette under the selection rule, or -1.
template <class Get>
int select_best(int count, Get get) {
    int best = -1;
    for (int pass = 0; pass < 2 && best < 0; ++pass) {
        double top = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < count; ++i) {
            const auto [defined, converged, value] = get(i);
            if (!defined || (pass == 0 && !converged)) continue;
            if (value > top) {
                top = value;
                best = i;
            }
        }
    }
    return best;
}

}  // namespace

void parallel_for(int count, int threads, const std::function<void(int)>& job) {
    if (count <= 0) return;
    int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, count);
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next = count;
            }
        }
    };
    if (workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<BenchmarkCell> expand_grid(const BenchmarkSpec& spec) {
    std::vector<BenchmarkCell> cells;
    for (auto cens : spec.censoring) {
        for (int k : spec.k) {
            for (double g : spec.gamma) {
                for (int C : spec.C) cells.push_back({cens, k, g, C});
            }
        }
    }
    return cells;
}

Summary summarize(std::vector<double> values) {
    Summary s;
    s.n = static_cast<int>(values.size());
    if (values.empty()) {
        s.mean = s.median = s.sd = kNaN;
        return s;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / s.n;
    std::sort(values.begin(), values.end());
    const auto h = values.size() / 2;
    s.median = values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / (s.n - 1));
    } else {
        s.sd = kNaN;
    }
    return s;
}

ParamError parameter_error(const std::vector<double>& estimates, double truth) {
    ParamError e{kNaN, kNaN};
    const auto n = static_cast<double>(estimates.size());
    if (estimates.size() < 2) return e;
    double mean = 0.0, mse = 0.0;
    for (double v : estimates) {
        mean += v;
        mse += (v - truth) * (v - truth);
    }
    mean /= n;
    mse /= n;
    double ss = 0.0;
    for (double v : estimates) ss += (v - mean) * (v - mean);
    e.var = ss / (n - 1.0);
    e.mse_over_var = e.var > 0.0 ? mse / e.var : kNaN;
    return e;
}

BenchmarkResult run_benchmark(const RunConfig& cfg, int threads, const FitHook& hook) {
    cfg.validate();
    BenchmarkResult res;
    res.cells = expand_grid(cfg.benchmark);
    const int n = cfg.simulation.groups * cfg.simulation.units_per_group;
    for (const auto& c : res.cells) check_grid_fits(n, c.k, c.C, c.gamma, "benchmark.grid");

    const int B = cfg.benchmark.replications;
    const int jobs = static_cast<int>(res.cells.size()) * B;
    res.records.resize(static_cast<std::size_t>(jobs));
    std::mutex hook_mutex;

    parallel_for(jobs, threads, [&](int job) {
        const int cell_index = job / B;
        const int rep = job % B;
        const BenchmarkCell& cell = res.cells[static_cast<std::size_t>(cell_index)];

        SimConfig sc = cfg.simulation;
        sc.censoring = cell.censoring;
        sc.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep));
        const SimulatedDataset sim = generate(sc);

        FitConfig fc = cfg.fit_config();
        fc.gamma = cell.gamma;
        fc.k = cell.k;
        fc.C = cell.C;
        fc.seed = derive_seed(sc.seed, 2);
        const FitResult fr = fit(sim.data, fc);

        ReplicationRecord& rec = res.records[static_cast<std::size_t>(job)];
        rec.cell = cell_index;
        rec.replication = rep;
        rec.data_seed = sc.seed;
        rec.converged = fr.converged;
        rec.iterations = fr.iterations;
        rec.n_clusters = fr.n_clusters;
        rec.labels_from_best_iterate = fr.labels_from_best_iterate;
        const RecoveryReport rr = recovery(sim.true_cluster, fr.labels);
        rec.accuracy = rr.accuracy;
        rec.ari = rr.ari;
        rec.silhouette = fr.silhouette;
        rec.silhouette_defined = fr.silhouette_defined;
        rec.loglik = fr.loglik;
        rec.theta = fr.params.frailty.theta();
        rec.baseline = fr.params.baseline.params();
        rec.beta = fr.params.beta.size() > 0 ? fr.params.beta[0] : kNaN;
        rec.max_inner_increase = -std::numeric_limits<double>::infinity();
        for (const auto& it : fr.trace) {
            rec.max_inner_increase = std::max(rec.max_inner_increase, it.objective_exit - it.objective_entry);
        }
        rec.message = fr.message;
        if (hook) {
            std::lock_guard<std::mutex> lock(hook_mutex);
            hook(cell, rep, sim, fr);
        }
    });

    const int true_C = static_cast<int>(cfg.simulation.cluster_means.size());
    const bool weibull = cfg.baseline == BaselineFamily::Weibull;
    for (std::size_t c = 0; c < res.cells.size(); ++c) {
        CellSummary s;
        std::vector<double> acc, ari, acc_id, ari_id, sil, sil_conv, theta, rho, xi, beta;
        double iters = 0.0;
        for (int rep = 0; rep < B; ++rep) {
            const auto& r = res.records[c * static_cast<std::size_t>(B) + static_cast<std::size_t>(rep)];
            ++s.replications;
            if (r.converged) ++s.converged;
            iters += r.iterations;
            acc.push_back(r.accuracy);
            ari.push_back(r.ari);
            if (r.n_clusters == true_C) {
                ++s.identified;
                acc_id.push_back(r.accuracy);
                ari_id.push_back(r.ari);
            }
            if (r.silhouette_defined) {
                sil.push_back(r.silhouette);
                if (r.converged) sil_conv.push_back(r.silhouette);
            }
            theta.push_back(r.theta);
            if (weibull) {
                rho.push_back(r.baseline[0]);
                xi.push_back(r.baseline[1]);
            }
            beta.push_back(r.beta);
        }
        s.mean_iterations = iters / B;
        s.accuracy = summarize(acc);
        s.ari = summarize(ari);
        s.accuracy_identified = summarize(acc_id);
        s.ari_identified = summarize(ari_id);
        s.silhouette = summarize(sil);
        s.silhouette_converged = summarize(sil_conv);
        s.theta = parameter_error(theta, cfg.simulation.theta);
        s.rho = parameter_error(rho, cfg.simulation.shape);
        s.xi = parameter_error(xi, cfg.simulation.scale);
        s.beta = parameter_error(beta, cfg.simulation.beta);
        res.summaries.push_back(s);
    }

    if (cfg.benchmark.C.size() > 1) {
        const int nC = static_cast<int>(cfg.benchmark.C.size());
        for (std::size_t c = 0; c < res.cells.size(); c += static_cast<std::size_t>(nC)) {
            for (int rep = 0; rep < B; ++rep) {
                auto rec_at = [&](int j) -> const ReplicationRecord& {
                    return res.records[(c + static_cast<std::size_t>(j)) * static_cast<std::size_t>(B) +
                                       static_cast<std::size_t>(rep)];
                };
                const int best = select_best(nC, [&](int j) {
                    const auto& r = rec_at(j);
                    return std::tuple<bool, bool, double>(r.silhouette_defined, r.converged, r.silhouette);
                });
                const auto& cell = res.cells[c];
                res.selections.push_back(
                    {cell.censoring, cell.k, cell.gamma, rep, best < 0 ? 0 : res.cells[c + static_cast<std::size_t>(best)].C});
            }
        }
    }
    return res;
}

void write_benchmark(const std::string& dir, const BenchmarkResult& result, const RunConfig& cfg) {
    ensure_directory(dir);
    const int B = cfg.benchmark.replications;
    {
        auto out = open_output(dir + "/replications.csv");
        write_csv_row(out, {"censoring", "k", "gamma", "C", "replication", "data_seed", "converged", "iterations",
                            "n_clusters", "labels_from_best_iterate", "accuracy", "ari", "silhouette", "loglik",
                            "theta", "rho", "xi", "beta", "max_inner_increase", "message"});
        for (const auto& r : result.records) {
            const auto& c = result.cells[static_cast<std::size_t>(r.cell)];
            const bool weibull = r.baseline.size() == 2;
            write_csv_row(out, {std::string(to_string(c.censoring)), std::to_string(c.k), format_number(c.gamma),
                                std::to_string(c.C), std::to_string(r.replication), std::to_string(r.data_seed),
                                flag(r.converged), std::to_string(r.iterations), std::to_string(r.n_clusters),
                                flag(r.labels_from_best_iterate), format_number(r.accuracy), format_number(r.ari),
                                r.silhouette_defined ? format_number(r.silhouette) : std::string(),
                                num(r.loglik), num(r.theta), weibull ? num(r.baseline[0]) : std::string(),
                                num(weibull ? r.baseline[1] : r.baseline[0]), num(r.beta),
                                num(r.max_inner_increase), r.message});
        }
        if (!out) fail(ErrorKind::Io, "failed writing replications.csv");
    }
    {
        auto out = open_output(dir + "/cells.csv");
        std::vector<std::string> header{"censoring", "k", "gamma", "C", "replications", "converged", "converged_pct",
                                        "mean_iterations"};
        for (const char* m : {"accuracy", "ari", "accuracy_identified", "ari_identified", "silhouette",
                              "silhouette_converged"}) {
            for (const char* s : {"_mean", "_median", "_sd"}) header.push_back(std::string(m) + s);
        }
        header.insert(header.begin() + 14, {"identified", "identified_pct"});
        for (const char* p : {"theta", "rho", "xi", "beta"}) {
            header.push_back(std::string(p) + "_mse_over_var");
            header.push_back(std::string(p) + "_var");
        }
        write_csv_row(out, header);
        for (std::size_t i = 0; i < result.cells.size(); ++i) {
            const auto& c = result.cells[i];
            const auto& s = result.summaries[i];
            std::vector<std::string> row{std::string(to_string(c.censoring)), std::to_string(c.k), format_number(c.gamma),
                                         std::to_string(c.C), std::to_string(s.replications), std::to_string(s.converged),
                                         format_number(100.0 * s.converged / B), format_number(s.mean_iterations)};
            auto add = [&](const Summary& m) {
                row.push_back(num(m.mean));
                row.push_back(num(m.median));
                row.push_back(num(m.sd));
            };
            add(s.accuracy);
            add(s.ari);
            row.push_back(std::to_string(s.identified));
            row.push_back(format_number(100.0 * s.identified / B));
            add(s.accuracy_identified);
            add(s.ari_identified);
            add(s.silhouette);
            add(s.silhouette_converged);
            for (const ParamError* p : {&s.theta, &s.rho, &s.xi, &s.beta}) {
                row.push_back(num(p->mse_over_var));
                row.push_back(num(p->var));
            }
            write_csv_row(out, row);
        }
        if (!out) fail(ErrorKind::Io, "failed writing cells.csv");
    }
    {
        auto out = open_output(dir + "/selection.csv");
        write_csv_row(out, {"censoring", "k", "gamma", "replication", "best_C"});
        for (const auto& s : result.selections) {
            write_csv_row(out, {std::string(to_string(s.censoring)), std::to_string(s.k), format_number(s.gamma),
                                std::to_string(s.replication), std::to_string(s.best_C)});
        }
        if (!out) fail(ErrorKind::Io, "failed writing selection.csv");
    }
}

ScanResult run_scan(const SurvivalDataset& data, const RunConfig& cfg, int threads) {
    cfg.validate();
    ScanResult res;
    const ScanSpec grid = cfg.effective_scan();
    for (auto b : grid.baseline) {
        for (auto f : grid.frailty) {
            for (double g : grid.gamma) {
                for (int k : grid.k) {
                    for (int C : grid.C) {
                        check_grid_fits(data.num_units(), k, C, g, "scan");
                        ScanRecord r;
                        r.baseline = b;
                        r.frailty = f;
                        r.gamma = g;
                        r.k = k;
                        r.C = C;
                        res.records.push_back(r);
                    }
                }
            }
        }
    }
    if (res.records.empty()) fail(ErrorKind::Config, "scan grid is empty");

    parallel_for(static_cast<int>(res.records.size()), threads, [&](int i) {
        ScanRecord& r = res.records[static_cast<std::size_t>(i)];
        FitConfig fc = cfg.fit_config();
        fc.baseline = r.baseline;
        fc.frailty = r.frailty;
        fc.gamma = r.gamma;
        fc.k = r.k;
        fc.C = r.C;
        fc.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
        const FitResult fr = fit(data, fc);
        r.converged = fr.converged;
        r.iterations = fr.iterations;
        r.n_clusters = fr.n_clusters;
        r.silhouette = fr.silhouette;
        r.silhouette_defined = fr.silhouette_defined;
        r.loglik = fr.loglik;
        r.message = fr.message;
    });

    res.best = select_best(static_cast<int>(res.records.size()), [&](int i) {
        const auto& r = res.records[static_cast<std::size_t>(i)];
        return std::tuple<bool, bool, double>(r.silhouette_defined, r.converged, r.silhouette);
    });
    return res;
}

void write_scan(const std::string& dir, const ScanResult& result) {
    ensure_directory(dir);
    auto out = open_output(dir + "/scan.csv");
    write_csv_row(out, {"baseline", "frailty", "gamma", "k", "C", "converged", "iterations", "n_clusters",
                        "silhouette", "loglik", "best", "message"});
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        const auto& r = result.records[i];
        write_csv_row(out, {std::string(to_string(r.baseline)), std::string(to_string(r.frailty)),
                            format_number(r.gamma), std::to_string(r.k), std::to_string(r.C), flag(r.converged),
                            std::to_string(r.iterations), std::to_string(r.n_clusters),
                            r.silhouette_defined ? format_number(r.silhouette) : std::string(), num(r.loglik),
                            flag(static_cast<int>(i) == result.best), r.message});
    }
    if (!out) fail(ErrorKind::Io, "failed writing scan.csv");
}

}  // namespace hazclust
