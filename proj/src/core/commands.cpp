#include "commands.hpp"

#include <json.hpp>

#include <cmath>

#include "errors.hpp"
#include "harness.hpp"
#include "metrics.hpp"
#include "simulate.hpp"

namespace hazclust {

namespace {

using Json = nlohmann::ordered_json;

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void write_text(const std::string& path, const std::string& text) {
    auto out = open_output(path);
    out << text;
    if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

}  // namespace

std::string fit_report(const SurvivalDataset& data, const RunConfig& cfg, const FitResult& fr,
                       const GroundTruth* truth) {
    Json j;
    j["model"] = {{"baseline", to_string(cfg.baseline)}, {"frailty", to_string(cfg.frailty)}};
    j["penalty"] = {{"gamma", cfg.gamma}, {"k", cfg.k}, {"C", cfg.C}, {"lambda0", cfg.lambda0}};
    j["convergence"] = {{"tolS", cfg.tol_s}, {"tolll", cfg.tol_ll}, {"maxit", cfg.maxit},
                        {"maxit_inner", cfg.maxit_inner}};
    j["seed"] = cfg.seed;
    j["n_units"] = data.num_units();
    j["n_groups"] = data.num_groups();

    Json beta = Json::object();
    Json se_beta = Json::object();
    for (int c = 0; c < data.num_covariates(); ++c) {
        const auto& name = data.covariate_names()[static_cast<std::size_t>(c)];
        beta[name] = fr.params.beta[c];
        se_beta[name] = nullptr;
    }
    Json baseline = {{"family", to_string(fr.params.baseline.family())}};
    if (fr.params.baseline.family() == BaselineFamily::Weibull) {
        baseline["rho"] = fr.params.baseline.shape();
        baseline["xi"] = fr.params.baseline.scale();
    } else {
        baseline["rate"] = fr.params.baseline.scale();
    }
    j["parameters"] = {{"beta", beta}, {"baseline", baseline}, {"theta", fr.params.frailty.theta()}};
    // Standard errors under penalization are not defined; kept as placeholders.
    j["standard_errors"] = {{"beta", se_beta}, {"baseline", nullptr}, {"theta", nullptr}};
    j["loglik"] = number_or_null(fr.loglik);
    j["converged"] = fr.converged;
    j["iterations"] = fr.iterations;
    j["n_clusters"] = fr.n_clusters;
    j["labels_from_best_iterate"] = fr.labels_from_best_iterate;
    j["silhouette"] = fr.silhouette_defined ? Json(fr.silhouette) : Json(nullptr);
    j["message"] = fr.message;

    Json frailty = Json::object();
    for (int g = 0; g < data.num_groups(); ++g) {
        frailty[data.group_names()[static_cast<std::size_t>(g)]] = number_or_null(fr.frailty[g]);
    }
    j["frailty_predictions"] = frailty;

    if (!fr.trace.empty()) {
        const auto& last = fr.trace.back();
        j["trace_summary"] = {{"final_loglik", number_or_null(last.loglik)},
                              {"final_penalty", number_or_null(last.penalty)},
                              {"final_mean_abs_change", number_or_null(last.mean_abs_change)},
                              {"final_components", last.components},
                              {"final_lambda", number_or_null(last.lambda)},
                              {"final_mu", number_or_null(last.mu)}};
    }
    if (truth) {
        const RecoveryReport rr = recovery(truth->cluster, fr.labels);
        j["recovery"] = {{"accuracy", rr.accuracy}, {"ari", rr.ari}};
    }
    return j.dump(2) + "\n";
}

void cmd_simulate(const RunConfig& cfg) {
    cfg.validate();
    SimConfig sc = cfg.simulation;
    sc.seed = cfg.seed;
    const SimulatedDataset sim = generate(sc);
    ensure_directory(cfg.output_dir);
    const GroundTruth truth = truth_of(sim);
    write_dataset_file(cfg.output_dir + "/dataset.csv", sim.data, &truth);

    auto out = open_output(cfg.output_dir + "/km.csv");
    write_csv_row(out, {"true_cluster", "time", "survival"});
    for (const auto& curve : empirical_survival(sim.data, sim.true_cluster)) {
        for (std::size_t i = 0; i < curve.time.size(); ++i) {
            write_csv_row(out, {std::to_string(curve.label), format_number(curve.time[i]),
                                format_number(curve.survival[i])});
        }
    }
    if (!out) fail(ErrorKind::Io, "failed writing km.csv");
}

void cmd_fit(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.input.empty()) fail(ErrorKind::Config, "io.input: no dataset given");
    const LoadedDataset loaded = read_dataset(cfg.input);
    const FitResult fr = fit(loaded.data, cfg.fit_config());

    ensure_directory(cfg.output_dir);
    write_text(cfg.output_dir + "/fit_report.json",
               fit_report(loaded.data, cfg, fr, loaded.truth ? &*loaded.truth : nullptr));
    {
        auto out = open_output(cfg.output_dir + "/labels.csv");
        write_labels(out, loaded.data, fr.labels);
    }
    {
        auto out = open_output(cfg.output_dir + "/trace.csv");
        write_csv_row(out, {"iteration", "loglik", "penalty", "mean_abs_change", "components", "lambda", "mu",
                            "objective_entry", "objective_exit", "silhouette"});
        for (const auto& r : fr.trace) {
            write_csv_row(out, {std::to_string(r.iteration), format_number(r.loglik), format_number(r.penalty),
                                format_number(r.mean_abs_change), std::to_string(r.components),
                                format_number(r.lambda), format_number(r.mu), format_number(r.objective_entry),
                                format_number(r.objective_exit),
                                r.silhouette_defined ? format_number(r.silhouette) : std::string()});
        }
    }
    if (cfg.emit_similarity && fr.state.S.rows() > 0) {
        auto out = open_output(cfg.output_dir + "/similarity.csv");
        write_similarity(out, loaded.data, fr.state.S);
    }
    if (!fr.message.empty()) fail(ErrorKind::Numerical, fr.message);
}

void cmd_benchmark(const RunConfig& cfg) {
    const BenchmarkResult res = run_benchmark(cfg, cfg.threads);
    write_benchmark(cfg.output_dir, res, cfg);
}

void cmd_scan(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.input.empty()) fail(ErrorKind::Config, "io.input: no dataset given");
    const LoadedDataset loaded = read_dataset(cfg.input);
    const ScanResult res = run_scan(loaded.data, cfg, cfg.threads);
    write_scan(cfg.output_dir, res);

    Json j;
    if (res.best >= 0) {
        const auto& r = res.records[static_cast<std::size_t>(res.best)];
        j["best"] = {{"baseline", to_string(r.baseline)}, {"frailty", to_string(r.frailty)}, {"gamma", r.gamma},
                     {"k", r.k}, {"C", r.C}, {"silhouette", r.silhouette}, {"converged", r.converged}};
    } else {
        j["best"] = nullptr;
    }
    j["cells"] = res.records.size();
    write_text(cfg.output_dir + "/scan_best.json", j.dump(2) + "\n");
}

}  // namespace hazclust
