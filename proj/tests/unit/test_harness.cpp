#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "io.hpp"

using namespace hazclust;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

RunConfig small_benchmark() {
    RunConfig cfg;
    cfg.seed = 3;
    cfg.tol_s = 1e-2;
    cfg.tol_ll = 1.0;
    cfg.maxit = 60;
    cfg.simulation.groups = 4;
    cfg.simulation.units_per_group = 15;
    cfg.benchmark.replications = 2;
    cfg.benchmark.censoring = {CensoringKind::Administrative, CensoringKind::Normal};
    cfg.benchmark.gamma = {1e-4};
    cfg.benchmark.k = {10};
    cfg.benchmark.C = {2, 3};
    return cfg;
}

}  // namespace

TEST_CASE("parallel_for visits every index and propagates errors") {
    std::vector<std::atomic<int>> hits(50);
    parallel_for(50, 3, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, 2, [](int i) {
                        if (i == 4) fail(ErrorKind::Numerical, "boom");
                    }),
                    Error);
}

TEST_CASE("summaries") {
    const auto s = summarize({1.0, 2.0, 3.0, 10.0});
    CHECK(s.n == 4);
    CHECK(s.mean == doctest::Approx(4.0));
    CHECK(s.median == doctest::Approx(2.5));
    CHECK(s.sd == doctest::Approx(std::sqrt(50.0 / 3.0)));
    CHECK(std::isnan(summarize({1.0}).sd));
    CHECK(std::isnan(summarize({}).mean));

    // MSE = mean (x - 1)^2 = (0 + 1 + 4) / 3; Var = 1.
    const auto e = parameter_error({1.0, 2.0, 3.0}, 1.0);
    CHECK(e.var == doctest::Approx(1.0));
    CHECK(e.mse_over_var == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("grid expansion order") {
    BenchmarkSpec spec;
    spec.censoring = {CensoringKind::Administrative, CensoringKind::Normal};
    spec.k = {20, 50};
    spec.gamma = {1e-6, 0.4};
    spec.C = {2, 3};
    const auto cells = expand_grid(spec);
    REQUIRE(cells.size() == 16);
    CHECK(cells[0].C == 2);
    CHECK(cells[1].C == 3);
    CHECK(cells[2].gamma == 0.4);
    CHECK(cells[4].k == 50);
    CHECK(cells[8].censoring == CensoringKind::Normal);
}

TEST_CASE("benchmark: counts, selections and determinism") {
    auto cfg = small_benchmark();
    int hook_calls = 0;
    const auto res = run_benchmark(cfg, 1, [&](const BenchmarkCell&, int, const SimulatedDataset&, const FitResult&) {
        ++hook_calls;
    });
    CHECK(res.cells.size() == 4);
    CHECK(res.records.size() == 8);
    CHECK(hook_calls == 8);
    CHECK(res.summaries.size() == 4);
    CHECK(res.selections.size() == 4);
    for (const auto& s : res.summaries) CHECK(s.replications == 2);
    // The same replication uses the same data in every cell.
    CHECK(res.records[0].data_seed == res.records[2].data_seed);

    const auto d1 = fresh_dir("hazclust_bench1"), d2 = fresh_dir("hazclust_bench2");
    cfg.output_dir = d1.string();
    cmd_benchmark(cfg);
    cfg.output_dir = d2.string();
    cfg.threads = 2;
    cmd_benchmark(cfg);
    for (const char* f : {"replications.csv", "cells.csv", "selection.csv"}) {
        CHECK(fs::exists(d1 / f));
        CHECK(slurp(d1 / f) == slurp(d2 / f));
    }
    std::istringstream cells(slurp(d1 / "cells.csv"));
    const auto table = read_csv(cells, "cells");
    CHECK(table.rows.size() == 4);
    for (const auto& row : table.rows) CHECK(row.size() == table.header.size());
    fs::remove_all(d1);
    fs::remove_all(d2);

    cfg.benchmark.k = {100};
    CHECK_THROWS_AS(run_benchmark(cfg, 1), Error);
}

TEST_CASE("scan over a model grid") {
    SimConfig sc;
    sc.groups = 4;
    sc.units_per_group = 15;
    const auto sim = generate(sc);
    RunConfig cfg;
    cfg.tol_s = 1e-2;
    cfg.tol_ll = 1.0;
    cfg.maxit = 60;
    cfg.scan.baseline = {BaselineFamily::Weibull, BaselineFamily::Exponential};
    cfg.scan.frailty = {FrailtyKind::Gamma, FrailtyKind::InverseGaussian};
    cfg.scan.gamma = {1e-4, 1e-2};
    cfg.scan.k = {10};
    cfg.scan.C = {2, 3};
    const auto res = run_scan(sim.data, cfg, 1);
    CHECK(res.records.size() == 16);
    REQUIRE(res.best >= 0);
    const auto& best = res.records[static_cast<std::size_t>(res.best)];
    for (const auto& r : res.records) {
        if (r.converged && r.silhouette_defined && best.converged) CHECK(r.silhouette <= best.silhouette);
    }
    const auto dir = fresh_dir("hazclust_scan");
    write_scan(dir.string(), res);
    std::istringstream in(slurp(dir / "scan.csv"));
    const auto table = read_csv(in, "scan");
    CHECK(table.rows.size() == 16);
    int flagged = 0;
    for (const auto& row : table.rows) flagged += row[10] == "1";
    CHECK(flagged == 1);
    fs::remove_all(dir);
}

TEST_CASE("simulate and fit commands write their outputs") {
    const auto dir = fresh_dir("hazclust_cmds");
    RunConfig cfg;
    cfg.output_dir = dir.string();
    cfg.seed = 8;
    cmd_simulate(cfg);
    const auto first = slurp(dir / "dataset.csv");
    cmd_simulate(cfg);
    CHECK(slurp(dir / "dataset.csv") == first);
    CHECK(fs::exists(dir / "km.csv"));
    const auto ld = read_dataset((dir / "dataset.csv").string());
    CHECK(ld.data.num_units() == 500);
    CHECK(ld.data.num_groups() == 10);

    cfg.input = (dir / "dataset.csv").string();
    cfg.gamma = 1e-4;
    cfg.k = 50;
    cfg.C = 3;
    cfg.tol_s = 1e-2;
    cfg.tol_ll = 1.0;
    cfg.maxit = 200;
    cfg.emit_similarity = true;
    cmd_fit(cfg);
    for (const char* f : {"fit_report.json", "labels.csv", "trace.csv", "similarity.csv"}) CHECK(fs::exists(dir / f));
    const auto report = slurp(dir / "fit_report.json");
    CHECK(report.find("\"n_clusters\": 3") != std::string::npos);
    CHECK(report.find("\"recovery\"") != std::string::npos);

    cfg.gamma = 0.0;
    cfg.emit_similarity = false;
    cmd_fit(cfg);
    CHECK(slurp(dir / "fit_report.json").find("\"n_clusters\": 1") != std::string::npos);
    fs::remove_all(dir);
}
