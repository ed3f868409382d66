#pragma once

// Replicated simulation benchmark and single-dataset model scan.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "config.hpp"
#include "dataset.hpp"
#include "descent.hpp"

namespace hazclust {

/// Runs job(i) for i in [0, count) on up to `threads` workers (0: all cores).
/// Exceptions are rethrown on the caller's thread after all workers stop.
void parallel_for(int count, int threads, const std::function<void(int)>& job);

struct BenchmarkCell {
    CensoringKind censoring = CensoringKind::Administrative;
    int k = 0;
    double gamma = 0.0;
    int C = 0;
};

/// Grid order: censoring, then k, then gamma, then C.
std::vector<BenchmarkCell> expand_grid(const BenchmarkSpec& spec);

struct ReplicationRecord {
    int cell = 0;
    int replication = 0;
    std::uint64_t data_seed = 0;
    bool converged = false;
    int iterations = 0;
    int n_clusters = 0;
    bool labels_from_best_iterate = false;
    double accuracy = 0.0;
    double ari = 0.0;
    double silhouette = 0.0;
    bool silhouette_defined = false;
    double loglik = 0.0;
    double theta = 0.0;
    std::vector<double> baseline;  // Weibull: rho, xi; Exponential: rate
    double beta = 0.0;             // first covariate
    double max_inner_increase = 0.0;  // largest objective_exit - objective_entry over the trace
    std::string message;
};

struct Summary {
    int n = 0;
    double mean = 0.0, median = 0.0, sd = 0.0;  // sd with n-1; NaN when undefined
};
Summary summarize(std::vector<double> values);

/// MSE/Var with MSE = mean squared error about the truth and Var the sample
/// variance (n-1 denominator).
struct ParamError {
    double mse_over_var = 0.0;
    double var = 0.0;
};
ParamError parameter_error(const std::vector<double>& estimates, double truth);

struct CellSummary {
    int replications = 0;
    int converged = 0;
    double mean_iterations = 0.0;
    Summary accuracy, ari;
    int identified = 0;  // runs whose cluster count equals the number of true clusters
    Summary accuracy_identified, ari_identified;
    Summary silhouette, silhouette_converged;
    ParamError theta, rho, xi, beta;
};

/// One row per (censoring, k, gamma, replication) with more than one C in the
/// grid: the C whose fit has the largest mean silhouette among converged fits
/// (all fits with a defined silhouette when none converged). 0 when undefined.
struct Selection {
    CensoringKind censoring = CensoringKind::Administrative;
    int k = 0;
    double gamma = 0.0;
    int replication = 0;
    int best_C = 0;
};

struct BenchmarkResult {
    std::vector<BenchmarkCell> cells;
    std::vector<ReplicationRecord> records;  // cell-major, then replication
    std::vector<CellSummary> summaries;      // one per cell
    std::vector<Selection> selections;
};

/// Optional hook run after every fit, e.g. for extra checks in tests.
using FitHook = std::function<void(const BenchmarkCell&, int replication, const SimulatedDataset&, const FitResult&)>;

BenchmarkResult run_benchmark(const RunConfig& cfg, int threads, const FitHook& hook = {});
/// replications.csv, cells.csv and selection.csv in `dir`.
void write_benchmark(const std::string& dir, const BenchmarkResult& result, const RunConfig& cfg);

struct ScanRecord {
    BaselineFamily baseline = BaselineFamily::Weibull;
    FrailtyKind frailty = FrailtyKind::Gamma;
    double gamma = 0.0;
    int k = 0;
    int C = 0;
    bool converged = false;
    int iterations = 0;
    int n_clusters = 0;
    double silhouette = 0.0;
    bool silhouette_defined = false;
    double loglik = 0.0;
    std::string message;
};

struct ScanResult {
    std::vector<ScanRecord> records;  // baseline, frailty, gamma, k, C order
    int best = -1;                    // index of the selected cell, -1 when none has a silhouette
};

/// Same rule as Selection: largest silhouette among converged fits, falling
/// back to every fit with a defined silhouette.
ScanResult run_scan(const SurvivalDataset& data, const RunConfig& cfg, int threads);
void write_scan(const std::string& dir, const ScanResult& result);

}  // namespace hazclust
