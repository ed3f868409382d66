#pragma once

// Block coordinate descent for the penalized shared-frailty objective:
// spectral embedding F -> survival parameters -> similarity graph S,
// with the rank-penalty weight lambda tuned toward C connected components.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "likelihood.hpp"
#include "metrics.hpp"
#include "simgraph.hpp"

namespace hazclust {

struct FitConfig {
    BaselineFamily baseline = BaselineFamily::Weibull;
    FrailtyKind frailty = FrailtyKind::Gamma;
    double gamma = 0.0;
    int C = 2;
    int k = 10;
    double lambda0 = 1000.0;
    double tol_s = 1e-4;
    double tol_ll = 1e-3;
    int maxit = 500;
    int maxit_inner = 500;
    std::optional<SimilarityMatrix> initial_S;
    std::optional<ModelParams> initial_params;
    std::uint64_t seed = 0;
};

struct IterationRecord {
    int iteration = 0;
    double loglik = 0.0;
    double penalty = 0.0;           // gamma * sum s_ab (eta_a - eta_b)^2 at the new S
    double mean_abs_change = 0.0;
    int components = 0;
    double lambda = 0.0;            // value used for this S update
    double mu = 0.0;
    double objective_entry = 0.0;   // inner objective before and after the parameter step
    double objective_exit = 0.0;
    double silhouette = 0.0;
    bool silhouette_defined = false;
};

struct FitResult {
    ModelParams params;
    double loglik = 0.0;
    Eigen::VectorXd frailty;        // u_hat per group
    Eigen::VectorXd eta;            // final risk scores
    SimilarityState state;
    std::vector<int> labels;        // 1..n_clusters
    int n_clusters = 0;
    int iterations = 0;
    std::vector<IterationRecord> trace;
    bool converged = false;
    bool labels_from_best_iterate = false;
    double silhouette = 0.0;
    bool silhouette_defined = false;
    std::string message;            // set when the fit stopped on a numerical failure
};

/// Parameters in the unconstrained space used by the inner optimizer:
/// beta, log of each baseline parameter, log theta.
Eigen::VectorXd pack_params(const ModelParams& p);
ModelParams unpack_params(const Eigen::VectorXd& v, const ModelParams& like);

/// Starting values: beta = 0, an exponential-rate fit of the baseline, theta = 1.
ModelParams default_params(const SurvivalDataset& data, BaselineFamily baseline, FrailtyKind frailty);

std::pair<ModelParams, SimilarityState> init_state(const SurvivalDataset& data, const FitConfig& cfg);

struct ParamUpdate {
    ModelParams params;
    double objective_entry = 0.0;
    double objective_exit = 0.0;
    int iterations = 0;
    bool converged = false;
    bool restarted = false;
};

/// Minimizes the penalized objective over (beta, psi, theta) with S held fixed.
ParamUpdate update_params(const SurvivalDataset& data, const ModelParams& start, const SimilarityMatrix& S,
                          double gamma, int maxit_inner, std::uint64_t seed = 0);

/// x1.2 when there are too few components, /1.2 when too many.
double adapt_lambda(double lambda, int components, int C);

/// Called after every S update with the new graph and its components.
using IterationObserver = std::function<void(int iteration, const SimilarityMatrix& S, const Components& comps)>;

FitResult fit(const SurvivalDataset& data, const FitConfig& cfg, const IterationObserver& observer = {});

}  // namespace hazclust
