#pragma once

#include <Eigen/Dense>

#include <vector>

#include "dataset.hpp"
#include "frailty.hpp"
#include "simgraph.hpp"

namespace hazclust {

struct ModelParams {
    Eigen::VectorXd beta;
    BaselineHazard baseline;
    FrailtyFamily frailty;
};

/// Frailty-adjusted linear predictors eta = x'beta + log u_hat_g.
struct LinearRiskScores {
    Eigen::VectorXd eta;           // per unit
    Eigen::VectorXd log_frailty;   // per group
};

/// Marginal log-likelihood with the frailty integrated out. Returns -inf when
/// intermediate quantities overflow, so callers doing line searches can back off.
double marginal_loglik(const SurvivalDataset& data, const ModelParams& p);

LinearRiskScores risk_scores(const SurvivalDataset& data, const ModelParams& p);

inline double pairwise_distance(const LinearRiskScores& scores, int a, int b) {
    const double diff = scores.eta[a] - scores.eta[b];
    return diff * diff;
}

/// sum_{a,b} s_ab (eta_a - eta_b)^2 over the stored entries of S.
double similarity_penalty(const Eigen::VectorXd& eta, const SimilarityMatrix& S);

/// -loglik + gamma * similarity_penalty. The mu ||S||^2 and trace terms do not
/// depend on the survival parameters and are left out.
double penalized_objective(const SurvivalDataset& data, const ModelParams& p, const SimilarityMatrix& S,
                           double gamma);

/// The similarity penalty for a fixed S, reduced to sufficient statistics so
/// that evaluating it costs O(d^2 + M^2 d) instead of O(nnz(S)).
class PenaltyKernel {
public:
    PenaltyKernel(const SurvivalDataset& data, const SimilarityMatrix& S);
    double operator()(const Eigen::VectorXd& beta, const Eigen::VectorXd& log_frailty) const;

private:
    struct GroupPair {
        int g, h;
        double weight;        // sum of s_ab over a in g, b in h
        Eigen::VectorXd dx;   // sum of s_ab (x_a - x_b)
    };
    Eigen::MatrixXd quad_;   // sum of s_ab (x_a - x_b)(x_a - x_b)'
    std::vector<GroupPair> pairs_;
};

/// Same value as penalized_objective with S, using a prebuilt kernel.
double penalized_objective(const SurvivalDataset& data, const ModelParams& p, const PenaltyKernel& kernel,
                           double gamma);

/// Loglik and scores from a single pass over the data.
struct ModelEvaluation {
    double loglik;
    LinearRiskScores scores;
};
ModelEvaluation evaluate_model(const SurvivalDataset& data, const ModelParams& p);

}  // namespace hazclust
