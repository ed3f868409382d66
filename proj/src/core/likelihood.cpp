#include "likelihood.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"

namespace hazclust {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_dims(const SurvivalDataset& data, const ModelParams& p) {
    if (p.beta.size() != data.num_covariates()) {
        fail(ErrorKind::InvalidParameter, "beta has " + std::to_string(p.beta.size()) + " entries but data has " +
                                              std::to_string(data.num_covariates()) + " covariates");
    }
}

}  // namespace

ModelEvaluation evaluate_model(const SurvivalDataset& data, const ModelParams& p) {
    check_dims(data, p);
    const Eigen::VectorXd lp = data.covariates() * p.beta;
    const Eigen::VectorXd& y = data.time();
    const auto& status = data.status();

    ModelEvaluation out{0.0, {lp, Eigen::VectorXd(data.num_groups())}};
    bool finite = lp.allFinite();
    for (int g = 0; g < data.num_groups() && finite; ++g) {
        double event_term = 0.0;
        double exposure = 0.0;
        for (int i : data.members(g)) {
            if (status[static_cast<std::size_t>(i)] == 1) event_term += log_hazard(p.baseline, y[i]) + lp[i];
            exposure += cum_hazard(p.baseline, y[i]) * std::exp(lp[i]);
        }
        if (!std::isfinite(exposure) || !std::isfinite(event_term)) {
            finite = false;
            break;
        }
        const int d = data.events(g);
        out.loglik += event_term + log_laplace_deriv(p.frailty, d, exposure);
        out.scores.log_frailty[g] = log_frailty_prediction(p.frailty, d, exposure);
    }
    if (!finite || !std::isfinite(out.loglik) || !out.scores.log_frailty.allFinite()) {
        out.loglik = kNegInf;
        return out;
    }
    for (int i = 0; i < data.num_units(); ++i) out.scores.eta[i] += out.scores.log_frailty[data.group_of(i)];
    return out;
}

double marginal_loglik(const SurvivalDataset& data, const ModelParams& p) { return evaluate_model(data, p).loglik; }

LinearRiskScores risk_scores(const SurvivalDataset& data, const ModelParams& p) {
    auto eval = evaluate_model(data, p);
    if (!std::isfinite(eval.loglik)) fail(ErrorKind::Numerical, "risk scores are not finite at these parameters");
    return std::move(eval.scores);
}

double similarity_penalty(const Eigen::VectorXd& eta, const SimilarityMatrix& S) {
    double total = 0.0;
    for (Eigen::Index a = 0; a < S.outerSize(); ++a) {
        double row = 0.0;
        for (SimilarityMatrix::InnerIterator it(S, a); it; ++it) {
            const double diff = eta[a] - eta[it.col()];
            row += it.value() * diff * diff;
        }
        total += row;
    }
    return total;
}

double penalized_objective(const SurvivalDataset& data, const ModelParams& p, const SimilarityMatrix& S,
                           double gamma) {
    const auto eval = evaluate_model(data, p);
    if (!std::isfinite(eval.loglik)) return std::numeric_limits<double>::infinity();
    if (gamma == 0.0) return -eval.loglik;
    return -eval.loglik + gamma * similarity_penalty(eval.scores.eta, S);
}

PenaltyKernel::PenaltyKernel(const SurvivalDataset& data, const SimilarityMatrix& S) {
    const auto& x = data.covariates();
    const Eigen::Index d = x.cols();
    const int m = data.num_groups();
    quad_ = Eigen::MatrixXd::Zero(d, d);
    std::vector<int> slot(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), -1);
    Eigen::VectorXd diff(d);
    for (Eigen::Index a = 0; a < S.outerSize(); ++a) {
        const int g = data.group_of(static_cast<int>(a));
        for (SimilarityMatrix::InnerIterator it(S, a); it; ++it) {
            const double s = it.value();
            diff = x.row(a) - x.row(it.col());
            quad_.selfadjointView<Eigen::Lower>().rankUpdate(diff, s);
            const int h = data.group_of(static_cast<int>(it.col()));
            if (g == h) continue;
            int& idx = slot[static_cast<std::size_t>(g) * static_cast<std::size_t>(m) + static_cast<std::size_t>(h)];
            if (idx < 0) {
                idx = static_cast<int>(pairs_.size());
                pairs_.push_back({g, h, 0.0, Eigen::VectorXd::Zero(d)});
            }
            auto& pr = pairs_[static_cast<std::size_t>(idx)];
            pr.weight += s;
            pr.dx += s * diff;
        }
    }
    quad_ = quad_.selfadjointView<Eigen::Lower>();
}

double PenaltyKernel::operator()(const Eigen::VectorXd& beta, const Eigen::VectorXd& log_frailty) const {
    double total = beta.dot(quad_ * beta);
    for (const auto& pr : pairs_) {
        const double dl = log_frailty[pr.g] - log_frailty[pr.h];
        total += dl * (2.0 * pr.dx.dot(beta) + pr.weight * dl);
    }
    return total;
}

double penalized_objective(const SurvivalDataset& data, const ModelParams& p, const PenaltyKernel& kernel,
                           double gamma) {
    const auto eval = evaluate_model(data, p);
    if (!std::isfinite(eval.loglik)) return std::numeric_limits<double>::infinity();
    if (gamma == 0.0) return -eval.loglik;
    return -eval.loglik + gamma * kernel(p.beta, eval.scores.log_frailty);
}

}  // namespace hazclust
