#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "errors.hpp"
#include "likelihood.hpp"
#include "oracles.hpp"
#include "simgraph.hpp"
#include "simulate.hpp"

using namespace hazclust;

namespace {

using oracle::random_micro;

double quadrature_loglik(const SurvivalDataset& data, double rho, double xi, const Eigen::VectorXd& beta, double theta,
                         bool gamma_law) {
    return oracle::quadrature_loglik(data, rho, xi, beta, theta,
                                     gamma_law ? FrailtyKind::Gamma : FrailtyKind::InverseGaussian);
}

ModelParams weibull_gamma(double rho, double xi, Eigen::VectorXd beta, double theta, FrailtyKind kind = FrailtyKind::Gamma) {
    return {std::move(beta), BaselineHazard::weibull(rho, xi), FrailtyFamily(kind, theta)};
}

}  // namespace

TEST_CASE("marginal_loglik matches quadrature on micro-datasets") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rho_d(0.6, 2.5), xi_d(0.05, 0.5), theta_d(0.1, 2.0), b_d(-1.0, 1.0);
    std::uniform_int_distribution<int> groups_d(1, 3);
    for (int rep = 0; rep < 25; ++rep) {
        const auto data = random_micro(rng, groups_d(rng), 5, 2);
        const Eigen::Vector2d beta(b_d(rng), b_d(rng));
        const double rho = rho_d(rng), xi = xi_d(rng), theta = theta_d(rng);
        for (bool gamma_law : {true, false}) {
            const auto p = weibull_gamma(rho, xi, beta, theta, gamma_law ? FrailtyKind::Gamma : FrailtyKind::InverseGaussian);
            const double ours = marginal_loglik(data, p);
            const double oracle = quadrature_loglik(data, rho, xi, beta, theta, gamma_law);
            CHECK(ours == doctest::Approx(oracle).epsilon(1e-10));
        }
    }
}

TEST_CASE("marginal_loglik without frailty reduces to the independent Weibull likelihood") {
    std::mt19937_64 rng(3);
    const auto data = random_micro(rng, 3, 5, 1);
    const Eigen::VectorXd beta = Eigen::VectorXd::Constant(1, 0.4);
    const auto p = weibull_gamma(1.5, 0.2, beta, 1e-8);
    double indep = 0.0;
    for (int i = 0; i < data.num_units(); ++i) {
        const double t = data.time()[i];
        const double lin = data.covariates()(i, 0) * 0.4;
        indep += -std::pow(0.2 * t, 1.5) * std::exp(lin);
        if (data.status()[static_cast<std::size_t>(i)]) indep += std::log(1.5 * std::pow(0.2, 1.5) * std::pow(t, 0.5)) + lin;
    }
    CHECK(marginal_loglik(data, p) == doctest::Approx(indep).epsilon(1e-6));
}

TEST_CASE("beta dimension mismatch is an invalid parameter") {
    std::mt19937_64 rng(3);
    const auto data = random_micro(rng, 2, 3, 2);
    const auto p = weibull_gamma(1.5, 0.2, Eigen::VectorXd::Zero(1), 0.5);
    CHECK_THROWS_AS(marginal_loglik(data, p), Error);
}

TEST_CASE("risk scores") {
    std::mt19937_64 rng(11);
    auto data = random_micro(rng, 1, 5, 1);
    const auto p0 = weibull_gamma(1.2, 0.1, Eigen::VectorXd::Zero(1), 0.5);
    const auto sc = risk_scores(data, p0);
    for (int i = 0; i < data.num_units(); ++i) CHECK(sc.eta[i] == doctest::Approx(sc.log_frailty[0]));

    // Same covariates in the same group give the same score.
    Eigen::MatrixXd x(3, 1);
    x << 0.3, 0.3, -1.0;
    const SurvivalDataset twin({"a", "b", "c"}, {"g", "g", "g"}, Eigen::Vector3d(1.0, 2.0, 3.0), {1, 0, 1}, x, {"x"});
    const auto s2 = risk_scores(twin, weibull_gamma(1.2, 0.1, Eigen::VectorXd::Constant(1, 0.8), 0.5));
    CHECK(s2.eta[0] == s2.eta[1]);
    CHECK(pairwise_distance(s2, 0, 0) == 0.0);

    // Scores are x'beta plus the log posterior frailty of the group.
    const auto p = weibull_gamma(1.2, 0.1, Eigen::VectorXd::Constant(1, 0.8), 0.5);
    const auto s3 = risk_scores(twin, p);
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += std::pow(0.1 * twin.time()[i], 1.2) * std::exp(0.8 * x(i, 0));
    const double lu = std::log((2.0 + 2.0) / (2.0 + s));  // Gamma: (1/theta + d) / (1/theta + s)
    CHECK(s3.log_frailty[0] == doctest::Approx(lu).epsilon(1e-12));
    CHECK(s3.eta[2] == doctest::Approx(-0.8 + lu).epsilon(1e-12));

    LinearRiskScores manual;
    manual.eta = Eigen::Vector2d(1.0, -1.0);
    CHECK(pairwise_distance(manual, 0, 1) == doctest::Approx(4.0));
}

TEST_CASE("risk scores at the true parameters cluster around the simulated means") {
    SimConfig sc;
    sc.seed = 5;
    const auto sim = generate(sc);
    const auto p = weibull_gamma(sc.shape, sc.scale, Eigen::VectorXd::Constant(1, sc.beta), sc.theta);
    const auto scores = risk_scores(sim.data, p);
    for (int i = 0; i < sim.data.num_units(); ++i) {
        const double mean = sc.cluster_means[static_cast<std::size_t>(sim.true_cluster[static_cast<std::size_t>(i)] - 1)];
        CHECK(std::abs(scores.eta[i] - mean) < 4.0);
    }
}

TEST_CASE("penalty, objective and the penalty kernel") {
    std::mt19937_64 rng(21);
    const auto data = random_micro(rng, 3, 5, 2);
    const int n = data.num_units();
    // Random row-stochastic S with zero diagonal.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Eigen::Triplet<double>> trip;
    for (int a = 0; a < n; ++a) {
        std::vector<double> w(static_cast<std::size_t>(n));
        double sum = 0.0;
        for (int b = 0; b < n; ++b) {
            w[static_cast<std::size_t>(b)] = (a == b || u(rng) < 0.4) ? 0.0 : u(rng);
            sum += w[static_cast<std::size_t>(b)];
        }
        if (sum == 0.0) {
            w[static_cast<std::size_t>((a + 1) % n)] = 1.0;
            sum = 1.0;
        }
        for (int b = 0; b < n; ++b) {
            if (w[static_cast<std::size_t>(b)] > 0) trip.emplace_back(a, b, w[static_cast<std::size_t>(b)] / sum);
        }
    }
    SimilarityMatrix S(n, n);
    S.setFromTriplets(trip.begin(), trip.end());

    const auto p = weibull_gamma(1.3, 0.15, Eigen::Vector2d(0.3, -0.7), 0.8);
    const auto scores = risk_scores(data, p);
    double direct = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double diff = scores.eta[a] - scores.eta[b];
            direct += S.coeff(a, b) * diff * diff;
        }
    }
    CHECK(similarity_penalty(scores.eta, S) == doctest::Approx(direct).epsilon(1e-12));
    const PenaltyKernel kernel(data, S);
    CHECK(kernel(p.beta, scores.log_frailty) == doctest::Approx(direct).epsilon(1e-10));

    CHECK(penalized_objective(data, p, S, 0.0) == -marginal_loglik(data, p));
    CHECK(penalized_objective(data, p, S, 0.3) == doctest::Approx(-marginal_loglik(data, p) + 0.3 * direct).epsilon(1e-12));
    CHECK(penalized_objective(data, p, kernel, 0.3) == doctest::Approx(penalized_objective(data, p, S, 0.3)).epsilon(1e-12));
}
