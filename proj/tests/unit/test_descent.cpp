#include <doctest.h>

#include <cmath>

#include "descent.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "optim.hpp"
#include "simulate.hpp"

using namespace hazclust;

namespace {

SurvivalDataset tiny_dataset() {
    Eigen::MatrixXd x(4, 1);
    x << 0.1, -0.4, 1.2, 0.3;
    return SurvivalDataset({"1", "2", "3", "4"}, {"a", "a", "b", "b"}, Eigen::Vector4d(1.0, 2.0, 3.0, 4.0), {1, 0, 1, 1},
                           x, {"x"});
}

const SimulatedDataset& default_sim() {
    static const SimulatedDataset sim = [] {
        SimConfig sc;
        sc.seed = 1;
        return generate(sc);
    }();
    return sim;
}

}  // namespace

TEST_CASE("adapt_lambda") {
    CHECK(adapt_lambda(10.0, 2, 3) == doctest::Approx(12.0));
    CHECK(adapt_lambda(10.0, 4, 3) == doctest::Approx(10.0 / 1.2));
    CHECK(adapt_lambda(10.0, 3, 3) == 10.0);
}

TEST_CASE("pack and unpack are inverse") {
    const ModelParams p{Eigen::Vector2d(0.3, -1.1), BaselineHazard::weibull(2.5, 0.01),
                        FrailtyFamily(FrailtyKind::InverseGaussian, 0.7)};
    const auto v = pack_params(p);
    CHECK(v.size() == 5);
    const auto q = unpack_params(v, p);
    CHECK((q.beta - p.beta).norm() < 1e-15);
    CHECK(q.baseline.shape() == doctest::Approx(2.5));
    CHECK(q.baseline.scale() == doctest::Approx(0.01));
    CHECK(q.frailty.theta() == doctest::Approx(0.7));
    CHECK(q.frailty.kind() == FrailtyKind::InverseGaussian);
}

TEST_CASE("init_state") {
    const auto data = tiny_dataset();
    FitConfig cfg;
    cfg.gamma = 1.0;
    cfg.k = 2;
    cfg.C = 2;
    const auto [p, state] = init_state(data, cfg);
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) CHECK(state.S.coeff(a, b) == doctest::Approx(a == b ? 0.0 : 1.0 / 3.0));
    }
    CHECK(p.beta.size() == 1);
    CHECK(p.beta[0] == 0.0);

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 4);
    d(0, 1) = d(1, 0) = d(2, 3) = d(3, 2) = 1.0;
    cfg.initial_S = SimilarityMatrix(d.sparseView());
    const auto [p2, state2] = init_state(data, cfg);
    CHECK(Eigen::MatrixXd(state2.S).isApprox(d));

    cfg.initial_params = ModelParams{Eigen::Vector2d(0.0, 0.0), BaselineHazard::weibull(1.0, 0.1),
                                     FrailtyFamily(FrailtyKind::Gamma, 1.0)};
    CHECK_THROWS_AS(init_state(data, cfg), Error);
    cfg.initial_params.reset();
    cfg.k = 3;
    CHECK_THROWS_AS(init_state(data, cfg), Error);
    cfg.k = 2;
    cfg.C = 4;
    CHECK_THROWS_AS(init_state(data, cfg), Error);
}

TEST_CASE("minimize_bfgs on the Rosenbrock function") {
    const Objective f = [](const Eigen::VectorXd& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const auto res = minimize_bfgs(f, Eigen::Vector2d(-1.2, 1.0));
    CHECK(res.value < 1e-8);
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(res.value <= f(Eigen::Vector2d(-1.2, 1.0)));
}

TEST_CASE("update_params at gamma = 0 reaches a stationary point of the likelihood") {
    const auto& sim = default_sim();
    const auto start = default_params(sim.data, BaselineFamily::Weibull, FrailtyKind::Gamma);
    const auto S = uniform_similarity(sim.data.num_units());
    const auto upd = update_params(sim.data, start, S, 0.0, 500);
    CHECK(upd.objective_exit <= upd.objective_entry);
    CHECK(upd.objective_exit == doctest::Approx(-marginal_loglik(sim.data, upd.params)).epsilon(1e-12));
    const Objective nll = [&](const Eigen::VectorXd& v) { return -marginal_loglik(sim.data, unpack_params(v, start)); };
    const Eigen::VectorXd g = fd_gradient(nll, pack_params(upd.params), 1e-6);
    CHECK(g.cwiseAbs().maxCoeff() < 1e-2);
    CHECK(std::abs(upd.params.beta[0] - std::log(2.0)) < 0.15);
    CHECK(std::abs(upd.params.baseline.shape() - 2.5) < 0.5);
}

TEST_CASE("update_params never increases the penalized objective") {
    const auto& sim = default_sim();
    const auto start = default_params(sim.data, BaselineFamily::Weibull, FrailtyKind::Gamma);
    const auto S = uniform_similarity(sim.data.num_units());
    for (double gamma : {1e-4, 0.1}) {
        const auto upd = update_params(sim.data, start, S, gamma, 500);
        CHECK(upd.objective_exit <= upd.objective_entry + 1e-8);
        CHECK(upd.objective_exit == doctest::Approx(penalized_objective(sim.data, upd.params, S, gamma)).epsilon(1e-10));
    }
}

TEST_CASE("fit at gamma = 0 is a single frailty-model fit") {
    FitConfig cfg;
    cfg.gamma = 0.0;
    const auto res = fit(default_sim().data, cfg);
    CHECK(res.iterations == 1);
    CHECK(res.n_clusters == 1);
    CHECK(res.trace.size() == 1);
    CHECK_FALSE(res.silhouette_defined);
    CHECK(res.message.empty());
}

TEST_CASE("fit recovers the simulated clusters and is deterministic") {
    const auto& sim = default_sim();
    FitConfig cfg;
    cfg.gamma = 1e-4;
    cfg.k = 50;
    cfg.C = 3;
    cfg.tol_s = 1e-2;
    cfg.tol_ll = 1.0;
    cfg.maxit = 200;
    int observed = 0;
    const auto res = fit(sim.data, cfg, [&](int it, const SimilarityMatrix& S, const Components& comps) {
        ++observed;
        CHECK(it == observed);
        CHECK(comps.count == connected_components(S).count);
    });
    CHECK(res.converged);
    CHECK(res.n_clusters == 3);
    CHECK(observed == res.iterations);
    CHECK(static_cast<int>(res.trace.size()) == res.iterations);
    CHECK(accuracy(sim.true_cluster, res.labels) > 0.99);
    CHECK(res.silhouette_defined);
    for (const auto& rec : res.trace) CHECK(rec.objective_exit <= rec.objective_entry + 1e-8);

    const auto again = fit(sim.data, cfg);
    CHECK(again.labels == res.labels);
    CHECK(again.loglik == res.loglik);
    CHECK(again.iterations == res.iterations);
}
