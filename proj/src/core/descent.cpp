#include "descent.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "errors.hpp"
#include "optim.hpp"

namespace hazclust {

namespace {

void validate_config(const SurvivalDataset& data, const FitConfig& cfg) {
    const int n = data.num_units();
    if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) fail(ErrorKind::Config, "gamma must be >= 0");
    if (!(cfg.lambda0 > 0.0)) fail(ErrorKind::Config, "lambda0 must be > 0");
    if (!(cfg.tol_s > 0.0) || !(cfg.tol_ll > 0.0)) fail(ErrorKind::Config, "tolerances must be > 0");
    if (cfg.maxit < 1 || cfg.maxit_inner < 1) fail(ErrorKind::Config, "iteration limits must be >= 1");
    if (cfg.gamma > 0.0) {
        if (cfg.C < 1 || cfg.C >= n) fail(ErrorKind::Config, "C must satisfy 1 <= C < N");
        if (cfg.k < 1 || cfg.k > n - 2) fail(ErrorKind::Config, "k must satisfy 1 <= k <= N-2");
    }
}

}  // namespace

Eigen::VectorXd pack_params(const ModelParams& p) {
    const auto base = p.baseline.params();
    const auto d = p.beta.size();
    Eigen::VectorXd v(d + static_cast<Eigen::Index>(base.size()) + 1);
    v.head(d) = p.beta;
    for (std::size_t j = 0; j < base.size(); ++j) v[d + static_cast<Eigen::Index>(j)] = std::log(base[j]);
    v[v.size() - 1] = std::log(p.frailty.theta());
    return v;
}

ModelParams unpack_params(const Eigen::VectorXd& v, const ModelParams& like) {
    const auto d = like.beta.size();
    const auto nb = static_cast<Eigen::Index>(like.baseline.num_params());
    std::vector<double> base(static_cast<std::size_t>(nb));
    for (Eigen::Index j = 0; j < nb; ++j) base[static_cast<std::size_t>(j)] = std::exp(v[d + j]);
    return ModelParams{v.head(d), BaselineHazard::from_params(like.baseline.family(), base),
                       FrailtyFamily(like.frailty.kind(), std::exp(v[d + nb]))};
}

ModelParams default_params(const SurvivalDataset& data, BaselineFamily baseline, FrailtyKind frailty) {
    int events = 0;
    for (int s : data.status()) events += s;
    const double rate = std::max(events, 1) / data.time().sum();
    auto base = baseline == BaselineFamily::Weibull ? BaselineHazard::weibull(1.0, rate)
                                                    : BaselineHazard::exponential(rate);
    return ModelParams{Eigen::VectorXd::Zero(data.num_covariates()), base, FrailtyFamily(frailty, 1.0)};
}

std::pair<ModelParams, SimilarityState> init_state(const SurvivalDataset& data, const FitConfig& cfg) {
    validate_config(data, cfg);
    const int n = data.num_units();

    ModelParams params = default_params(data, cfg.baseline, cfg.frailty);
    if (cfg.initial_params) {
        if (cfg.initial_params->beta.size() != data.num_covariates()) {
            fail(ErrorKind::Config, "initial beta has " + std::to_string(cfg.initial_params->beta.size()) +
                                        " entries, expected " + std::to_string(data.num_covariates()));
        }
        if (cfg.initial_params->baseline.family() != cfg.baseline ||
            cfg.initial_params->frailty.kind() != cfg.frailty) {
            fail(ErrorKind::Config, "initial parameters do not match the configured model families");
        }
        params = *cfg.initial_params;
    }

    SimilarityState state;
    state.k = cfg.k;
    state.C = cfg.C;
    state.gamma = cfg.gamma;
    state.lambda = cfg.lambda0;
    if (cfg.initial_S) {
        if (cfg.initial_S->rows() != n || cfg.initial_S->cols() != n) {
            fail(ErrorKind::Config, "initial S must be " + std::to_string(n) + "x" + std::to_string(n));
        }
        validate_similarity(*cfg.initial_S);
        state.S = *cfg.initial_S;
    } else if (n >= 2) {
        state.S = uniform_similarity(n);
    }
    return {std::move(params), std::move(state)};
}

ParamUpdate update_params(const SurvivalDataset& data, const ModelParams& start, const SimilarityMatrix& S,
                          double gamma, int maxit_inner, std::uint64_t seed) {
    std::optional<PenaltyKernel> kernel;
    if (gamma > 0.0) kernel.emplace(data, S);
    const Objective objective = [&](const Eigen::VectorXd& v) {
        ModelParams p = unpack_params(v, start);
        if (!kernel) return penalized_objective(data, p, S, 0.0);
        return penalized_objective(data, p, *kernel, gamma);
    };

    const Eigen::VectorXd x0 = pack_params(start);
    ParamUpdate out{start, objective(x0), 0.0, 0, false, false};
    if (!std::isfinite(out.objective_entry)) {
        fail(ErrorKind::Numerical, "penalized objective is not finite at the starting parameters");
    }

    MinimizeOptions opts;
    opts.max_iterations = maxit_inner;
    MinimizeResult best = minimize_bfgs(objective, x0, opts);
    out.iterations = best.iterations;

    if (best.line_search_failed && !best.converged) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> jitter(0.0, 0.05);
        Eigen::VectorXd x1 = best.x;
        for (Eigen::Index i = 0; i < x1.size(); ++i) x1[i] += jitter(rng);
        MinimizeResult retry = minimize_bfgs(objective, x1, opts);
        out.iterations += retry.iterations;
        out.restarted = true;
        if (retry.value < best.value) best = std::move(retry);
    }

    out.converged = best.converged;
    out.objective_exit = best.value;
    out.params = unpack_params(best.x, start);
    return out;
}

double adapt_lambda(double lambda, int components, int C) {
    if (components < C) return lambda * 1.2;
    if (components > C) return lambda / 1.2;
    return lambda;
}

FitResult fit(const SurvivalDataset& data, const FitConfig& cfg, const IterationObserver& observer) {
    auto [params, state] = init_state(data, cfg);
    const int n = data.num_units();

    FitResult res{params, 0.0, {}, {}, state, {}, 0, 0, {}, false, false, 0.0, false, {}};

    if (cfg.gamma == 0.0) {
        // Penalty and graph constraints vanish: a single frailty-model fit.
        IterationRecord rec;
        rec.iteration = 1;
        try {
            const ParamUpdate upd = update_params(data, params, state.S, 0.0, cfg.maxit_inner, cfg.seed);
            res.params = upd.params;
            res.converged = upd.converged;
            rec.objective_entry = upd.objective_entry;
            rec.objective_exit = upd.objective_exit;
        } catch (const Error& e) {
            res.message = e.what();
        }
        const auto eval = evaluate_model(data, res.params);
        res.loglik = eval.loglik;
        res.eta = eval.scores.eta;
        res.frailty = eval.scores.log_frailty.array().exp();
        res.labels.assign(static_cast<std::size_t>(n), 1);
        res.n_clusters = 1;
        res.iterations = 1;
        rec.loglik = res.loglik;
        rec.components = 1;
        res.trace.push_back(rec);
        return res;
    }

    double lambda = cfg.lambda0;
    double loglik_prev = marginal_loglik(data, params);
    Eigen::VectorXd eta;
    LinearRiskScores scores;

    double best_silhouette = -std::numeric_limits<double>::infinity();
    std::vector<int> best_labels;
    int best_count = 0;
    Components comps;

    for (int it = 1; it <= cfg.maxit; ++it) {
        IterationRecord rec;
        rec.iteration = it;
        try {
            const SpectralEmbedding emb = spectral_embed(laplacian(state.S), cfg.C);

            const ParamUpdate upd =
                update_params(data, params, state.S, cfg.gamma, cfg.maxit_inner, cfg.seed + static_cast<unsigned>(it));
            params = upd.params;
            rec.objective_entry = upd.objective_entry;
            rec.objective_exit = upd.objective_exit;

            auto eval = evaluate_model(data, params);
            if (!std::isfinite(eval.loglik)) fail(ErrorKind::Numerical, "log-likelihood diverged");
            scores = std::move(eval.scores);

            SimilarityUpdate upd_s = update_similarity(scores.eta, emb.F, lambda, cfg.k);
            rec.lambda = lambda;
            rec.mu = upd_s.mu;
            rec.mean_abs_change = mean_abs_change(upd_s.S, state.S);
            state.S = std::move(upd_s.S);
            state.mu = upd_s.mu;

            comps = connected_components(state.S);
            rec.components = comps.count;
            if (it == 1) {
                if (state.mu > 0.0) lambda = state.mu;
            } else {
                lambda = adapt_lambda(lambda, comps.count, cfg.C);
            }
            state.lambda = lambda;

            rec.loglik = eval.loglik;
            rec.penalty = cfg.gamma * similarity_penalty(scores.eta, state.S);
            const double dll = std::abs(eval.loglik - loglik_prev);
            loglik_prev = eval.loglik;

            const SilhouetteReport sil = silhouette(scores.eta, comps.labels);
            rec.silhouette = sil.mean;
            rec.silhouette_defined = sil.defined;
            if (sil.defined && sil.mean > best_silhouette) {
                best_silhouette = sil.mean;
                best_labels = comps.labels;
                best_count = comps.count;
            }

            res.trace.push_back(rec);
            res.iterations = it;
            if (observer) observer(it, state.S, comps);

            if (rec.mean_abs_change < cfg.tol_s && dll < cfg.tol_ll && comps.count == cfg.C) {
                res.converged = true;
                break;
            }
        } catch (const Error& e) {
            res.message = e.what();
            break;
        }
    }

    res.params = params;
    const auto eval = evaluate_model(data, params);
    res.loglik = eval.loglik;
    res.eta = eval.scores.eta;
    res.frailty = eval.scores.log_frailty.array().exp();
    res.state = state;

    if (res.converged || best_labels.empty()) {
        if (comps.labels.empty()) comps = connected_components(state.S);
        res.labels = comps.labels;
        res.n_clusters = comps.count;
    } else {
        res.labels = best_labels;
        res.n_clusters = best_count;
        res.labels_from_best_iterate = true;
    }
    const SilhouetteReport sil = silhouette(res.eta, res.labels);
    res.silhouette = sil.mean;
    res.silhouette_defined = sil.defined;
    return res;
}

}  // namespace hazclust
