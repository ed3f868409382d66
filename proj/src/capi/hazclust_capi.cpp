#include "hazclust/hazclust.h"

#include <cmath>
#include <exception>
#include <limits>
#include <new>
#include <optional>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "descent.hpp"
#include "errors.hpp"
#include "frailty.hpp"
#include "io.hpp"
#include "simulate.hpp"

struct hc_dataset {
    hazclust::SurvivalDataset data;
    std::optional<hazclust::GroundTruth> truth;
};

struct hc_fit_result {
    hazclust::FitResult fit;
    hazclust::RunConfig cfg;
};

namespace {

thread_local std::string last_error;

hc_status status_of(hazclust::ErrorKind k) {
    using hazclust::ErrorKind;
    switch (k) {
        case ErrorKind::InvalidParameter:
        case ErrorKind::Domain: return HC_ERR_INVALID_ARGUMENT;
        case ErrorKind::Config: return HC_ERR_CONFIG;
        case ErrorKind::Schema: return HC_ERR_SCHEMA;
        case ErrorKind::Numerical: return HC_ERR_NUMERICAL;
        case ErrorKind::Io: return HC_ERR_IO;
    }
    return HC_ERR_INTERNAL;
}

template <class F>
hc_status guard(F&& body) {
    last_error.clear();
    try {
        body();
        return HC_OK;
    } catch (const hazclust::Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return HC_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return HC_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return HC_ERR_INTERNAL;
    }
}

void require(bool ok, const char* what) {
    if (!ok) hazclust::fail(hazclust::ErrorKind::InvalidParameter, what);
}

hazclust::RunConfig resolve(const hc_run_options* o) {
    require(o != nullptr, "options must not be NULL");
    hazclust::RunConfig cfg = o->config_path ? hazclust::load_config(o->config_path) : hazclust::RunConfig{};
    if (o->input) cfg.input = o->input;
    if (o->output_dir) cfg.output_dir = o->output_dir;
    if (o->has_seed) cfg.seed = o->seed;
    if (o->threads >= 0) cfg.threads = o->threads;
    if (o->emit_similarity >= 0) cfg.emit_similarity = o->emit_similarity != 0;
    cfg.validate();
    return cfg;
}

hazclust::RunConfig config_from(const hc_fit_options& o) {
    hazclust::RunConfig cfg;
    cfg.baseline = o.baseline == HC_BASELINE_EXPONENTIAL ? hazclust::BaselineFamily::Exponential
                                                         : hazclust::BaselineFamily::Weibull;
    cfg.frailty = o.frailty == HC_FRAILTY_INVERSE_GAUSSIAN ? hazclust::FrailtyKind::InverseGaussian
                                                           : hazclust::FrailtyKind::Gamma;
    cfg.gamma = o.gamma;
    cfg.C = o.C;
    cfg.k = o.k;
    cfg.lambda0 = o.lambda0;
    cfg.tol_s = o.tol_s;
    cfg.tol_ll = o.tol_ll;
    cfg.maxit = o.maxit;
    cfg.maxit_inner = o.maxit_inner;
    cfg.seed = o.seed;
    return cfg;
}

}  // namespace

extern "C" {

const char* hc_version(void) { return "1.0.0"; }

const char* hc_last_error(void) { return last_error.c_str(); }

const char* hc_status_name(hc_status s) {
    switch (s) {
        case HC_OK: return "ok";
        case HC_ERR_INVALID_ARGUMENT: return "invalid argument";
        case HC_ERR_CONFIG: return "configuration error";
        case HC_ERR_SCHEMA: return "data schema error";
        case HC_ERR_NUMERICAL: return "numerical failure";
        case HC_ERR_IO: return "i/o error";
        case HC_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

hc_status hc_dataset_read_csv(const char* path, hc_dataset** out) {
    return guard([&] {
        require(path && out, "path and out must not be NULL");
        *out = nullptr;
        auto loaded = hazclust::read_dataset(path);
        *out = new hc_dataset{std::move(loaded.data), std::move(loaded.truth)};
    });
}

hc_status hc_dataset_create(size_t n, size_t d, const char* const* unit_ids, const char* const* group_ids,
                            const double* time, const int* status, const double* x,
                            const char* const* covariate_names, hc_dataset** out) {
    return guard([&] {
        require(out != nullptr, "out must not be NULL");
        *out = nullptr;
        require(n > 0 && unit_ids && group_ids && time && status, "unit_ids, group_ids, time and status are required");
        require(d == 0 || (x && covariate_names), "x and covariate_names are required when d > 0");
        std::vector<std::string> units, groups, names;
        Eigen::VectorXd t(static_cast<Eigen::Index>(n));
        std::vector<int> st(status, status + n);
        Eigen::MatrixXd cov(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
        for (size_t i = 0; i < n; ++i) {
            require(unit_ids[i] && group_ids[i], "identifier strings must not be NULL");
            units.emplace_back(unit_ids[i]);
            groups.emplace_back(group_ids[i]);
            t[static_cast<Eigen::Index>(i)] = time[i];
            for (size_t c = 0; c < d; ++c) {
                cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = x[i * d + c];
            }
        }
        for (size_t c = 0; c < d; ++c) {
            require(covariate_names[c] != nullptr, "covariate names must not be NULL");
            names.emplace_back(covariate_names[c]);
        }
        *out = new hc_dataset{hazclust::SurvivalDataset(std::move(units), std::move(groups), std::move(t),
                                                        std::move(st), std::move(cov), std::move(names)),
                              std::nullopt};
    });
}

hc_status hc_dataset_write_csv(const hc_dataset* data, const char* path) {
    return guard([&] {
        require(data && path, "data and path must not be NULL");
        hazclust::write_dataset_file(path, data->data, data->truth ? &*data->truth : nullptr);
    });
}

void hc_dataset_free(hc_dataset* data) { delete data; }

size_t hc_dataset_num_units(const hc_dataset* data) {
    return data ? static_cast<size_t>(data->data.num_units()) : 0;
}
size_t hc_dataset_num_groups(const hc_dataset* data) {
    return data ? static_cast<size_t>(data->data.num_groups()) : 0;
}
size_t hc_dataset_num_covariates(const hc_dataset* data) {
    return data ? static_cast<size_t>(data->data.num_covariates()) : 0;
}

hc_status hc_dataset_true_clusters(const hc_dataset* data, int* out, size_t len) {
    return guard([&] {
        require(data && out, "data and out must not be NULL");
        require(data->truth.has_value(), "dataset carries no ground truth");
        require(len >= data->truth->cluster.size(), "output buffer too small");
        std::copy(data->truth->cluster.begin(), data->truth->cluster.end(), out);
    });
}

hc_status hc_simulate_default(uint64_t seed, int censoring, hc_dataset** out) {
    return guard([&] {
        require(out != nullptr, "out must not be NULL");
        *out = nullptr;
        require(censoring == 0 || censoring == 1, "censoring must be 0 (administrative) or 1 (normal)");
        hazclust::SimConfig sc;
        sc.seed = seed;
        sc.censoring = censoring == 0 ? hazclust::CensoringKind::Administrative : hazclust::CensoringKind::Normal;
        auto sim = hazclust::generate(sc);
        *out = new hc_dataset{std::move(sim.data), hazclust::truth_of(sim)};
    });
}

void hc_fit_options_default(hc_fit_options* o) {
    if (!o) return;
    const hazclust::FitConfig f;
    o->baseline = HC_BASELINE_WEIBULL;
    o->frailty = HC_FRAILTY_GAMMA;
    o->gamma = f.gamma;
    o->C = f.C;
    o->k = f.k;
    o->lambda0 = f.lambda0;
    o->tol_s = f.tol_s;
    o->tol_ll = f.tol_ll;
    o->maxit = f.maxit;
    o->maxit_inner = f.maxit_inner;
    o->seed = f.seed;
}

hc_status hc_fit(const hc_dataset* data, const hc_fit_options* opts, hc_fit_result** out) {
    hc_status st = guard([&] {
        require(data && opts && out, "data, opts and out must not be NULL");
        *out = nullptr;
        hazclust::RunConfig cfg = config_from(*opts);
        cfg.validate();
        auto fr = hazclust::fit(data->data, cfg.fit_config());
        *out = new hc_fit_result{std::move(fr), std::move(cfg)};
    });
    if (st == HC_OK && !(*out)->fit.message.empty()) {
        last_error = (*out)->fit.message;
        return HC_ERR_NUMERICAL;
    }
    return st;
}

void hc_fit_result_free(hc_fit_result* r) { delete r; }

int hc_fit_converged(const hc_fit_result* r) { return r && r->fit.converged ? 1 : 0; }
int hc_fit_iterations(const hc_fit_result* r) { return r ? r->fit.iterations : 0; }
int hc_fit_num_clusters(const hc_fit_result* r) { return r ? r->fit.n_clusters : 0; }
double hc_fit_loglik(const hc_fit_result* r) { return r ? r->fit.loglik : std::numeric_limits<double>::quiet_NaN(); }
double hc_fit_theta(const hc_fit_result* r) {
    return r ? r->fit.params.frailty.theta() : std::numeric_limits<double>::quiet_NaN();
}
double hc_fit_silhouette(const hc_fit_result* r) {
    return r && r->fit.silhouette_defined ? r->fit.silhouette : std::numeric_limits<double>::quiet_NaN();
}
const char* hc_fit_message(const hc_fit_result* r) { return r ? r->fit.message.c_str() : ""; }

hc_status hc_fit_labels(const hc_fit_result* r, int* out, size_t len) {
    return guard([&] {
        require(r && out, "result and out must not be NULL");
        require(len >= r->fit.labels.size(), "output buffer too small");
        std::copy(r->fit.labels.begin(), r->fit.labels.end(), out);
    });
}

hc_status hc_fit_beta(const hc_fit_result* r, double* out, size_t len) {
    return guard([&] {
        require(r && out, "result and out must not be NULL");
        const auto& b = r->fit.params.beta;
        require(len >= static_cast<size_t>(b.size()), "output buffer too small");
        for (Eigen::Index i = 0; i < b.size(); ++i) out[i] = b[i];
    });
}

hc_status hc_fit_baseline(const hc_fit_result* r, double* out, size_t len, size_t* count) {
    return guard([&] {
        require(r && out, "result and out must not be NULL");
        const auto p = r->fit.params.baseline.params();
        require(len >= p.size(), "output buffer too small");
        std::copy(p.begin(), p.end(), out);
        if (count) *count = p.size();
    });
}

hc_status hc_fit_risk_scores(const hc_fit_result* r, double* out, size_t len) {
    return guard([&] {
        require(r && out, "result and out must not be NULL");
        const auto& eta = r->fit.eta;
        require(len >= static_cast<size_t>(eta.size()), "output buffer too small");
        for (Eigen::Index i = 0; i < eta.size(); ++i) out[i] = eta[i];
    });
}

hc_status hc_fit_write(const hc_fit_result* r, const hc_dataset* data, const char* dir, int emit_similarity) {
    return guard([&] {
        require(r && data && dir, "result, data and dir must not be NULL");
        require(static_cast<int>(r->fit.labels.size()) == data->data.num_units(),
                "dataset does not match the fitted result");
        const std::string d(dir);
        hazclust::ensure_directory(d);
        {
            auto out = hazclust::open_output(d + "/fit_report.json");
            out << hazclust::fit_report(data->data, r->cfg, r->fit, data->truth ? &*data->truth : nullptr);
        }
        {
            auto out = hazclust::open_output(d + "/labels.csv");
            hazclust::write_labels(out, data->data, r->fit.labels);
        }
        if (emit_similarity && r->fit.state.S.rows() > 0) {
            auto out = hazclust::open_output(d + "/similarity.csv");
            hazclust::write_similarity(out, data->data, r->fit.state.S);
        }
    });
}

hc_status hc_log_laplace_deriv(hc_frailty family, double theta, int k, double s, double* out) {
    return guard([&] {
        require(out != nullptr, "out must not be NULL");
        const auto kind = family == HC_FRAILTY_INVERSE_GAUSSIAN ? hazclust::FrailtyKind::InverseGaussian
                                                                : hazclust::FrailtyKind::Gamma;
        *out = hazclust::log_laplace_deriv(hazclust::FrailtyFamily(kind, theta), k, s);
    });
}

void hc_run_options_default(hc_run_options* o) {
    if (!o) return;
    o->config_path = nullptr;
    o->input = nullptr;
    o->output_dir = nullptr;
    o->has_seed = 0;
    o->seed = 0;
    o->threads = -1;
    o->emit_similarity = -1;
}

hc_status hc_run_simulate(const hc_run_options* o) {
    return guard([&] { hazclust::cmd_simulate(resolve(o)); });
}
hc_status hc_run_fit(const hc_run_options* o) {
    return guard([&] { hazclust::cmd_fit(resolve(o)); });
}
hc_status hc_run_benchmark(const hc_run_options* o) {
    return guard([&] { hazclust::cmd_benchmark(resolve(o)); });
}
hc_status hc_run_scan(const hc_run_options* o) {
    return guard([&] { hazclust::cmd_scan(resolve(o)); });
}

}  // extern "C"
