#include "simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <random>
#include <string>

#include "errors.hpp"

namespace hazclust {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr double kMinCensorTime = 1e-6;

}  // namespace

std::string_view to_string(CensoringKind c) { return c == CensoringKind::Administrative ? "administrative" : "normal"; }

CensoringKind parse_censoring(std::string_view name) {
    if (name == "administrative" || name == "admin") return CensoringKind::Administrative;
    if (name == "normal" || name == "gaussian") return CensoringKind::Normal;
    fail(ErrorKind::Config, "unknown censoring mechanism '" + std::string(name) + "' (expected administrative|normal)");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

void SimConfig::validate() const {
    if (groups < 1) fail(ErrorKind::Config, "simulation.groups must be >= 1");
    if (units_per_group < 1) fail(ErrorKind::Config, "simulation.units_per_group must be >= 1");
    if (!(theta > 0.0)) fail(ErrorKind::Config, "simulation.theta must be > 0");
    if (cluster_means.empty()) fail(ErrorKind::Config, "simulation.cluster_means must not be empty");
    if (!(sigma >= 0.0)) fail(ErrorKind::Config, "simulation.sigma must be >= 0");
    if (beta == 0.0 || !std::isfinite(beta)) fail(ErrorKind::Config, "simulation.beta must be finite and nonzero");
    if (!(shape > 0.0) || !(scale > 0.0)) fail(ErrorKind::Config, "simulation baseline parameters must be > 0");
    if (!(admin_time > 0.0)) fail(ErrorKind::Config, "simulation.admin_time must be > 0");
    if (!(censor_sd >= 0.0)) fail(ErrorKind::Config, "simulation.censor_sd must be >= 0");
}

SimulatedDataset generate(const SimConfig& cfg) {
    cfg.validate();
    const auto baseline = BaselineHazard::weibull(cfg.shape, cfg.scale);
    const int C = static_cast<int>(cfg.cluster_means.size());
    const int n = cfg.groups * cfg.units_per_group;

    std::mt19937_64 latent(derive_seed(cfg.seed, 0));
    std::mt19937_64 censor(derive_seed(cfg.seed, 1));
    std::gamma_distribution<double> frailty_draw(1.0 / cfg.theta, cfg.theta);
    std::uniform_int_distribution<int> cluster_draw(0, C - 1);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> censor_draw(cfg.censor_mean, cfg.censor_sd);

    SimulatedDataset out;
    std::vector<std::string> unit_ids, group_ids;
    Eigen::VectorXd time(n);
    std::vector<int> status(static_cast<std::size_t>(n));
    Eigen::MatrixXd x(n, 1);
    out.true_cluster.reserve(static_cast<std::size_t>(n));
    out.true_frailty.reserve(static_cast<std::size_t>(n));
    out.true_eta.reserve(static_cast<std::size_t>(n));

    int unit = 0;
    for (int g = 0; g < cfg.groups; ++g) {
        const double u = frailty_draw(latent);
        const double log_u = std::log(u);
        for (int i = 0; i < cfg.units_per_group; ++i, ++unit) {
            const int z = cluster_draw(latent);
            const double eta = cfg.cluster_means[static_cast<std::size_t>(z)] + cfg.sigma * noise(latent);
            double v = 0.0;
            while (v == 0.0) v = unif(latent);
            const double t = inverse_cum_hazard(baseline, -std::log(v) / std::exp(eta));

            double limit = cfg.admin_time;
            if (cfg.censoring == CensoringKind::Normal) limit = std::max(kMinCensorTime, censor_draw(censor));

            unit_ids.push_back(std::to_string(unit + 1));
            group_ids.push_back(std::to_string(g + 1));
            // t can underflow to 0 for very large eta; keep observed times positive.
            time[unit] = std::max(std::min(t, limit), std::numeric_limits<double>::min());
            status[static_cast<std::size_t>(unit)] = t <= limit ? 1 : 0;
            x(unit, 0) = (eta - log_u) / cfg.beta;
            out.true_cluster.push_back(z + 1);
            out.true_frailty.push_back(u);
            out.true_eta.push_back(eta);
        }
    }
    out.data = SurvivalDataset(std::move(unit_ids), std::move(group_ids), std::move(time), std::move(status),
                               std::move(x), {"x"});
    return out;
}

std::vector<SurvivalCurve> empirical_survival(const SurvivalDataset& data, const std::vector<int>& labels) {
    if (labels.size() != static_cast<std::size_t>(data.num_units())) {
        fail(ErrorKind::InvalidParameter, "empirical_survival: one label per unit required");
    }
    std::map<int, std::vector<int>> strata;
    for (std::size_t i = 0; i < labels.size(); ++i) strata[labels[i]].push_back(static_cast<int>(i));

    std::vector<SurvivalCurve> curves;
    for (auto& [label, units] : strata) {
        SurvivalCurve curve;
        curve.label = label;
        curve.at_risk_start = static_cast<int>(units.size());
        curve.empty = units.empty();
        std::sort(units.begin(), units.end(), [&](int a, int b) { return data.time()[a] < data.time()[b]; });
        curve.time.push_back(0.0);
        curve.survival.push_back(1.0);
        double surv = 1.0;
        int at_risk = static_cast<int>(units.size());
        std::size_t pos = 0;
        while (pos < units.size()) {
            const double t = data.time()[units[pos]];
            int deaths = 0, leaving = 0;
            while (pos < units.size() && data.time()[units[pos]] == t) {
                deaths += data.status()[static_cast<std::size_t>(units[pos])];
                ++leaving;
                ++pos;
            }
            if (deaths > 0) {
                surv *= 1.0 - static_cast<double>(deaths) / at_risk;
                curve.time.push_back(t);
                curve.survival.push_back(surv);
            }
            at_risk -= leaving;
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

}  // namespace hazclust
