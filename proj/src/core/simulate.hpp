#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "dataset.hpp"
#include "frailty.hpp"

namespace hazclust {

enum class CensoringKind { Administrative, Normal };

std::string_view to_string(CensoringKind c);
CensoringKind parse_censoring(std::string_view name);

struct SimConfig {
    int groups = 10;
    int units_per_group = 50;
    double theta = 0.5;
    std::vector<double> cluster_means{-8.0, 0.0, 8.0};
    double sigma = 1.0;
    double beta = 0.6931471805599453;  // log 2
    double shape = 2.5;
    double scale = 0.01;
    CensoringKind censoring = CensoringKind::Administrative;
    double admin_time = 100.0;
    double censor_mean = 130.0;
    double censor_sd = 15.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SimulatedDataset {
    SurvivalDataset data;
    std::vector<int> true_cluster;  // 1..C
    std::vector<double> true_frailty;  // per unit (u of its group)
    std::vector<double> true_eta;
};

/// Deterministic child seed for stream `index` of `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Event times, clusters and frailties depend only on the seed; the censoring
/// mechanism is applied afterwards from its own stream, so the same seed gives
/// the same latent data under either mechanism.
SimulatedDataset generate(const SimConfig& cfg);

struct SurvivalCurve {
    int label = 0;
    std::vector<double> time;
    std::vector<double> survival;
    int at_risk_start = 0;
    bool empty = true;
};

/// Kaplan-Meier product-limit estimate for each distinct label, ascending.
std::vector<SurvivalCurve> empirical_survival(const SurvivalDataset& data, const std::vector<int>& labels);

}  // namespace hazclust
