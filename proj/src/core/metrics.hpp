#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace hazclust {

struct SilhouetteReport {
    std::vector<double> per_unit;
    std::vector<double> cluster_means;  // indexed by position in sorted label set
    std::vector<int> cluster_labels;
    double mean = 0.0;
    bool defined = false;  // false with fewer than two clusters
};

/// Silhouette with distances |eta_a - eta_b|. Units alone in their cluster score 0.
SilhouetteReport silhouette(const Eigen::VectorXd& eta, std::span<const int> labels);

/// Fraction of units whose labels agree after the best one-to-one relabeling.
double accuracy(std::span<const int> truth, std::span<const int> predicted);

/// Adjusted Rand index; 1.0 when both partitions are trivial.
double adjusted_rand(std::span<const int> truth, std::span<const int> predicted);

struct RecoveryReport {
    double accuracy = 0.0;
    double ari = 0.0;
    Eigen::MatrixXi confusion;  // rows: true labels, columns: predicted labels after alignment
};

RecoveryReport recovery(std::span<const int> truth, std::span<const int> predicted);

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method).
/// Returns assignment[row] = column.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace hazclust
