#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace hazclust {

/// Grouped right-censored survival data. Units are stored flat in input
/// order; `group_of` maps each unit to a group index in [0, M).
class SurvivalDataset {
public:
    SurvivalDataset() = default;

    /// Validates and indexes the data. Group labels are numbered in order of
    /// first appearance.
    SurvivalDataset(std::vector<std::string> unit_ids, std::vector<std::string> group_labels,
                    Eigen::VectorXd time, std::vector<int> status, Eigen::MatrixXd covariates,
                    std::vector<std::string> covariate_names);

    int num_units() const noexcept { return static_cast<int>(time_.size()); }
    int num_groups() const noexcept { return static_cast<int>(members_.size()); }
    int num_covariates() const noexcept { return static_cast<int>(x_.cols()); }

    const Eigen::VectorXd& time() const noexcept { return time_; }
    const std::vector<int>& status() const noexcept { return status_; }
    const Eigen::MatrixXd& covariates() const noexcept { return x_; }
    const std::vector<std::string>& covariate_names() const noexcept { return covariate_names_; }
    const std::vector<std::string>& unit_ids() const noexcept { return unit_ids_; }
    const std::vector<std::string>& group_names() const noexcept { return group_names_; }

    int group_of(int unit) const { return group_of_[static_cast<std::size_t>(unit)]; }
    const std::vector<int>& group_index() const noexcept { return group_of_; }
    const std::vector<int>& members(int g) const { return members_[static_cast<std::size_t>(g)]; }
    /// d_g, the number of observed events in group g.
    int events(int g) const { return events_[static_cast<std::size_t>(g)]; }

private:
    std::vector<std::string> unit_ids_;
    std::vector<std::string> group_names_;
    Eigen::VectorXd time_;
    std::vector<int> status_;
    Eigen::MatrixXd x_;
    std::vector<std::string> covariate_names_;
    std::vector<int> group_of_;
    std::vector<std::vector<int>> members_;
    std::vector<int> events_;
};

}  // namespace hazclust
