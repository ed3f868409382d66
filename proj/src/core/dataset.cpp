#include "dataset.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "errors.hpp"

namespace hazclust {

SurvivalDataset::SurvivalDataset(std::vector<std::string> unit_ids, std::vector<std::string> group_labels,
                                 Eigen::VectorXd time, std::vector<int> status, Eigen::MatrixXd covariates,
                                 std::vector<std::string> covariate_names)
    : unit_ids_(std::move(unit_ids)),
      time_(std::move(time)),
      status_(std::move(status)),
      x_(std::move(covariates)),
      covariate_names_(std::move(covariate_names)) {
    const auto n = static_cast<std::size_t>(time_.size());
    if (n == 0) fail(ErrorKind::Schema, "dataset has no units");
    if (unit_ids_.size() != n || group_labels.size() != n || status_.size() != n ||
        static_cast<std::size_t>(x_.rows()) != n) {
        fail(ErrorKind::Schema, "dataset columns have inconsistent lengths");
    }
    if (covariate_names_.size() != static_cast<std::size_t>(x_.cols())) {
        fail(ErrorKind::Schema, "covariate name count does not match covariate columns");
    }

    std::unordered_set<std::string> seen;
    std::unordered_map<std::string, int> group_index;
    group_of_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen.insert(unit_ids_[i]).second) fail(ErrorKind::Schema, "duplicate unit_id '" + unit_ids_[i] + "'");
        if (!(time_[static_cast<Eigen::Index>(i)] > 0.0) || !std::isfinite(time_[static_cast<Eigen::Index>(i)])) {
            fail(ErrorKind::Schema, "time must be finite and > 0 (unit '" + unit_ids_[i] + "')");
        }
        if (status_[i] != 0 && status_[i] != 1) {
            fail(ErrorKind::Schema, "status must be 0 or 1 (unit '" + unit_ids_[i] + "')");
        }
        for (Eigen::Index c = 0; c < x_.cols(); ++c) {
            if (!std::isfinite(x_(static_cast<Eigen::Index>(i), c))) {
                fail(ErrorKind::Schema, "non-finite covariate '" + covariate_names_[static_cast<std::size_t>(c)] +
                                            "' (unit '" + unit_ids_[i] + "')");
            }
        }
        auto [it, inserted] = group_index.emplace(group_labels[i], static_cast<int>(group_names_.size()));
        if (inserted) {
            group_names_.push_back(group_labels[i]);
            members_.emplace_back();
            events_.push_back(0);
        }
        const int g = it->second;
        group_of_[i] = g;
        members_[static_cast<std::size_t>(g)].push_back(static_cast<int>(i));
        events_[static_cast<std::size_t>(g)] += status_[i];
    }
}

}  // namespace hazclust
