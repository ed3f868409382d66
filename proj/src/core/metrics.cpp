#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "errors.hpp"

namespace hazclust {

namespace {

// Maps arbitrary integer labels to 0..K-1 in increasing label order.
std::vector<int> dense_labels(std::span<const int> labels, std::vector<int>* distinct = nullptr) {
    std::map<int, int> index;
    for (int l : labels) index.emplace(l, 0);
    int next = 0;
    for (auto& [label, idx] : index) idx = next++;
    if (distinct) {
        distinct->clear();
        for (const auto& [label, idx] : index) distinct->push_back(label);
    }
    std::vector<int> out;
    out.reserve(labels.size());
    for (int l : labels) out.push_back(index[l]);
    return out;
}

Eigen::MatrixXi contingency(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) fail(ErrorKind::InvalidParameter, "label vectors differ in length");
    if (truth.empty()) fail(ErrorKind::InvalidParameter, "label vectors are empty");
    const auto t = dense_labels(truth);
    const auto p = dense_labels(predicted);
    const int nt = *std::max_element(t.begin(), t.end()) + 1;
    const int np = *std::max_element(p.begin(), p.end()) + 1;
    Eigen::MatrixXi table = Eigen::MatrixXi::Zero(nt, np);
    for (std::size_t i = 0; i < t.size(); ++i) ++table(t[i], p[i]);
    return table;
}

double choose2(double n) { return 0.5 * n * (n - 1.0); }

}  // namespace

SilhouetteReport silhouette(const Eigen::VectorXd& eta, std::span<const int> labels) {
    if (static_cast<std::size_t>(eta.size()) != labels.size()) {
        fail(ErrorKind::InvalidParameter, "silhouette: scores and labels differ in length");
    }
    SilhouetteReport rep;
    const auto idx = dense_labels(labels, &rep.cluster_labels);
    const auto K = rep.cluster_labels.size();
    const auto n = labels.size();
    rep.per_unit.assign(n, 0.0);
    rep.cluster_means.assign(K, 0.0);
    if (K < 2) return rep;
    rep.defined = true;

    std::vector<double> sizes(K, 0.0);
    for (int c : idx) sizes[static_cast<std::size_t>(c)] += 1.0;

    std::vector<double> dist_sum(K);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            dist_sum[static_cast<std::size_t>(idx[j])] +=
                std::abs(eta[static_cast<Eigen::Index>(i)] - eta[static_cast<Eigen::Index>(j)]);
        }
        const auto own = static_cast<std::size_t>(idx[i]);
        if (sizes[own] < 2.0) continue;  // singleton
        const double a = dist_sum[own] / (sizes[own] - 1.0);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < K; ++c) {
            if (c != own) b = std::min(b, dist_sum[c] / sizes[c]);
        }
        const double denom = std::max(a, b);
        rep.per_unit[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rep.cluster_means[static_cast<std::size_t>(idx[i])] += rep.per_unit[i];
        total += rep.per_unit[i];
    }
    for (std::size_t c = 0; c < K; ++c) rep.cluster_means[c] /= sizes[c];
    rep.mean = total / static_cast<double>(n);
    return rep;
}

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
    const auto n = static_cast<int>(cost.rows());
    if (cost.cols() != n) fail(ErrorKind::InvalidParameter, "assignment cost matrix must be square");
    // Potentials formulation, 1-based with a sentinel column 0.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int row = 1; row <= n; ++row) {
        match[0] = row;
        int col0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[col0] = 1;
            const int r0 = match[col0];
            double delta = inf;
            int col1 = 0;
            for (int c = 1; c <= n; ++c) {
                if (used[c]) continue;
                const double cur = cost(r0 - 1, c - 1) - u[r0] - v[c];
                if (cur < minv[c]) {
                    minv[c] = cur;
                    way[c] = col0;
                }
                if (minv[c] < delta) {
                    delta = minv[c];
                    col1 = c;
                }
            }
            for (int c = 0; c <= n; ++c) {
                if (used[c]) {
                    u[match[c]] += delta;
                    v[c] -= delta;
                } else {
                    minv[c] -= delta;
                }
            }
            col0 = col1;
        } while (match[col0] != 0);
        do {
            const int col1 = way[col0];
            match[col0] = match[col1];
            col0 = col1;
        } while (col0 != 0);
    }
    std::vector<int> assignment(static_cast<std::size_t>(n), -1);
    for (int c = 1; c <= n; ++c) {
        if (match[c] != 0) assignment[static_cast<std::size_t>(match[c] - 1)] = c - 1;
    }
    return assignment;
}

RecoveryReport recovery(std::span<const int> truth, std::span<const int> predicted) {
    const Eigen::MatrixXi table = contingency(truth, predicted);
    const auto K = std::max(table.rows(), table.cols());
    Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(K, K);
    const double top = table.maxCoeff();
    for (Eigen::Index r = 0; r < K; ++r) {
        for (Eigen::Index c = 0; c < K; ++c) {
            const double v = (r < table.rows() && c < table.cols()) ? table(r, c) : 0.0;
            cost(r, c) = top - v;
        }
    }
    const auto assignment = solve_assignment(cost);

    RecoveryReport rep;
    rep.confusion = Eigen::MatrixXi::Zero(K, K);
    long matched = 0;
    for (Eigen::Index r = 0; r < K; ++r) {
        const auto c = assignment[static_cast<std::size_t>(r)];
        if (r < table.rows() && c < table.cols()) matched += table(r, c);
    }
    // Column permutation: aligned column for true row r goes to slot r.
    for (Eigen::Index r = 0; r < K; ++r) {
        const auto c = assignment[static_cast<std::size_t>(r)];
        for (Eigen::Index tr = 0; tr < table.rows(); ++tr) {
            if (c < table.cols()) rep.confusion(tr, r) = table(tr, c);
        }
    }
    rep.accuracy = static_cast<double>(matched) / static_cast<double>(truth.size());
    rep.ari = adjusted_rand(truth, predicted);
    return rep;
}

double accuracy(std::span<const int> truth, std::span<const int> predicted) {
    return recovery(truth, predicted).accuracy;
}

double adjusted_rand(std::span<const int> truth, std::span<const int> predicted) {
    const Eigen::MatrixXi table = contingency(truth, predicted);
    double index = 0.0;
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
        for (Eigen::Index c = 0; c < table.cols(); ++c) index += choose2(table(r, c));
    }
    double rows = 0.0;
    for (Eigen::Index r = 0; r < table.rows(); ++r) rows += choose2(table.row(r).sum());
    double cols = 0.0;
    for (Eigen::Index c = 0; c < table.cols(); ++c) cols += choose2(table.col(c).sum());
    const double total = choose2(static_cast<double>(truth.size()));
    const double expected = rows * cols / total;
    const double maximum = 0.5 * (rows + cols);
    const double denom = maximum - expected;
    if (denom == 0.0) return 1.0;
    return (index - expected) / denom;
}

}  // namespace hazclust
