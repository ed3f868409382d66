#include "simgraph.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace hazclust {

SimilarityMatrix uniform_similarity(int n) {
    if (n < 2) fail(ErrorKind::Config, "uniform similarity needs at least 2 units");
    SimilarityMatrix S(n, n);
    S.reserve(Eigen::VectorXi::Constant(n, n - 1));
    const double v = 1.0 / (n - 1);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (a != b) S.insert(a, b) = v;
        }
    }
    S.makeCompressed();
    return S;
}

void validate_similarity(const SimilarityMatrix& S, double tol) {
    if (S.rows() != S.cols()) fail(ErrorKind::Config, "similarity matrix must be square");
    for (Eigen::Index a = 0; a < S.outerSize(); ++a) {
        double sum = 0.0;
        for (SimilarityMatrix::InnerIterator it(S, a); it; ++it) {
            if (it.col() == a && it.value() != 0.0) {
                fail(ErrorKind::Config, "similarity diagonal must be zero (row " + std::to_string(a) + ")");
            }
            if (!(it.value() >= 0.0 && it.value() <= 1.0)) {
                fail(ErrorKind::Config, "similarity entries must lie in [0,1] (row " + std::to_string(a) + ")");
            }
            sum += it.value();
        }
        if (std::abs(sum - 1.0) > tol) {
            fail(ErrorKind::Config, "similarity row " + std::to_string(a) + " sums to " + std::to_string(sum));
        }
    }
}

LaplacianView laplacian(const SimilarityMatrix& S) {
    LaplacianView out;
    SimilarityMatrix St = S.transpose();
    out.adjacency = 0.5 * (S + St);
    const Eigen::Index n = S.rows();
    out.degree = Eigen::VectorXd::Zero(n);
    out.L = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (SimilarityMatrix::InnerIterator it(out.adjacency, a); it; ++it) {
            out.degree[a] += it.value();
            out.L(a, it.col()) -= it.value();
        }
        out.L(a, a) += out.degree[a];
    }
    return out;
}

namespace {

// C smallest eigenpairs of a dense symmetric block (C <= size).
void smallest_eigenpairs(Eigen::MatrixXd block, int C, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
    const auto n = static_cast<lapack_int>(block.rows());
    values.resize(n);
    vectors.resize(n, C);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, block.data(), n, 0.0, 0.0, 1, C, 0.0,
                                           &found, values.data(), vectors.data(), n, support.data());
    if (info != 0 || found != C) {
        fail(ErrorKind::Numerical, "spectral_embed: dsyevr failed (info=" + std::to_string(info) +
                                       ", found=" + std::to_string(found) + ", N=" + std::to_string(n) +
                                       ", C=" + std::to_string(C) + ")");
    }
    values.conservativeResize(C);
}

}  // namespace

SpectralEmbedding spectral_embed(const LaplacianView& lap, int C) {
    const auto n = static_cast<int>(lap.L.rows());
    if (C < 1 || C >= n) fail(ErrorKind::Config, "spectral_embed: need 1 <= C < N");

    // L is block diagonal over the connected components of the adjacency, so
    // each block is solved on its own and the C smallest pairs are merged.
    const Components comps = connected_components(lap.adjacency, 0.0);
    if (comps.count == 1) {
        SpectralEmbedding out;
        smallest_eigenpairs(lap.L, C, out.eigenvalues, out.F);
        return out;
    }
    std::vector<std::vector<int>> members(static_cast<std::size_t>(comps.count));
    for (int a = 0; a < n; ++a) members[static_cast<std::size_t>(comps.labels[a] - 1)].push_back(a);

    struct Pair {
        double value;
        int comp;
        int index;
    };
    std::vector<Pair> pairs;
    std::vector<Eigen::MatrixXd> block_vectors(members.size());
    for (std::size_t m = 0; m < members.size(); ++m) {
        const auto& idx = members[m];
        const int size = static_cast<int>(idx.size());
        const int want = std::min(C, size);
        Eigen::VectorXd values;
        if (size == 1) {
            values = Eigen::VectorXd::Constant(1, lap.L(idx[0], idx[0]));
            block_vectors[m] = Eigen::MatrixXd::Ones(1, 1);
        } else {
            Eigen::MatrixXd block(size, size);
            for (int r = 0; r < size; ++r) {
                for (int c = 0; c < size; ++c) block(r, c) = lap.L(idx[r], idx[c]);
            }
            smallest_eigenpairs(std::move(block), want, values, block_vectors[m]);
        }
        for (int j = 0; j < want; ++j) pairs.push_back({values[j], static_cast<int>(m), j});
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.value < b.value; });

    SpectralEmbedding out;
    out.F = Eigen::MatrixXd::Zero(n, C);
    out.eigenvalues.resize(C);
    for (int j = 0; j < C; ++j) {
        const Pair& p = pairs[static_cast<std::size_t>(j)];
        const auto& idx = members[static_cast<std::size_t>(p.comp)];
        const auto& vec = block_vectors[static_cast<std::size_t>(p.comp)];
        for (std::size_t r = 0; r < idx.size(); ++r) out.F(idx[r], j) = vec(static_cast<Eigen::Index>(r), p.index);
        out.eigenvalues[j] = p.value;
    }
    return out;
}

Components connected_components(const SimilarityMatrix& S, double zero_tol) {
    const auto n = static_cast<int>(S.rows());
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };

    SimilarityMatrix St = S.transpose();
    SimilarityMatrix A = 0.5 * (S + St);
    for (int a = 0; a < n; ++a) {
        for (SimilarityMatrix::InnerIterator it(A, a); it; ++it) {
            if (it.value() > zero_tol) {
                const int ra = find(a);
                const int rb = find(static_cast<int>(it.col()));
                if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
            }
        }
    }

    Components out;
    out.labels.assign(static_cast<std::size_t>(n), 0);
    std::vector<int> root_label(static_cast<std::size_t>(n), 0);
    for (int a = 0; a < n; ++a) {
        const int r = find(a);
        if (root_label[r] == 0) root_label[r] = ++out.count;
        out.labels[a] = root_label[r];
    }
    return out;
}

RowUpdate update_row(std::span<const double> w, int self, int k) {
    const auto n = static_cast<int>(w.size());
    if (k < 1 || k + 1 > n - 1) {
        fail(ErrorKind::Config, "update_row: need 1 <= k <= N-2 (k=" + std::to_string(k) + ", N=" +
                                    std::to_string(n) + ")");
    }
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n - 1));
    for (int j = 0; j < n; ++j) {
        if (j != self) order.push_back(j);
    }
    auto closer = [&](int a, int b) { return w[a] < w[b] || (w[a] == w[b] && a < b); };
    std::partial_sort(order.begin(), order.begin() + k + 1, order.end(), closer);

    double head_sum = 0.0;
    for (int p = 0; p < k; ++p) head_sum += w[order[p]];
    const double next = w[order[k]];

    RowUpdate out;
    out.mu = 0.5 * k * next - 0.5 * head_sum;
    out.entries.reserve(static_cast<std::size_t>(k));
    if (!(out.mu > 0.0)) {
        out.degenerate = true;
        out.alpha = 1.0 / k;
        for (int p = 0; p < k; ++p) out.entries.emplace_back(order[p], 1.0 / k);
    } else {
        out.alpha = 1.0 / k + head_sum / (2.0 * k * out.mu);
        for (int p = 0; p < k; ++p) {
            out.entries.emplace_back(order[p], std::max(0.0, out.alpha - w[order[p]] / (2.0 * out.mu)));
        }
    }
    std::sort(out.entries.begin(), out.entries.end());
    return out;
}

SimilarityUpdate update_similarity(const Eigen::VectorXd& eta, const Eigen::MatrixXd& F, double lambda, int k) {
    const auto n = static_cast<int>(eta.size());
    if (F.rows() != n) fail(ErrorKind::Config, "update_similarity: embedding rows do not match scores");

    SimilarityUpdate out;
    out.S.resize(n, n);
    out.S.reserve(Eigen::VectorXi::Constant(n, k));
    std::vector<double> w(static_cast<std::size_t>(n));
    double mu_sum = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double diff = eta[a] - eta[b];
            w[b] = diff * diff + lambda * (F.row(a) - F.row(b)).squaredNorm();
        }
        const RowUpdate row = update_row(w, a, k);
        for (const auto& [col, value] : row.entries) out.S.insert(a, col) = value;
        mu_sum += row.mu;
        out.degenerate_rows += row.degenerate ? 1 : 0;
    }
    out.S.makeCompressed();
    out.mu = mu_sum / n;
    return out;
}

double mean_abs_change(const SimilarityMatrix& a, const SimilarityMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorKind::Config, "mean_abs_change: shape mismatch");
    const SimilarityMatrix diff = a - b;
    double total = 0.0;
    for (Eigen::Index r = 0; r < diff.outerSize(); ++r) {
        for (SimilarityMatrix::InnerIterator it(diff, r); it; ++it) total += std::abs(it.value());
    }
    return total / (static_cast<double>(a.rows()) * static_cast<double>(a.cols()));
}

}  // namespace hazclust
