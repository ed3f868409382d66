#pragma once

// Learned similarity graph: row-stochastic k-sparse S, its Laplacian,
// spectral embedding and connected components, and the closed-form row update.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <span>
#include <utility>
#include <vector>

namespace hazclust {

using SimilarityMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Zero diagonal, 1/(N-1) elsewhere.
SimilarityMatrix uniform_similarity(int n);

/// Throws Config unless S is square, has a zero diagonal, entries in [0,1]
/// and rows summing to 1 within `tol`.
void validate_similarity(const SimilarityMatrix& S, double tol = 1e-10);

/// A = (S + S')/2, degrees D = rowsum(A), L = D - A (dense).
struct LaplacianView {
    SimilarityMatrix adjacency;
    Eigen::VectorXd degree;
    Eigen::MatrixXd L;
};

LaplacianView laplacian(const SimilarityMatrix& S);

struct SpectralEmbedding {
    Eigen::MatrixXd F;           // N x C, orthonormal columns
    Eigen::VectorXd eigenvalues; // C smallest, nondecreasing
};

/// Eigenvectors of the C smallest eigenvalues of L.
SpectralEmbedding spectral_embed(const LaplacianView& lap, int C);

struct Components {
    int count = 0;
    std::vector<int> labels;  // 1..count, numbered by first appearance
};

Components connected_components(const SimilarityMatrix& S, double zero_tol = 1e-12);

struct RowUpdate {
    std::vector<std::pair<int, double>> entries;  // (column, weight), k of them
    double mu = 0.0;
    double alpha = 0.0;
    bool degenerate = false;  // mu <= 0: uniform 1/k fallback
};

/// Closed-form solution of the k-sparse simplex-constrained row problem.
/// `w` holds the combined distances to all N units; entry `self` is ignored.
/// Neighbors are ranked by (distance, index).
RowUpdate update_row(std::span<const double> w, int self, int k);

struct SimilarityUpdate {
    SimilarityMatrix S;
    double mu = 0.0;             // mean of the row mu values
    int degenerate_rows = 0;
};

/// Row-wise update with w_ab = (eta_a - eta_b)^2 + lambda ||f_a - f_b||^2.
SimilarityUpdate update_similarity(const Eigen::VectorXd& eta, const Eigen::MatrixXd& F, double lambda, int k);

/// Mean absolute entry-wise difference over all N^2 entries.
double mean_abs_change(const SimilarityMatrix& a, const SimilarityMatrix& b);

/// Learned graph plus the scalars that drive it.
struct SimilarityState {
    SimilarityMatrix S;
    int k = 0;
    int C = 0;
    double lambda = 0.0;
    double mu = 0.0;
    double gamma = 0.0;
};

}  // namespace hazclust
