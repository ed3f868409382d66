#pragma once

#include <Eigen/Dense>

#include <functional>

namespace hazclust {

struct MinimizeOptions {
    int max_iterations = 500;
    double grad_tol = 1e-6;      // on max |g_i| / (1 + |f|)
    double rel_f_tol = 1e-12;    // relative decrease below which progress is considered stalled
    double fd_step = 1e-5;       // relative central-difference step
};

struct MinimizeResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    bool line_search_failed = false;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// BFGS with central finite-difference gradients and a backtracking Armijo
/// line search. Non-finite objective values are treated as +inf and make the
/// line search retreat. The returned point never has a larger value than x0.
MinimizeResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0, const MinimizeOptions& opts = {});

Eigen::VectorXd fd_gradient(const Objective& f, const Eigen::VectorXd& x, double rel_step, int* evaluations = nullptr);

}  // namespace hazclust
