#include "optim.hpp"

#include <cmath>
#include <limits>

namespace hazclust {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const Objective& f, const Eigen::VectorXd& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
}

}  // namespace

Eigen::VectorXd fd_gradient(const Objective& f, const Eigen::VectorXd& x, double rel_step, int* evaluations) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    const double f0 = safe_eval(f, x);
    int evals = 1;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = rel_step * std::max(1.0, std::abs(x[i]));
        probe[i] = x[i] + h;
        const double fp = safe_eval(f, probe);
        probe[i] = x[i] - h;
        const double fm = safe_eval(f, probe);
        probe[i] = x[i];
        evals += 2;
        if (std::isfinite(fp) && std::isfinite(fm)) {
            g[i] = (fp - fm) / (2.0 * h);
        } else if (std::isfinite(fp)) {
            g[i] = (fp - f0) / h;
        } else if (std::isfinite(fm)) {
            g[i] = (f0 - fm) / h;
        } else {
            g[i] = 0.0;
        }
    }
    if (evaluations) *evaluations += evals;
    return g;
}

MinimizeResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0, const MinimizeOptions& opts) {
    const Eigen::Index n = x0.size();
    MinimizeResult res;
    res.x = x0;
    res.value = safe_eval(f, x0);
    res.evaluations = 1;
    if (!std::isfinite(res.value)) {
        res.line_search_failed = true;
        return res;
    }

    Eigen::VectorXd g = fd_gradient(f, res.x, opts.fd_step, &res.evaluations);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    bool fresh = true;
    int stalls = 0;

    for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
        if (g.cwiseAbs().maxCoeff() <= opts.grad_tol * (1.0 + std::abs(res.value))) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd p = -H * g;
        double slope = g.dot(p);
        if (!(slope < 0.0)) {
            H.setIdentity();
            fresh = true;
            p = -g;
            slope = g.dot(p);
        }
        // Keep a single step within one unit of every (transformed) coordinate.
        double t = std::min(1.0, 1.0 / std::max(p.cwiseAbs().maxCoeff(), 1e-300));

        Eigen::VectorXd x_new;
        double f_new = kInf;
        bool accepted = false;
        for (int trial = 0; trial < 60; ++trial) {
            x_new = res.x + t * p;
            f_new = safe_eval(f, x_new);
            ++res.evaluations;
            if (f_new <= res.value + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (!fresh) {
                H.setIdentity();
                fresh = true;
                continue;
            }
            res.line_search_failed = true;
            break;
        }

        const Eigen::VectorXd g_new = fd_gradient(f, x_new, opts.fd_step, &res.evaluations);
        const Eigen::VectorXd s = x_new - res.x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (fresh) H *= sy / y.squaredNorm();
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
            fresh = false;
        }

        const double decrease = res.value - f_new;
        res.x = x_new;
        res.value = f_new;
        g = g_new;
        if (decrease <= opts.rel_f_tol * (1.0 + std::abs(res.value))) {
            if (++stalls >= 3) {
                res.converged = true;
                break;
            }
        } else {
            stalls = 0;
        }
    }
    return res;
}

}  // namespace hazclust
