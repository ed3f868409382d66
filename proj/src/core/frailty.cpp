#include "frailty.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace hazclust {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        fail(ErrorKind::InvalidParameter, std::string(what) + " must be finite and > 0, got " + std::to_string(v));
    }
}

double log_sum_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

// (-1)^k L^(k)(s) for the Gamma law with unit mean and variance theta:
// prod_{l<k}(1 + l theta) * (1 + theta s)^{-(1/theta + k)}.
double gamma_log_deriv(double theta, int k, double s) {
    double acc = -(1.0 / theta + k) * std::log1p(theta * s);
    for (int l = 1; l < k; ++l) acc += std::log1p(l * theta);
    return acc;
}

// Inverse Gaussian with unit mean and variance theta has L(s) = exp(-phi(s)),
// phi(s) = (sqrt(1 + 2 theta s) - 1) / theta. Writing m_k = (-1)^k L^(k) and
// q_j = (-1)^j phi^(j+1) = (2j-1)!! theta^j (1 + 2 theta s)^{-(2j+1)/2} gives
// m_{k+1} = sum_{j<=k} C(k,j) q_j m_{k-j}; all terms are positive so the
// recursion is run as a log-sum-exp.
double inverse_gaussian_log_deriv(double theta, int k, double s) {
    const double v = 1.0 + 2.0 * theta * s;
    const double root = std::sqrt(v);
    const double log_v = std::log(v);
    std::vector<double> log_m(static_cast<std::size_t>(k) + 1);
    log_m[0] = -2.0 * s / (1.0 + root);
    if (k == 0) return log_m[0];

    std::vector<double> log_fact(static_cast<std::size_t>(k));
    std::vector<double> log_q(static_cast<std::size_t>(k));
    const double log_theta = std::log(theta);
    for (int j = 0; j < k; ++j) {
        log_fact[j] = std::lgamma(j + 1.0);
        // log (2j-1)!! = log (2j)! - j log 2 - log j!
        const double log_dfact = std::lgamma(2.0 * j + 1.0) - j * std::log(2.0) - log_fact[j];
        log_q[j] = log_dfact + j * log_theta - 0.5 * (2.0 * j + 1.0) * log_v;
    }
    for (int n = 0; n < k; ++n) {
        double acc = -kInf;
        for (int j = 0; j <= n; ++j) {
            const double log_binom = log_fact[n] - log_fact[j] - log_fact[n - j];
            acc = log_sum_exp(acc, log_binom + log_q[j] + log_m[n - j]);
        }
        log_m[n + 1] = acc;
    }
    return log_m[k];
}

}  // namespace

std::string_view to_string(BaselineFamily f) {
    return f == BaselineFamily::Weibull ? "weibull" : "exponential";
}

std::string_view to_string(FrailtyKind f) {
    return f == FrailtyKind::Gamma ? "gamma" : "inverse_gaussian";
}

BaselineFamily parse_baseline(std::string_view name) {
    if (name == "weibull") return BaselineFamily::Weibull;
    if (name == "exponential") return BaselineFamily::Exponential;
    fail(ErrorKind::Config, "unknown baseline family '" + std::string(name) + "' (expected weibull|exponential)");
}

FrailtyKind parse_frailty(std::string_view name) {
    if (name == "gamma") return FrailtyKind::Gamma;
    if (name == "inverse_gaussian" || name == "invgauss") return FrailtyKind::InverseGaussian;
    fail(ErrorKind::Config, "unknown frailty family '" + std::string(name) + "' (expected gamma|inverse_gaussian)");
}

BaselineHazard::BaselineHazard(BaselineFamily family, double shape, double scale)
    : family_(family), shape_(shape), scale_(scale) {
    require_positive(shape, "baseline shape");
    require_positive(scale, family == BaselineFamily::Weibull ? "baseline scale" : "baseline rate");
}

BaselineHazard BaselineHazard::weibull(double shape, double scale) {
    return BaselineHazard(BaselineFamily::Weibull, shape, scale);
}

BaselineHazard BaselineHazard::exponential(double rate) {
    return BaselineHazard(BaselineFamily::Exponential, 1.0, rate);
}

BaselineHazard BaselineHazard::from_params(BaselineFamily family, const std::vector<double>& params) {
    if (family == BaselineFamily::Weibull) {
        if (params.size() != 2) fail(ErrorKind::InvalidParameter, "weibull baseline needs 2 parameters");
        return weibull(params[0], params[1]);
    }
    if (params.size() != 1) fail(ErrorKind::InvalidParameter, "exponential baseline needs 1 parameter");
    return exponential(params[0]);
}

std::vector<double> BaselineHazard::params() const {
    if (family_ == BaselineFamily::Weibull) return {shape_, scale_};
    return {scale_};
}

double cum_hazard(const BaselineHazard& b, double t) {
    if (!(t >= 0.0)) fail(ErrorKind::Domain, "cum_hazard: t must be >= 0");
    if (b.family() == BaselineFamily::Exponential) return b.scale() * t;
    if (t == 0.0) return 0.0;
    return std::exp(b.shape() * std::log(b.scale() * t));
}

double log_hazard(const BaselineHazard& b, double t) {
    if (!(t > 0.0)) fail(ErrorKind::Domain, "log_hazard: t must be > 0");
    if (b.family() == BaselineFamily::Exponential) return std::log(b.scale());
    // h0(t) = rho xi^rho t^(rho-1)
    return std::log(b.shape()) + b.shape() * std::log(b.scale()) + (b.shape() - 1.0) * std::log(t);
}

double inverse_cum_hazard(const BaselineHazard& b, double s) {
    if (!(s >= 0.0)) fail(ErrorKind::Domain, "inverse_cum_hazard: s must be >= 0");
    if (b.family() == BaselineFamily::Exponential) return s / b.scale();
    if (s == 0.0) return 0.0;
    return std::exp(std::log(s) / b.shape()) / b.scale();
}

FrailtyFamily::FrailtyFamily(FrailtyKind kind, double theta) : kind_(kind), theta_(theta) {
    require_positive(theta, "frailty theta");
}

double FrailtyFamily::laplace(double s) const {
    if (kind_ == FrailtyKind::Gamma) return std::exp(-std::log1p(theta_ * s) / theta_);
    const double root = std::sqrt(1.0 + 2.0 * theta_ * s);
    return std::exp(-2.0 * s / (1.0 + root));
}

double FrailtyFamily::log_density(double u) const {
    if (!(u > 0.0)) return -kInf;
    if (kind_ == FrailtyKind::Gamma) {
        const double a = 1.0 / theta_;
        return a * std::log(a) - std::lgamma(a) + (a - 1.0) * std::log(u) - a * u;
    }
    const double shape = 1.0 / theta_;
    return 0.5 * (std::log(shape) - std::log(2.0 * M_PI) - 3.0 * std::log(u)) -
           shape * (u - 1.0) * (u - 1.0) / (2.0 * u);
}

double log_laplace_deriv(const FrailtyFamily& f, int k, double s) {
    if (k < 0) fail(ErrorKind::Domain, "log_laplace_deriv: order must be >= 0");
    if (!(s >= 0.0)) fail(ErrorKind::Domain, "log_laplace_deriv: s must be >= 0");
    if (s == kInf) return -kInf;
    if (f.kind() == FrailtyKind::Gamma) return gamma_log_deriv(f.theta(), k, s);
    return inverse_gaussian_log_deriv(f.theta(), k, s);
}

double log_frailty_prediction(const FrailtyFamily& f, int events, double s) {
    if (events < 0) fail(ErrorKind::Domain, "log_frailty_prediction: events must be >= 0");
    if (!(s >= 0.0)) fail(ErrorKind::Domain, "log_frailty_prediction: s must be >= 0");
    if (s == kInf) return -kInf;
    if (f.kind() == FrailtyKind::Gamma) {
        return std::log1p(events * f.theta()) - std::log1p(f.theta() * s);
    }
    return log_laplace_deriv(f, events + 1, s) - log_laplace_deriv(f, events, s);
}

}  // namespace hazclust
