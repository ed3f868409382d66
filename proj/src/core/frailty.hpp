#pragma once

// Parametric baseline hazards and frailty distributions.
//
// Every likelihood term of the shared-frailty model is built from three
// primitives: the cumulative baseline hazard H0(t), the log baseline hazard
// log h0(t), and signed Laplace-transform derivatives of the frailty law,
// (-1)^k L^(k)(s) = E[U^k exp(-U s)]. The latter are always handled on the
// log scale because the derivative order equals the number of events in a
// group, which can run into the hundreds.

#include <string_view>
#include <vector>

namespace hazclust {

enum class BaselineFamily { Weibull, Exponential };
enum class FrailtyKind { Gamma, InverseGaussian };

std::string_view to_string(BaselineFamily f);
std::string_view to_string(FrailtyKind f);
BaselineFamily parse_baseline(std::string_view name);
FrailtyKind parse_frailty(std::string_view name);

/// Baseline hazard. Weibull uses H0(t) = (xi t)^rho; Exponential uses
/// H0(t) = rate * t. Parameters are validated on construction.
class BaselineHazard {
public:
    static BaselineHazard weibull(double shape, double scale);
    static BaselineHazard exponential(double rate);
    /// Rebuild from the positive parameter vector returned by params().
    static BaselineHazard from_params(BaselineFamily family, const std::vector<double>& params);

    BaselineFamily family() const noexcept { return family_; }
    /// Weibull: {rho, xi}; Exponential: {rate}.
    std::vector<double> params() const;
    std::size_t num_params() const noexcept { return family_ == BaselineFamily::Weibull ? 2 : 1; }

    double shape() const noexcept { return shape_; }
    double scale() const noexcept { return scale_; }

private:
    BaselineHazard(BaselineFamily family, double shape, double scale);

    BaselineFamily family_;
    double shape_;  // rho; 1 for exponential
    double scale_;  // xi, or the exponential rate
};

double cum_hazard(const BaselineHazard& b, double t);
double log_hazard(const BaselineHazard& b, double t);
/// H0^{-1}(s) = s^{1/rho} / xi.
double inverse_cum_hazard(const BaselineHazard& b, double s);

/// Unit-mean frailty distribution with variance-like parameter theta.
class FrailtyFamily {
public:
    FrailtyFamily(FrailtyKind kind, double theta);

    FrailtyKind kind() const noexcept { return kind_; }
    double theta() const noexcept { return theta_; }

    /// Laplace transform L(s) = E[exp(-U s)].
    double laplace(double s) const;
    /// log density of U, used by quadrature checks and simulation.
    double log_density(double u) const;

private:
    FrailtyKind kind_;
    double theta_;
};

/// log[(-1)^k L^(k)(s)]. Returns -inf for s = +inf.
double log_laplace_deriv(const FrailtyFamily& f, int k, double s);

/// log E[U | d events, exposure s] = log_laplace_deriv(d+1, s) - log_laplace_deriv(d, s).
double log_frailty_prediction(const FrailtyFamily& f, int events, double s);

}  // namespace hazclust
