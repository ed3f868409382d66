#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>

#include "errors.hpp"
#include "frailty.hpp"
#include "oracles.hpp"

using namespace hazclust;
using oracle::fd_signed_deriv;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an exception");
    return ErrorKind::Io;
}

double log_density_oracle(FrailtyKind kind, double theta, double u) { return oracle::log_density(kind, theta, u); }

}  // namespace

TEST_CASE("cum_hazard and log_hazard examples") {
    const auto w = BaselineHazard::weibull(2.5, 0.01);
    CHECK(cum_hazard(w, 10.0) == doctest::Approx(std::pow(10.0, -2.5)).epsilon(1e-14));
    CHECK(cum_hazard(w, 0.0) == 0.0);
    const auto e = BaselineHazard::exponential(0.06);
    CHECK(cum_hazard(e, 10.0) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(cum_hazard(e, 0.0) == 0.0);
    CHECK(log_hazard(e, 5.0) == doctest::Approx(std::log(0.06)).epsilon(1e-14));
    const auto w1 = BaselineHazard::weibull(1.0, 0.3);
    for (double t : {0.5, 3.0, 40.0}) CHECK(log_hazard(w1, t) == doctest::Approx(std::log(0.3)).epsilon(1e-14));
}

TEST_CASE("log_hazard matches the numerical derivative of cum_hazard") {
    for (const auto& b : {BaselineHazard::weibull(2.5, 0.01), BaselineHazard::weibull(0.7, 2.0),
                          BaselineHazard::exponential(0.06)}) {
        for (double t : {0.1, 1.0, 10.0, 100.0}) {
            const double h = 1e-5 * t;
            const double fd = (cum_hazard(b, t + h) - cum_hazard(b, t - h)) / (2 * h);
            CHECK(std::exp(log_hazard(b, t)) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("baseline errors") {
    CHECK(kind_of([] { BaselineHazard::weibull(0.0, 1.0); }) == ErrorKind::InvalidParameter);
    CHECK(kind_of([] { BaselineHazard::weibull(1.0, -1.0); }) == ErrorKind::InvalidParameter);
    CHECK(kind_of([] { BaselineHazard::exponential(0.0); }) == ErrorKind::InvalidParameter);
    CHECK(kind_of([] { log_hazard(BaselineHazard::exponential(1.0), 0.0); }) == ErrorKind::Domain);
    CHECK(kind_of([] { inverse_cum_hazard(BaselineHazard::exponential(1.0), -1.0); }) == ErrorKind::Domain);
    CHECK(kind_of([] { FrailtyFamily(FrailtyKind::Gamma, 0.0); }) == ErrorKind::InvalidParameter);
    CHECK(kind_of([] { log_laplace_deriv(FrailtyFamily(FrailtyKind::Gamma, 1.0), -1, 1.0); }) == ErrorKind::Domain);
    CHECK(kind_of([] { log_laplace_deriv(FrailtyFamily(FrailtyKind::Gamma, 1.0), 1, -1.0); }) == ErrorKind::Domain);
}

TEST_CASE("inverse_cum_hazard") {
    const auto w = BaselineHazard::weibull(2.5, 0.01);
    CHECK(inverse_cum_hazard(w, std::pow(10.0, -2.5)) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(inverse_cum_hazard(w, 0.0) == 0.0);
    for (int i = 1; i <= 1000; ++i) {
        const double s = 0.1 * i - 0.05;
        CHECK(cum_hazard(w, inverse_cum_hazard(w, s)) == doctest::Approx(s).epsilon(1e-10));
    }
}

TEST_CASE("baseline parameter round trip") {
    const auto w = BaselineHazard::from_params(BaselineFamily::Weibull, {2.5, 0.01});
    CHECK(w.params() == std::vector<double>{2.5, 0.01});
    const auto e = BaselineHazard::from_params(BaselineFamily::Exponential, {0.2});
    CHECK(e.params() == std::vector<double>{0.2});
    CHECK(parse_baseline(to_string(BaselineFamily::Weibull)) == BaselineFamily::Weibull);
    CHECK(parse_frailty(to_string(FrailtyKind::InverseGaussian)) == FrailtyKind::InverseGaussian);
}

TEST_CASE("log_laplace_deriv matches high-precision finite differences") {
    for (auto kind : {FrailtyKind::Gamma, FrailtyKind::InverseGaussian}) {
        for (double theta : {0.2, 0.5, 1.0}) {
            const FrailtyFamily f(kind, theta);
            for (int k = 0; k <= 5; ++k) {
                for (double s : {0.1, 1.0, 5.0}) {
                    const double fd = fd_signed_deriv(kind, theta, k, s);
                    CHECK(std::exp(log_laplace_deriv(f, k, s)) == doctest::Approx(fd).epsilon(1e-4));
                }
            }
        }
    }
}

TEST_CASE("log_laplace_deriv special values") {
    const FrailtyFamily g(FrailtyKind::Gamma, 0.5);
    CHECK(log_laplace_deriv(g, 0, 0.0) == 0.0);
    CHECK(std::exp(log_laplace_deriv(FrailtyFamily(FrailtyKind::Gamma, 1e-8), 1, 1.0)) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
    CHECK(log_laplace_deriv(g, 2, std::numeric_limits<double>::infinity()) == -std::numeric_limits<double>::infinity());
    // High orders stay finite on the log scale.
    for (auto kind : {FrailtyKind::Gamma, FrailtyKind::InverseGaussian}) {
        const double v = log_laplace_deriv(FrailtyFamily(kind, 0.5), 400, 50.0);
        CHECK(std::isfinite(v));
    }
}

TEST_CASE("laplace matches the density by quadrature") {
    using boost::math::quadrature::gauss_kronrod;
    for (auto kind : {FrailtyKind::Gamma, FrailtyKind::InverseGaussian}) {
        for (double theta : {0.3, 1.0}) {
            const FrailtyFamily f(kind, theta);
            for (double s : {0.0, 0.7, 3.0}) {
                auto integrand = [&](double u) { return u <= 0 ? 0.0 : std::exp(log_density_oracle(kind, theta, u) - u * s); };
                const double q = gauss_kronrod<double, 61>::integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-12);
                CHECK(f.laplace(s) == doctest::Approx(q).epsilon(1e-8));
                CHECK(f.log_density(1.3) == doctest::Approx(log_density_oracle(kind, theta, 1.3)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("frailty prediction") {
    const FrailtyFamily g(FrailtyKind::Gamma, 0.5);
    CHECK(log_frailty_prediction(g, 0, 0.0) == doctest::Approx(0.0).scale(1).epsilon(1e-14));
    CHECK(log_frailty_prediction(g, 3, 2.0) == doctest::Approx(std::log(2.5) - std::log(2.0)).epsilon(1e-12));
    double prev = std::numeric_limits<double>::infinity();
    for (double s : {1.0, 10.0, 1e3, 1e6}) {
        const double v = log_frailty_prediction(g, 3, s);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < -10.0);

    // Posterior mean by quadrature for the inverse Gaussian law.
    using boost::math::quadrature::gauss_kronrod;
    const double theta = 0.7;
    const FrailtyFamily ig(FrailtyKind::InverseGaussian, theta);
    for (int d : {0, 2, 5}) {
        const double s = 1.5;
        auto w = [&](double u, int power) {
            return u <= 0 ? 0.0 : std::exp(power * std::log(u) - u * s + log_density_oracle(FrailtyKind::InverseGaussian, theta, u));
        };
        const double inf = std::numeric_limits<double>::infinity();
        const double num = gauss_kronrod<double, 61>::integrate([&](double u) { return w(u, d + 1); }, 0.0, inf, 15, 1e-13);
        const double den = gauss_kronrod<double, 61>::integrate([&](double u) { return w(u, d); }, 0.0, inf, 15, 1e-13);
        CHECK(std::exp(log_frailty_prediction(ig, d, s)) == doctest::Approx(num / den).epsilon(1e-6));
    }
}
