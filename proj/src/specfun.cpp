#include "kreinlab/specfun.hpp"

#include <cmath>
#include <algorithm>
#include <limits>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "kreinlab/detail/quadrature.hpp"

namespace kreinlab::specfun {

namespace {
constexpr double kSeriesTermRatio = 1e-16;
constexpr int kSeriesCap = 10000;
constexpr double kQuadTol = 1e-14;
}  // namespace

double gamma_fn(double x) {
    if (!(x > 0.0))
        throw std::domain_error("gamma_fn: requires x > 0");
    return boost::math::tgamma(x);
}

double log_gamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("log_gamma: requires x > 0");
    return boost::math::lgamma(x);
}

double bessel_k(double nu, double x) {
    if (!(x > 0.0))
        throw std::domain_error("bessel_k: requires x > 0");
    return boost::math::cyl_bessel_k(nu, x);
}

double bessel_i(double nu, double x) {
    if (!(x > 0.0))
        throw std::domain_error("bessel_i: requires x > 0");
    if (!(nu > -1.0))
        throw std::domain_error("bessel_i: requires nu > -1");
    return boost::math::cyl_bessel_i(nu, x);
}

double kummer_phi(double a, double b, double z) {
    if (b <= 0.0 && b == std::floor(b))
        throw std::domain_error("kummer_phi: b is a non-positive integer");
    double sum = 1.0;
    double term = 1.0;
    for (int n = 0; n < kSeriesCap; ++n) {
        term *= (a + n) / ((b + n) * (n + 1.0)) * z;
        sum += term;
        if (std::abs(term) <= kSeriesTermRatio * std::abs(sum))
            return sum;
        if (term == 0.0)  // a hit a non-positive integer: polynomial case
            return sum;
    }
    throw std::runtime_error("kummer_phi: series did not converge");
}

namespace detail {

double whittaker_w_integral(double k, double mu, double z,
                            bool transposed_exponent) {
    if (!(z > 0.0))
        throw std::domain_error("whittaker_w: requires z > 0");
    const double a = mu - k + 0.5;  // Gamma argument; also t-power + 1
    if (!(a > 0.0))
        throw std::domain_error("whittaker_w: requires mu - k + 1/2 > 0");

    const double p = mu - k - 0.5;                          // power of t
    const double q = transposed_exponent ? (mu - k + 0.5)   // rejected variant
                                         : (mu + k - 0.5);  // power of (1+t/z)

    // t in [0,1]: substitute t = s^m to remove the t^p endpoint singularity.
    int m = 2;
    if (p < 0.0)
        m = std::clamp(static_cast<int>(std::ceil(2.5 / (p + 1.0))), 2, 24);
    const double md = static_cast<double>(m);
    auto head = [&](double s) {
        const double t = std::pow(s, md);
        const double core = std::pow(s, md * (p + 1.0) - 1.0);
        return md * core * std::exp(-t) * std::pow(1.0 + t / z, q);
    };
    const double i_head = kreinlab::detail::gk_integrate(head, 0.0, 1.0, kQuadTol);

    // t in [1,inf): substitute t = e^v; doubly exponential decay in v.
    auto tail = [&](double v) {
        const double t = std::exp(v);
        const double g = -t + (p + 1.0) * v + q * std::log1p(t / z);
        return g < -745.0 ? 0.0 : std::exp(g);
    };
    const double i_tail = kreinlab::detail::gk_integrate(tail, 0.0, 8.0, kQuadTol);

    const double log_pref = k * std::log(z) - 0.5 * z - boost::math::lgamma(a);
    return std::exp(log_pref) * (i_head + i_tail);
}

}  // namespace detail

double whittaker_w(double k, double mu, double z) {
    return detail::whittaker_w_integral(k, mu, z, false);
}

double whittaker_m(double k, double mu, double z) {
    if (!(z > 0.0))
        throw std::domain_error("whittaker_m: requires z > 0");
    const double b = 2.0 * mu + 1.0;
    if (b <= 0.0 && b == std::floor(b))
        throw std::domain_error("whittaker_m: 2mu+1 is a non-positive integer");
    const double phi = kummer_phi(0.5 - k + mu, b, z);
    return std::pow(z, mu + 0.5) * std::exp(-0.5 * z) * phi;
}

double tricomi_psi(double a, double b, double z) {
    if (!(z > 0.0))
        throw std::domain_error("tricomi_psi: requires z > 0");
    if (!(a > 0.0))
        throw std::domain_error("tricomi_psi: requires a > 0");
    const double mu = 0.5 * (b - 1.0);
    const double k = 0.5 * b - a;
    return whittaker_w(k, mu, z) * std::pow(z, -(mu + 0.5)) * std::exp(0.5 * z);
}

double whittaker_w_logderiv(double k, double mu, double z) {
    // Beyond the working range of the integral representation (W underflows
    // and the ratio turns 0/0) the asymptotic series of log W' is already
    // far below double noise: error O(1/z^3).
    if (z >= 800.0) {
        const double km = k - 0.5;
        return -0.5 + k / z + (km * km - mu * mu) / (z * z);
    }
    const double w = whittaker_w(k, mu, z);
    const double w_contig = whittaker_w(k - 0.5, mu + 0.5, z);
    return (mu + 0.5) / z - 0.5 - (mu - k + 0.5) * w_contig / (std::sqrt(z) * w);
}

double whittaker_m_logderiv(double k, double mu, double z) {
    const double a = 0.5 - k + mu;
    const bool degenerate = a <= 0.0 && a == std::floor(a);
    // The Kummer series behind the direct route overflows near z ~ 700;
    // the growing-solution asymptotics apply unless the series terminates
    // (a a non-positive integer), in which case the series is exact anyway.
    if (z >= 600.0 && !degenerate) {
        const double kp = k + 0.5;
        return 0.5 - k / z - (kp * kp - mu * mu) / (z * z);
    }
    // a = 0 collapses M to z^{mu+1/2} e^{-z/2} exactly (Phi = 1), and the
    // generic path would form 0 * Phi(1, b+1, z) = 0 * inf at large z.
    if (a == 0.0) return (mu + 0.5) / z - 0.5;
    const double b = 2.0 * mu + 1.0;
    const double phi = kummer_phi(a, b, z);
    const double dphi = (a / b) * kummer_phi(a + 1.0, b + 1.0, z);
    return (mu + 0.5) / z - 0.5 + dphi / phi;
}

double khat(double alpha, double y) {
    if (!(y > 0.0))
        throw std::domain_error("khat: requires y > 0");
    return std::pow(y, alpha) * bessel_k(alpha, y);
}

double khat_logderiv(double alpha, double y) {
    if (!(y > 0.0))
        throw std::domain_error("khat_logderiv: requires y > 0");
    // K underflows near y ~ 700; switch to the asymptotic log-derivative
    // well before that (error O(1/y^3)).
    if (y >= 500.0) {
        const double c1 = (4.0 * alpha * alpha - 1.0) / 8.0;
        return alpha / y - 1.0 - 0.5 / y - c1 / (y * y);
    }
    const double k0 = bessel_k(alpha, y);
    const double kd = -0.5 * (bessel_k(alpha - 1.0, y) + bessel_k(alpha + 1.0, y));
    return alpha / y + kd / k0;
}

double ihat(double alpha, double y) {
    if (!(y > 0.0))
        throw std::domain_error("ihat: requires y > 0");
    return std::pow(y, alpha) * bessel_i(-alpha, y);
}

double ihat_logderiv(double alpha, double y) {
    if (!(y > 0.0))
        throw std::domain_error("ihat_logderiv: requires y > 0");
    // I overflows near y ~ 710; the ratio's asymptotic expansion (second
    // order, error O(1/y^3)) takes over well before that.
    if (y >= 500.0) {
        const double m1 = 4.0 * (1.0 - alpha) * (1.0 - alpha);  // order 1-a
        const double m2 = 4.0 * alpha * alpha;                  // order  -a
        const double a1 = (m1 - 1.0) / 8.0;
        const double b1 = (m2 - 1.0) / 8.0;
        const double a2 = (m1 - 1.0) * (m1 - 9.0) / 128.0;
        const double b2 = (m2 - 1.0) * (m2 - 9.0) / 128.0;
        const double d1 = a1 - b1;
        return 1.0 - d1 / y + (a2 - b2 - b1 * d1) / (y * y);
    }
    // I_nu'(y) = I_{nu+1}(y) + (nu/y) I_nu(y) with nu = -alpha; the y^alpha
    // prefactor cancels the nu/y term, leaving a single Bessel ratio.
    return bessel_i(1.0 - alpha, y) / bessel_i(-alpha, y);
}

}  // namespace kreinlab::specfun
