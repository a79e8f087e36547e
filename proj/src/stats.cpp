#include "kreinlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "kreinlab/rng.hpp"

namespace kreinlab::stats {

double kolmogorov_q(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 1.18) {
        // CDF through the conjugate theta series; four terms are below
        // 1e-17 already at x = 0.3, and smaller x only converge faster.
        const double v = std::numbers::pi / x;
        const double t = std::exp(-0.125 * v * v);
        const double t4 = t * t * t * t;      // t^4
        const double t8 = t4 * t4;            // t^8
        const double cdf = std::sqrt(2.0 * std::numbers::pi) / x *
                           (t * (1.0 + t8 * (1.0 + t8 * t8 *
                                             (1.0 + t8 * t8 * t8))));
        return std::max(0.0, 1.0 - cdf);
    }
    const double e = std::exp(-2.0 * x * x);
    const double e2 = e * e;
    double q = 0.0;
    double sign = 2.0;
    double eodd = e;  // e^{2j-1}
    double ej = 1.0;  // e^{j^2}, via j^2 = sum of the first j odd numbers
    for (int j = 1; j <= 30; ++j) {
        ej *= eodd;
        eodd *= e2;
        const double term = sign * ej;
        q += term;
        if (std::abs(term) < 1e-18) break;
        sign = -sign;
    }
    return std::clamp(q, 0.0, 1.0);
}

namespace {

double ks_pvalue(double d, double n_eff) {
    const double sn = std::sqrt(n_eff);
    return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace

KsResult ks_one_sample(std::vector<double> draws,
                       const std::function<double(double)>& cdf) {
    if (draws.empty()) throw std::invalid_argument("ks_one_sample: no draws");
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    double d = 0.0;
    for (size_t i = 0; i < draws.size(); ++i) {
        const double f = cdf(draws[i]);
        d = std::max({d, f - static_cast<double>(i) / n,
                      static_cast<double>(i + 1) / n - f});
    }
    KsResult r;
    r.statistic = d;
    r.n_eff = n;
    r.p_value = ks_pvalue(d, n);
    return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double xa = a[i], xb = b[j];
        if (xa <= xb) ++i;
        if (xb <= xa) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    r.n_eff = na * nb / (na + nb);
    r.p_value = ks_pvalue(d, r.n_eff);
    return r;
}

double bessel_t0_cdf(double delta, double x0, double t) {
    if (!(delta > 0.0 && delta < 2.0))
        throw std::domain_error("0 < delta < 2");
    if (!(x0 > 0.0)) throw std::domain_error("x0 > 0");
    if (!(t > 0.0)) return 0.0;
    const double alpha = 1.0 - 0.5 * delta;
    return boost::math::gamma_q(alpha, x0 * x0 / (2.0 * t));
}

std::function<double(double)> bessel_t0_cdf_truncated(double delta, double x0,
                                                      double horizon) {
    const double fh = bessel_t0_cdf(delta, x0, horizon);
    if (!(fh > 0.0))
        throw std::domain_error("truncation horizon has zero mass");
    return [delta, x0, horizon, fh](double t) {
        return bessel_t0_cdf(delta, x0, std::min(t, horizon)) / fh;
    };
}

std::vector<double> gamma_draws(double shape, uint64_t seed, int n) {
    if (!(shape > 0.0)) throw std::domain_error("shape > 0");
    if (n < 0) throw std::domain_error("n >= 0");
    std::vector<double> out;
    out.reserve(static_cast<size_t>(n));
    const bool lift = shape < 1.0;
    const double d = (lift ? shape + 1.0 : shape) - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (int i = 0; i < n; ++i) {
        const auto path = static_cast<uint64_t>(i);
        uint64_t ctr = 0;
        double g = 0.0;
        for (;;) {
            const double z = rng::normal_draw(seed, path, ctr++);
            const double v1 = 1.0 + c * z;
            if (v1 <= 0.0) continue;
            const double v = v1 * v1 * v1;
            const double u =
                rng::u01_from_bits(rng::rng_bits(seed, path, ctr++));
            const double z2 = z * z;
            if (u < 1.0 - 0.0331 * z2 * z2 ||
                std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) {
                g = d * v;
                break;
            }
        }
        if (lift) {
            const double u =
                rng::u01_from_bits(rng::rng_bits(seed, path, ctr++));
            g *= std::pow(u, 1.0 / shape);
        }
        out.push_back(g);
    }
    return out;
}

MeanSE mean_se(const std::vector<double>& v) {
    MeanSE m;
    m.n = v.size();
    if (v.empty()) return m;
    double s = 0.0;
    for (double x : v) s += x;
    m.mean = s / static_cast<double>(m.n);
    if (m.n < 2) return m;
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(ss / (static_cast<double>(m.n) *
                           (static_cast<double>(m.n) - 1.0)));
    return m;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need matched n >= 2");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: degenerate x");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

LineFit fit_proportional(const std::vector<double>& x,
                         const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("fit_proportional: need matched n >= 1");
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    if (!(sxx > 0.0))
        throw std::invalid_argument("fit_proportional: degenerate x");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = 0.0;
    double my = 0.0;
    for (double v : y) my += v;
    my /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.slope * x[i];
        ss_res += r * r;
        const double dy = y[i] - my;
        ss_tot += dy * dy;
    }
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

}  // namespace kreinlab::stats
