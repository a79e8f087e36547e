#pragma once

// Statistical helpers for the verification layer: Kolmogorov-Smirnov tests
// (one-sample against an analytic CDF, two-sample), the first-passage law of
// the low-dimensional Bessel process, gamma sampling for oracle draws, and
// the two least-squares fits the exponent estimators need.

#include <cstdint>
#include <functional>
#include <vector>

namespace kreinlab::stats {

// P(K > x) for the Kolmogorov distribution; theta-series branch below
// x = 1.18, alternating exponential series above.
double kolmogorov_q(double x);

struct KsResult {
    double statistic = 0.0;  // sup-norm distance between the empirical CDFs
    double p_value = 1.0;    // asymptotic, with the small-n correction
    double n_eff = 0.0;      // n, or n1*n2/(n1+n2) for two samples
};

KsResult ks_one_sample(std::vector<double> draws,
                       const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// P(T_0 <= t) for the delta-dimensional Bessel process from x0 > 0,
// 0 < delta < 2: T_0 has the law of x0^2 / (2 G) with G ~ Gamma(1-delta/2).
double bessel_t0_cdf(double delta, double x0, double t);

// The same law conditioned on {T_0 <= horizon}; this is what a sampler
// that discards horizon-censored paths actually draws from.
std::function<double(double)> bessel_t0_cdf_truncated(double delta, double x0,
                                                      double horizon);

// n Gamma(shape) draws, Marsaglia-Tsang squeeze on the counter RNG
// (shape < 1 lifted from shape+1 by the power-of-uniform boost). Draw i
// uses path id i of `seed`, so keep stats seeds distinct from kernel seeds.
std::vector<double> gamma_draws(double shape, uint64_t seed, int n);

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
    size_t n = 0;
};
MeanSE mean_se(const std::vector<double>& v);

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 1.0;
};
// Ordinary least squares y ~ intercept + slope * x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// Through the origin, y ~ slope * x; r2 is 1 - SS_res/SS_tot as usual.
LineFit fit_proportional(const std::vector<double>& x,
                         const std::vector<double>& y);

}  // namespace kreinlab::stats
