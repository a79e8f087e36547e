#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

// Counter-based random numbers and the scalar reference implementations of
// the math primitives the batch kernels need. Everything here is written as
// an explicit sequence of IEEE operations (std::fma where fusion is
// intended, no implicit contraction; the build sets -ffp-contract=off) so
// the AVX2 backend can reproduce results bit for bit with the same op
// sequence. Draw i of path p depends only on (seed, p, i), which makes
// results independent of batching and scheduling.

namespace kreinlab::rng {

// splitmix64 finalizer; full-avalanche bijection on 64 bits.
inline uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

// Stateless counter RNG: two finalizer rounds over (seed, path, counter).
inline uint64_t rng_bits(uint64_t seed, uint64_t path, uint64_t ctr) {
    const uint64_t h = mix64(seed + path * 0x9e3779b97f4a7c15ULL);
    return mix64(h ^ (ctr * 0xd1b54a32d192ed03ULL));
}

// Uniform in (0,1): (2n+1)/2^53 with n the top 52 bits; both the multiply
// and the add are exact, so every backend produces the identical double.
inline double u01_from_bits(uint64_t bits) {
    return static_cast<double>(bits >> 12) * 0x1p-52 + 0x1p-53;
}

namespace detail {
// atanh series coefficients 1/(2j+1), highest order first (s^2 powers).
inline constexpr double kLogC8 = 1.0 / 17.0;
inline constexpr double kLogC7 = 1.0 / 15.0;
inline constexpr double kLogC6 = 1.0 / 13.0;
inline constexpr double kLogC5 = 1.0 / 11.0;
inline constexpr double kLogC4 = 1.0 / 9.0;
inline constexpr double kLogC3 = 1.0 / 7.0;
inline constexpr double kLogC2 = 1.0 / 5.0;
inline constexpr double kLogC1 = 1.0 / 3.0;
// ln 2 split so that k*kLn2Hi is exact for |k| <= 2^20.
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kSqrt2 = 1.41421356237309514547;
}  // namespace detail

// log(x) for normal positive finite x (no denormals), relative error a few
// 1e-16. Mantissa folded into [sqrt2/2, sqrt2), then 2 atanh((m-1)/(m+1)).
inline double poly_log(double x) {
    using namespace detail;
    const uint64_t bits = std::bit_cast<uint64_t>(x);
    uint64_t kb = bits >> 52;  // biased exponent, sign assumed 0
    double m = std::bit_cast<double>((bits & 0x000fffffffffffffULL) |
                                     0x3ff0000000000000ULL);
    if (m > kSqrt2) {
        m *= 0.5;
        kb += 1;
    }
    const double kd = static_cast<double>(kb) - 1023.0;
    const double s = (m - 1.0) / (m + 1.0);
    const double s2 = s * s;
    double p = kLogC8;
    p = std::fma(p, s2, kLogC7);
    p = std::fma(p, s2, kLogC6);
    p = std::fma(p, s2, kLogC5);
    p = std::fma(p, s2, kLogC4);
    p = std::fma(p, s2, kLogC3);
    p = std::fma(p, s2, kLogC2);
    p = std::fma(p, s2, kLogC1);
    p = std::fma(p, s2, 1.0);
    const double logm = (2.0 * s) * p;
    return std::fma(kd, kLn2Hi, std::fma(kd, kLn2Lo, logm));
}

namespace detail {
// Wichura's PPND16 rational approximations (AS 241), ~1e-16 relative.
inline double as241_central(double r) {
    double n = 2.5090809287301226727e+3;
    n = std::fma(n, r, 3.3430575583588128105e+4);
    n = std::fma(n, r, 6.7265770927008700853e+4);
    n = std::fma(n, r, 4.5921953931549871457e+4);
    n = std::fma(n, r, 1.3731693765509461125e+4);
    n = std::fma(n, r, 1.9715909503065514427e+3);
    n = std::fma(n, r, 1.3314166789178437745e+2);
    n = std::fma(n, r, 3.3871328727963666080e+0);
    double d = 5.2264952788528545610e+3;
    d = std::fma(d, r, 2.8729085735721942674e+4);
    d = std::fma(d, r, 3.9307895800092710610e+4);
    d = std::fma(d, r, 2.1213794301586595867e+4);
    d = std::fma(d, r, 5.3941960214247511077e+3);
    d = std::fma(d, r, 6.8718700749205790830e+2);
    d = std::fma(d, r, 4.2313330701600911252e+1);
    d = std::fma(d, r, 1.0);
    return n / d;
}

inline double as241_mid(double r) {
    r -= 1.6;
    double n = 7.74545014278341407640e-4;
    n = std::fma(n, r, 2.27238449892691845833e-2);
    n = std::fma(n, r, 2.41780725177450611770e-1);
    n = std::fma(n, r, 1.27045825245236838258e+0);
    n = std::fma(n, r, 3.64784832476320460504e+0);
    n = std::fma(n, r, 5.76949722146069140550e+0);
    n = std::fma(n, r, 4.63033784615654529590e+0);
    n = std::fma(n, r, 1.42343711074968357734e+0);
    double d = 1.05075007164441684324e-9;
    d = std::fma(d, r, 5.47593808499534494600e-4);
    d = std::fma(d, r, 1.51986665636164571966e-2);
    d = std::fma(d, r, 1.48103976427480074590e-1);
    d = std::fma(d, r, 6.89767334985100004550e-1);
    d = std::fma(d, r, 1.67638483018380384940e+0);
    d = std::fma(d, r, 2.05319162663775882187e+0);
    d = std::fma(d, r, 1.0);
    return n / d;
}

inline double as241_far(double r) {
    r -= 5.0;
    double n = 2.01033439929228813265e-7;
    n = std::fma(n, r, 2.71155556874348757815e-5);
    n = std::fma(n, r, 1.24266094738807843860e-3);
    n = std::fma(n, r, 2.65321895265761230930e-2);
    n = std::fma(n, r, 2.96560571828504891230e-1);
    n = std::fma(n, r, 1.78482653991729133580e+0);
    n = std::fma(n, r, 5.46378491116411436990e+0);
    n = std::fma(n, r, 6.65790464350110377720e+0);
    double d = 2.04426310338993978564e-15;
    d = std::fma(d, r, 1.42151175831644588870e-7);
    d = std::fma(d, r, 1.84631831751005468180e-5);
    d = std::fma(d, r, 7.86869131145613259100e-4);
    d = std::fma(d, r, 1.48753612908506148525e-2);
    d = std::fma(d, r, 1.36929880922735805310e-1);
    d = std::fma(d, r, 5.99832206555887937690e-1);
    d = std::fma(d, r, 1.0);
    return n / d;
}
}  // namespace detail

// Inverse standard normal CDF for u in (0,1). Deterministic op sequence;
// tail logs go through poly_log so vector backends can match exactly.
inline double norminv(double u) {
    const double q = u - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * detail::as241_central(r);
    }
    const double rin = q < 0.0 ? u : 1.0 - u;
    const double r = std::sqrt(-poly_log(rin));
    const double z = r <= 5.0 ? detail::as241_mid(r) : detail::as241_far(r);
    return q < 0.0 ? -z : z;
}

// One standard normal draw per (seed, path, counter).
inline double normal_draw(uint64_t seed, uint64_t path, uint64_t ctr) {
    return norminv(u01_from_bits(rng_bits(seed, path, ctr)));
}

}  // namespace kreinlab::rng
