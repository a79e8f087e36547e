// AVX2+FMA batch kernel: 4 paths per vector, lane refill on completion.
// Every floating-point operation mirrors the scalar kernel's sequence
// (same fma placement, same blend sources), and each path's draws depend
// only on (seed, path id, step counter), so the outcomes are bit-identical
// to run_batch_scalar regardless of how paths land in lanes.

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

#include "kreinlab/batch.hpp"
#include "kreinlab/rng.hpp"

namespace kreinlab::batch {

namespace {

inline __m256i mul64(__m256i a, __m256i b) {
    // low 64 bits: lo*lo + ((lo*hi + hi*lo) << 32)
    const __m256i a_hi = _mm256_srli_epi64(a, 32);
    const __m256i b_hi = _mm256_srli_epi64(b, 32);
    const __m256i lo = _mm256_mul_epu32(a, b);
    const __m256i m1 = _mm256_mul_epu32(a_hi, b);
    const __m256i m2 = _mm256_mul_epu32(a, b_hi);
    const __m256i mid = _mm256_add_epi64(m1, m2);
    return _mm256_add_epi64(lo, _mm256_slli_epi64(mid, 32));
}

inline __m256i mix64_v(__m256i x) {
    x = _mm256_xor_si256(x, _mm256_srli_epi64(x, 30));
    x = mul64(x, _mm256_set1_epi64x(0xbf58476d1ce4e5b9LL));
    x = _mm256_xor_si256(x, _mm256_srli_epi64(x, 27));
    x = mul64(x, _mm256_set1_epi64x(0x94d049bb133111ebLL));
    x = _mm256_xor_si256(x, _mm256_srli_epi64(x, 31));
    return x;
}

inline __m256i rng_bits_v(__m256i seed, __m256i path, __m256i ctr) {
    const __m256i h = mix64_v(_mm256_add_epi64(
        seed, mul64(path, _mm256_set1_epi64x(0x9e3779b97f4a7c15LL))));
    return mix64_v(_mm256_xor_si256(
        h, mul64(ctr, _mm256_set1_epi64x(0xd1b54a32d192ed03LL))));
}

// Exact double() of a u64 below 2^52.
inline __m256d to_double_52(__m256i x) {
    const __m256d magic = _mm256_set1_pd(4503599627370496.0);  // 2^52
    const __m256i xm = _mm256_or_si256(x, _mm256_castpd_si256(magic));
    return _mm256_sub_pd(_mm256_castsi256_pd(xm), magic);
}

inline __m256d u01_v(__m256i bits) {
    const __m256d n = to_double_52(_mm256_srli_epi64(bits, 12));
    return _mm256_add_pd(_mm256_mul_pd(n, _mm256_set1_pd(0x1p-52)),
                         _mm256_set1_pd(0x1p-53));
}

inline __m256d poly_log_v(__m256d x) {
    using namespace kreinlab::rng::detail;
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256i bits = _mm256_castpd_si256(x);
    __m256i kb = _mm256_srli_epi64(bits, 52);
    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(
        _mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL)),
        _mm256_set1_epi64x(0x3ff0000000000000LL)));
    const __m256d gt = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), gt);
    kb = _mm256_add_epi64(kb, _mm256_srli_epi64(_mm256_castpd_si256(gt), 63));
    const __m256d kd =
        _mm256_sub_pd(to_double_52(kb), _mm256_set1_pd(1023.0));
    const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d s2 = _mm256_mul_pd(s, s);
    __m256d p = _mm256_set1_pd(kLogC8);
    p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(kLogC7));
    p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(kLogC6));
    p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(kLogC5));
    p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(kLogC4));
    p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(kLogC3));
    p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(kLogC2));
    p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(kLogC1));
    p = _mm256_fmadd_pd(p, s2, one);
    const __m256d logm =
        _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), s), p);
    return _mm256_fmadd_pd(
        kd, _mm256_set1_pd(kLn2Hi),
        _mm256_fmadd_pd(kd, _mm256_set1_pd(kLn2Lo), logm));
}

inline __m256d ratio_central(__m256d r) {
    __m256d n = _mm256_set1_pd(2.5090809287301226727e+3);
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(3.3430575583588128105e+4));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(6.7265770927008700853e+4));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(4.5921953931549871457e+4));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(1.3731693765509461125e+4));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(1.9715909503065514427e+3));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(1.3314166789178437745e+2));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(3.3871328727963666080e+0));
    __m256d d = _mm256_set1_pd(5.2264952788528545610e+3);
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(2.8729085735721942674e+4));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(3.9307895800092710610e+4));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(2.1213794301586595867e+4));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(5.3941960214247511077e+3));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(6.8718700749205790830e+2));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(4.2313330701600911252e+1));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(1.0));
    return _mm256_div_pd(n, d);
}

inline __m256d ratio_mid(__m256d r) {
    r = _mm256_sub_pd(r, _mm256_set1_pd(1.6));
    __m256d n = _mm256_set1_pd(7.74545014278341407640e-4);
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(2.27238449892691845833e-2));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(2.41780725177450611770e-1));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(1.27045825245236838258e+0));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(3.64784832476320460504e+0));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(5.76949722146069140550e+0));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(4.63033784615654529590e+0));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(1.42343711074968357734e+0));
    __m256d d = _mm256_set1_pd(1.05075007164441684324e-9);
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(5.47593808499534494600e-4));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(1.51986665636164571966e-2));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(1.48103976427480074590e-1));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(6.89767334985100004550e-1));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(1.67638483018380384940e+0));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(2.05319162663775882187e+0));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(1.0));
    return _mm256_div_pd(n, d);
}

inline __m256d ratio_far(__m256d r) {
    r = _mm256_sub_pd(r, _mm256_set1_pd(5.0));
    __m256d n = _mm256_set1_pd(2.01033439929228813265e-7);
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(2.71155556874348757815e-5));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(1.24266094738807843860e-3));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(2.65321895265761230930e-2));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(2.96560571828504891230e-1));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(1.78482653991729133580e+0));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(5.46378491116411436990e+0));
    n = _mm256_fmadd_pd(n, r, _mm256_set1_pd(6.65790464350110377720e+0));
    __m256d d = _mm256_set1_pd(2.04426310338993978564e-15);
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(1.42151175831644588870e-7));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(1.84631831751005468180e-5));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(7.86869131145613259100e-4));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(1.48753612908506148525e-2));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(1.36929880922735805310e-1));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(5.99832206555887937690e-1));
    d = _mm256_fmadd_pd(d, r, _mm256_set1_pd(1.0));
    return _mm256_div_pd(n, d);
}

inline __m256d norminv_v(__m256d u) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d q = _mm256_sub_pd(u, _mm256_set1_pd(0.5));

    const __m256d r_c =
        _mm256_sub_pd(_mm256_set1_pd(0.180625), _mm256_mul_pd(q, q));
    const __m256d central = _mm256_mul_pd(q, ratio_central(r_c));

    const __m256d neg = _mm256_cmp_pd(q, zero, _CMP_LT_OQ);
    const __m256d rin = _mm256_blendv_pd(_mm256_sub_pd(one, u), u, neg);
    const __m256d r_t =
        _mm256_sqrt_pd(_mm256_xor_pd(poly_log_v(rin), sign));
    __m256d z = _mm256_blendv_pd(
        ratio_mid(r_t), ratio_far(r_t),
        _mm256_cmp_pd(r_t, _mm256_set1_pd(5.0), _CMP_GT_OQ));
    z = _mm256_blendv_pd(z, _mm256_xor_pd(z, sign), neg);

    const __m256d absq = _mm256_andnot_pd(sign, q);
    const __m256d is_central =
        _mm256_cmp_pd(absq, _mm256_set1_pd(0.425), _CMP_LE_OQ);
    return _mm256_blendv_pd(z, central, is_central);
}

inline __m256d spline_eval_v(const spline::SplineTable& tb, __m256d w) {
    const __m256d u = poly_log_v(w);
    const __m256d ur = _mm256_mul_pd(_mm256_sub_pd(u, _mm256_set1_pd(tb.u0)),
                                     _mm256_set1_pd(tb.inv_du));
    const __m256d uf = _mm256_floor_pd(ur);
    __m128i idx = _mm256_cvtpd_epi32(uf);  // uf integral, conversion exact
    idx = _mm_max_epi32(idx, _mm_setzero_si128());
    idx = _mm_min_epi32(idx, _mm_set1_epi32(tb.n_cells - 1));
    const __m256d t = _mm256_sub_pd(ur, _mm256_cvtepi32_pd(idx));
    const __m256d c3 = _mm256_i32gather_pd(tb.c3.data(), idx, 8);
    const __m256d c2 = _mm256_i32gather_pd(tb.c2.data(), idx, 8);
    const __m256d c1 = _mm256_i32gather_pd(tb.c1.data(), idx, 8);
    const __m256d c0 = _mm256_i32gather_pd(tb.c0.data(), idx, 8);
    __m256d v = _mm256_fmadd_pd(c3, t, c2);
    v = _mm256_fmadd_pd(v, t, c1);
    return _mm256_fmadd_pd(v, t, c0);
}

inline __m256d drift_v(const KernelModel& m, __m256d x, __m256d x_floor) {
    const __m256d xf = _mm256_max_pd(x, x_floor);
    __m256d acc = _mm256_fmadd_pd(_mm256_set1_pd(m.c_lin), xf,
                                  _mm256_set1_pd(m.c_const));
    if (m.c_inv != 0.0)
        acc = _mm256_add_pd(
            acc, _mm256_div_pd(_mm256_set1_pd(m.c_inv), xf));
    if (m.form == DriftForm::LogDerivXSq) {
        const __m256d xx = _mm256_mul_pd(xf, xf);
        const __m256d lv =
            spline_eval_v(*m.table, _mm256_mul_pd(_mm256_set1_pd(m.s), xx));
        acc = _mm256_fmadd_pd(_mm256_set1_pd(m.mult), _mm256_mul_pd(xf, lv), acc);
    } else if (m.form == DriftForm::LogDerivX) {
        const __m256d lv =
            spline_eval_v(*m.table, _mm256_mul_pd(_mm256_set1_pd(m.s), xf));
        acc = _mm256_fmadd_pd(_mm256_set1_pd(m.mult), lv, acc);
    }
    return acc;
}

}  // namespace

void run_batch_avx2(const BatchJob& job, PathOutcome* out) {
    const KernelModel& m = job.model;
    const double h_full_s = job.h0;
    const double h_half_s = 0.5 * job.h0;
    const bool needs_floor = m.c_inv != 0.0 || m.form != DriftForm::None;
    const double x_floor_s = needs_floor ? std::sqrt(job.h0) : 0.0;
    // Parked lanes idle at a state that cannot trip the stop rule.
    const double idle_x =
        job.stop == StopRule::CrossLevel ? 0.0 : job.threshold + 1e6;

    const __m256d h_full = _mm256_set1_pd(h_full_s);
    const __m256d h_half = _mm256_set1_pd(h_half_s);
    const __m256d sqh_full = _mm256_set1_pd(std::sqrt(h_full_s));
    const __m256d sqh_half = _mm256_set1_pd(std::sqrt(h_half_s));
    const __m256d halve_below = _mm256_set1_pd(job.halve_below);
    const __m256d threshold = _mm256_set1_pd(job.threshold);
    const __m256d horizon = _mm256_set1_pd(job.horizon);
    const __m256d noise_scale = _mm256_set1_pd(m.noise_scale);
    const __m256d x_floor = _mm256_set1_pd(x_floor_s);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256i seed_v = _mm256_set1_epi64x(static_cast<long long>(job.seed));
    const __m256i one64 = _mm256_set1_epi64x(1);

    alignas(32) double xs[4], ts[4], cks[4];
    alignas(32) uint64_t paths[4], ctrs[4], am[4];
    int out_idx[4];
    bool active[4];

    int next = 0;
    int live = 0;
    for (int lane = 0; lane < 4; ++lane) {
        if (next < job.n) {
            xs[lane] = job.x0;
            ts[lane] = 0.0;
            cks[lane] = 0.0;
            paths[lane] = job.path_begin + static_cast<uint64_t>(next);
            ctrs[lane] = 0;
            out_idx[lane] = next;
            active[lane] = true;
            ++next;
            ++live;
        } else {
            xs[lane] = idle_x;
            ts[lane] = -1e300;
            cks[lane] = 0.0;
            paths[lane] = ~0ULL;
            ctrs[lane] = 0;
            out_idx[lane] = -1;
            active[lane] = false;
        }
    }
    if (live == 0) return;
    for (int lane = 0; lane < 4; ++lane) am[lane] = active[lane] ? ~0ULL : 0ULL;

    __m256d x = _mm256_load_pd(xs);
    __m256d t = _mm256_load_pd(ts);
    __m256d ck = _mm256_load_pd(cks);
    // Lanes past their path's end are masked out of the stop logic so a
    // parked state can never re-trigger the spill path.
    __m256d act = _mm256_castsi256_pd(
        _mm256_load_si256(reinterpret_cast<const __m256i*>(am)));
    __m256i path_v =
        _mm256_load_si256(reinterpret_cast<const __m256i*>(paths));
    __m256i ctr_v = _mm256_load_si256(reinterpret_cast<const __m256i*>(ctrs));

    for (;;) {
        const __m256d halve = _mm256_cmp_pd(x, halve_below, _CMP_LT_OQ);
        const __m256d h = _mm256_blendv_pd(h_full, h_half, halve);
        const __m256d sqh = _mm256_blendv_pd(sqh_full, sqh_half, halve);

        __m256d z = norminv_v(u01_v(rng_bits_v(seed_v, path_v, ctr_v)));
        ctr_v = _mm256_add_epi64(ctr_v, one64);
        z = _mm256_mul_pd(z, noise_scale);

        const __m256d d = drift_v(m, x, x_floor);
        const __m256d sigma =
            m.diffusion == DiffusionKind::Unit
                ? _mm256_set1_pd(1.0)
                : _mm256_mul_pd(two, _mm256_sqrt_pd(_mm256_max_pd(x, zero)));
        const __m256d xn = _mm256_fmadd_pd(
            _mm256_mul_pd(sqh, sigma), z, _mm256_fmadd_pd(h, d, x));
        const __m256d xnc = _mm256_max_pd(xn, zero);

        const __m256d s1 = _mm256_mul_pd(x, x);
        const __m256d s2 = _mm256_mul_pd(xnc, xnc);
        ck = _mm256_fmadd_pd(_mm256_mul_pd(two, h), _mm256_add_pd(s1, s2), ck);
        t = _mm256_add_pd(t, h);

        __m256d stopm = zero;
        if (job.stop == StopRule::AbsorbAtZero)
            stopm = _mm256_cmp_pd(xn, threshold, _CMP_LE_OQ);
        else if (job.stop == StopRule::CrossLevel)
            stopm = _mm256_cmp_pd(xn, threshold, _CMP_GE_OQ);
        if (job.bridge && job.stop != StopRule::RunToHorizon) {
            // mirrors the scalar kernel: q = (2*a)*b / (h*(sigma*sigma)),
            // draw consumed only on lanes with q < 40 that did not stop
            const __m256d a = job.stop == StopRule::AbsorbAtZero
                                  ? _mm256_sub_pd(x, threshold)
                                  : _mm256_sub_pd(threshold, x);
            const __m256d b = job.stop == StopRule::AbsorbAtZero
                                  ? _mm256_sub_pd(xn, threshold)
                                  : _mm256_sub_pd(threshold, xn);
            const __m256d q =
                _mm256_div_pd(_mm256_mul_pd(_mm256_mul_pd(two, a), b),
                              _mm256_mul_pd(h, _mm256_mul_pd(sigma, sigma)));
            const __m256d needm = _mm256_andnot_pd(
                stopm, _mm256_cmp_pd(q, _mm256_set1_pd(40.0), _CMP_LT_OQ));
            const __m256d u = u01_v(rng_bits_v(seed_v, path_v, ctr_v));
            ctr_v = _mm256_add_epi64(
                ctr_v, _mm256_and_si256(_mm256_castpd_si256(needm), one64));
            const __m256d negq = _mm256_xor_pd(q, _mm256_set1_pd(-0.0));
            const __m256d firem = _mm256_and_pd(
                needm, _mm256_cmp_pd(poly_log_v(u), negq, _CMP_LT_OQ));
            stopm = _mm256_or_pd(stopm, firem);
        }
        const __m256d horm = _mm256_cmp_pd(t, horizon, _CMP_GE_OQ);
        const __m256d endm = _mm256_and_pd(_mm256_or_pd(stopm, horm), act);

        x = xnc;

        const int end_bits = _mm256_movemask_pd(endm);
        if (end_bits == 0) continue;

        const int stop_bits = _mm256_movemask_pd(stopm);
        _mm256_store_pd(xs, x);
        _mm256_store_pd(ts, t);
        _mm256_store_pd(cks, ck);
        _mm256_store_si256(reinterpret_cast<__m256i*>(paths), path_v);
        _mm256_store_si256(reinterpret_cast<__m256i*>(ctrs), ctr_v);

        for (int lane = 0; lane < 4; ++lane) {
            if (!active[lane] || !(end_bits & (1 << lane))) continue;
            const bool stopped = stop_bits & (1 << lane);
            out[out_idx[lane]] = {
                ts[lane], xs[lane], cks[lane],
                static_cast<uint8_t>(
                    stopped ? 0 : (job.stop == StopRule::RunToHorizon ? 0 : 1))};
            if (next < job.n) {
                xs[lane] = job.x0;
                ts[lane] = 0.0;
                cks[lane] = 0.0;
                paths[lane] = job.path_begin + static_cast<uint64_t>(next);
                ctrs[lane] = 0;
                out_idx[lane] = next;
                ++next;
            } else {
                xs[lane] = idle_x;
                ts[lane] = -1e300;
                cks[lane] = 0.0;
                paths[lane] = ~0ULL;
                ctrs[lane] = 0;
                out_idx[lane] = -1;
                active[lane] = false;
                --live;
            }
        }
        if (live == 0) return;
        for (int lane = 0; lane < 4; ++lane)
            am[lane] = active[lane] ? ~0ULL : 0ULL;

        x = _mm256_load_pd(xs);
        t = _mm256_load_pd(ts);
        ck = _mm256_load_pd(cks);
        act = _mm256_castsi256_pd(
            _mm256_load_si256(reinterpret_cast<const __m256i*>(am)));
        path_v = _mm256_load_si256(reinterpret_cast<const __m256i*>(paths));
        ctr_v = _mm256_load_si256(reinterpret_cast<const __m256i*>(ctrs));
    }
}

}  // namespace kreinlab::batch

#endif  // __AVX2__ && __FMA__
