#include <cmath>

#include "kreinlab/batch.hpp"
#include "kreinlab/rng.hpp"

namespace kreinlab::batch {

namespace {

// Drift at the floored state. The floor only matters for paths that are
// allowed to touch 0 (level-crossing and horizon runs); absorbed paths stop
// at threshold = sqrt(h0) >= floor before the floor can bite.
inline double drift_eval(const KernelModel& m, double x, double x_floor) {
    const double xf = x > x_floor ? x : x_floor;
    double acc = std::fma(m.c_lin, xf, m.c_const);
    if (m.c_inv != 0.0) acc += m.c_inv / xf;
    if (m.form == DriftForm::LogDerivXSq) {
        const double xx = xf * xf;
        const double lv = m.table->eval(m.s * xx);
        acc = std::fma(m.mult, xf * lv, acc);
    } else if (m.form == DriftForm::LogDerivX) {
        const double lv = m.table->eval(m.s * xf);
        acc = std::fma(m.mult, lv, acc);
    }
    return acc;
}

}  // namespace

void run_batch_scalar(const BatchJob& job, PathOutcome* out) {
    const KernelModel& m = job.model;
    const double h_full = job.h0;
    const double h_half = 0.5 * job.h0;
    const double sqh_full = std::sqrt(h_full);
    const double sqh_half = std::sqrt(h_half);
    const bool needs_floor =
        m.c_inv != 0.0 || m.form != DriftForm::None;
    const double x_floor = needs_floor ? std::sqrt(job.h0) : 0.0;

    for (int j = 0; j < job.n; ++j) {
        const uint64_t path = job.path_begin + static_cast<uint64_t>(j);
        double x = job.x0;
        double t = 0.0;
        double clock = 0.0;
        uint64_t ctr = 0;

        PathOutcome o;
        for (;;) {
            const bool halve = x < job.halve_below;
            const double h = halve ? h_half : h_full;
            const double sqh = halve ? sqh_half : sqh_full;

            double z = rng::norminv(
                rng::u01_from_bits(rng::rng_bits(job.seed, path, ctr)));
            ctr += 1;
            z = z * m.noise_scale;

            const double d = drift_eval(m, x, x_floor);
            const double sigma =
                m.diffusion == DiffusionKind::Unit
                    ? 1.0
                    : 2.0 * std::sqrt(x > 0.0 ? x : 0.0);
            const double xn = std::fma(sqh * sigma, z, std::fma(h, d, x));
            const double xnc = xn > 0.0 ? xn : 0.0;

            const double s1 = x * x;
            const double s2 = xnc * xnc;
            clock = std::fma(2.0 * h, s1 + s2, clock);
            t = t + h;

            bool stopped = false;
            if (job.stop == StopRule::AbsorbAtZero)
                stopped = xn <= job.threshold;
            else if (job.stop == StopRule::CrossLevel)
                stopped = xn >= job.threshold;
            if (!stopped && job.bridge && job.stop != StopRule::RunToHorizon) {
                const double a = job.stop == StopRule::AbsorbAtZero
                                     ? x - job.threshold
                                     : job.threshold - x;
                const double b = job.stop == StopRule::AbsorbAtZero
                                     ? xn - job.threshold
                                     : job.threshold - xn;
                const double q = 2.0 * a * b / (h * (sigma * sigma));
                // a u01 draw can never be below e^{-37}; skip the dead zone
                if (q < 40.0) {
                    const double u = rng::u01_from_bits(
                        rng::rng_bits(job.seed, path, ctr));
                    ctr += 1;
                    stopped = rng::poly_log(u) < -q;
                }
            }
            if (stopped) {
                o = {t, xnc, clock, 0};
                break;
            }
            x = xnc;
            if (t >= job.horizon) {
                o = {t, x, clock,
                     static_cast<uint8_t>(job.stop == StopRule::RunToHorizon ? 0 : 1)};
                break;
            }
        }
        out[j] = o;
    }
}

}  // namespace kreinlab::batch
