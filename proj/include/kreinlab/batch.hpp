#pragma once

#include <cstdint>
#include <string>

#include "kreinlab/spline.hpp"

namespace kreinlab::batch {

// Drift model evaluated inside the stepping kernels:
//   b(x) = c_inv/x + c_lin*x + c_const + mult * F(x)
// with F(x) = x * L(s*x*x) (LogDerivXSq, the pushed radial forms),
//      F(x) = L(s*x)       (LogDerivX, the pushed Bessel forms),
// or absent. L is a spline table (see spline.hpp) of a log-derivative.
enum class DriftForm : int { None = 0, LogDerivXSq = 1, LogDerivX = 2 };

// Unit diffusion for radial processes; 2*sqrt(max(x,0)) for squared ones.
enum class DiffusionKind : int { Unit = 0, TwoSqrtX = 1 };

struct KernelModel {
    double c_inv = 0.0;
    double c_lin = 0.0;
    double c_const = 0.0;
    double mult = 0.0;
    double s = 1.0;
    DriftForm form = DriftForm::None;
    DiffusionKind diffusion = DiffusionKind::Unit;
    const spline::SplineTable* table = nullptr;
    // Multiplies every normal draw; 0 turns the scheme into its drift ODE.
    double noise_scale = 1.0;
};

// What ends a path:
//   AbsorbAtZero: record T0 when X <= threshold (threshold = hit epsilon)
//   CrossLevel:   record T when X >= threshold, started below
//   RunToHorizon: no absorbing set; record terminal state at the horizon
enum class StopRule : int { AbsorbAtZero = 0, CrossLevel = 1, RunToHorizon = 2 };

struct BatchJob {
    double x0 = 1.0;
    double h0 = 1e-4;       // base step; halved while x < halve_below
    double halve_below = 0.0;
    double threshold = 0.0;
    double horizon = 0.0;
    uint64_t seed = 0;
    uint64_t path_begin = 0;  // paths get ids path_begin..path_begin+n-1
    int n = 0;
    StopRule stop = StopRule::AbsorbAtZero;
    // Within-step Brownian-bridge crossing test for the two level rules:
    // a step from x to xn that stays on the non-crossed side still stops
    // with probability exp(-2(x-b)(xn-b)/(h sigma^2)), sigma frozen at the
    // step start. Removes the O(sqrt(h)) discrete-monitoring bias of grid
    // detection, leaving the O(h) weak error. The extra uniform is consumed
    // (ctr advances) only when the test actually runs, and the comparison
    // is done in log space through poly_log so both backends round alike.
    bool bridge = false;
    KernelModel model;
};

struct PathOutcome {
    double t = 0.0;       // hit time, or elapsed time at the horizon
    double x_final = 0.0; // state when the path ended
    double clock = 0.0;   // 4 * int_0^t X_s^2 ds, trapezoid
    uint8_t censored = 0; // 1 if the horizon ended the path first
};

using BatchFn = void (*)(const BatchJob&, PathOutcome*);

// Scalar reference; always available.
void run_batch_scalar(const BatchJob& job, PathOutcome* out);

// 4-lane AVX2+FMA variant, bit-identical to the scalar kernel. Only defined
// when the build carries the AVX2 translation unit; query avx2_available().
void run_batch_avx2(const BatchJob& job, PathOutcome* out);

// Compiled in and supported by this CPU.
bool avx2_available();

// "scalar" or "avx2"; nullptr for unknown/unavailable names.
BatchFn backend_by_name(const std::string& name);

// Picks the widest backend the CPU supports at runtime; the environment
// variable KREINLAB_BACKEND=scalar|avx2 overrides (unsupported or unknown
// values fall back to scalar).
BatchFn select_backend();
std::string backend_name();

}  // namespace kreinlab::batch
