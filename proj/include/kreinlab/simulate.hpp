#pragma once

// Path and hitting-time sampling on top of the batch kernels, plus the two
// deterministic pathwise transforms that tie the process families together:
// the space-time scaling Bessel -> radial OU and the additive time change
// through the clock 4 * int Z.

#include <cstdint>
#include <string>
#include <vector>

#include "kreinlab/diffusion.hpp"

namespace kreinlab::simulate {

struct PathSample {
    std::vector<double> times;   // times[0] == 0, increasing
    std::vector<double> values;  // same length, all >= 0
    uint64_t seed = 0;
    double step = 0.0;  // base step (the scheme halves it near 0)
};

struct HitTimeSample {
    std::vector<double> draws;   // uncensored passage times, all > 0
    std::vector<double> clocks;  // quadratic clock 4 int X^2 at each draw
    int censored = 0;            // horizon-cut paths, excluded from draws
    diffusion::DiffusionSpec spec;
    double x0 = 0.0;
    double step = 0.0;
    double horizon = 0.0;
    uint64_t seed = 0;
};

// One Euler-Maruyama path from x0 recorded at every accepted step:
// reflection clamp max(X,0) after each update, step halved while
// X < 10*sqrt(step). Deterministic in (spec, x0, horizon, step, seed).
// noise_scale multiplies every Gaussian increment; 0 integrates the bare
// drift ODE (diagnostic mode).
PathSample simulate_path(const diffusion::DiffusionSpec& spec, double x0,
                         double horizon, double step, uint64_t seed,
                         double noise_scale = 1.0);

// n passage times to 0, detected by a within-step bridge crossing test
// (threshold 0), so the hit-time law carries O(step) bias rather than the
// O(sqrt(step)) of grid monitoring. Censoring horizon: 50/mu for the OU
// kinds, else 50*x0^2. Censored paths are counted, not drawn; for
// Down-conditioned specs (passage a.s. fast) censoring above 1% throws.
// Up-conditioned kinds are rejected: they never reach 0.
HitTimeSample hit_time_T0(const diffusion::DiffusionSpec& spec, double x0,
                          double step, uint64_t seed, int n);

// n first-passage times from x0 up to `level`, censored at `horizon`.
HitTimeSample cross_time(const diffusion::DiffusionSpec& spec, double x0,
                         double level, double horizon, double step,
                         uint64_t seed, int n);

// Marginal sample of X_t: n independent paths run to the horizon t.
std::vector<double> terminal_values(const diffusion::DiffusionSpec& spec,
                                    double x0, double t, double step,
                                    uint64_t seed, int n);

// Linear interpolation inside the recorded grid; t in [0, times.back()].
double path_value_at(const PathSample& path, double t);

// Space-time scaling of a Bessel path R into a radial OU path:
// X(t) = e^{-mu t} R((e^{2 mu t} - 1)/(2 mu)). The output keeps the input
// step. horizon <= 0 means "as far as the input clock reaches"; asking for
// more throws (clock overrun). mu = 0 is the identity transform.
PathSample ou_from_bessel_path(const PathSample& bessel, double mu,
                               double horizon = -1.0);

// Clock A_t = 4 * int_0^t Z_u du by trapezoid, then the path re-gridded
// onto a uniform clock: u -> Z(A^{-1}(u)). A flat clock (Z identically 0)
// degenerates to a single-point path.
PathSample time_change_4intZ(const PathSample& z);

// CSV artifacts: '#' header with the spec, seed and step, then one row per
// point. Formatting is %.17g throughout, so identical inputs give
// byte-identical files. extra_header, if nonempty, is written first and must
// consist of complete '#'-prefixed lines (the CLI passes its provenance
// block through it).
void write_csv(const PathSample& path, const diffusion::DiffusionSpec& spec,
               const std::string& file, const std::string& extra_header = "");
void write_csv(const HitTimeSample& sample, const std::string& file,
               const std::string& extra_header = "");

}  // namespace kreinlab::simulate
