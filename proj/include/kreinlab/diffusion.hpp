#pragma once

// Diffusions on the half line: Bessel and radial Ornstein-Uhlenbeck
// processes, their squared versions, and the h-transformed variants
// conditioned through an exponential of the hitting time of 0 (Down) or of
// an upward passage (Up). For each kind this module provides
//
//   * the generator's drift b(x), with the h-transform correction computed
//     through analytic log-derivative chains (never finite differences),
//   * the closed-form Laplace transforms / eigenfunctions phi,
//   * a kernel model (drift coefficients + spline cache) that the batch
//     stepping kernels consume.
//
// Conventions: delta is the dimension, alpha = 1 - delta/2 the index. All
// radial kinds have unit diffusion coefficient; SquaredOU has 2*sqrt(z).

#include <memory>

#include "kreinlab/batch.hpp"
#include "kreinlab/spline.hpp"

namespace kreinlab::diffusion {

enum class Kind : int {
    Bessel = 0,       // dX = dB + (delta-1)/(2X) dt
    RadialOU = 1,     // dX = dB + [(delta-1)/(2X) - mu X] dt
    SquaredOU = 2,    // dZ = 2 sqrt(Z) dB + (delta - 2 mu Z) dt
    BesselDown = 3,   // Bessel(deltahat) tilted by exp(-nu T_0)
    BesselUp = 4,     // Bessel(deltahat) tilted by exp(-nu T_up)
    RadialOUDown = 5, // RadialOU(delta, mu) tilted by exp(-theta T_0)
    RadialOUUp = 6,   // RadialOU(delta, mu) tilted by exp(-theta T_up)
};

struct DiffusionSpec {
    Kind kind = Kind::Bessel;
    double delta = 1.0;  // dimension in (0,2); the hat dimension for
                         // BesselDown/BesselUp
    double mu = 0.0;     // OU pull rate (RadialOU*, SquaredOU)
    double nu = 0.0;     // exponential tilt rate (BesselDown/BesselUp)
    double theta = 0.0;  // exponential tilt rate (RadialOUDown/RadialOUUp)
};

DiffusionSpec bessel(double delta);
DiffusionSpec radial_ou(double delta, double mu);
DiffusionSpec squared_ou(double delta, double mu);
DiffusionSpec bessel_down(double deltahat, double nu);
DiffusionSpec bessel_up(double deltahat, double nu);
DiffusionSpec radial_ou_down(double delta, double mu, double theta);
DiffusionSpec radial_ou_up(double delta, double mu, double theta);

// Throws std::domain_error naming the violated constraint.
void validate(const DiffusionSpec& spec);

// True for the Down/Up kinds whose drift carries a log-derivative term.
bool is_pushed(Kind kind);

// True when the process reaches 0 (every kind except the Up-conditioned).
bool reaches_zero(Kind kind);

const char* kind_name(Kind kind);

// Base drifts. x (resp. z) must be > 0; throws std::domain_error at 0.
double drift_bessel(double delta, double x);
double drift_radial_ou(double delta, double mu, double x);
double drift_squared_ou(double delta, double mu, double z);

// E_z[exp(-nu T_0)] for the deltahat-Bessel process, z > 0, nu >= 0:
// a normalized Macdonald function of order alphahat = 1 - deltahat/2,
// equal to 1 at nu = 0 and decreasing in both z and nu.
double phi_down_bessel(double deltahat, double nu, double z);

// E_x[exp(-theta T_0)] for the radial OU, via the Whittaker-W closed form;
// requires theta > -2*alpha*mu (below that the transform diverges).
double phi_down_radial_ou(double delta, double mu, double theta, double x);

// 1 / E_{0+}[exp(-nu T_z)] for the deltahat-Bessel process: the normalized
// increasing eigenfunction, >= 1, increasing in z.
double phi_up_bessel(double deltahat, double nu, double z);

// Increasing eigenfunction for the radial OU, mirroring the W-based
// transform with Whittaker M; normalized to 1 at x -> 0.
double phi_up_radial_ou(double delta, double mu, double theta, double x);

// Drift of the spec's generator at x > 0. Pushed kinds add the analytic
// d/dx log phi correction to the base drift.
double drift(const DiffusionSpec& spec, double x);

// Downward-pushed OU drift along two independent routes. The W route is
// general in theta; the K route uses the Macdonald collapse that happens at
// theta = delta*mu/2 and is only valid there. Their agreement on a grid is
// one of the headline identity checks.
double drift_radial_ou_down_w(double delta, double mu, double theta, double x);
double drift_radial_ou_down_k(double delta, double mu, double x);

// Kernel model for the batch steppers. The spline cache (for pushed kinds)
// is built over states [x_lo, x_hi]; the returned struct owns it.
struct SimModel {
    batch::KernelModel kernel;
    std::shared_ptr<const spline::SplineTable> table;
};

SimModel make_sim_model(const DiffusionSpec& spec, double x_lo, double x_hi);

// The drift exactly as the stepping kernel evaluates it (through the spline
// cache). For measuring cache accuracy against drift().
double model_drift(const SimModel& model, double x);

}  // namespace kreinlab::diffusion
