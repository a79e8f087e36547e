#pragma once

#include <string>
#include <vector>

namespace kreinlab::levy {

// One-parameter families of Levy measures nu(dy) = h(y) dy on (0, inf).
//
//   SinhFamily    h(y) = C (mu / sinh(mu y))^{alpha+1} e^{mu k y}
//   StablePower   h(y) = C y^{-(alpha+1)}
//   TiltedStable  h(y) = C e^{-mu y} y^{-(alpha+1)}
//   GammaRow      h(y) = C e^{-mu y} / y
//
// mu doubles as the exponential rate of the tilted/gamma families; only
// SinhFamily uses k. theta_tilt records the accumulated Esscher tilt (the
// tilt itself is folded into the parameters, see esscher_tilt).
enum class LevyFamily { SinhFamily, StablePower, TiltedStable, GammaRow };

struct LevyMeasure {
    LevyFamily family = LevyFamily::StablePower;
    double C = 1.0;
    double mu = 0.0;
    double alpha = 0.5;
    double k = 0.0;
    double theta_tilt = 0.0;
};

// Names of violated constraints; empty means the measure is valid. Near a
// constraint boundary (within 1e-6) the integrability of (y ^ 1) nu(dy) is
// additionally confirmed by quadrature. Never throws.
std::vector<std::string> validate(const LevyMeasure& m);

// Density h(y). Domain error for y <= 0.
double density(const LevyMeasure& m, double y);

// Levy exponent Psi(lambda) = int_0^inf (1 - e^{-lambda y}) h(y) dy.
//
// The quadrature route splits at y = 1: on [0,1] the two leading singular
// terms of the integrand, C lambda y^{-alpha} and
// C lambda (c - lambda/2) y^{1-alpha} with c the linear coefficient of h's
// local expansion, are integrated analytically and only the smooth remainder
// is quadrated (under y = s^2); the tail is handled under y = e^v with a
// family-specific cutoff. Relative accuracy ~1e-10.
//
// The closed-form route exists for all families except SinhFamily:
//   StablePower   C Gamma(1-alpha)/alpha lambda^alpha
//   TiltedStable  C Gamma(1-alpha)/alpha ((lambda+mu)^alpha - mu^alpha)
//   GammaRow      C log(1 + lambda/mu)
enum class ExponentMethod { ClosedForm, Quadrature };

struct LevyExponent {
    LevyMeasure measure;
    ExponentMethod method = ExponentMethod::Quadrature;
};

bool has_closed_form(LevyFamily family);
double exponent(const LevyExponent& e, double lambda);

// Convenience: closed form when the family has one, quadrature otherwise.
double levy_exponent(const LevyMeasure& m, double lambda);

// Esscher tilt nu(dy) -> e^{-theta y} nu(dy), realized as parameter
// rewriting: SinhFamily k -> k - theta/mu, StablePower -> TiltedStable with
// rate theta, TiltedStable/GammaRow mu -> mu + theta. Tilts compose
// additively; theta_tilt accumulates. Domain error for theta < 0.
LevyMeasure esscher_tilt(const LevyMeasure& m, double theta);

// SinhFamily with alpha = 1 - delta/2, k = delta/2; valid for delta in (0,2).
LevyMeasure pitman_yor_measure(double delta, double mu, double C = 1.0);

// Plain key-value text form (family, C, mu, alpha, k, theta_tilt), one
// "key=value" per line; used by the CLI config. from_kv throws
// std::invalid_argument on unknown families/keys or malformed lines.
std::string to_kv(const LevyMeasure& m);
LevyMeasure from_kv(const std::string& text);

const char* family_name(LevyFamily family);

}  // namespace kreinlab::levy
