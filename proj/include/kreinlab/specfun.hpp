#pragma once

// Classical special functions used throughout: Gamma, modified Bessel K/I,
// confluent hypergeometric Phi (Kummer) and Psi (Tricomi), Whittaker W and M,
// and the "hat" Bessel normalizations
//
//     Khat_a(y) = y^a K_a(y),     Ihat_a(y) = y^a I_{-a}(y),
//
// whose logarithmic derivatives build the drifts of the pushed diffusions.
//
// Routes are deliberately independent so identity checks are meaningful:
//   * W_{k,mu} by adaptive quadrature of its real-integral representation,
//   * M_{k,mu} through the Kummer series,
//   * K/I through Boost.Math (Temme / continued-fraction algorithms),
//   * Psi recovered from W, never the other way round.

#include <stdexcept>

namespace kreinlab::specfun {

// Gamma(x) for x > 0; throws std::domain_error otherwise.
double gamma_fn(double x);

// log Gamma(x) for x > 0 (used for ratio prefactors at large arguments).
double log_gamma(double x);

// Modified Bessel K_nu(x), x > 0. Even in nu.
double bessel_k(double nu, double x);

// Modified Bessel I_nu(x), x > 0, nu > -1.
double bessel_i(double nu, double x);

// Kummer confluent hypergeometric Phi(a,b;z) = 1F1(a;b;z) by series,
// truncated when |term| < 1e-16 * |sum| (10000-term cap).
// b must not be a non-positive integer.
double kummer_phi(double a, double b, double z);

// Tricomi Psi(a,b;z), z > 0, a > 0. Evaluated through whittaker_w so the
// project carries a single quadrature kernel for this family.
double tricomi_psi(double a, double b, double z);

// Whittaker W_{k,mu}(z), z > 0, requires mu - k + 1/2 > 0.
//
// Computed from the integral representation
//
//   W_{k,mu}(z) = z^k e^{-z/2} / Gamma(mu-k+1/2)
//                 * Int_0^inf e^{-t} t^{mu-k-1/2} (1 + t/z)^{mu+k-1/2} dt
//
// (Whittaker & Watson 16.12; Lebedev ch. 9). Some sources circulate with the
// (1+t/z) exponent transposed to mu-k+1/2; that variant fails Whittaker's ODE
// and the W_{0,mu} -> K_mu reduction (see test_specfun), so the exponent
// above is the one implemented.
double whittaker_w(double k, double mu, double z);

// Whittaker M_{k,mu}(z) = z^{mu+1/2} e^{-z/2} Phi(1/2-k+mu, 2mu+1; z).
double whittaker_m(double k, double mu, double z);

// d/dz log W_{k,mu}(z) via the contiguous relation
//   W'_{k,mu}(z) = ((mu+1/2)/z - 1/2) W_{k,mu}(z)
//                  - (mu-k+1/2) W_{k-1/2,mu+1/2}(z) / sqrt(z).
double whittaker_w_logderiv(double k, double mu, double z);

// d/dz log M_{k,mu}(z); the Phi part uses Phi'(a,b;z) = (a/b) Phi(a+1,b+1;z).
double whittaker_m_logderiv(double k, double mu, double z);

// Khat_a(y) = y^a K_a(y) and d/dy log Khat_a(y). The derivative uses the
// Bessel recurrence K_a'(y) = -(K_{a-1}(y) + K_{a+1}(y))/2, not finite
// differences.
double khat(double alpha, double y);
double khat_logderiv(double alpha, double y);

// Ihat_a(y) = y^a I_{-a}(y) and d/dy log Ihat_a(y), with
// I_nu'(y) = I_{nu+1}(y) + (nu/y) I_nu(y). The -a order mirrors Khat so the
// upward-pushed drifts take the same shape as the downward ones.
double ihat(double alpha, double y);
double ihat_logderiv(double alpha, double y);

namespace detail {
// Integral-representation backend for W; `transposed_exponent` selects the
// rejected (1+t/z)^{mu-k+1/2} variant. Kept only so tests can demonstrate
// that variant is inconsistent.
double whittaker_w_integral(double k, double mu, double z,
                            bool transposed_exponent);
}  // namespace detail

}  // namespace kreinlab::specfun
