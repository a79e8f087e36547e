#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace kreinlab::detail {

// Adaptive Gauss-Kronrod (30-61) on a finite interval. Callers are expected
// to have removed endpoint singularities / infinite tails by substitution
// before getting here; see the call sites for the substitutions used. The
// high-order rule matters: downstream checks finite-difference these
// integrals with h = 1e-3, which amplifies quadrature noise by 4/h^2, so the
// values themselves have to be good to ~1e-12 relative.
template <class F>
double gk_integrate(const F& f, double a, double b, double rel_tol) {
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, a, b, /*max_depth=*/12, rel_tol, &err);
    return v;
}

}  // namespace kreinlab::detail
