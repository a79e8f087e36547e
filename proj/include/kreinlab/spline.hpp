#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "kreinlab/rng.hpp"

namespace kreinlab::spline {

// Cubic Hermite interpolant of L(w) on a uniform grid in u = log w, stored
// as per-cell polynomial coefficients (structure-of-arrays so the vector
// backend can gather). Nodes carry exact values and exact derivatives of
// the target function, so the error is pure interpolation error,
// O(du^4 f''''), ~1e-9 at du = 0.01 for the log-derivative drift terms.
struct SplineTable {
    double u0 = 0.0;        // log of the smallest grid argument
    double inv_du = 0.0;
    int n_cells = 0;
    std::vector<double> c0, c1, c2, c3;

    bool empty() const { return n_cells == 0; }

    // Value at argument w > 0. Arguments outside the grid evaluate the edge
    // cell's cubic (builders add margin so this is benign extrapolation).
    double eval(double w) const {
        const double u = rng::poly_log(w);
        const double ur = (u - u0) * inv_du;
        const double uf = std::floor(ur);
        int i = static_cast<int>(uf);
        i = i < 0 ? 0 : (i > n_cells - 1 ? n_cells - 1 : i);
        const double t = ur - static_cast<double>(i);
        double v = std::fma(c3[i], t, c2[i]);
        v = std::fma(v, t, c1[i]);
        return std::fma(v, t, c0[i]);
    }
};

// Build from exact value/derivative callables over w in [w_min, w_max]
// (log-spacing du, margin cells added on both sides). fprime is dL/dw.
SplineTable build_spline_table(const std::function<double(double)>& f,
                               const std::function<double(double)>& fprime,
                               double w_min, double w_max, double du = 0.01,
                               int margin_cells = 8);

}  // namespace kreinlab::spline
