#include "kreinlab/spline.hpp"

#include <cmath>
#include <stdexcept>

namespace kreinlab::spline {

SplineTable build_spline_table(const std::function<double(double)>& f,
                               const std::function<double(double)>& fprime,
                               double w_min, double w_max, double du,
                               int margin_cells) {
    if (!(w_min > 0.0 && w_max > w_min))
        throw std::domain_error("spline: need 0 < w_min < w_max");
    if (!(du > 0.0)) throw std::domain_error("spline: need du > 0");

    const double lo = std::log(w_min) - margin_cells * du;
    const double hi = std::log(w_max) + margin_cells * du;
    const int n_cells = static_cast<int>(std::ceil((hi - lo) / du));
    const int n_nodes = n_cells + 1;

    std::vector<double> fv(n_nodes), mv(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        const double u = lo + i * du;
        const double w = std::exp(u);
        fv[i] = f(w);
        mv[i] = fprime(w) * w * du;  // d/dt with t the in-cell coordinate
    }

    SplineTable tb;
    tb.u0 = lo;
    tb.inv_du = 1.0 / du;
    tb.n_cells = n_cells;
    tb.c0.resize(n_cells);
    tb.c1.resize(n_cells);
    tb.c2.resize(n_cells);
    tb.c3.resize(n_cells);
    for (int i = 0; i < n_cells; ++i) {
        const double df = fv[i + 1] - fv[i];
        tb.c0[i] = fv[i];
        tb.c1[i] = mv[i];
        tb.c2[i] = 3.0 * df - 2.0 * mv[i] - mv[i + 1];
        tb.c3[i] = -2.0 * df + mv[i] + mv[i + 1];
    }
    return tb;
}

}  // namespace kreinlab::spline
