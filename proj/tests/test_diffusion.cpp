#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include "kreinlab/diffusion.hpp"
#include "kreinlab/simulate.hpp"
#include "kreinlab/specfun.hpp"

using namespace kreinlab;
using diffusion::DiffusionSpec;
using diffusion::Kind;

namespace {

double rel_gap(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

// Independent route to the W-based transform: Tricomi U through its Kummer
// connection (two 1F1 series), so no quadrature is shared with the
// implementation. phi = Gamma(a)/Gamma(alpha) * xi^alpha * U(a, 1+alpha, xi)
// with a = alpha + theta/(2 mu), xi = mu x^2.
double phi_down_ou_series_oracle(double delta, double mu, double theta,
                                 double x) {
    const double alpha = 1.0 - 0.5 * delta;
    const double a = alpha + 0.5 * theta / mu;
    const double xi = mu * x * x;
    const double u =
        -std::numbers::pi / std::sin(std::numbers::pi * alpha) *
        (specfun::kummer_phi(a, 1.0 + alpha, xi) /
             (std::tgamma(a - alpha) * std::tgamma(1.0 + alpha)) -
         std::pow(xi, -alpha) * specfun::kummer_phi(a - alpha, 1.0 - alpha, xi) /
             (std::tgamma(a) * std::tgamma(1.0 - alpha)));
    return std::tgamma(a) / std::tgamma(alpha) * std::pow(xi, alpha) * u;
}

std::string slurp(const std::string& file) {
    std::ifstream is(file);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("spec validation names the violated constraint") {
    CHECK_THROWS_WITH_AS(diffusion::validate(diffusion::bessel(2.0)),
                         "0 < delta < 2", std::domain_error);
    CHECK_THROWS_WITH_AS(diffusion::validate(diffusion::bessel(0.0)),
                         "0 < delta < 2", std::domain_error);
    CHECK_THROWS_WITH_AS(diffusion::validate(diffusion::radial_ou(1.0, 0.0)),
                         "mu > 0", std::domain_error);
    CHECK_THROWS_WITH_AS(diffusion::validate(diffusion::bessel_down(1.0, -0.1)),
                         "nu >= 0", std::domain_error);
    CHECK_THROWS_WITH_AS(
        diffusion::validate(diffusion::radial_ou_down(1.0, 1.0, -2.0)),
        "theta > -2*alpha*mu", std::domain_error);
    CHECK_THROWS_WITH_AS(
        diffusion::validate(diffusion::radial_ou_up(1.0, 1.0, -0.1)),
        "theta >= 0", std::domain_error);
    CHECK_NOTHROW(diffusion::validate(diffusion::radial_ou_down(1.0, 1.0, -0.9)));
    CHECK_NOTHROW(diffusion::validate(diffusion::squared_ou(1.5, 2.0)));
}

TEST_CASE("base drifts") {
    for (double x : {0.1, 0.7, 3.0}) {
        CHECK(diffusion::drift_bessel(1.0, x) == 0.0);
        CHECK(diffusion::drift_radial_ou(1.0, 0.8, x) == -0.8 * x);
        // the OU pull is the Bessel drift minus mu x (one rounding apart)
        CHECK(rel_gap(diffusion::drift_radial_ou(0.7, 1.3, x) + 1.3 * x,
                      diffusion::drift_bessel(0.7, x)) < 1e-14);
        CHECK(diffusion::drift_squared_ou(1.5, 0.5, x) == 1.5 - x);
    }
    CHECK(diffusion::drift_bessel(1.5, 2.0) == doctest::Approx(0.125));
    CHECK_THROWS_AS(diffusion::drift_bessel(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(diffusion::drift_radial_ou(1.0, 1.0, 0.0),
                    std::domain_error);
    CHECK_THROWS_AS(diffusion::drift_squared_ou(1.0, 1.0, 0.0),
                    std::domain_error);
}

TEST_CASE("phi_down_bessel: normalization, closed form, monotonicity") {
    CHECK(diffusion::phi_down_bessel(1.3, 0.0, 2.0) == 1.0);

    // direct Macdonald form at deltahat = 2-alpha, nu = mu^2/8
    for (double alpha : {0.3, 0.5, 0.8}) {
        for (double mu : {0.5, 1.0, 2.0}) {
            for (double z : {0.3, 1.0, 4.0}) {
                const double direct =
                    std::pow(2.0, 1.0 - 0.5 * alpha) /
                    specfun::gamma_fn(0.5 * alpha) *
                    std::pow(0.5 * mu * z, 0.5 * alpha) *
                    specfun::bessel_k(0.5 * alpha, 0.5 * mu * z);
                const double got = diffusion::phi_down_bessel(
                    2.0 - alpha, mu * mu / 8.0, z);
                CHECK(rel_gap(got, direct) < 1e-12);
            }
        }
    }

    // z -> 0 limit
    CHECK(diffusion::phi_down_bessel(1.0, 0.5, 1e-8) ==
          doctest::Approx(1.0).epsilon(1e-3));

    // in (0,1], strictly decreasing in z and in nu
    double prev = 1.0;
    for (double z = 0.2; z < 6.0; z += 0.4) {
        const double v = diffusion::phi_down_bessel(1.0, 0.7, z);
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
    }
    prev = 1.0;
    for (double nu = 0.2; nu < 4.0; nu += 0.3) {
        const double v = diffusion::phi_down_bessel(1.2, nu, 1.0);
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
    }

    CHECK_THROWS_AS(diffusion::phi_down_bessel(1.0, 0.5, 0.0),
                    std::domain_error);
    CHECK_THROWS_AS(diffusion::phi_down_bessel(1.0, -0.5, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(diffusion::phi_down_bessel(2.5, 0.5, 1.0),
                    std::domain_error);
}

TEST_CASE("phi_down_radial_ou: series oracle, limits, monotonicity") {
    CHECK(diffusion::phi_down_radial_ou(1.0, 1.0, 0.0, 1.0) == 1.0);

    // continuity at theta -> 0
    CHECK(std::abs(diffusion::phi_down_radial_ou(1.0, 1.0, 1e-8, 1.0) - 1.0) <
          1e-6);

    // independent Kummer-series oracle
    for (double delta : {0.5, 1.0, 1.5}) {
        for (double mu : {0.5, 1.0, 2.0}) {
            for (double theta : {0.3, 0.9, 2.0}) {
                for (double x : {0.4, 1.0, 1.6}) {
                    const double got = diffusion::phi_down_radial_ou(
                        delta, mu, theta, x);
                    const double want =
                        phi_down_ou_series_oracle(delta, mu, theta, x);
                    CAPTURE(delta);
                    CAPTURE(mu);
                    CAPTURE(theta);
                    CAPTURE(x);
                    CHECK(rel_gap(got, want) < 1e-8);
                }
            }
        }
    }

    // negative theta above the divergence line is legal and gives values > 1
    const double boosted = diffusion::phi_down_radial_ou(1.0, 1.0, -0.5, 1.0);
    CHECK(boosted > 1.0);
    CHECK(std::isfinite(boosted));

    // in (0,1], strictly decreasing in x and theta
    double prev = 1.0;
    for (double x = 0.2; x < 4.0; x += 0.3) {
        const double v = diffusion::phi_down_radial_ou(1.0, 1.0, 0.8, x);
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
    }
    prev = 1.0;
    for (double theta = 0.2; theta < 4.0; theta += 0.3) {
        const double v = diffusion::phi_down_radial_ou(1.0, 1.0, theta, 1.0);
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
    }

    CHECK_THROWS_WITH_AS(diffusion::phi_down_radial_ou(1.0, 1.0, -1.0, 1.0),
                         "theta > -2*alpha*mu", std::domain_error);
}

TEST_CASE("phi_up_bessel: normalization, closed form, monotonicity") {
    CHECK(diffusion::phi_up_bessel(1.3, 0.0, 2.0) == 1.0);

    for (double alpha : {0.3, 0.5, 0.8}) {
        for (double mu : {0.5, 1.0, 2.0}) {
            for (double z : {0.3, 1.0, 4.0}) {
                const double direct =
                    std::pow(2.0, -0.5 * alpha) *
                    specfun::gamma_fn(1.0 - 0.5 * alpha) *
                    std::pow(0.5 * mu * z, 0.5 * alpha) *
                    specfun::bessel_i(-0.5 * alpha, 0.5 * mu * z);
                const double got =
                    diffusion::phi_up_bessel(2.0 - alpha, mu * mu / 8.0, z);
                CHECK(rel_gap(got, direct) < 1e-12);
            }
        }
    }

    double prev = 1.0;
    for (double z = 0.2; z < 6.0; z += 0.4) {
        const double v = diffusion::phi_up_bessel(1.0, 0.7, z);
        CHECK(v >= 1.0);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(diffusion::phi_up_bessel(1.0, 0.5, 1e-8) ==
          doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("phi_up_radial_ou: collapses to a Kummer series, monotone") {
    CHECK(diffusion::phi_up_radial_ou(1.0, 1.0, 0.0, 1.0) == 1.0);

    // The M-based form is exactly Phi(theta/(2mu), 1-alpha; mu x^2); check
    // the prefactor algebra against the bare series.
    for (double delta : {0.5, 1.0, 1.5}) {
        for (double mu : {0.5, 2.0}) {
            for (double theta : {0.4, 1.5}) {
                for (double x : {0.3, 1.0, 2.0}) {
                    const double alpha = 1.0 - 0.5 * delta;
                    const double want = specfun::kummer_phi(
                        0.5 * theta / mu, 1.0 - alpha, mu * x * x);
                    const double got =
                        diffusion::phi_up_radial_ou(delta, mu, theta, x);
                    CHECK(rel_gap(got, want) < 1e-11);
                }
            }
        }
    }

    double prev = 1.0;
    for (double x = 0.2; x < 4.0; x += 0.3) {
        const double v = diffusion::phi_up_radial_ou(1.0, 1.0, 0.8, x);
        CHECK(v >= 1.0);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(diffusion::phi_up_radial_ou(1.0, 1.0, 0.5, 1e-7) ==
          doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("pushed drifts: reductions and analytic form") {
    // zero tilt reduces to the base process exactly
    for (double x : {0.2, 1.0, 3.0}) {
        CHECK(diffusion::drift(diffusion::bessel_down(1.3, 0.0), x) ==
              diffusion::drift_bessel(1.3, x));
        CHECK(diffusion::drift(diffusion::bessel_up(0.7, 0.0), x) ==
              diffusion::drift_bessel(0.7, x));
        CHECK(diffusion::drift(diffusion::radial_ou_down(1.0, 1.0, 0.0), x) ==
              diffusion::drift_radial_ou(1.0, 1.0, x));
    }

    // BesselDown drift is the base drift plus the Macdonald log-derivative
    for (double x : {0.3, 1.0, 2.5}) {
        const double nu = 0.8, dh = 1.2, ahat = 1.0 - 0.5 * dh;
        const double sc = std::sqrt(2.0 * nu);
        const double want = 0.5 * (dh - 1.0) / x +
                            sc * specfun::khat_logderiv(ahat, sc * x);
        CHECK(diffusion::drift(diffusion::bessel_down(dh, nu), x) == want);
    }

    // the Down push points down, the Up push points up
    for (double x : {0.3, 1.0, 2.5}) {
        CHECK(diffusion::drift(diffusion::bessel_down(1.0, 0.6), x) <
              diffusion::drift_bessel(1.0, x));
        CHECK(diffusion::drift(diffusion::bessel_up(1.0, 0.6), x) >
              diffusion::drift_bessel(1.0, x));
        CHECK(diffusion::drift(diffusion::radial_ou_down(1.0, 1.0, 0.7), x) <
              diffusion::drift_radial_ou(1.0, 1.0, x));
        CHECK(diffusion::drift(diffusion::radial_ou_up(1.0, 1.0, 0.7), x) >
              diffusion::drift_radial_ou(1.0, 1.0, x));
    }
}

TEST_CASE("the two OU-down drift routes agree at theta = delta mu / 2") {
    double worst = 0.0;
    for (double delta : {0.5, 1.0, 1.5}) {
        for (double mu : {0.5, 1.0, 2.0}) {
            const double theta = 0.5 * delta * mu;
            for (int i = 0; i <= 40; ++i) {
                const double x =
                    0.05 * std::pow(100.0, i / 40.0);  // [0.05, 5]
                const double w =
                    diffusion::drift_radial_ou_down_w(delta, mu, theta, x);
                const double k =
                    diffusion::drift_radial_ou_down_k(delta, mu, x);
                worst = std::max(worst, std::abs(w - k) / std::abs(w));
            }
        }
    }
    CHECK(worst < 1e-6);
    MESSAGE("drift route max rel gap: ", worst);
}

TEST_CASE("drift decompositions hold to rounding") {
    // adding the pull mu x back to the OU drift recovers the Bessel drift
    for (double delta : {0.5, 1.3}) {
        for (double mu : {0.5, 2.0}) {
            for (double x : {0.11, 1.7}) {
                CHECK(rel_gap(diffusion::drift_radial_ou(delta, mu, x) + mu * x,
                              diffusion::drift_bessel(delta, x)) < 1e-14);
            }
        }
    }

    // alpha/x + mu x K'/K(mu x^2/2) equals the hat-normalized log-derivative
    for (double alpha : {0.3, 0.5, 0.8}) {
        for (double mu : {0.5, 1.0}) {
            for (double x : {0.4, 1.0, 2.2}) {
                const double y = 0.5 * mu * x * x;
                const double a = 0.5 * alpha;
                const double kprime_over_k =
                    -(specfun::bessel_k(a - 1.0, y) +
                      specfun::bessel_k(a + 1.0, y)) /
                    (2.0 * specfun::bessel_k(a, y));
                const double lhs = alpha / x + mu * x * kprime_over_k;
                const double rhs = mu * x * specfun::khat_logderiv(a, y);
                CHECK(rel_gap(lhs, rhs) < 1e-12);
            }
        }
    }
}

TEST_CASE("kernel models reproduce the analytic drifts through the cache") {
    const std::vector<DiffusionSpec> specs = {
        diffusion::bessel(1.0),
        diffusion::radial_ou(1.2, 0.7),
        diffusion::squared_ou(1.5, 1.0),
        diffusion::bessel_down(1.0, 0.5),
        diffusion::bessel_down(0.6, 1.0),
        diffusion::bessel_up(1.5, 0.7),
        diffusion::radial_ou_down(1.0, 1.0, 0.5),
        diffusion::radial_ou_down(0.5, 2.0, 1.3),
        diffusion::radial_ou_up(1.2, 0.8, 0.9),
    };
    for (const auto& spec : specs) {
        CAPTURE(diffusion::kind_name(spec.kind));
        const auto sm = diffusion::make_sim_model(spec, 0.005, 8.0);
        double worst = 0.0;
        for (int i = 0; i <= 120; ++i) {
            const double x = 0.01 * std::pow(600.0, i / 120.0);  // [0.01, 6]
            const double want = diffusion::drift(spec, x);
            const double got = diffusion::model_drift(sm, x);
            worst = std::max(worst,
                             std::abs(got - want) / std::max(1.0, std::abs(want)));
        }
        CHECK(worst < 1e-7);
    }
}

TEST_CASE("simulate_path: shape, determinism, positivity") {
    const auto spec = diffusion::bessel(0.5);
    const auto p = simulate::simulate_path(spec, 0.2, 2.0, 1e-3, 11);
    REQUIRE(p.times.size() == p.values.size());
    CHECK(p.times.front() == 0.0);
    CHECK(p.values.front() == 0.2);
    CHECK(p.times.back() >= 2.0);
    CHECK(std::is_sorted(p.times.begin(), p.times.end()));
    CHECK(*std::min_element(p.values.begin(), p.values.end()) >= 0.0);

    const auto q = simulate::simulate_path(spec, 0.2, 2.0, 1e-3, 11);
    CHECK(p.values == q.values);
    const auto r = simulate::simulate_path(spec, 0.2, 2.0, 1e-3, 12);
    CHECK(p.values != r.values);
}

TEST_CASE("simulate_path zero-noise smoke runs") {
    // flat drift: the Bessel of dimension 1 stays put
    const auto flat =
        simulate::simulate_path(diffusion::bessel(1.0), 1.0, 1.0, 1e-3, 5, 0.0);
    for (double v : flat.values) CHECK(v == 1.0);

    // OU pull from above the fixed point decays like the drift ODE
    const auto ou = simulate::simulate_path(diffusion::radial_ou(1.0, 0.5),
                                            2.0, 1.0, 1e-4, 5, 0.0);
    // x' = 0.5/(2x)... wait: the ODE x' = (delta-1)/(2x) - mu x with
    // delta=1 is x' = -0.5 x, so x(1) = 2 e^{-0.5}.
    CHECK(std::abs(simulate::path_value_at(ou, 1.0) - 2.0 * std::exp(-0.5)) <
          1e-3);
}

TEST_CASE("radial OU relaxes to its stationary second moment") {
    // X_t^2 is stationary Gamma(delta/2, rate mu): mean delta/(2 mu)
    const int n = 4000;
    const auto xs = simulate::terminal_values(diffusion::radial_ou(1.0, 1.0),
                                              0.7, 6.0, 1e-3, 99, n);
    double s = 0.0;
    for (double x : xs) s += x * x;
    const double mean = s / n;
    CHECK(std::abs(mean - 0.5) < 0.05);

    const auto zs = simulate::terminal_values(diffusion::squared_ou(1.0, 1.0),
                                              0.49, 6.0, 1e-3, 99, n);
    double sz = 0.0;
    for (double z : zs) sz += z;
    CHECK(std::abs(sz / n - 0.5) < 0.05);
}

TEST_CASE("hit_time_T0: smoke statistics and argument checking") {
    const auto s = simulate::hit_time_T0(diffusion::bessel(1.0), 1.0, 1e-3,
                                         321, 200);
    CHECK(s.censored + static_cast<int>(s.draws.size()) == 200);
    CHECK(s.draws.size() > 150);
    for (double t : s.draws) {
        CHECK(t > 0.0);
        CHECK(std::isfinite(t));
    }
    // median of T_0 from x0=1 for the 1-dimensional case is about 2.2
    auto draws = s.draws;
    std::sort(draws.begin(), draws.end());
    const double med = draws[draws.size() / 2];
    CHECK(med > 1.0);
    CHECK(med < 5.0);

    CHECK_THROWS_AS(
        simulate::hit_time_T0(diffusion::bessel_up(1.0, 0.5), 1.0, 1e-3, 1, 10),
        std::domain_error);
    CHECK_THROWS_AS(
        simulate::hit_time_T0(diffusion::bessel(1.0), 0.0, 1e-3, 1, 10),
        std::domain_error);
}

TEST_CASE("cross_time: up-conditioned passage is fast and uncensored") {
    const auto s = simulate::cross_time(diffusion::bessel_up(1.5, 0.5), 0.1,
                                        1.0, 50.0, 1e-3, 7, 100);
    CHECK(s.censored == 0);
    CHECK(s.draws.size() == 100);
    for (double t : s.draws) CHECK(t > 0.0);
    CHECK_THROWS_AS(simulate::cross_time(diffusion::bessel(1.0), 2.0, 1.0,
                                         10.0, 1e-3, 7, 10),
                    std::domain_error);
}

TEST_CASE("ou_from_bessel_path: identity, anchoring, clock overrun") {
    simulate::PathSample flat;
    flat.step = 0.01;
    for (int i = 0; i <= 400; ++i) {
        flat.times.push_back(i * 0.01);
        flat.values.push_back(1.5);
    }

    // mu = 0 is the identity transform
    const auto same = simulate::ou_from_bessel_path(flat, 0.0);
    CHECK(same.values.size() == flat.values.size());
    for (size_t i = 0; i < same.values.size(); ++i)
        CHECK(same.values[i] == doctest::Approx(1.5).epsilon(1e-12));

    // constant input maps to a pure exponential decay
    const auto dec = simulate::ou_from_bessel_path(flat, 0.7);
    CHECK(dec.values.front() == 1.5);
    for (size_t i = 0; i < dec.times.size(); ++i) {
        CHECK(dec.values[i] ==
              doctest::Approx(1.5 * std::exp(-0.7 * dec.times[i]))
                  .epsilon(1e-10));
    }
    // available horizon: log1p(2 mu T)/(2 mu) with T = 4
    CHECK(dec.times.back() <=
          std::log1p(2.0 * 0.7 * 4.0) / (2.0 * 0.7) + 1e-12);

    CHECK_THROWS_AS(simulate::ou_from_bessel_path(flat, 0.7, 3.9),
                    std::runtime_error);
    CHECK_NOTHROW(simulate::ou_from_bessel_path(flat, 0.7, 1.0));
}

TEST_CASE("time_change_4intZ: constant path, degenerate clock") {
    simulate::PathSample z;
    z.step = 0.01;
    for (int i = 0; i <= 300; ++i) {
        z.times.push_back(i * 0.01);
        z.values.push_back(0.8);
    }
    const auto hat = simulate::time_change_4intZ(z);
    // A_T = 4 * 0.8 * 3 = 9.6
    CHECK(hat.times.back() == doctest::Approx(9.6).epsilon(1e-12));
    CHECK(std::is_sorted(hat.times.begin(), hat.times.end()));
    for (double v : hat.values) CHECK(v == doctest::Approx(0.8).epsilon(1e-12));

    simulate::PathSample dead;
    dead.times = {0.0, 0.1, 0.2};
    dead.values = {0.0, 0.0, 0.0};
    const auto one = simulate::time_change_4intZ(dead);
    CHECK(one.times.size() == 1);
    CHECK(one.values.front() == 0.0);
}

TEST_CASE("csv artifacts are byte-reproducible") {
    const auto spec = diffusion::radial_ou(1.0, 1.0);
    const auto p = simulate::simulate_path(spec, 1.0, 0.05, 1e-3, 42);
    simulate::write_csv(p, spec, "/tmp/kreinlab_path_a.csv");
    simulate::write_csv(p, spec, "/tmp/kreinlab_path_b.csv");
    const auto a = slurp("/tmp/kreinlab_path_a.csv");
    CHECK(a == slurp("/tmp/kreinlab_path_b.csv"));
    CHECK(a.find("# kind=radial-ou") == 0);
    CHECK(a.find("t,x\n") != std::string::npos);

    const auto h = simulate::hit_time_T0(spec, 1.0, 1e-3, 7, 50);
    simulate::write_csv(h, "/tmp/kreinlab_hits_a.csv");
    simulate::write_csv(h, "/tmp/kreinlab_hits_b.csv");
    const auto ha = slurp("/tmp/kreinlab_hits_a.csv");
    CHECK(ha == slurp("/tmp/kreinlab_hits_b.csv"));
    CHECK(ha.find("censored=") != std::string::npos);

    std::remove("/tmp/kreinlab_path_a.csv");
    std::remove("/tmp/kreinlab_path_b.csv");
    std::remove("/tmp/kreinlab_hits_a.csv");
    std::remove("/tmp/kreinlab_hits_b.csv");
}
