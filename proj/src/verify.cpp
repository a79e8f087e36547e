#include "kreinlab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "kreinlab/format.hpp"
#include "kreinlab/rng.hpp"
#include "kreinlab/simulate.hpp"
#include "kreinlab/specfun.hpp"
#include "kreinlab/stats.hpp"

namespace kreinlab::verify {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out(n);
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i)
        out[i] = std::exp(a + (b - a) * i / (n - 1));
    return out;
}

}  // namespace

std::string report_line(const VerificationReport& r) {
    const char* tag =
        r.inconclusive ? "[INCONCLUSIVE]" : (r.pass ? "[PASS]" : "[FAIL]");
    std::string line = fmt("%s %s | %s | error=%.3g tolerance=%.3g", tag,
                           r.name.c_str(), r.params.c_str(), r.error,
                           r.tolerance);
    if (r.p_value >= 0.0) line += fmt(" p=%.4g", r.p_value);
    if (r.seed != 0)
        line += fmt(" seed=%llu", (unsigned long long)r.seed);
    line += fmt(" runtime=%.2fs", r.runtime_s);
    if (!r.detail.empty()) line += " | " + r.detail;
    return line;
}

std::string report_csv_header() {
    return "name,params,error,p_value,tolerance,pass,inconclusive,seed,detail";
}

std::string report_csv_row(const VerificationReport& r) {
    // params and detail are comma-free by construction; runtime_s is
    // deliberately absent so rerunning a seeded command rewrites the file
    // byte for byte (wall time goes to the printed line only)
    std::string row = r.name + "," + r.params + "," + g17(r.error) + "," +
                      g17(r.p_value) + "," + g17(r.tolerance) + "," +
                      (r.pass ? "1" : "0") + "," +
                      (r.inconclusive ? "1" : "0") + "," +
                      fmt("%llu", (unsigned long long)r.seed) + "," + r.detail;
    return row;
}

// ---------------------------------------------------------------------------
// Eigenfunction relations

namespace {

struct ConventionErrors {
    double err_sqrt = 0.0;  // x = sqrt(z)
    double err_id = 0.0;    // x = z
};

// max relative gap between lhs(z) and e^{-mu z/2} rhs(x) per convention
template <class Lhs, class Rhs>
ConventionErrors scan_conventions(const std::vector<double>& zs, double mu,
                                  Lhs lhs, Rhs rhs) {
    ConventionErrors e;
    for (double z : zs) {
        const double l = lhs(z);
        const double w = std::exp(-0.5 * mu * z);
        const double ra = w * rhs(std::sqrt(z));
        const double rb = w * rhs(z);
        e.err_sqrt = std::max(e.err_sqrt, std::fabs(l - ra) / std::fabs(l));
        e.err_id = std::max(e.err_id, std::fabs(l - rb) / std::fabs(l));
    }
    return e;
}

void require_relation_args(double alpha, double mu,
                           const std::vector<double>& zs) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("0 < alpha < 1");
    if (!(mu > 0.0)) throw std::domain_error("mu > 0");
    if (zs.empty()) throw std::domain_error("z grid is empty");
    for (double z : zs)
        if (!(z > 0.0)) throw std::domain_error("z > 0");
}

}  // namespace

VerificationReport check_eigen_relation_down(double alpha, double mu,
                                             const std::vector<double>& zs) {
    require_relation_args(alpha, mu, zs);
    const auto t0 = Clock::now();
    const double delta = 2.0 - 2.0 * alpha;
    const double theta = 0.5 * delta * mu;
    const double deltahat = 2.0 - alpha;
    const double nuhat = mu * mu / 8.0;

    const auto e = scan_conventions(
        zs, mu,
        [&](double z) { return diffusion::phi_down_bessel(deltahat, nuhat, z); },
        [&](double x) {
            return diffusion::phi_down_radial_ou(delta, mu, theta, x);
        });

    VerificationReport r;
    r.name = "eigen-relation-down";
    r.params = fmt("alpha=%g mu=%g z=[%g..%g] npts=%zu", alpha, mu, zs.front(),
                   zs.back(), zs.size());
    r.tolerance = 1e-7;
    r.error = std::min(e.err_sqrt, e.err_id);
    r.pass = r.error < r.tolerance;
    r.detail = fmt("err[x=sqrt(z)]=%.3g err[x=z]=%.3g selected=%s", e.err_sqrt,
                   e.err_id, e.err_sqrt <= e.err_id ? "sqrt" : "identity");
    r.runtime_s = seconds_since(t0);
    return r;
}

VerificationReport check_eigen_relation_up(double alpha, double mu,
                                           const std::vector<double>& zs) {
    require_relation_args(alpha, mu, zs);
    const auto t0 = Clock::now();
    const double delta = 2.0 - 2.0 * alpha;
    const double theta = 0.5 * delta * mu;
    const double deltahat = 2.0 - alpha;
    const double nuhat = mu * mu / 8.0;

    const auto e = scan_conventions(
        zs, mu,
        [&](double z) { return diffusion::phi_up_bessel(deltahat, nuhat, z); },
        [&](double x) {
            return diffusion::phi_up_radial_ou(delta, mu, theta, x);
        });

    // closed reduction of the increasing Whittaker function at k = 0
    double err_mi = 0.0;
    for (double z : zs) {
        const double xi = mu * z;
        const double m = specfun::whittaker_m(0.0, -0.5 * alpha, xi);
        const double rhs =
            std::pow(4.0, -0.5 * alpha) *
            specfun::gamma_fn(1.0 - 0.5 * alpha) * std::sqrt(xi) *
            specfun::bessel_i(-0.5 * alpha, 0.5 * xi);
        err_mi = std::max(err_mi, std::fabs(m - rhs) / std::fabs(m));
    }

    VerificationReport r;
    r.name = "eigen-relation-up";
    r.params = fmt("alpha=%g mu=%g z=[%g..%g] npts=%zu", alpha, mu, zs.front(),
                   zs.back(), zs.size());
    r.tolerance = 1e-7;
    r.error = std::max(std::min(e.err_sqrt, e.err_id), err_mi);
    r.pass = r.error < r.tolerance;
    r.detail = fmt("err[x=sqrt(z)]=%.3g err[x=z]=%.3g err[M/I]=%.3g selected=%s",
                   e.err_sqrt, e.err_id, err_mi,
                   e.err_sqrt <= e.err_id ? "sqrt" : "identity");
    r.runtime_s = seconds_since(t0);
    return r;
}

// ---------------------------------------------------------------------------
// Time change and tilt/push consistency

VerificationReport check_proposition_timechange(double alpha, double mu,
                                                double x0, int n, double step,
                                                uint64_t seed, double level) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("0 < alpha < 1");
    if (!(mu > 0.0)) throw std::domain_error("mu > 0");
    if (!(x0 > 0.0)) throw std::domain_error("x0 > 0");
    if (n <= 1) throw std::domain_error("n > 1");
    const auto t0 = Clock::now();

    const double delta = 2.0 - 2.0 * alpha;
    const double theta = 0.5 * delta * mu;
    const auto ou = simulate::hit_time_T0(
        diffusion::radial_ou_down(delta, mu, theta), x0, step, seed, n);
    const auto hat = simulate::hit_time_T0(
        diffusion::bessel_down(2.0 - alpha, mu * mu / 8.0), x0 * x0, step,
        seed + 1, n);

    const auto ks = stats::ks_two_sample(ou.clocks, hat.draws);

    VerificationReport r;
    r.name = "timechange-clock-law";
    r.params = fmt("alpha=%g mu=%g x0=%g n=%d step=%g", alpha, mu, x0, n, step);
    r.error = ks.statistic;
    r.p_value = ks.p_value;
    r.tolerance = level;
    r.pass = ks.p_value >= level;
    r.seed = seed;
    r.detail = fmt("clock-med=%.3g hit-med=%.3g censored=%d+%d",
                   median_of(ou.clocks), median_of(hat.draws), ou.censored,
                   hat.censored);
    r.runtime_s = seconds_since(t0);
    return r;
}

VerificationReport check_girsanov_esscher(double delta, double nu, double x0,
                                          double lambda, int n, double step,
                                          uint64_t seed) {
    if (!(lambda > 0.0)) throw std::domain_error("lambda > 0");
    const auto t0 = Clock::now();

    const auto sample =
        simulate::hit_time_T0(diffusion::bessel_down(delta, nu), x0, step,
                              seed, n);
    std::vector<double> vals;
    vals.reserve(n);
    for (double t : sample.draws) vals.push_back(std::exp(-lambda * t));
    // censored paths carry e^{-lambda T} below e^{-lambda*horizon}: count as 0
    vals.resize(n, 0.0);
    const auto ms = stats::mean_se(vals);

    const double target =
        diffusion::phi_down_bessel(delta, lambda + nu, x0) /
        diffusion::phi_down_bessel(delta, nu, x0);

    VerificationReport r;
    r.name = "tilt-push-consistency";
    r.params = fmt("delta=%g nu=%g x0=%g lambda=%g n=%d step=%g", delta, nu,
                   x0, lambda, n, step);
    r.error = std::fabs(ms.mean - target);
    r.tolerance = 2.0 * ms.se;
    r.pass = r.error <= r.tolerance;
    r.seed = seed;
    r.detail = fmt("mc=%.6g closed=%.6g se=%.2g censored=%d", ms.mean, target,
                   ms.se, sample.censored);
    r.runtime_s = seconds_since(t0);
    return r;
}

// ---------------------------------------------------------------------------
// Catalogued pairs and the exponent estimator

std::vector<KreinPair> standard_pairs(double alpha, double mu) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("0 < alpha < 1");
    if (!(mu > 0.0)) throw std::domain_error("mu > 0");
    const double delta = 2.0 - 2.0 * alpha;
    const double theta = 0.5 * delta * mu;

    std::vector<KreinPair> out;
    levy::LevyMeasure power;
    power.family = levy::LevyFamily::StablePower;
    power.alpha = alpha;
    out.push_back({power, diffusion::bessel(delta), "power-bessel"});

    levy::LevyMeasure tilted;
    tilted.family = levy::LevyFamily::TiltedStable;
    tilted.alpha = alpha;
    tilted.mu = mu;
    out.push_back({tilted, diffusion::bessel_down(delta, mu), "tilted-bessel-down"});

    out.push_back({levy::pitman_yor_measure(delta, mu),
                   diffusion::radial_ou(delta, mu), "sinh-radial-ou"});

    levy::LevyMeasure bare;
    bare.family = levy::LevyFamily::SinhFamily;
    bare.alpha = alpha;
    bare.mu = mu;
    bare.k = 0.0;
    out.push_back({bare, diffusion::radial_ou_down(delta, mu, theta),
                   "sinh-ou-down"});
    return out;
}

namespace {

struct TauDraws {
    std::vector<double> taus;
    int censored = 0;
};

// Paths from the boundary, occupation local time L = c_eps int 1{X < eps},
// tau read off at L >= ell. The stepping matches the batch kernels exactly
// (same floor, halving band and counter RNG) so the calibration below and
// the production kernels share one discretization.
TauDraws occupation_tau_draws(const diffusion::DiffusionSpec& spec, double ell,
                              double eps, double c_eps, double step,
                              double horizon, uint64_t seed, int n) {
    const double hi = 4.0 * std::sqrt(horizon) + 8.0;
    const auto sm = diffusion::make_sim_model(spec, 0.5 * std::sqrt(step), hi);
    const batch::KernelModel& m = sm.kernel;
    const bool needs_floor =
        m.c_inv != 0.0 || m.form != batch::DriftForm::None;
    const double x_floor = needs_floor ? std::sqrt(step) : 0.0;
    const double halve_below = 10.0 * std::sqrt(step);
    const double target = ell / c_eps;  // occupation time worth ell

    TauDraws out;
    out.taus.reserve(n);
    for (int p = 0; p < n; ++p) {
        double x = 0.0, t = 0.0, occ = 0.0;
        uint64_t ctr = 0;
        for (;;) {
            const double h = x < halve_below ? 0.5 * step : step;
            const double sqh = std::sqrt(h);
            const double z =
                rng::normal_draw(seed, (uint64_t)p, ctr++) * m.noise_scale;
            const double xf = x > x_floor ? x : x_floor;
            double acc = std::fma(m.c_lin, xf, m.c_const);
            if (m.c_inv != 0.0) acc += m.c_inv / xf;
            if (m.form == batch::DriftForm::LogDerivXSq)
                acc = std::fma(m.mult, xf * m.table->eval(m.s * xf * xf), acc);
            else if (m.form == batch::DriftForm::LogDerivX)
                acc = std::fma(m.mult, m.table->eval(m.s * xf), acc);
            const double sigma = m.diffusion == batch::DiffusionKind::Unit
                                     ? 1.0
                                     : 2.0 * std::sqrt(x > 0.0 ? x : 0.0);
            double xn = std::fma(sqh * sigma, z, std::fma(h, acc, x));
            if (xn < 0.0) xn = 0.0;
            if (x < eps) occ += h;
            t += h;
            x = xn;
            if (occ >= target) {
                out.taus.push_back(t);
                break;
            }
            if (t >= horizon) {
                ++out.censored;
                break;
            }
        }
    }
    return out;
}

// -log of the empirical Laplace transform over all n paths; censored paths
// contribute 0 (their true weight is below e^{-lambda*horizon}).
std::vector<double> neglog_laplace(const TauDraws& d, int n,
                                   const std::vector<double>& lambdas) {
    std::vector<double> ys;
    ys.reserve(lambdas.size());
    for (double l : lambdas) {
        double s = 0.0;
        for (double tau : d.taus) s += std::exp(-l * tau);
        const double mean = s / n;
        if (!(mean > 0.0))
            throw std::runtime_error("empirical Laplace transform vanished");
        ys.push_back(-std::log(mean));
    }
    return ys;
}

}  // namespace

double occupation_normalizer(double eps, double step) {
    if (!(eps > 0.0)) throw std::domain_error("eps > 0");
    if (!(step > 0.0 && std::sqrt(step) < eps))
        throw std::domain_error("sqrt(step) < eps");

    static std::map<std::pair<double, double>, double> cache;
    static std::mutex lock;
    {
        std::lock_guard<std::mutex> g(lock);
        auto it = cache.find({eps, step});
        if (it != cache.end()) return it->second;
    }

    // Unit-dimension Bessel: the inverse local time at 0 has exponent
    // ell*sqrt(2 lambda) under the normalization all checks assume. Run the
    // walker with the occupation gauge c = 1/eps, fit the measured exponent
    // against ell*sqrt(2 lambda); the slope kappa recovers the gauge,
    // c_eps = kappa/eps, absorbing the discretization bias of the band.
    const double ell_cal = 0.5;
    const std::vector<double> lambdas = {0.5, 1.0, 2.0, 4.0, 8.0};
    const int n = 800;
    const uint64_t cal_seed = 0xD1CEBA5Eu;
    const auto d = occupation_tau_draws(diffusion::bessel(1.0), ell_cal, eps,
                                        1.0 / eps, step, 40.0, cal_seed, n);
    if ((int)d.taus.size() < n / 2)
        throw std::runtime_error("occupation calibration mostly censored");
    const auto ys = neglog_laplace(d, n, lambdas);
    std::vector<double> xs;
    for (double l : lambdas) xs.push_back(ell_cal * std::sqrt(2.0 * l));
    const double kappa = stats::fit_proportional(xs, ys).slope;
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw std::runtime_error("occupation calibration slope not positive");

    const double c = kappa / eps;
    std::lock_guard<std::mutex> g(lock);
    cache[{eps, step}] = c;
    return c;
}

VerificationReport estimate_inverse_local_time_exponent(
    const KreinPair& pair, const std::vector<double>& lambdas, double ell,
    int n, double step, uint64_t seed, ExponentFit* fit) {
    const auto violations = levy::validate(pair.measure);
    if (!violations.empty())
        throw std::invalid_argument("invalid measure: " + violations.front());
    diffusion::validate(pair.spec);
    if (!diffusion::reaches_zero(pair.spec.kind))
        throw std::domain_error("pair diffusion never reaches 0");
    if (lambdas.empty()) throw std::domain_error("lambda grid is empty");
    for (double l : lambdas)
        if (!(l > 0.0)) throw std::domain_error("lambda > 0");
    if (!(ell > 0.0)) throw std::domain_error("ell > 0");
    if (n <= 1) throw std::domain_error("n > 1");
    const auto t0 = Clock::now();

    const double lmin = *std::min_element(lambdas.begin(), lambdas.end());
    const double horizon = std::max(40.0, 25.0 / lmin);

    std::vector<double> xs;
    xs.reserve(lambdas.size());
    for (double l : lambdas)
        xs.push_back(ell * levy::levy_exponent(pair.measure, l));

    const double epss[2] = {0.05, 0.02};
    double cs[2] = {0.0, 0.0}, r2s[2] = {0.0, 0.0};
    double slope_loglog = 0.0;
    int censored_total = 0;
    bool starved = false;
    for (int i = 0; i < 2; ++i) {
        const double c_eps = occupation_normalizer(epss[i], step);
        const auto d = occupation_tau_draws(pair.spec, ell, epss[i], c_eps,
                                            step, horizon, seed + i, n);
        censored_total += d.censored;
        if ((int)d.taus.size() < n / 2) {
            starved = true;
            break;
        }
        const auto ys = neglog_laplace(d, n, lambdas);
        const auto pf = stats::fit_proportional(xs, ys);
        cs[i] = pf.slope;
        r2s[i] = pf.r2;
        if (i == 0) {
            std::vector<double> lx, ly;
            for (size_t j = 0; j < lambdas.size(); ++j) {
                lx.push_back(std::log(lambdas[j]));
                ly.push_back(std::log(ys[j]));
            }
            slope_loglog = stats::fit_line(lx, ly).slope;
        }
    }

    VerificationReport r;
    r.name = "inverse-local-time-exponent";
    r.params = fmt("%s alpha=%g mu=%g ell=%g n=%d step=%g", pair.tag.c_str(),
                   pair.measure.alpha, pair.measure.mu, ell, n, step);
    r.seed = seed;
    r.tolerance = 0.01;  // on 1 - R^2
    if (starved) {
        r.inconclusive = true;
        r.error = 1.0;
        r.detail = fmt("censoring starved the sample censored=%d", censored_total);
        r.runtime_s = seconds_since(t0);
        if (fit) *fit = ExponentFit{};
        return r;
    }

    const double r2 = std::min(r2s[0], r2s[1]);
    const double cbar = 0.5 * (cs[0] + cs[1]);
    const double spread = std::fabs(cs[0] - cs[1]) / std::fabs(cbar);
    const bool c_ok = cbar > 0.0 && std::isfinite(cbar) && spread <= 0.10;
    r.error = 1.0 - r2;
    r.pass = r2 >= 0.99 && c_ok;
    // shape fits but the constant drifts with eps: flag, don't fail
    r.inconclusive = r2 >= 0.99 && !c_ok;
    r.detail = fmt("c[eps=0.05]=%.4g c[eps=0.02]=%.4g spread=%.1f%% "
                   "slope-loglog=%.3f censored=%d",
                   cs[0], cs[1], 100.0 * spread, slope_loglog, censored_total);
    r.runtime_s = seconds_since(t0);
    if (fit) {
        fit->c = cbar;
        fit->r2 = r2;
        fit->slope_loglog = slope_loglog;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Analytic reductions and route comparisons

VerificationReport check_whittaker_macdonald(const std::vector<double>& mus,
                                             const std::vector<double>& zs) {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (double m : mus) {
        for (double z : zs) {
            const double ref = std::sqrt(z / std::numbers::pi) *
                               specfun::bessel_k(m, 0.5 * z);
            const double gap =
                std::fabs(specfun::whittaker_w(0.0, m, z) - ref) / ref;
            worst = std::max(worst, gap);
        }
    }
    VerificationReport r;
    r.name = "whittaker-macdonald-reduction";
    r.params = fmt("mu=[%g..%g](%zu) z=[%g..%g](%zu)", mus.front(), mus.back(),
                   mus.size(), zs.front(), zs.back(), zs.size());
    r.error = worst;
    r.tolerance = 1e-9;
    r.pass = worst < r.tolerance;
    r.runtime_s = seconds_since(t0);
    return r;
}

VerificationReport check_whittaker_bessel_i(const std::vector<double>& mus,
                                            const std::vector<double>& zs) {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (double m : mus) {
        for (double z : zs) {
            const double ref = std::pow(4.0, m) * specfun::gamma_fn(1.0 + m) *
                               std::sqrt(z) * specfun::bessel_i(m, 0.5 * z);
            const double gap =
                std::fabs(specfun::whittaker_m(0.0, m, z) - ref) / ref;
            worst = std::max(worst, gap);
        }
    }
    VerificationReport r;
    r.name = "whittaker-bessel-i-reduction";
    r.params = fmt("mu=[%g..%g](%zu) z=[%g..%g](%zu)", mus.front(), mus.back(),
                   mus.size(), zs.front(), zs.back(), zs.size());
    r.error = worst;
    r.tolerance = 1e-9;
    r.pass = worst < r.tolerance;
    r.runtime_s = seconds_since(t0);
    return r;
}

VerificationReport check_whittaker_ode(const std::vector<double>& ks,
                                       const std::vector<double>& mus,
                                       const std::vector<double>& zs,
                                       double h) {
    const auto t0 = Clock::now();
    // 4th-order stencil: the 3-point one is too blunt near z = 0.2, where
    // u''''/u reaches the hundreds and h^2/12 u'''' alone would exceed the
    // tolerance with exact function values
    const auto d2 = [h](auto&& u, double z) {
        return (-u(z + 2 * h) + 16.0 * u(z + h) - 30.0 * u(z) +
                16.0 * u(z - h) - u(z - 2 * h)) /
               (12.0 * h * h);
    };
    double worst_w = 0.0, worst_m = 0.0;
    for (double k : ks) {
        for (double m : mus) {
            if (!(m - k + 0.5 > 0.0))
                throw std::invalid_argument("mu - k + 1/2 > 0");
            for (double z : zs) {
                const double coeff =
                    -0.25 + k / z + (0.25 - m * m) / (z * z);
                const auto w = [&](double t) {
                    return specfun::whittaker_w(k, m, t);
                };
                const auto mm = [&](double t) {
                    return specfun::whittaker_m(k, m, t);
                };
                const double w0 = w(z);
                worst_w = std::max(
                    worst_w, std::fabs(d2(w, z) + coeff * w0) / std::fabs(w0));
                const double m0 = mm(z);
                worst_m = std::max(
                    worst_m, std::fabs(d2(mm, z) + coeff * m0) / std::fabs(m0));
            }
        }
    }
    VerificationReport r;
    r.name = "whittaker-ode-residual";
    r.params = fmt("k=[%g..%g](%zu) mu=[%g..%g](%zu) z=[%g..%g](%zu) h=%g",
                   ks.front(), ks.back(), ks.size(), mus.front(), mus.back(),
                   mus.size(), zs.front(), zs.back(), zs.size(), h);
    r.error = std::max(worst_w, worst_m);
    r.tolerance = 1e-5;
    r.pass = r.error < r.tolerance;
    r.detail = fmt("res[W]=%.3g res[M]=%.3g", worst_w, worst_m);
    r.runtime_s = seconds_since(t0);
    return r;
}

VerificationReport check_drift_routes(const std::vector<double>& deltas,
                                      const std::vector<double>& mus,
                                      const std::vector<double>& xs) {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (double delta : deltas) {
        for (double mu : mus) {
            const double theta = 0.5 * delta * mu;
            for (double x : xs) {
                const double w =
                    diffusion::drift_radial_ou_down_w(delta, mu, theta, x);
                const double k =
                    diffusion::drift_radial_ou_down_k(delta, mu, x);
                const double scale =
                    std::max(std::fabs(w), std::fabs(k));
                if (scale < 1e-12) continue;  // both routes at a drift zero
                worst = std::max(worst, std::fabs(w - k) / scale);
            }
        }
    }
    VerificationReport r;
    r.name = "down-drift-two-routes";
    r.params = fmt("delta=[%g..%g](%zu) mu=[%g..%g](%zu) x=[%g..%g](%zu)",
                   deltas.front(), deltas.back(), deltas.size(), mus.front(),
                   mus.back(), mus.size(), xs.front(), xs.back(), xs.size());
    r.error = worst;
    r.tolerance = 1e-6;
    r.pass = worst < r.tolerance;
    r.runtime_s = seconds_since(t0);
    return r;
}

VerificationReport check_esscher_shift(const levy::LevyMeasure& m,
                                       const std::vector<double>& thetas,
                                       const std::vector<double>& lambdas) {
    const auto t0 = Clock::now();
    const auto bad = levy::validate(m);
    if (!bad.empty()) throw std::invalid_argument("invalid measure: " + bad[0]);
    double worst = 0.0;
    for (double theta : thetas) {
        const levy::LevyMeasure t = levy::esscher_tilt(m, theta);
        const double psi_theta = levy::levy_exponent(m, theta);
        for (double lam : lambdas) {
            const double lhs = levy::levy_exponent(t, lam);
            const double rhs = levy::levy_exponent(m, lam + theta) - psi_theta;
            const double gap = std::fabs(lhs - rhs);
            // both sides vanish at lambda = 0; absolute comparison there
            const double err =
                lam == 0.0 ? gap : gap / std::max(std::fabs(rhs), 1e-30);
            worst = std::max(worst, err);
        }
    }
    VerificationReport r;
    r.name = "esscher-exponent-shift";
    r.params =
        fmt("family=%s C=%g mu=%g alpha=%g k=%g theta=[%g..%g](%zu) "
            "lambda=[%g..%g](%zu)",
            levy::family_name(m.family), m.C, m.mu, m.alpha, m.k,
            thetas.front(), thetas.back(), thetas.size(), lambdas.front(),
            lambdas.back(), lambdas.size());
    r.error = worst;
    r.tolerance = 1e-8;
    r.pass = worst < r.tolerance;
    r.runtime_s = seconds_since(t0);
    return r;
}

// As alpha -> 0 the tilted-power row degenerates to the e^{-mu y}/y
// measure, whose partner diffusion has the closed drift
// 1/(2x) - sqrt(2 mu) K_1/K_0(sqrt(2 mu) x). The pushed drift must approach
// it monotonically.
VerificationReport check_gamma_limit_drift(double mu) {
    const auto t0 = Clock::now();
    const double alphas[3] = {0.1, 0.05, 0.02};
    const auto xgrid = log_grid(0.2, 3.0, 50);
    const double root = std::sqrt(2.0 * mu);
    double errs[3];
    for (int i = 0; i < 3; ++i) {
        const auto spec = diffusion::bessel_down(2.0 * (1.0 - alphas[i]), mu);
        double worst = 0.0;
        for (double x : xgrid) {
            const double limit =
                0.5 / x - root * specfun::bessel_k(1.0, root * x) /
                              specfun::bessel_k(0.0, root * x);
            const double gap =
                std::fabs(diffusion::drift(spec, x) - limit) / std::fabs(limit);
            worst = std::max(worst, gap);
        }
        errs[i] = worst;
    }

    VerificationReport r;
    r.name = "gamma-limit-drift-continuity";
    r.params = fmt("mu=%g alpha=[0.1 0.05 0.02] x=[0.2..3]", mu);
    r.error = errs[2];
    r.tolerance = 5e-2;
    r.pass = errs[2] < r.tolerance && errs[2] < errs[1] && errs[1] < errs[0];
    r.detail = fmt("gap[0.1]=%.3g gap[0.05]=%.3g gap[0.02]=%.3g", errs[0],
                   errs[1], errs[2]);
    r.runtime_s = seconds_since(t0);
    return r;
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<VerificationReport> table_sweep(uint64_t seed) {
    std::vector<VerificationReport> out;
    const auto zs = log_grid(0.2, 8.0, 25);
    out.push_back(check_eigen_relation_down(0.5, 1.0, zs));
    out.push_back(check_eigen_relation_up(0.5, 1.0, zs));
    out.push_back(check_proposition_timechange(0.5, 1.0, 1.0, 1500, 2e-4, seed));
    out.push_back(check_girsanov_esscher(1.0, 0.5, 1.0, 0.7, 20000, 5e-4,
                                         seed + 1));
    out.push_back(check_gamma_limit_drift(1.0));

    const auto pairs = standard_pairs(0.5, 0.5);
    const std::vector<double> lambdas = {0.5, 1.0, 2.0, 4.0, 8.0};
    for (size_t i = 0; i < pairs.size(); ++i)
        out.push_back(estimate_inverse_local_time_exponent(
            pairs[i], lambdas, 0.6, 1200, 2.5e-4, seed + 10 + i));
    return out;
}

}  // namespace kreinlab::verify
