#include "kreinlab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "kreinlab/batch.hpp"
#include "kreinlab/format.hpp"
#include "kreinlab/rng.hpp"

namespace kreinlab::simulate {

namespace {

// State range the spline caches should cover comfortably; beyond it the
// tables extrapolate their edge cells.
double range_hint(double x0, double horizon) {
    return std::max(4.0 * std::max(x0, 1.0), x0 + 6.0 * std::sqrt(horizon)) +
           2.0;
}

batch::BatchJob base_job(const diffusion::SimModel& sm, double x0, double step,
                         uint64_t seed, int n) {
    batch::BatchJob job;
    job.model = sm.kernel;
    job.x0 = x0;
    job.h0 = step;
    job.halve_below = 10.0 * std::sqrt(step);
    job.seed = seed;
    job.n = n;
    return job;
}

bool down_tilted(const diffusion::DiffusionSpec& spec) {
    return (spec.kind == diffusion::Kind::BesselDown && spec.nu > 0.0) ||
           (spec.kind == diffusion::Kind::RadialOUDown && spec.theta > 0.0);
}

void check_args(double x0, double step, int n) {
    if (!(x0 >= 0.0) || !std::isfinite(x0))
        throw std::domain_error("x0 >= 0");
    if (!(step > 0.0)) throw std::domain_error("step > 0");
    if (n <= 0) throw std::domain_error("n > 0");
}

}  // namespace

PathSample simulate_path(const diffusion::DiffusionSpec& spec, double x0,
                         double horizon, double step, uint64_t seed,
                         double noise_scale) {
    diffusion::validate(spec);
    check_args(x0, step, 1);
    if (!(horizon > 0.0)) throw std::domain_error("horizon > 0");

    auto sm = diffusion::make_sim_model(spec, 0.5 * std::sqrt(step),
                                        range_hint(x0, horizon));
    sm.kernel.noise_scale = noise_scale;
    const auto& m = sm.kernel;

    // Same update sequence as the batch kernels (path id 0 of this seed).
    const double h_full = step;
    const double h_half = 0.5 * step;
    const double sqh_full = std::sqrt(h_full);
    const double sqh_half = std::sqrt(h_half);
    const double halve_below = 10.0 * std::sqrt(step);
    const bool needs_floor =
        m.c_inv != 0.0 || m.form != batch::DriftForm::None;
    const double x_floor = needs_floor ? std::sqrt(step) : 0.0;

    PathSample out;
    out.seed = seed;
    out.step = step;
    const size_t expect = static_cast<size_t>(horizon / step) + 2;
    out.times.reserve(expect);
    out.values.reserve(expect);
    out.times.push_back(0.0);
    out.values.push_back(x0);

    double x = x0;
    double t = 0.0;
    uint64_t ctr = 0;
    while (t < horizon) {
        const bool halve = x < halve_below;
        const double h = halve ? h_half : h_full;
        const double sqh = halve ? sqh_half : sqh_full;

        const double z = rng::normal_draw(seed, 0, ctr) * m.noise_scale;
        ctr += 1;

        const double xf = x > x_floor ? x : x_floor;
        double d = std::fma(m.c_lin, xf, m.c_const);
        if (m.c_inv != 0.0) d += m.c_inv / xf;
        if (m.form == batch::DriftForm::LogDerivXSq)
            d = std::fma(m.mult, xf * m.table->eval(m.s * xf * xf), d);
        else if (m.form == batch::DriftForm::LogDerivX)
            d = std::fma(m.mult, m.table->eval(m.s * xf), d);

        const double sigma = m.diffusion == batch::DiffusionKind::Unit
                                 ? 1.0
                                 : 2.0 * std::sqrt(x > 0.0 ? x : 0.0);
        const double xn = std::fma(sqh * sigma, z, std::fma(h, d, x));
        x = xn > 0.0 ? xn : 0.0;
        t += h;
        out.times.push_back(t);
        out.values.push_back(x);
    }
    return out;
}

HitTimeSample hit_time_T0(const diffusion::DiffusionSpec& spec, double x0,
                          double step, uint64_t seed, int n) {
    diffusion::validate(spec);
    check_args(x0, step, n);
    if (!(x0 > 0.0)) throw std::domain_error("x0 > 0");
    if (!diffusion::reaches_zero(spec.kind))
        throw std::domain_error(
            "spec reaches 0 (Up-conditioned kinds never do)");

    const double horizon =
        spec.mu > 0.0 ? 50.0 / spec.mu : 50.0 * x0 * x0;
    const auto sm = diffusion::make_sim_model(
        spec, 0.5 * std::sqrt(step), range_hint(x0, horizon));

    batch::BatchJob job = base_job(sm, x0, step, seed, n);
    job.stop = batch::StopRule::AbsorbAtZero;
    job.threshold = 0.0;
    job.bridge = true;
    job.horizon = horizon;

    std::vector<batch::PathOutcome> raw(static_cast<size_t>(n));
    batch::select_backend()(job, raw.data());

    HitTimeSample out;
    out.spec = spec;
    out.x0 = x0;
    out.step = step;
    out.horizon = horizon;
    out.seed = seed;
    out.draws.reserve(raw.size());
    out.clocks.reserve(raw.size());
    for (const auto& o : raw) {
        if (o.censored) {
            ++out.censored;
        } else {
            out.draws.push_back(o.t);
            out.clocks.push_back(o.clock);
        }
    }
    if (down_tilted(spec) && out.censored > 0.01 * n)
        throw std::runtime_error(
            "censoring exceeded 1% for a Down-conditioned spec");
    return out;
}

HitTimeSample cross_time(const diffusion::DiffusionSpec& spec, double x0,
                         double level, double horizon, double step,
                         uint64_t seed, int n) {
    diffusion::validate(spec);
    check_args(x0, step, n);
    if (!(level > x0)) throw std::domain_error("level > x0");
    if (!(horizon > 0.0)) throw std::domain_error("horizon > 0");

    const auto sm = diffusion::make_sim_model(
        spec, 0.5 * std::sqrt(step), 1.5 * level + 1.0);

    batch::BatchJob job = base_job(sm, x0, step, seed, n);
    job.stop = batch::StopRule::CrossLevel;
    job.threshold = level;
    job.bridge = true;
    job.horizon = horizon;

    std::vector<batch::PathOutcome> raw(static_cast<size_t>(n));
    batch::select_backend()(job, raw.data());

    HitTimeSample out;
    out.spec = spec;
    out.x0 = x0;
    out.step = step;
    out.horizon = horizon;
    out.seed = seed;
    out.draws.reserve(raw.size());
    out.clocks.reserve(raw.size());
    for (const auto& o : raw) {
        if (o.censored) {
            ++out.censored;
        } else {
            out.draws.push_back(o.t);
            out.clocks.push_back(o.clock);
        }
    }
    return out;
}

std::vector<double> terminal_values(const diffusion::DiffusionSpec& spec,
                                    double x0, double t, double step,
                                    uint64_t seed, int n) {
    diffusion::validate(spec);
    check_args(x0, step, n);
    if (!(t > 0.0)) throw std::domain_error("t > 0");

    const auto sm = diffusion::make_sim_model(spec, 0.5 * std::sqrt(step),
                                              range_hint(x0, t));
    batch::BatchJob job = base_job(sm, x0, step, seed, n);
    job.stop = batch::StopRule::RunToHorizon;
    job.horizon = t;

    std::vector<batch::PathOutcome> raw(static_cast<size_t>(n));
    batch::select_backend()(job, raw.data());

    std::vector<double> out(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) out[i] = raw[i].x_final;
    return out;
}

double path_value_at(const PathSample& path, double t) {
    if (path.times.empty()) throw std::domain_error("empty path");
    if (!(t >= 0.0) || t > path.times.back())
        throw std::domain_error("t within the recorded grid");
    const auto it =
        std::upper_bound(path.times.begin(), path.times.end(), t);
    if (it == path.times.begin()) return path.values.front();
    if (it == path.times.end()) return path.values.back();
    const size_t j = static_cast<size_t>(it - path.times.begin());
    const double t0 = path.times[j - 1], t1 = path.times[j];
    const double w = t1 > t0 ? (t - t0) / (t1 - t0) : 1.0;
    return path.values[j - 1] + w * (path.values[j] - path.values[j - 1]);
}

PathSample ou_from_bessel_path(const PathSample& bessel, double mu,
                               double horizon) {
    if (bessel.times.size() < 2) throw std::domain_error("path too short");
    if (!(mu >= 0.0)) throw std::domain_error("mu >= 0");

    const double clock_max = bessel.times.back();
    const double t_max =
        mu > 0.0 ? std::log1p(2.0 * mu * clock_max) / (2.0 * mu) : clock_max;
    if (horizon <= 0.0) {
        horizon = t_max;
    } else if (horizon > t_max) {
        throw std::runtime_error(
            "clock overrun: input path horizon insufficient");
    }

    PathSample out;
    out.seed = bessel.seed;
    out.step = bessel.step;
    const int n_steps = static_cast<int>(horizon / bessel.step);
    out.times.reserve(static_cast<size_t>(n_steps) + 1);
    out.values.reserve(static_cast<size_t>(n_steps) + 1);
    for (int i = 0; i <= n_steps; ++i) {
        const double t = i * bessel.step;
        const double s =
            mu > 0.0 ? std::expm1(2.0 * mu * t) / (2.0 * mu) : t;
        const double r = path_value_at(bessel, std::min(s, clock_max));
        out.times.push_back(t);
        out.values.push_back(std::exp(-mu * t) * r);
    }
    return out;
}

PathSample time_change_4intZ(const PathSample& z) {
    const size_t n = z.times.size();
    if (n == 0 || z.values.size() != n)
        throw std::domain_error("well-formed path required");

    std::vector<double> clock(n);
    clock[0] = 0.0;
    for (size_t i = 1; i < n; ++i) {
        const double dt = z.times[i] - z.times[i - 1];
        clock[i] = clock[i - 1] + 2.0 * (z.values[i] + z.values[i - 1]) * dt;
    }

    PathSample out;
    out.seed = z.seed;
    if (!(clock.back() > 0.0)) {  // flat clock: the path never left 0
        out.times = {0.0};
        out.values = {z.values.front()};
        out.step = 0.0;
        return out;
    }

    const double du = clock.back() / static_cast<double>(n - 1);
    out.step = du;
    out.times.resize(n);
    out.values.resize(n);
    for (size_t j = 0; j < n; ++j) {
        const double u = j == n - 1 ? clock.back() : j * du;
        const auto it = std::upper_bound(clock.begin(), clock.end(), u);
        size_t hi = it == clock.end()
                        ? n - 1
                        : static_cast<size_t>(it - clock.begin());
        if (hi == 0) hi = 1;
        const double a0 = clock[hi - 1], a1 = clock[hi];
        const double w = a1 > a0 ? (u - a0) / (a1 - a0) : 1.0;
        out.times[j] = u;
        out.values[j] =
            z.values[hi - 1] + w * (z.values[hi] - z.values[hi - 1]);
    }
    return out;
}

namespace {

std::ofstream open_out(const std::string& file) {
    std::ofstream os(file);
    if (!os) throw std::runtime_error("cannot open output file: " + file);
    return os;
}

std::string spec_header(const diffusion::DiffusionSpec& spec) {
    return std::string("kind=") + diffusion::kind_name(spec.kind) +
           " delta=" + g17(spec.delta) + " mu=" + g17(spec.mu) +
           " nu=" + g17(spec.nu) + " theta=" + g17(spec.theta);
}

}  // namespace

void write_csv(const PathSample& path, const diffusion::DiffusionSpec& spec,
               const std::string& file, const std::string& extra_header) {
    auto os = open_out(file);
    os << extra_header;
    os << "# " << spec_header(spec) << " seed=" << path.seed
       << " step=" << g17(path.step) << "\n";
    os << "t,x\n";
    for (size_t i = 0; i < path.times.size(); ++i)
        os << g17(path.times[i]) << "," << g17(path.values[i]) << "\n";
}

void write_csv(const HitTimeSample& sample, const std::string& file,
               const std::string& extra_header) {
    auto os = open_out(file);
    os << extra_header;
    os << "# " << spec_header(sample.spec) << " x0=" << g17(sample.x0)
       << " step=" << g17(sample.step) << " seed=" << sample.seed
       << " horizon=" << g17(sample.horizon)
       << " censored=" << sample.censored << "\n";
    os << "index,T,A\n";
    for (size_t i = 0; i < sample.draws.size(); ++i)
        os << i << "," << g17(sample.draws[i]) << ","
           << g17(sample.clocks[i]) << "\n";
}

}  // namespace kreinlab::simulate
