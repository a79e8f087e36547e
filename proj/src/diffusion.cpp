#include "kreinlab/diffusion.hpp"

#include <cmath>
#include <stdexcept>

#include "kreinlab/specfun.hpp"

namespace kreinlab::diffusion {

namespace {

double alpha_of(double delta) { return 1.0 - 0.5 * delta; }

// Whittaker first index of the tilted OU transform.
double kappa_of(double delta, double mu, double theta) {
    return 0.5 * (0.5 * delta - theta / mu);
}

void require(bool ok, const char* constraint) {
    if (!ok) throw std::domain_error(constraint);
}

}  // namespace

DiffusionSpec bessel(double delta) { return {Kind::Bessel, delta, 0, 0, 0}; }

DiffusionSpec radial_ou(double delta, double mu) {
    return {Kind::RadialOU, delta, mu, 0, 0};
}

DiffusionSpec squared_ou(double delta, double mu) {
    return {Kind::SquaredOU, delta, mu, 0, 0};
}

DiffusionSpec bessel_down(double deltahat, double nu) {
    return {Kind::BesselDown, deltahat, 0, nu, 0};
}

DiffusionSpec bessel_up(double deltahat, double nu) {
    return {Kind::BesselUp, deltahat, 0, nu, 0};
}

DiffusionSpec radial_ou_down(double delta, double mu, double theta) {
    return {Kind::RadialOUDown, delta, mu, 0, theta};
}

DiffusionSpec radial_ou_up(double delta, double mu, double theta) {
    return {Kind::RadialOUUp, delta, mu, 0, theta};
}

void validate(const DiffusionSpec& spec) {
    require(spec.delta > 0.0 && spec.delta < 2.0, "0 < delta < 2");
    switch (spec.kind) {
        case Kind::Bessel:
            break;
        case Kind::RadialOU:
        case Kind::SquaredOU:
            require(spec.mu > 0.0, "mu > 0");
            break;
        case Kind::BesselDown:
        case Kind::BesselUp:
            require(spec.nu >= 0.0, "nu >= 0");
            break;
        case Kind::RadialOUDown:
            require(spec.mu > 0.0, "mu > 0");
            require(spec.theta > -2.0 * alpha_of(spec.delta) * spec.mu,
                    "theta > -2*alpha*mu");
            break;
        case Kind::RadialOUUp:
            require(spec.mu > 0.0, "mu > 0");
            require(spec.theta >= 0.0, "theta >= 0");
            break;
    }
}

bool is_pushed(Kind kind) {
    return kind == Kind::BesselDown || kind == Kind::BesselUp ||
           kind == Kind::RadialOUDown || kind == Kind::RadialOUUp;
}

bool reaches_zero(Kind kind) {
    return kind != Kind::BesselUp && kind != Kind::RadialOUUp;
}

const char* kind_name(Kind kind) {
    switch (kind) {
        case Kind::Bessel: return "bessel";
        case Kind::RadialOU: return "radial-ou";
        case Kind::SquaredOU: return "squared-ou";
        case Kind::BesselDown: return "bessel-down";
        case Kind::BesselUp: return "bessel-up";
        case Kind::RadialOUDown: return "radial-ou-down";
        case Kind::RadialOUUp: return "radial-ou-up";
    }
    return "?";
}

double drift_bessel(double delta, double x) {
    require(x > 0.0, "x > 0 (drift singular at 0)");
    return 0.5 * (delta - 1.0) / x;
}

double drift_radial_ou(double delta, double mu, double x) {
    require(x > 0.0, "x > 0 (drift singular at 0)");
    return 0.5 * (delta - 1.0) / x - mu * x;
}

double drift_squared_ou(double delta, double mu, double z) {
    require(z > 0.0, "z > 0");
    return delta - 2.0 * mu * z;
}

double phi_down_bessel(double deltahat, double nu, double z) {
    require(z > 0.0, "z > 0");
    require(nu >= 0.0, "nu >= 0");
    require(deltahat > 0.0 && deltahat < 2.0, "0 < delta < 2");
    if (nu == 0.0) return 1.0;
    const double a = alpha_of(deltahat);
    const double y = std::sqrt(2.0 * nu) * z;
    return std::pow(2.0, 1.0 - a) / specfun::gamma_fn(a) * specfun::khat(a, y);
}

double phi_down_radial_ou(double delta, double mu, double theta, double x) {
    require(x > 0.0, "x > 0");
    require(delta > 0.0 && delta < 2.0, "0 < delta < 2");
    require(mu > 0.0, "mu > 0");
    const double a = alpha_of(delta);
    require(theta > -2.0 * a * mu, "theta > -2*alpha*mu");
    if (theta == 0.0) return 1.0;
    const double xi = mu * x * x;
    const double kap = kappa_of(delta, mu, theta);
    return specfun::gamma_fn(a + 0.5 * theta / mu) / specfun::gamma_fn(a) *
           std::pow(xi, 0.5 * (a - 1.0)) * std::exp(0.5 * xi) *
           specfun::whittaker_w(kap, 0.5 * a, xi);
}

double phi_up_bessel(double deltahat, double nu, double z) {
    require(z > 0.0, "z > 0");
    require(nu >= 0.0, "nu >= 0");
    require(deltahat > 0.0 && deltahat < 2.0, "0 < delta < 2");
    if (nu == 0.0) return 1.0;
    const double a = alpha_of(deltahat);
    const double y = std::sqrt(2.0 * nu) * z;
    return std::pow(2.0, -a) * specfun::gamma_fn(1.0 - a) * specfun::ihat(a, y);
}

double phi_up_radial_ou(double delta, double mu, double theta, double x) {
    require(x > 0.0, "x > 0");
    require(delta > 0.0 && delta < 2.0, "0 < delta < 2");
    require(mu > 0.0, "mu > 0");
    require(theta >= 0.0, "theta >= 0");
    if (theta == 0.0) return 1.0;
    const double a = alpha_of(delta);
    const double xi = mu * x * x;
    const double kap = kappa_of(delta, mu, theta);
    return std::pow(xi, 0.5 * (a - 1.0)) * std::exp(0.5 * xi) *
           specfun::whittaker_m(kap, -0.5 * a, xi);
}

double drift_radial_ou_down_w(double delta, double mu, double theta, double x) {
    require(x > 0.0, "x > 0 (drift singular at 0)");
    const double a = alpha_of(delta);
    const double xi = mu * x * x;
    // (delta-1)/(2x) - mu x + d/dx log[(mu x^2)^{(a-1)/2} e^{mu x^2/2} W(mu x^2)]
    // collapses to -1/(2x) + 2 mu x (log W)'(mu x^2).
    return -0.5 / x +
           2.0 * mu * x *
               specfun::whittaker_w_logderiv(kappa_of(delta, mu, theta),
                                             0.5 * a, xi);
}

double drift_radial_ou_down_k(double delta, double mu, double x) {
    require(x > 0.0, "x > 0 (drift singular at 0)");
    const double a = alpha_of(delta);
    return 0.5 * (delta - 1.0) / x +
           mu * x * specfun::khat_logderiv(0.5 * a, 0.5 * mu * x * x);
}

double drift(const DiffusionSpec& spec, double x) {
    validate(spec);
    require(x > 0.0, "x > 0 (drift singular at 0)");
    const double a = alpha_of(spec.delta);
    switch (spec.kind) {
        case Kind::Bessel:
            return drift_bessel(spec.delta, x);
        case Kind::RadialOU:
            return drift_radial_ou(spec.delta, spec.mu, x);
        case Kind::SquaredOU:
            return drift_squared_ou(spec.delta, spec.mu, x);
        case Kind::BesselDown: {
            if (spec.nu == 0.0) return drift_bessel(spec.delta, x);
            const double sc = std::sqrt(2.0 * spec.nu);
            return drift_bessel(spec.delta, x) +
                   sc * specfun::khat_logderiv(a, sc * x);
        }
        case Kind::BesselUp: {
            if (spec.nu == 0.0) return drift_bessel(spec.delta, x);
            const double sc = std::sqrt(2.0 * spec.nu);
            return drift_bessel(spec.delta, x) +
                   sc * specfun::ihat_logderiv(a, sc * x);
        }
        case Kind::RadialOUDown:
            if (spec.theta == 0.0)
                return drift_radial_ou(spec.delta, spec.mu, x);
            return drift_radial_ou_down_w(spec.delta, spec.mu, spec.theta, x);
        case Kind::RadialOUUp: {
            if (spec.theta == 0.0)
                return drift_radial_ou(spec.delta, spec.mu, x);
            const double xi = spec.mu * x * x;
            return -0.5 / x +
                   2.0 * spec.mu * x *
                       specfun::whittaker_m_logderiv(
                           kappa_of(spec.delta, spec.mu, spec.theta),
                           -0.5 * a, xi);
        }
    }
    throw std::logic_error("unreachable");
}

SimModel make_sim_model(const DiffusionSpec& spec, double x_lo, double x_hi) {
    validate(spec);
    require(x_lo > 0.0 && x_hi > x_lo, "0 < x_lo < x_hi");

    SimModel sm;
    auto& m = sm.kernel;
    const double delta = spec.delta;
    const double a = alpha_of(delta);

    switch (spec.kind) {
        case Kind::Bessel:
            m.c_inv = 0.5 * (delta - 1.0);
            break;
        case Kind::RadialOU:
            m.c_inv = 0.5 * (delta - 1.0);
            m.c_lin = -spec.mu;
            break;
        case Kind::SquaredOU:
            m.c_const = delta;
            m.c_lin = -2.0 * spec.mu;
            m.diffusion = batch::DiffusionKind::TwoSqrtX;
            break;
        case Kind::BesselDown:
        case Kind::BesselUp: {
            m.c_inv = 0.5 * (delta - 1.0);
            if (spec.nu == 0.0) break;
            const double sc = std::sqrt(2.0 * spec.nu);
            const bool down = spec.kind == Kind::BesselDown;
            auto f = [a, down](double y) {
                return down ? specfun::khat_logderiv(a, y)
                            : specfun::ihat_logderiv(a, y);
            };
            // h = a/y + g with g the bare Bessel log-derivative; the modified
            // Bessel ODE gives g' = 1 + a^2/y^2 - g/y - g^2 for both orders.
            auto fp = [a, f](double y) {
                const double g = f(y) - a / y;
                return -a / (y * y) + 1.0 + a * a / (y * y) - g / y - g * g;
            };
            sm.table = std::make_shared<const spline::SplineTable>(
                spline::build_spline_table(f, fp, sc * x_lo, sc * x_hi));
            m.form = batch::DriftForm::LogDerivX;
            m.mult = sc;
            m.s = sc;
            m.table = sm.table.get();
            break;
        }
        case Kind::RadialOUDown:
        case Kind::RadialOUUp: {
            if (spec.theta == 0.0) {
                m.c_inv = 0.5 * (delta - 1.0);
                m.c_lin = -spec.mu;
                break;
            }
            const double kap = kappa_of(delta, spec.mu, spec.theta);
            const bool down = spec.kind == Kind::RadialOUDown;
            auto f = [kap, a, down](double w) {
                return down ? specfun::whittaker_w_logderiv(kap, 0.5 * a, w)
                            : specfun::whittaker_m_logderiv(kap, -0.5 * a, w);
            };
            // Whittaker's equation: (log u)'' = 1/4 - kap/w +
            // (m^2 - 1/4)/w^2 - ((log u)')^2 with m = +-a/2.
            auto fp = [kap, a, f](double w) {
                const double lv = f(w);
                return 0.25 - kap / w + (0.25 * a * a - 0.25) / (w * w) -
                       lv * lv;
            };
            sm.table = std::make_shared<const spline::SplineTable>(
                spline::build_spline_table(f, fp, spec.mu * x_lo * x_lo,
                                           spec.mu * x_hi * x_hi));
            m.c_inv = -0.5;
            m.form = batch::DriftForm::LogDerivXSq;
            m.mult = 2.0 * spec.mu;
            m.s = spec.mu;
            m.table = sm.table.get();
            break;
        }
    }
    return sm;
}

double model_drift(const SimModel& model, double x) {
    require(x > 0.0, "x > 0 (drift singular at 0)");
    const auto& m = model.kernel;
    double acc = m.c_lin * x + m.c_const;
    if (m.c_inv != 0.0) acc += m.c_inv / x;
    if (m.form == batch::DriftForm::LogDerivXSq)
        acc += m.mult * x * m.table->eval(m.s * x * x);
    else if (m.form == batch::DriftForm::LogDerivX)
        acc += m.mult * m.table->eval(m.s * x);
    return acc;
}

}  // namespace kreinlab::diffusion
