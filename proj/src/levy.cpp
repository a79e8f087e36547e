#include "kreinlab/levy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "kreinlab/detail/quadrature.hpp"
#include "kreinlab/specfun.hpp"

namespace kreinlab::levy {

namespace {

constexpr double kExponentTol = 1e-11;

// log sinh(t), stable for large t where sinh overflows.
double log_sinh(double t) {
    if (t < 1.0) return std::log(std::sinh(t));
    return t - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * t));
}

double log_density(const LevyMeasure& m, double y) {
    switch (m.family) {
        case LevyFamily::SinhFamily:
            return std::log(m.C) +
                   (m.alpha + 1.0) * (std::log(m.mu) - log_sinh(m.mu * y)) +
                   m.mu * m.k * y;
        case LevyFamily::StablePower:
            return std::log(m.C) - (m.alpha + 1.0) * std::log(y);
        case LevyFamily::TiltedStable:
            return std::log(m.C) - m.mu * y - (m.alpha + 1.0) * std::log(y);
        case LevyFamily::GammaRow:
            return std::log(m.C) - m.mu * y - std::log(y);
    }
    throw std::logic_error("unreachable");
}

// Exponent of h's singular scale at 0: h(y) ~ C y^{-(a+1)} (1 + c y + ...).
double singular_alpha(const LevyMeasure& m) {
    return m.family == LevyFamily::GammaRow ? 0.0 : m.alpha;
}

double linear_coeff(const LevyMeasure& m) {
    switch (m.family) {
        case LevyFamily::SinhFamily: return m.mu * m.k;
        case LevyFamily::StablePower: return 0.0;
        case LevyFamily::TiltedStable:
        case LevyFamily::GammaRow: return -m.mu;
    }
    throw std::logic_error("unreachable");
}

// Decay rate of h at infinity (y-space); StablePower has none (polynomial).
double tail_rate(const LevyMeasure& m) {
    switch (m.family) {
        case LevyFamily::SinhFamily: return m.mu * (1.0 + m.alpha - m.k);
        case LevyFamily::StablePower: return 0.0;
        case LevyFamily::TiltedStable:
        case LevyFamily::GammaRow: return m.mu;
    }
    throw std::logic_error("unreachable");
}

double exponent_quadrature(const LevyMeasure& m, double lambda) {
    if (lambda == 0.0) return 0.0;
    const double a = singular_alpha(m);
    const double c = linear_coeff(m);

    // Analytic integral over [0,1] of the two subtracted terms.
    const double head_analytic = m.C * lambda / (1.0 - a) +
                                 m.C * lambda * (c - 0.5 * lambda) / (2.0 - a);

    // Smooth remainder on [0,1] under y = s^2; behaves like s^{5-2a} at 0.
    auto head = [&](double s) {
        const double y = s * s;
        if (y < 1e-10) return 0.0;
        const double g = -std::expm1(-lambda * y) * density(m, y);
        const double sub = m.C * lambda * std::pow(y, -a) *
                           (1.0 + (c - 0.5 * lambda) * y);
        return (g - sub) * 2.0 * s;
    };
    const double head_rest = detail::gk_integrate(head, 0.0, 1.0, kExponentTol);

    // Tail under y = e^v; cutoff where the integrand is below ~e^{-38} of
    // scale, using whichever decay (algebraic in v or exponential in y) bites
    // first.
    const double rho = tail_rate(m);
    double v_max = a > 0.0 ? 38.0 / a : std::numeric_limits<double>::infinity();
    if (rho > 0.0) v_max = std::min(v_max, std::log1p(48.0 / rho) + 2.0);
    auto tail = [&](double v) {
        const double y = std::exp(v);
        const double lh = log_density(m, y) + v;
        if (lh < -740.0) return 0.0;
        return -std::expm1(-lambda * y) * std::exp(lh);
    };
    const double tail_part = detail::gk_integrate(tail, 0.0, v_max, kExponentTol);

    return head_analytic + head_rest + tail_part;
}

double exponent_closed_form(const LevyMeasure& m, double lambda) {
    using specfun::gamma_fn;
    switch (m.family) {
        case LevyFamily::StablePower:
            return m.C * gamma_fn(1.0 - m.alpha) / m.alpha * std::pow(lambda, m.alpha);
        case LevyFamily::TiltedStable:
            return m.C * gamma_fn(1.0 - m.alpha) / m.alpha *
                   (std::pow(lambda + m.mu, m.alpha) - std::pow(m.mu, m.alpha));
        case LevyFamily::GammaRow:
            return m.C * std::log1p(lambda / m.mu);
        case LevyFamily::SinhFamily:
            throw std::domain_error("levy: SinhFamily exponent has no closed form");
    }
    throw std::logic_error("unreachable");
}

bool near_boundary(const LevyMeasure& m) {
    constexpr double eps = 1e-6;
    switch (m.family) {
        case LevyFamily::SinhFamily:
            return m.alpha < eps || m.alpha > 1.0 - eps ||
                   m.k > 1.0 + m.alpha - eps || m.mu < eps;
        case LevyFamily::StablePower:
        case LevyFamily::TiltedStable:
            return m.alpha < eps || m.alpha > 1.0 - eps;
        case LevyFamily::GammaRow:
            return m.mu < eps;
    }
    return false;
}

// int_0^1 y h(y) dy + int_1^inf h(y) dy, with crude cutoffs; only used to
// confirm integrability near parameter boundaries.
double integrability_mass(const LevyMeasure& m) {
    auto head = [&](double s) {
        const double y = s * s;
        return y <= 0.0 ? 0.0 : y * density(m, y) * 2.0 * s;
    };
    const double h = detail::gk_integrate(head, 0.0, 1.0, 1e-8);
    const double rho = tail_rate(m);
    const double a = singular_alpha(m);
    double v_max = a > 0.0 ? 40.0 / a : std::numeric_limits<double>::infinity();
    if (rho > 0.0) v_max = std::min(v_max, std::log1p(50.0 / rho) + 2.0);
    v_max = std::min(v_max, 5000.0);
    auto tail = [&](double v) {
        const double lh = log_density(m, std::exp(v)) + v;
        return lh < -740.0 ? 0.0 : std::exp(lh);
    };
    const double t = detail::gk_integrate(tail, 0.0, v_max, 1e-8);
    return h + t;
}

}  // namespace

std::vector<std::string> validate(const LevyMeasure& m) {
    std::vector<std::string> out;
    if (!(m.C > 0.0)) out.push_back("C > 0");
    if (!(m.theta_tilt >= 0.0)) out.push_back("theta_tilt >= 0");
    switch (m.family) {
        case LevyFamily::SinhFamily:
            if (!(m.mu > 0.0)) out.push_back("mu > 0");
            if (!(m.alpha >= 0.0)) out.push_back("0 <= alpha");
            if (!(m.alpha < 1.0)) out.push_back("alpha < 1");
            if (!(m.k < 1.0 + m.alpha)) out.push_back("k < 1+alpha");
            break;
        case LevyFamily::StablePower:
            if (!(m.alpha > 0.0)) out.push_back("0 < alpha");
            if (!(m.alpha < 1.0)) out.push_back("alpha < 1");
            break;
        case LevyFamily::TiltedStable:
            if (!(m.alpha > 0.0)) out.push_back("0 < alpha");
            if (!(m.alpha < 1.0)) out.push_back("alpha < 1");
            if (!(m.mu > 0.0)) out.push_back("mu > 0");
            break;
        case LevyFamily::GammaRow:
            if (!(m.mu > 0.0)) out.push_back("mu > 0");
            break;
    }
    if (out.empty() && near_boundary(m)) {
        const double mass = integrability_mass(m);
        if (!std::isfinite(mass) || mass > 1e12) out.push_back("integrability");
    }
    return out;
}

double density(const LevyMeasure& m, double y) {
    if (!(y > 0.0)) throw std::domain_error("levy: density needs y > 0");
    return std::exp(log_density(m, y));
}

bool has_closed_form(LevyFamily family) {
    return family != LevyFamily::SinhFamily;
}

double exponent(const LevyExponent& e, double lambda) {
    if (!(lambda >= 0.0)) throw std::domain_error("levy: exponent needs lambda >= 0");
    if (lambda == 0.0) return 0.0;
    return e.method == ExponentMethod::ClosedForm
               ? exponent_closed_form(e.measure, lambda)
               : exponent_quadrature(e.measure, lambda);
}

double levy_exponent(const LevyMeasure& m, double lambda) {
    return exponent({m, has_closed_form(m.family) ? ExponentMethod::ClosedForm
                                                  : ExponentMethod::Quadrature},
                    lambda);
}

LevyMeasure esscher_tilt(const LevyMeasure& m, double theta) {
    if (!(theta >= 0.0)) throw std::domain_error("levy: tilt needs theta >= 0");
    LevyMeasure out = m;
    if (theta == 0.0) return out;
    out.theta_tilt += theta;
    switch (m.family) {
        case LevyFamily::SinhFamily: out.k -= theta / m.mu; break;
        case LevyFamily::StablePower:
            out.family = LevyFamily::TiltedStable;
            out.mu = theta;
            break;
        case LevyFamily::TiltedStable:
        case LevyFamily::GammaRow: out.mu += theta; break;
    }
    return out;
}

LevyMeasure pitman_yor_measure(double delta, double mu, double C) {
    if (!(delta > 0.0 && delta < 2.0))
        throw std::domain_error("levy: pitman_yor needs 0 < delta < 2");
    if (!(mu > 0.0)) throw std::domain_error("levy: pitman_yor needs mu > 0");
    if (!(C > 0.0)) throw std::domain_error("levy: pitman_yor needs C > 0");
    LevyMeasure m;
    m.family = LevyFamily::SinhFamily;
    m.C = C;
    m.mu = mu;
    m.alpha = 1.0 - 0.5 * delta;
    m.k = 0.5 * delta;
    return m;
}

const char* family_name(LevyFamily family) {
    switch (family) {
        case LevyFamily::SinhFamily: return "SinhFamily";
        case LevyFamily::StablePower: return "StablePower";
        case LevyFamily::TiltedStable: return "TiltedStable";
        case LevyFamily::GammaRow: return "GammaRow";
    }
    throw std::logic_error("unreachable");
}

namespace {

LevyFamily family_from_name(const std::string& s) {
    if (s == "SinhFamily") return LevyFamily::SinhFamily;
    if (s == "StablePower") return LevyFamily::StablePower;
    if (s == "TiltedStable") return LevyFamily::TiltedStable;
    if (s == "GammaRow") return LevyFamily::GammaRow;
    throw std::invalid_argument("levy: unknown family '" + s + "'");
}

}  // namespace

std::string to_kv(const LevyMeasure& m) {
    std::ostringstream os;
    os.precision(17);
    os << "family=" << family_name(m.family) << '\n'
       << "C=" << m.C << '\n'
       << "mu=" << m.mu << '\n'
       << "alpha=" << m.alpha << '\n'
       << "k=" << m.k << '\n'
       << "theta_tilt=" << m.theta_tilt << '\n';
    return os.str();
}

LevyMeasure from_kv(const std::string& text) {
    LevyMeasure m;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("levy: malformed line '" + line + "'");
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "family") {
            m.family = family_from_name(val);
        } else {
            double x = 0.0;
            try {
                x = std::stod(val);
            } catch (const std::exception&) {
                throw std::invalid_argument("levy: bad number '" + val + "'");
            }
            if (key == "C") m.C = x;
            else if (key == "mu") m.mu = x;
            else if (key == "alpha") m.alpha = x;
            else if (key == "k") m.k = x;
            else if (key == "theta_tilt") m.theta_tilt = x;
            else throw std::invalid_argument("levy: unknown key '" + key + "'");
        }
    }
    return m;
}

}  // namespace kreinlab::levy
