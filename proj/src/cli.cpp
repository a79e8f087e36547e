#include "kreinlab/cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "kreinlab/diffusion.hpp"
#include "kreinlab/format.hpp"
#include "kreinlab/levy.hpp"
#include "kreinlab/simulate.hpp"
#include "kreinlab/verify.hpp"

#ifndef KREINLAB_VERSION
#define KREINLAB_VERSION "0.0.0"
#endif

namespace kreinlab::cli {

namespace {

// ---------------------------------------------------------------------------
// Small helpers

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out(n);
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i)
        out[i] = std::exp(a + (b - a) * i / (n - 1));
    return out;
}

std::string gshort(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const char* ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_double_list(const std::string& s,
                                      const char* option) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const std::string item =
            trim(s.substr(pos, comma == std::string::npos ? comma
                                                          : comma - pos));
        if (item.empty())
            throw std::invalid_argument(std::string(option) +
                                        ": empty element in list '" + s + "'");
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size())
            throw std::invalid_argument(std::string(option) +
                                        ": cannot parse '" + item + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty())
        throw std::invalid_argument(std::string(option) + ": empty list");
    return out;
}

// Plain key=value configuration file: one pair per line, '#' comments and
// blank lines ignored. Keys are the long option names without the dashes.
std::vector<std::pair<std::string, std::string>> parse_kv_file(
    const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw std::invalid_argument("cannot open config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int ln = 0;
    while (std::getline(is, line)) {
        ++ln;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config file " + path + " line " +
                                        std::to_string(ln) +
                                        ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config file " + path + " line " +
                                        std::to_string(ln) + ": empty key");
        if (key == "config")
            throw std::invalid_argument("config file " + path +
                                        ": 'config' cannot be set from a file");
        out.emplace_back(key, val);
    }
    return out;
}

// Command-line flags win over file values: file pairs are injected as
// --key=value tokens right after the subcommand name, ahead of the typed
// flags, and every option keeps the last occurrence.
std::vector<std::string> expand_config(std::vector<std::string> tokens) {
    std::string cfg_path;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] == "--config" && i + 1 < tokens.size())
            cfg_path = tokens[i + 1];
        else if (tokens[i].rfind("--config=", 0) == 0)
            cfg_path = tokens[i].substr(9);
    }
    if (cfg_path.empty()) return tokens;

    size_t sub_pos = std::string::npos;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (!tokens[i].empty() && tokens[i][0] != '-') {
            sub_pos = i;
            break;
        }
    }
    if (sub_pos == std::string::npos) return tokens;  // no subcommand to feed

    std::vector<std::string> injected;
    for (const auto& [key, val] : parse_kv_file(cfg_path))
        injected.push_back("--" + key + "=" + val);
    tokens.insert(tokens.begin() + sub_pos + 1, injected.begin(),
                  injected.end());
    return tokens;
}

// ---------------------------------------------------------------------------
// Provenance header (version, config echo, seed) for every file artifact

using Echo = std::vector<std::pair<std::string, std::string>>;

std::string file_header(const std::string& command, const Echo& cfg,
                        const uint64_t* seed) {
    std::string h = "# kreinlab " KREINLAB_VERSION "\n# command: " + command +
                    "\n# config:";
    for (const auto& [k, v] : cfg) h += " " + k + "=" + v;
    h += "\n";
    if (seed) h += "# seed: " + std::to_string(*seed) + "\n";
    return h;
}

void write_reports_csv(const std::string& path, const std::string& header,
                       const std::vector<verify::VerificationReport>& rs) {
    std::ofstream os(path);
    if (!os)
        throw std::invalid_argument("cannot open output file '" + path + "'");
    os << header << verify::report_csv_header() << "\n";
    for (const auto& r : rs) os << verify::report_csv_row(r) << "\n";
}

// Exit status of a batch of reports: inconclusive is noted, not failed.
int reports_exit(const std::vector<verify::VerificationReport>& rs) {
    for (const auto& r : rs)
        if (!r.pass && !r.inconclusive) return 1;
    return 0;
}

void print_reports(const std::vector<verify::VerificationReport>& rs) {
    int passed = 0;
    for (const auto& r : rs) {
        std::printf("%s\n", verify::report_line(r).c_str());
        passed += r.pass ? 1 : 0;
    }
    std::printf("%d/%zu passed\n", passed, rs.size());
}

// ---------------------------------------------------------------------------
// Shared enumerations

const std::map<std::string, diffusion::Kind> kKinds = {
    {"bessel", diffusion::Kind::Bessel},
    {"radial-ou", diffusion::Kind::RadialOU},
    {"squared-ou", diffusion::Kind::SquaredOU},
    {"bessel-down", diffusion::Kind::BesselDown},
    {"bessel-up", diffusion::Kind::BesselUp},
    {"radial-ou-down", diffusion::Kind::RadialOUDown},
    {"radial-ou-up", diffusion::Kind::RadialOUUp},
};

const std::map<std::string, levy::LevyFamily> kFamilies = {
    {"sinh", levy::LevyFamily::SinhFamily},
    {"stable", levy::LevyFamily::StablePower},
    {"tilted", levy::LevyFamily::TiltedStable},
    {"gamma", levy::LevyFamily::GammaRow},
};

template <class M>
std::vector<std::string> map_keys(const M& m) {
    std::vector<std::string> out;
    for (const auto& [k, v] : m) out.push_back(k);
    return out;
}

diffusion::DiffusionSpec build_spec(const std::string& kind, double delta,
                                    double mu, double nu, double theta) {
    switch (kKinds.at(kind)) {
        case diffusion::Kind::Bessel: return diffusion::bessel(delta);
        case diffusion::Kind::RadialOU: return diffusion::radial_ou(delta, mu);
        case diffusion::Kind::SquaredOU:
            return diffusion::squared_ou(delta, mu);
        case diffusion::Kind::BesselDown:
            return diffusion::bessel_down(delta, nu);
        case diffusion::Kind::BesselUp: return diffusion::bessel_up(delta, nu);
        case diffusion::Kind::RadialOUDown:
            return diffusion::radial_ou_down(delta, mu, theta);
        case diffusion::Kind::RadialOUUp:
            return diffusion::radial_ou_up(delta, mu, theta);
    }
    throw std::invalid_argument("kind '" + kind + "' is not recognized");
}

// Default grids of the deterministic identity checks; the acceptance gate
// runs the same ones.
const std::vector<double> kWhitMus = {0.05, 0.15, 0.25, 0.35, 0.45};
const std::vector<double> kOdeKs = {0.0, 0.15, 0.3};
const std::vector<double> kOdeMus = {0.1, 0.25, 0.45};
const std::vector<double> kRouteDeltas = {0.5, 1.0, 1.5};
const std::vector<double> kRouteMus = {0.5, 1.0, 2.0};
const std::vector<double> kThetas = {0.3, 1.0, 3.0};

std::vector<double> esscher_lambdas() {
    std::vector<double> out;
    for (double lam = 0.0; lam <= 10.0 + 1e-12; lam += 1.25)
        out.push_back(lam);
    return out;
}

// One measure per family, so the tilt check touches every exponent branch.
std::vector<levy::LevyMeasure> family_exemplars(double alpha, double mu) {
    std::vector<levy::LevyMeasure> ms(4);
    ms[0].family = levy::LevyFamily::StablePower;
    ms[0].alpha = alpha;
    ms[1].family = levy::LevyFamily::TiltedStable;
    ms[1].alpha = alpha;
    ms[1].mu = mu;
    ms[2].family = levy::LevyFamily::GammaRow;
    ms[2].mu = mu;
    ms[3] = levy::pitman_yor_measure(2.0 - 2.0 * alpha, mu);
    return ms;
}

}  // namespace

// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv) {
    CLI::App app{
        "kreinlab " KREINLAB_VERSION
        " -- transforms, SDE sampling and verification reports for the\n"
        "catalogued correspondences between one-parameter jump measures and\n"
        "half-line diffusions (Bessel, radial Ornstein-Uhlenbeck and their\n"
        "conditioned variants)."};
    app.set_version_flag("--version", "kreinlab " KREINLAB_VERSION);
    app.require_subcommand(1);

    // every option keeps the last occurrence so typed flags override
    // config-file values (which are injected first)
    const auto take_last = [](CLI::Option* o) {
        o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        return o;
    };
    // the option needs a sink that outlives parse(); deque growth never
    // moves existing elements
    std::deque<std::string> config_sinks;
    const auto add_config = [&](CLI::App* sub) {
        config_sinks.emplace_back();
        take_last(sub->add_option(
            "--config", config_sinks.back(),
            "plain key=value file with the long option names as keys; "
            "typed flags win on conflict"));
    };

    // ---- identities ------------------------------------------------------
    auto* cid = app.add_subcommand(
        "identities",
        "run the deterministic identity battery and report each check");
    double id_alpha = 0.5, id_mu = 1.0;
    std::string id_out;
    take_last(cid->add_option("--alpha", id_alpha,
                              "index of the eigenfunction relations, in (0,1)"));
    take_last(cid->add_option("--mu", id_mu,
                              "rate of the eigenfunction relations, > 0"));
    take_last(cid->add_option("--out", id_out,
                              "optional report CSV path"));
    add_config(cid);

    // ---- levy-table ------------------------------------------------------
    auto* clt = app.add_subcommand(
        "levy-table", "tabulate the Laplace exponent of a jump measure");
    std::string lt_family = "stable", lt_measure_file, lt_method = "auto";
    std::string lt_lambdas = "0.25,0.5,1,2,4,8", lt_out = "levy-table.csv";
    double lt_C = 1.0, lt_mu = 0.0, lt_alpha = 0.5, lt_k = 0.0, lt_tilt = 0.0;
    auto* lt_family_opt = take_last(
        clt->add_option("--family", lt_family, "measure family")
            ->check(CLI::IsMember(map_keys(kFamilies))));
    auto* lt_C_opt = take_last(clt->add_option("--C", lt_C, "mass constant"));
    auto* lt_mu_opt = take_last(clt->add_option("--mu", lt_mu, "rate"));
    auto* lt_alpha_opt =
        take_last(clt->add_option("--alpha", lt_alpha, "index"));
    auto* lt_k_opt =
        take_last(clt->add_option("--k", lt_k, "sinh-family exponent shift"));
    take_last(clt->add_option("--tilt", lt_tilt,
                              "exponential tilt applied before tabulation"));
    take_last(clt->add_option("--measure-file", lt_measure_file,
                              "key=value measure description; explicit "
                              "flags override its fields"));
    take_last(clt->add_option("--lambdas", lt_lambdas,
                              "comma-separated evaluation points"));
    take_last(clt->add_option("--method", lt_method, "evaluation route")
                  ->check(CLI::IsMember({"auto", "closed", "quadrature"})));
    take_last(clt->add_option("--out", lt_out, "output CSV path"));
    add_config(clt);

    // ---- simulate --------------------------------------------------------
    auto* csim = app.add_subcommand(
        "simulate", "sample one trajectory and write it as CSV");
    std::string sim_kind, sim_out = "path.csv";
    double sim_delta = 1.0, sim_mu = 0.0, sim_nu = 0.0, sim_theta = 0.0;
    double sim_x0 = 1.0, sim_step = 1e-3, sim_horizon = 5.0, sim_noise = 1.0;
    uint64_t sim_seed = 0;
    take_last(csim->add_option("--kind", sim_kind, "process kind")
                  ->required()
                  ->check(CLI::IsMember(map_keys(kKinds))));
    take_last(csim->add_option("--delta", sim_delta, "dimension, in (0,2)"));
    take_last(csim->add_option("--mu", sim_mu, "pull rate of the OU kinds"));
    take_last(csim->add_option("--nu", sim_nu,
                               "tilt rate of the conditioned Bessel kinds"));
    take_last(csim->add_option("--theta", sim_theta,
                               "tilt rate of the conditioned OU kinds"));
    take_last(csim->add_option("--x0", sim_x0, "starting point, >= 0"));
    take_last(csim->add_option("--step", sim_step, "base time step, > 0"));
    take_last(csim->add_option("--horizon", sim_horizon, "end time, > 0"));
    take_last(csim->add_option("--noise-scale", sim_noise,
                               "Gaussian increment scale (0 = drift ODE)"));
    take_last(csim->add_option("--seed", sim_seed, "RNG seed")->required());
    take_last(csim->add_option("--out,--out-path", sim_out, "output CSV path"));
    add_config(csim);

    // ---- hit-times -------------------------------------------------------
    auto* cht = app.add_subcommand(
        "hit-times",
        "sample first-passage times to 0 (with their quadratic clocks)");
    std::string ht_kind = "bessel", ht_out = "hit-times.csv";
    double ht_delta = 1.0, ht_mu = 0.0, ht_nu = 0.0, ht_theta = 0.0;
    double ht_x0 = 1.0, ht_step = 1e-3;
    int ht_n = 1000;
    uint64_t ht_seed = 0;
    take_last(cht->add_option("--kind", ht_kind, "process kind")
                  ->check(CLI::IsMember(map_keys(kKinds))));
    take_last(cht->add_option("--delta", ht_delta, "dimension, in (0,2)"));
    take_last(cht->add_option("--mu", ht_mu, "pull rate of the OU kinds"));
    take_last(cht->add_option("--nu", ht_nu,
                              "tilt rate of the conditioned Bessel kinds"));
    take_last(cht->add_option("--theta", ht_theta,
                              "tilt rate of the conditioned OU kinds"));
    take_last(cht->add_option("--x0", ht_x0, "starting point, > 0"));
    take_last(cht->add_option("--step", ht_step, "base time step, > 0"));
    take_last(cht->add_option("--n", ht_n, "number of passage times"));
    take_last(cht->add_option("--seed", ht_seed, "RNG seed")->required());
    take_last(cht->add_option("--out,--out-path", ht_out, "output CSV path"));
    add_config(cht);

    // ---- verify ----------------------------------------------------------
    auto* cvf = app.add_subcommand(
        "verify", "run one named check with explicit parameters");
    const std::vector<std::string> kIdentities = {
        "whittaker-macdonald", "whittaker-bessel-i", "whittaker-ode",
        "eigen-down",          "eigen-up",           "drift-routes",
        "gamma-limit",         "esscher",            "timechange",
        "tilt-push",           "exponent"};
    std::string vf_identity, vf_family = "stable", vf_pair = "power-bessel";
    std::string vf_lambdas = "0.5,1,2,4,8", vf_out;
    double vf_alpha = 0.5, vf_mu = 1.0, vf_delta = 1.0, vf_nu = 0.5;
    double vf_x0 = 1.0, vf_lambda = 0.7, vf_ell = 0.6;
    double vf_step = 0.0;  // 0 = per-check default
    int vf_n = 0;          // 0 = per-check default
    uint64_t vf_seed = 0;
    take_last(cvf->add_option("--identity", vf_identity, "check to run")
                  ->required()
                  ->check(CLI::IsMember(kIdentities)));
    take_last(cvf->add_option("--alpha", vf_alpha, "measure index, in (0,1)"));
    take_last(cvf->add_option("--mu", vf_mu, "rate parameter, > 0"));
    take_last(cvf->add_option("--delta", vf_delta,
                              "dimension (tilt-push), in (0,2)"));
    take_last(cvf->add_option("--nu", vf_nu, "tilt rate (tilt-push)"));
    take_last(cvf->add_option("--x0", vf_x0, "starting point"));
    take_last(cvf->add_option("--lambda", vf_lambda,
                              "transform argument (tilt-push)"));
    take_last(cvf->add_option("--lambdas,--lambda-grid", vf_lambdas,
                              "comma-separated grid (exponent)"));
    take_last(cvf->add_option("--ell", vf_ell, "local-time level (exponent)"));
    take_last(cvf->add_option("--n", vf_n, "sample size (stochastic checks)"));
    take_last(
        cvf->add_option("--step", vf_step, "time step (stochastic checks)"));
    take_last(cvf->add_option("--family", vf_family,
                              "measure family (esscher)")
                  ->check(CLI::IsMember(map_keys(kFamilies))));
    take_last(cvf->add_option("--pair", vf_pair,
                              "catalogued pair tag (exponent)")
                  ->check(CLI::IsMember({"power-bessel", "tilted-bessel-down",
                                         "sinh-radial-ou", "sinh-ou-down"})));
    auto* vf_seed_opt = take_last(
        cvf->add_option("--seed", vf_seed, "RNG seed (stochastic checks)"));
    take_last(
        cvf->add_option("--out,--out-path", vf_out, "optional report CSV"));
    add_config(cvf);

    // ---- sweep -----------------------------------------------------------
    auto* csw = app.add_subcommand(
        "sweep", "full verification battery at one seed (9 reports)");
    std::string sw_out = "sweep.csv";
    uint64_t sw_seed = 0;
    take_last(csw->add_option("--seed", sw_seed, "RNG seed")->required());
    take_last(csw->add_option("--out,--out-path", sw_out, "report CSV path"));
    add_config(csw);

    // ---- parse -----------------------------------------------------------
    std::vector<std::string> tokens(argv + 1, argv + argc);
    try {
        tokens = expand_config(std::move(tokens));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    std::vector<const char*> cargv = {argv[0]};
    for (const auto& t : tokens) cargv.push_back(t.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    // ---- dispatch --------------------------------------------------------
    try {
        if (cid->parsed()) {
            const Echo cfg = {{"alpha", gshort(id_alpha)},
                              {"mu", gshort(id_mu)},
                              {"out", id_out}};
            std::vector<verify::VerificationReport> rs;
            rs.push_back(verify::check_whittaker_macdonald(
                kWhitMus, log_grid(0.1, 40.0, 200)));
            rs.push_back(verify::check_whittaker_bessel_i(
                kWhitMus, log_grid(0.1, 40.0, 200)));
            rs.push_back(verify::check_whittaker_ode(
                kOdeKs, kOdeMus, log_grid(0.2, 20.0, 40), 1e-3));
            rs.push_back(verify::check_eigen_relation_down(
                id_alpha, id_mu, log_grid(0.2, 8.0, 25)));
            rs.push_back(verify::check_eigen_relation_up(
                id_alpha, id_mu, log_grid(0.2, 8.0, 25)));
            rs.push_back(verify::check_drift_routes(kRouteDeltas, kRouteMus,
                                                    log_grid(0.05, 5.0, 60)));
            rs.push_back(verify::check_gamma_limit_drift(id_mu));
            for (const auto& m : family_exemplars(id_alpha, id_mu))
                rs.push_back(verify::check_esscher_shift(m, kThetas,
                                                         esscher_lambdas()));
            print_reports(rs);
            if (!id_out.empty())
                write_reports_csv(id_out, file_header("identities", cfg,
                                                      nullptr),
                                  rs);
            return reports_exit(rs);
        }

        if (clt->parsed()) {
            levy::LevyMeasure m;
            if (!lt_measure_file.empty()) {
                std::ifstream is(lt_measure_file);
                if (!is)
                    throw std::invalid_argument(
                        "cannot open measure file '" + lt_measure_file + "'");
                std::string text((std::istreambuf_iterator<char>(is)),
                                 std::istreambuf_iterator<char>());
                m = levy::from_kv(text);
            }
            if (lt_family_opt->count() > 0 || lt_measure_file.empty())
                m.family = kFamilies.at(lt_family);
            if (lt_C_opt->count() > 0) m.C = lt_C;
            if (lt_mu_opt->count() > 0) m.mu = lt_mu;
            if (lt_alpha_opt->count() > 0) m.alpha = lt_alpha;
            if (lt_k_opt->count() > 0) m.k = lt_k;
            const auto bad = levy::validate(m);
            if (!bad.empty())
                throw std::invalid_argument("invalid measure: " + bad[0]);
            if (lt_tilt != 0.0) m = levy::esscher_tilt(m, lt_tilt);

            const auto lambdas = parse_double_list(lt_lambdas, "--lambdas");
            for (double lam : lambdas)
                if (lam < 0.0)
                    throw std::invalid_argument("lambda >= 0");
            if (lt_method == "closed" && !levy::has_closed_form(m.family))
                throw std::invalid_argument(
                    "the sinh family has no closed-form exponent; use "
                    "--method quadrature or auto");

            const Echo cfg = {
                {"family", levy::family_name(m.family)},
                {"C", gshort(m.C)},        {"mu", gshort(m.mu)},
                {"alpha", gshort(m.alpha)}, {"k", gshort(m.k)},
                {"tilt", gshort(lt_tilt)},  {"lambdas", lt_lambdas},
                {"method", lt_method},      {"out", lt_out}};
            std::ofstream os(lt_out);
            if (!os)
                throw std::invalid_argument("cannot open output file '" +
                                            lt_out + "'");
            os << file_header("levy-table", cfg, nullptr);
            os << "lambda,psi\n";
            for (double lam : lambdas) {
                double psi = 0.0;
                if (lt_method == "auto") {
                    psi = levy::levy_exponent(m, lam);
                } else {
                    const levy::ExponentMethod method =
                        lt_method == "closed"
                            ? levy::ExponentMethod::ClosedForm
                            : levy::ExponentMethod::Quadrature;
                    psi = levy::exponent({m, method}, lam);
                }
                os << g17(lam) << "," << g17(psi) << "\n";
            }
            std::printf("levy-table: %zu rows -> %s (family=%s method=%s)\n",
                        lambdas.size(), lt_out.c_str(),
                        levy::family_name(m.family), lt_method.c_str());
            return 0;
        }

        if (csim->parsed()) {
            const auto spec =
                build_spec(sim_kind, sim_delta, sim_mu, sim_nu, sim_theta);
            diffusion::validate(spec);
            const Echo cfg = {{"kind", sim_kind},
                              {"delta", gshort(sim_delta)},
                              {"mu", gshort(sim_mu)},
                              {"nu", gshort(sim_nu)},
                              {"theta", gshort(sim_theta)},
                              {"x0", gshort(sim_x0)},
                              {"step", gshort(sim_step)},
                              {"horizon", gshort(sim_horizon)},
                              {"noise-scale", gshort(sim_noise)},
                              {"out", sim_out}};
            const auto path = simulate::simulate_path(
                spec, sim_x0, sim_horizon, sim_step, sim_seed, sim_noise);
            simulate::write_csv(path, spec, sim_out,
                                file_header("simulate", cfg, &sim_seed));
            std::printf("simulate: %zu points -> %s (final x=%s)\n",
                        path.times.size(), sim_out.c_str(),
                        gshort(path.values.back()).c_str());
            return 0;
        }

        if (cht->parsed()) {
            const auto spec =
                build_spec(ht_kind, ht_delta, ht_mu, ht_nu, ht_theta);
            diffusion::validate(spec);
            const Echo cfg = {{"kind", ht_kind},
                              {"delta", gshort(ht_delta)},
                              {"mu", gshort(ht_mu)},
                              {"nu", gshort(ht_nu)},
                              {"theta", gshort(ht_theta)},
                              {"x0", gshort(ht_x0)},
                              {"step", gshort(ht_step)},
                              {"n", std::to_string(ht_n)},
                              {"out", ht_out}};
            const auto sample =
                simulate::hit_time_T0(spec, ht_x0, ht_step, ht_seed, ht_n);
            simulate::write_csv(sample, ht_out,
                                file_header("hit-times", cfg, &ht_seed));
            std::printf("hit-times: %zu draws (%d censored) -> %s\n",
                        sample.draws.size(), sample.censored, ht_out.c_str());
            return 0;
        }

        if (cvf->parsed()) {
            const bool stochastic = vf_identity == "timechange" ||
                                    vf_identity == "tilt-push" ||
                                    vf_identity == "exponent";
            if (stochastic && vf_seed_opt->count() == 0)
                throw std::invalid_argument(
                    "seed is required for the stochastic check '" +
                    vf_identity + "'");

            verify::VerificationReport r;
            if (vf_identity == "whittaker-macdonald") {
                r = verify::check_whittaker_macdonald(kWhitMus,
                                                      log_grid(0.1, 40.0, 200));
            } else if (vf_identity == "whittaker-bessel-i") {
                r = verify::check_whittaker_bessel_i(kWhitMus,
                                                     log_grid(0.1, 40.0, 200));
            } else if (vf_identity == "whittaker-ode") {
                r = verify::check_whittaker_ode(kOdeKs, kOdeMus,
                                                log_grid(0.2, 20.0, 40), 1e-3);
            } else if (vf_identity == "eigen-down") {
                r = verify::check_eigen_relation_down(vf_alpha, vf_mu,
                                                      log_grid(0.2, 8.0, 25));
            } else if (vf_identity == "eigen-up") {
                r = verify::check_eigen_relation_up(vf_alpha, vf_mu,
                                                    log_grid(0.2, 8.0, 25));
            } else if (vf_identity == "drift-routes") {
                r = verify::check_drift_routes(kRouteDeltas, kRouteMus,
                                               log_grid(0.05, 5.0, 60));
            } else if (vf_identity == "gamma-limit") {
                r = verify::check_gamma_limit_drift(vf_mu);
            } else if (vf_identity == "esscher") {
                levy::LevyMeasure m;
                m.family = kFamilies.at(vf_family);
                m.alpha = vf_alpha;
                m.mu = vf_mu;
                if (m.family == levy::LevyFamily::SinhFamily)
                    m = levy::pitman_yor_measure(2.0 - 2.0 * vf_alpha, vf_mu);
                if (m.family == levy::LevyFamily::StablePower) m.mu = 0.0;
                r = verify::check_esscher_shift(m, kThetas,
                                                esscher_lambdas());
            } else if (vf_identity == "timechange") {
                r = verify::check_proposition_timechange(
                    vf_alpha, vf_mu, vf_x0, vf_n > 0 ? vf_n : 1500,
                    vf_step > 0.0 ? vf_step : 2e-4, vf_seed);
            } else if (vf_identity == "tilt-push") {
                r = verify::check_girsanov_esscher(
                    vf_delta, vf_nu, vf_x0, vf_lambda,
                    vf_n > 0 ? vf_n : 20000, vf_step > 0.0 ? vf_step : 5e-4,
                    vf_seed);
            } else {  // exponent
                const auto pairs = verify::standard_pairs(vf_alpha, vf_mu);
                const verify::KreinPair* chosen = nullptr;
                for (const auto& pr : pairs)
                    if (pr.tag == vf_pair) chosen = &pr;
                if (!chosen)
                    throw std::invalid_argument("pair '" + vf_pair +
                                                "' is not catalogued");
                r = verify::estimate_inverse_local_time_exponent(
                    *chosen, parse_double_list(vf_lambdas, "--lambdas"),
                    vf_ell, vf_n > 0 ? vf_n : 1200,
                    vf_step > 0.0 ? vf_step : 2.5e-4, vf_seed);
            }

            std::printf("%s\n", verify::report_line(r).c_str());
            if (!vf_out.empty()) {
                const Echo cfg = {{"identity", vf_identity},
                                  {"alpha", gshort(vf_alpha)},
                                  {"mu", gshort(vf_mu)},
                                  {"out", vf_out}};
                write_reports_csv(
                    vf_out,
                    file_header("verify", cfg,
                                stochastic ? &vf_seed : nullptr),
                    {r});
            }
            return (r.pass || r.inconclusive) ? 0 : 1;
        }

        if (csw->parsed()) {
            const Echo cfg = {{"out", sw_out}};
            const auto rs = verify::table_sweep(sw_seed);
            print_reports(rs);
            write_reports_csv(sw_out, file_header("sweep", cfg, &sw_seed), rs);
            return reports_exit(rs);
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;  // unreachable: a subcommand is required
}

}  // namespace kreinlab::cli
