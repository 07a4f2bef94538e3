#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "floquet/floquet.h"

namespace fs = std::filesystem;

namespace {

struct Config {
    std::string orbit, candidate, form, out = "out";
    int m = 30, M = 0, grid = 256, threads = 0;
    double s = 2.0, tol = 1e-12, trivial_tol = -1.0;
    std::string l_policy = "paper", sharp = "auto";
    unsigned long seed = 0;
    int samples = 0;
};

std::string quote(const std::string& s) {
    std::string o = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') o += '\\';
        o += c;
    }
    return o + "\"";
}

std::string num(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string config_json(const std::string& command, const Config& c) {
    std::ostringstream os;
    os << "{\"command\":" << quote(command) << ",\"orbit\":" << quote(c.orbit) << ",\"candidate\":" << quote(c.candidate)
       << ",\"m\":" << c.m << ",\"M\":" << c.M << ",\"s\":" << num(c.s) << ",\"l_policy\":" << quote(c.l_policy)
       << ",\"sharp_tails\":" << quote(c.sharp) << ",\"tol\":" << num(c.tol) << ",\"grid\":" << c.grid
       << ",\"out\":" << quote(c.out) << ",\"seed\":" << c.seed << ",\"contraction_samples\":" << c.samples << "}";
    return os.str();
}

int report_error(floquet_status st, const std::string& what) {
    std::cerr << "error: " << what << ": " << floquet_last_error() << "\n";
    return int(st);
}

std::string path_in(const Config& c, const std::string& name) { return (fs::path(c.out) / name).string(); }

void ensure_out(const Config& c) {
    std::error_code ec;
    fs::create_directories(c.out, ec);
}

bool write_text(const std::string& path, const char* text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    return bool(f);
}

bool parse_l_policy(const std::string& s, floquet_verify_params& vp) {
    if (s == "paper") {
        vp.l_policy = FLOQUET_L_PAPER;
        return true;
    }
    if (s.rfind("fixed:", 0) == 0) {
        try {
            vp.l_fixed = std::stol(s.substr(6));
        } catch (...) {
            return false;
        }
        vp.l_policy = FLOQUET_L_FIXED;
        return vp.l_fixed >= 1;
    }
    return false;
}

int cmd_solve(const Config& c, std::string* candidate_path = nullptr) {
    floquet_problem* p = nullptr;
    floquet_status st = floquet_problem_load(c.orbit.c_str(), &p);
    if (st) return report_error(st, "cannot load '" + c.orbit + "'");
    floquet_solve_params sp;
    floquet_solve_params_default(&sp);
    sp.m = c.m;
    sp.tol = c.tol;
    floquet_candidate* x = nullptr;
    double res = 0.0;
    int it = 0;
    st = floquet_solve(p, &sp, &x, &res, &it);
    floquet_problem_free(p);
    if (st) return report_error(st, "solve failed");
    ensure_out(c);
    const std::string path = path_in(c, "candidate.json");
    st = floquet_candidate_save(x, path.c_str());
    floquet_candidate_free(x);
    if (st) return report_error(st, "cannot write candidate");
    std::printf("newton iterations %d residual %.3e\ncandidate written to %s\n", it, res, path.c_str());
    if (candidate_path) *candidate_path = path;
    return 0;
}

int cmd_verify(Config c, const std::string& command, std::string* form_path = nullptr) {
    floquet_verify_params vp;
    floquet_verify_params_default(&vp);
    vp.s = c.s;
    vp.m = c.m;
    vp.M = c.M;
    if (!parse_l_policy(c.l_policy, vp)) {
        std::cerr << "error: --l-policy must be 'paper' or 'fixed:N'\n";
        return FLOQUET_MALFORMED_INPUT;
    }
    vp.sharp = c.sharp == "on" ? FLOQUET_SHARP_ON : c.sharp == "off" ? FLOQUET_SHARP_OFF : FLOQUET_SHARP_AUTO;
    const std::string cand = c.candidate.empty() ? path_in(c, "candidate.json") : c.candidate;
    floquet_problem* p = nullptr;
    floquet_status st = floquet_problem_load(c.orbit.c_str(), &p);
    if (st) return report_error(st, "cannot load '" + c.orbit + "'");
    floquet_candidate* x = nullptr;
    st = floquet_candidate_load(cand.c_str(), &x);
    if (st) {
        floquet_problem_free(p);
        return report_error(st, "cannot load candidate '" + cand + "'");
    }
    if (c.m == 0) c.m = vp.m = floquet_candidate_modes(x);
    if (vp.M == 0) vp.M = vp.m + 10;
    floquet_form* form = nullptr;
    floquet_report* rep = nullptr;
    const std::string cfg = config_json(command, c);
    st = floquet_verify(p, x, &vp, cfg.c_str(), &form, &rep);
    if (!st && c.samples > 0) {
        double ratio = 0.0;
        if (floquet_contraction_check(p, x, &vp, floquet_form_radius(form), c.samples, c.seed, &ratio) == FLOQUET_OK)
            std::printf("sampled contraction ratio %.6f over %d points\n", ratio, c.samples);
    }
    floquet_candidate_free(x);
    floquet_problem_free(p);
    ensure_out(c);
    if (rep) {
        write_text(path_in(c, "report.json"), floquet_report_json(rep));
        double lo = 0, hi = 0;
        if (floquet_report_interval(rep, &lo, &hi))
            std::printf("radii interval [%.9e, %.9e]\n", lo, hi);
        else
            std::printf("radii interval empty\n");
        floquet_report_free(rep);
    }
    if (st) {
        floquet_form_free(form);
        return report_error(st, "verification failed");
    }
    const std::string fpath = path_in(c, "form.json");
    std::printf("verified with r = %.9e\nreport written to %s\n", floquet_form_radius(form),
                path_in(c, "report.json").c_str());
    st = floquet_form_save(form, fpath.c_str());
    floquet_form_free(form);
    if (st) return report_error(st, "cannot write form");
    if (form_path) *form_path = fpath;
    return 0;
}

int cmd_bundles(const Config& c) {
    const std::string fpath = c.form.empty() ? path_in(c, "form.json") : c.form;
    floquet_form* f = nullptr;
    floquet_status st = floquet_form_load(fpath.c_str(), &f);
    if (st) return report_error(st, "cannot load form '" + fpath + "'");
    floquet_problem* p = nullptr;
    if (!c.orbit.empty()) {
        st = floquet_problem_load(c.orbit.c_str(), &p);
        if (st) {
            floquet_form_free(f);
            return report_error(st, "cannot load '" + c.orbit + "'");
        }
    }
    floquet_bundles* b = nullptr;
    st = floquet_bundles_compute(f, p, c.grid, c.trivial_tol, &b);
    floquet_form_free(f);
    floquet_problem_free(p);
    if (st) return report_error(st, "bundle construction failed");
    ensure_out(c);
    write_text(path_in(c, "bundles.csv"), floquet_bundles_csv(b));
    write_text(path_in(c, "eigen.json"), floquet_bundles_json(b));
    for (int j = 0; j < floquet_bundles_exponent_count(b); ++j) {
        double lo, hi;
        const char* label;
        int sign;
        floquet_bundles_exponent(b, j, &lo, &hi, &label, &sign);
        std::printf("%-8s [%.13f, %.13f]", label, lo, hi);
        if (sign) std::printf(" multiplier sign %+d", sign);
        std::printf("\n");
    }
    floquet_bundles_free(b);
    std::printf("bundles written to %s\n", path_in(c, "bundles.csv").c_str());
    return 0;
}

struct OrbitArgs {
    std::string input, output, field, param;
    long M_gamma = 0;
    double r_gamma = 1e-6, shift = 0.0, target = 0.0, period = 0.0;
    int steps = 10, grid = 2048;
    std::vector<double> state;
};

int finish_orbit(floquet_problem* o, const OrbitArgs& a) {
    double res = 0.0;
    floquet_orbit_residual(o, a.grid, &res);
    floquet_status st = floquet_problem_save(o, a.output.c_str());
    std::printf("half period %.15f residual %.3e\n", floquet_problem_half_period(o), res);
    floquet_problem_free(o);
    if (st) return report_error(st, "cannot write orbit");
    std::printf("orbit written to %s\n", a.output.c_str());
    return 0;
}

int cmd_orbit(const std::string& sub, const OrbitArgs& a) {
    floquet_problem* in = nullptr;
    floquet_problem* o = nullptr;
    floquet_status st;
    if (sub == "find") {
        std::ifstream f(a.field);
        if (!f) {
            std::cerr << "error: cannot open field file '" << a.field << "'\n";
            return FLOQUET_MALFORMED_INPUT;
        }
        std::stringstream ss;
        ss << f.rdbuf();
        st = floquet_orbit_from_state(ss.str().c_str(), a.state.data(), int(a.state.size()), a.period, a.M_gamma,
                                      a.r_gamma, &o);
        if (st) return report_error(st, "orbit search failed");
        return finish_orbit(o, a);
    }
    st = floquet_problem_load(a.input.c_str(), &in);
    if (st) return report_error(st, "cannot load '" + a.input + "'");
    if (sub == "residual") {
        double res = 0.0;
        st = floquet_orbit_residual(in, a.grid, &res);
        floquet_problem_free(in);
        if (st) return report_error(st, "residual failed");
        std::printf("%.6e\n", res);
        return 0;
    }
    if (sub == "refine") {
        st = floquet_orbit_refine(in, a.M_gamma, a.r_gamma, &o);
        if (!st && a.shift != 0.0) {
            floquet_problem* s = nullptr;
            st = floquet_orbit_shift(o, a.shift, &s);
            floquet_problem_free(o);
            o = nullptr;
            // the shifted orbit is re-refined to restore point coefficients
            if (!st) st = floquet_orbit_refine(s, a.M_gamma, a.r_gamma, &o);
            floquet_problem_free(s);
        }
    } else {
        st = floquet_orbit_continue(in, a.param.c_str(), a.target, a.steps, &o);
        if (!st && a.M_gamma > 0) {
            floquet_problem* r = nullptr;
            st = floquet_orbit_refine(o, a.M_gamma, a.r_gamma, &r);
            floquet_problem_free(o);
            o = r;
        }
    }
    floquet_problem_free(in);
    if (st) return report_error(st, "orbit " + sub + " failed");
    return finish_orbit(o, a);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rigorous Floquet normal forms, Lyapunov exponents and invariant bundles"};
    app.set_config("--config", "", "TOML/INI file with option defaults; flags win");
    app.require_subcommand(1);
    Config c;
    app.add_option("--threads", c.threads, "worker cap (0 = all cores)");

    auto add_common = [&](CLI::App* s) {
        s->add_option("--out", c.out, "output directory");
        s->add_option("--seed", c.seed, "seed for randomized diagnostics");
    };
    auto add_solve = [&](CLI::App* s) {
        s->add_option("--m", c.m, "Galerkin modes")->check(CLI::Range(2, 100000));
        s->add_option("--tol", c.tol, "Newton tolerance");
    };
    auto add_verify = [&](CLI::App* s) {
        s->add_option("--M", c.M, "tail cutoff (default m + 10)");
        s->add_option("--s", c.s, "decay rate");
        s->add_option("--l-policy", c.l_policy, "paper | fixed:N");
        s->add_option("--sharp-tails", c.sharp, "auto | on | off")->check(CLI::IsMember({"auto", "on", "off"}));
        s->add_option("--contraction-samples", c.samples, "random points for a non-rigorous contraction check");
    };
    auto add_bundles = [&](CLI::App* s) {
        s->add_option("--grid", c.grid, "samples per period")->check(CLI::Range(2, 10000000));
        s->add_option("--trivial-tol", c.trivial_tol, "band around 0 for the trivial exponent");
    };

    auto* solve = app.add_subcommand("solve", "initial guess and Newton refinement");
    solve->add_option("--orbit", c.orbit, "orbit or sequence file")->required();
    add_common(solve);
    add_solve(solve);

    auto* verify = app.add_subcommand("verify", "radii polynomial verification");
    verify->add_option("--orbit", c.orbit, "orbit or sequence file")->required();
    verify->add_option("--candidate", c.candidate, "candidate file (default OUT/candidate.json)");
    verify->add_option("--m", c.m, "modes kept from the candidate");
    add_common(verify);
    add_verify(verify);

    auto* bundles = app.add_subcommand("bundles", "exponents, multipliers and bundle samples");
    bundles->add_option("--form", c.form, "verified form (default OUT/form.json)");
    bundles->add_option("--orbit", c.orbit, "orbit file for base points");
    add_common(bundles);
    add_bundles(bundles);

    auto* pipeline = app.add_subcommand("pipeline", "solve, verify and bundles in sequence");
    pipeline->add_option("--orbit", c.orbit, "orbit or sequence file")->required();
    add_common(pipeline);
    add_solve(pipeline);
    add_verify(pipeline);
    add_bundles(pipeline);

    OrbitArgs oa;
    auto* orbit = app.add_subcommand("orbit", "non-rigorous orbit tools");
    orbit->require_subcommand(1);
    auto* refine = orbit->add_subcommand("refine", "Fourier-Galerkin Newton from an orbit guess");
    refine->add_option("--orbit", oa.input, "guess file")->required();
    refine->add_option("--M-gamma", oa.M_gamma, "number of orbit modes (default: as in the guess)");
    refine->add_option("--r-gamma", oa.r_gamma, "hypothesis radius");
    refine->add_option("--shift", oa.shift, "move the time origin by this amount");
    refine->add_option("--output", oa.output, "output file")->required();
    auto* cont = orbit->add_subcommand("continue", "natural-parameter continuation");
    cont->add_option("--orbit", oa.input, "start orbit")->required();
    cont->add_option("--param", oa.param, "field parameter name")->required();
    cont->add_option("--target", oa.target, "final parameter value")->required();
    cont->add_option("--steps", oa.steps, "continuation steps");
    cont->add_option("--M-gamma", oa.M_gamma, "re-refine with this many modes");
    cont->add_option("--r-gamma", oa.r_gamma, "hypothesis radius");
    cont->add_option("--output", oa.output, "output file")->required();
    auto* find = orbit->add_subcommand("find", "orbit from an initial state and period");
    find->add_option("--field", oa.field, "field JSON file")->required();
    find->add_option("--state", oa.state, "initial state")->required()->delimiter(',');
    find->add_option("--period", oa.period, "approximate period")->required();
    find->add_option("--M-gamma", oa.M_gamma, "number of orbit modes")->required();
    find->add_option("--r-gamma", oa.r_gamma, "hypothesis radius");
    find->add_option("--output", oa.output, "output file")->required();
    auto* resid = orbit->add_subcommand("residual", "ODE residual of an orbit file");
    resid->add_option("--orbit", oa.input, "orbit file")->required();
    for (auto* s : {refine, cont, find, resid}) s->add_option("--grid", oa.grid, "residual grid");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : FLOQUET_MALFORMED_INPUT;
    }
    floquet_set_threads(c.threads);

    if (*solve) return cmd_solve(c);
    if (*verify) {
        // without --m the candidate keeps all of its modes
        if (verify->count("--m") == 0) c.m = 0;
        return cmd_verify(c, "verify");
    }
    if (*bundles) return cmd_bundles(c);
    if (*pipeline) {
        std::string cand, form;
        if (int rc = cmd_solve(c, &cand)) return rc;
        Config v = c;
        v.candidate = cand;
        if (int rc = cmd_verify(v, "pipeline", &form)) return rc;
        v.form = form;
        return cmd_bundles(v);
    }
    for (auto* s : {refine, cont, find, resid})
        if (*s) return cmd_orbit(s->get_name(), oa);
    return 1;
}
