#include "floquet/floquet.h"

#include <cmath>
#include <new>
#include <string>

#include "floquet/bundles.hpp"
#include "floquet/eigen_enclosure.hpp"
#include "floquet/io.hpp"
#include "floquet/log.hpp"
#include "floquet/radii.hpp"

using namespace floquet;

struct floquet_problem {
    ProblemInput in;
};
struct floquet_candidate {
    FloquetCandidate x;
};
struct floquet_form {
    VerifiedFloquetForm f;
};
struct floquet_report {
    VerificationReport rep;
    std::string json;
};
struct floquet_bundles {
    BundleEnclosure b;
    std::string csv, json;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_name;

floquet_status status_of(ErrorCode c) {
    switch (c) {
        case ErrorCode::VerificationFailed:
        case ErrorCode::NotCertifiablyInvertible:
        case ErrorCode::NoDominanceBelowCutoff:
            return FLOQUET_VERIFICATION_FAILED;
        case ErrorCode::NoConvergence:
        case ErrorCode::SingularJacobian:
        case ErrorCode::LogBranchFailure:
            return FLOQUET_NO_CONVERGENCE;
        case ErrorCode::MalformedInput:
        case ErrorCode::Io:
        case ErrorCode::UnsupportedField:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::DecayTooWeak:
            return FLOQUET_MALFORMED_INPUT;
        case ErrorCode::DegenerateSpectrum:
        case ErrorCode::NotCertified:
        case ErrorCode::AmbiguousTrivial:
            return FLOQUET_DEGENERATE_SPECTRUM;
        default:
            return FLOQUET_ERROR;
    }
}

template <class F>
floquet_status guard(F&& body) {
    try {
        body();
        g_error.clear();
        g_error_name.clear();
        return FLOQUET_OK;
    } catch (const Error& e) {
        g_error = e.what();
        g_error_name = error_name(e.code());
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        g_error = "out of memory";
        g_error_name = "OutOfMemory";
    } catch (const std::exception& e) {
        g_error = e.what();
        g_error_name = "Internal";
    }
    return FLOQUET_ERROR;
}

void need(const void* p, const char* what) {
    if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " is null");
}

const OrbitEnclosure& orbit_of(const floquet_problem* p) {
    need(p, "problem");
    if (!p->in.orbit) fail(ErrorCode::InvalidArgument, "problem carries no orbit");
    return *p->in.orbit;
}

floquet_problem* wrap_orbit(OrbitEnclosure o) {
    auto* out = new floquet_problem;
    out->in.A = jacobian_coeffs(o);
    out->in.conditional = o.conditional;
    out->in.orbit = std::move(o);
    return out;
}

}  // namespace

extern "C" {

const char* floquet_last_error(void) { return g_error.c_str(); }
const char* floquet_last_error_name(void) { return g_error_name.c_str(); }
const char* floquet_version(void) { return "1.0.0"; }

void floquet_set_threads(int threads) { set_thread_limit(threads < 0 ? 0 : threads); }
void floquet_set_log_level(int level) { set_log_level(level); }

floquet_status floquet_problem_load(const char* path, floquet_problem** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        auto* p = new floquet_problem{load_problem(path)};
        *out = p;
    });
}

floquet_status floquet_problem_parse(const char* json_text, floquet_problem** out) {
    return guard([&] {
        need(json_text, "json_text");
        need(out, "out");
        *out = new floquet_problem{problem_from_json(json_text)};
    });
}

floquet_status floquet_problem_save(const floquet_problem* p, const char* path) {
    return guard([&] {
        need(p, "problem");
        need(path, "path");
        write_file(path, p->in.orbit ? orbit_to_json(*p->in.orbit) : sequence_to_json(p->in.A));
    });
}

void floquet_problem_free(floquet_problem* p) { delete p; }
int floquet_problem_dimension(const floquet_problem* p) { return p ? int(p->in.A.n) : 0; }
int floquet_problem_has_orbit(const floquet_problem* p) { return p && p->in.orbit ? 1 : 0; }
int floquet_problem_conditional(const floquet_problem* p) { return p && p->in.conditional ? 1 : 0; }
double floquet_problem_half_period(const floquet_problem* p) { return p ? p->in.A.half_period.mid() : NAN; }

floquet_status floquet_orbit_refine(const floquet_problem* guess, long M_gamma, double r_gamma,
                                    floquet_problem** out) {
    return guard([&] {
        need(out, "out");
        const OrbitEnclosure& g = orbit_of(guess);
        *out = wrap_orbit(orbit_candidate_find(g, M_gamma > 0 ? M_gamma : g.M_gamma, r_gamma));
    });
}

floquet_status floquet_orbit_continue(const floquet_problem* start, const char* param, double target, int steps,
                                      floquet_problem** out) {
    return guard([&] {
        need(param, "param");
        need(out, "out");
        *out = wrap_orbit(continue_orbit(orbit_of(start), param, target, steps));
    });
}

floquet_status floquet_orbit_shift(const floquet_problem* orbit, double t0, floquet_problem** out) {
    return guard([&] {
        need(out, "out");
        *out = wrap_orbit(shift_time(orbit_of(orbit), t0));
    });
}

floquet_status floquet_orbit_from_state(const char* field_json, const double* state, int n, double period,
                                        long M_gamma, double r_gamma, floquet_problem** out) {
    return guard([&] {
        need(field_json, "field_json");
        need(state, "state");
        need(out, "out");
        VectorFieldSpec f = field_from_json(field_json);
        if (n != int(f.n)) fail(ErrorCode::DimensionMismatch, "state dimension differs from the field");
        Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(state, n);
        *out = wrap_orbit(orbit_candidate_find(f, x0, period, M_gamma, r_gamma));
    });
}

floquet_status floquet_orbit_residual(const floquet_problem* orbit, int grid, double* out) {
    return guard([&] {
        need(out, "out");
        *out = orbit_residual(orbit_of(orbit), grid);
    });
}

void floquet_solve_params_default(floquet_solve_params* p) {
    if (!p) return;
    p->m = 30;
    p->tol = 1e-12;
    p->max_iter = 30;
    p->ode_tol = 1e-12;
}

floquet_status floquet_solve(const floquet_problem* p, const floquet_solve_params* params, floquet_candidate** out,
                             double* residual, int* iterations) {
    return guard([&] {
        need(p, "problem");
        need(out, "out");
        floquet_solve_params sp;
        floquet_solve_params_default(&sp);
        if (params) sp = *params;
        if (sp.m < 2) fail(ErrorCode::InvalidArgument, "m must be at least 2");
        GalerkinProblem prob{p->in.A, std::size_t(sp.m), 2.0};
        InitGuessOptions io;
        io.ode_tol = sp.ode_tol;
        NewtonReport nr;
        FloquetCandidate x = newton_refine(init_guess(prob, io), prob, sp.tol, sp.max_iter, &nr);
        if (residual) *residual = nr.residual;
        if (iterations) *iterations = nr.iterations;
        *out = new floquet_candidate{std::move(x)};
    });
}

floquet_status floquet_candidate_load(const char* path, floquet_candidate** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new floquet_candidate{candidate_from_json(read_file(path))};
    });
}

floquet_status floquet_candidate_save(const floquet_candidate* c, const char* path) {
    return guard([&] {
        need(c, "candidate");
        need(path, "path");
        write_file(path, candidate_to_json(c->x));
    });
}

void floquet_candidate_free(floquet_candidate* c) { delete c; }
int floquet_candidate_modes(const floquet_candidate* c) { return c ? int(c->x.m) : 0; }

floquet_status floquet_candidate_R(const floquet_candidate* c, double* out) {
    return guard([&] {
        need(c, "candidate");
        need(out, "out");
        const auto n = Eigen::Index(c->x.n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) out[i * n + j] = c->x.R(i, j);
    });
}

void floquet_verify_params_default(floquet_verify_params* p) {
    if (!p) return;
    p->s = 2.0;
    p->m = 0;
    p->M = 0;
    p->l_policy = FLOQUET_L_PAPER;
    p->l_fixed = 0;
    p->sharp = FLOQUET_SHARP_AUTO;
    p->k_cap = 1000000;
}

static VerifierParams to_verifier(const floquet_verify_params* params, std::size_t candidate_m) {
    floquet_verify_params vp;
    floquet_verify_params_default(&vp);
    if (params) vp = *params;
    VerifierParams v;
    v.s = vp.s;
    v.m = vp.m > 0 ? std::size_t(vp.m) : candidate_m;
    v.M = vp.M > 0 ? std::size_t(vp.M) : v.m + 10;
    v.l_policy = vp.l_policy == FLOQUET_L_FIXED ? LPolicy::Fixed : LPolicy::Paper;
    v.l_fixed = vp.l_fixed;
    v.sharp = vp.sharp == FLOQUET_SHARP_ON ? SharpMode::On : vp.sharp == FLOQUET_SHARP_OFF ? SharpMode::Off : SharpMode::Auto;
    v.k_cap = vp.k_cap;
    return v;
}

floquet_status floquet_verify(const floquet_problem* p, const floquet_candidate* c, const floquet_verify_params* params,
                              const char* config_json, floquet_form** form, floquet_report** report) {
    if (form) *form = nullptr;
    if (report) *report = nullptr;
    auto* rep = new floquet_report;
    floquet_status st = guard([&] {
        need(p, "problem");
        need(c, "candidate");
        const VerifierParams v = to_verifier(params, c->x.m);
        FloquetCandidate x = c->x.m == v.m ? c->x : c->x.resized(v.m);
        if (x.n != p->in.A.n) fail(ErrorCode::DimensionMismatch, "candidate and problem differ in dimension");
        rep->rep.params = v;
        try {
            VerifiedFloquetForm f = p->in.orbit ? verify(*p->in.orbit, x, v, &rep->rep)
                                                : verify(x, GalerkinProblem{p->in.A, v.m, v.s}, v, p->in.conditional,
                                                         &rep->rep);
            if (form) *form = new floquet_form{std::move(f)};
        } catch (...) {
            rep->json = report_to_json(rep->rep, config_json ? config_json : "");
            throw;
        }
        rep->json = report_to_json(rep->rep, config_json ? config_json : "");
    });
    if (report && !rep->json.empty())
        *report = rep;
    else
        delete rep;
    return st;
}

floquet_status floquet_contraction_check(const floquet_problem* p, const floquet_candidate* c,
                                         const floquet_verify_params* params, double r, int count,
                                         unsigned long long seed, double* ratio) {
    return guard([&] {
        need(p, "problem");
        need(c, "candidate");
        need(ratio, "ratio");
        const VerifierParams v = to_verifier(params, c->x.m);
        FloquetCandidate x = c->x.m == v.m ? c->x : c->x.resized(v.m);
        if (x.n != p->in.A.n) fail(ErrorCode::DimensionMismatch, "candidate and problem differ in dimension");
        GalerkinProblem prob{p->in.A, v.m, v.s};
        BlockOperator op;
        radii_coefficients(x, prob, v, &op);
        *ratio = sample_contraction(x, prob, op, r, v.s, count, seed);
    });
}

void floquet_report_free(floquet_report* r) { delete r; }
int floquet_report_success(const floquet_report* r) { return r && r->rep.success ? 1 : 0; }
double floquet_report_radius(const floquet_report* r) { return r && r->rep.success ? r->rep.r : NAN; }

int floquet_report_interval(const floquet_report* r, double* r_min, double* r_max) {
    if (!r || !r->rep.has_interval) return 0;
    if (r_min) *r_min = r->rep.r_min;
    if (r_max) *r_max = r->rep.r_max;
    return 1;
}

const char* floquet_report_json(const floquet_report* r) { return r ? r->json.c_str() : ""; }

floquet_status floquet_form_load(const char* path, floquet_form** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new floquet_form{form_from_json(read_file(path))};
    });
}

floquet_status floquet_form_save(const floquet_form* f, const char* path) {
    return guard([&] {
        need(f, "form");
        need(path, "path");
        write_file(path, form_to_json(f->f));
    });
}

void floquet_form_free(floquet_form* f) { delete f; }
double floquet_form_radius(const floquet_form* f) { return f ? f->f.r : NAN; }

floquet_status floquet_bundles_compute(const floquet_form* f, const floquet_problem* orbit, int count,
                                       double trivial_tol, floquet_bundles** out) {
    return guard([&] {
        need(f, "form");
        need(out, "out");
        const OrbitEnclosure* o = orbit && orbit->in.orbit ? &*orbit->in.orbit : nullptr;
        IntervalMatrix R = f->f.R_enclosure();
        const double tol = trivial_tol < 0 ? default_trivial_tol(R) : trivial_tol;
        ExponentClassification cls = classify(verified_eigenpairs(R), f->f.x.tau, tol);
        auto* b = new floquet_bundles;
        try {
            b->b = sample_bundles(f->f, o, cls, count);
            b->csv = bundles_csv(b->b);
            b->json = eigen_to_json(b->b, f->f.x.tau);
        } catch (...) {
            delete b;
            throw;
        }
        *out = b;
    });
}

void floquet_bundles_free(floquet_bundles* b) { delete b; }
const char* floquet_bundles_csv(const floquet_bundles* b) { return b ? b->csv.c_str() : ""; }
const char* floquet_bundles_json(const floquet_bundles* b) { return b ? b->json.c_str() : ""; }
int floquet_bundles_exponent_count(const floquet_bundles* b) {
    return b ? int(b->b.classification.pairs.size()) : 0;
}

floquet_status floquet_bundles_exponent(const floquet_bundles* b, int j, double* lo, double* hi, const char** label,
                                        int* sign) {
    return guard([&] {
        need(b, "bundles");
        const auto& cls = b->b.classification;
        if (j < 0 || std::size_t(j) >= cls.pairs.size()) fail(ErrorCode::InvalidArgument, "exponent index out of range");
        const std::size_t i = std::size_t(j);
        if (lo) *lo = cls.lyapunov[i].lo;
        if (hi) *hi = cls.lyapunov[i].hi;
        if (label) *label = label_name(cls.labels[i]);
        if (sign) *sign = i < b->b.signs.size() ? b->b.signs[i].sign : 0;
    });
}

}  // extern "C"
