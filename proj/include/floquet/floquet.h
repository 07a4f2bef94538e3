#ifndef FLOQUET_FLOQUET_H
#define FLOQUET_FLOQUET_H

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum {
    FLOQUET_OK = 0,
    FLOQUET_ERROR = 1,
    FLOQUET_VERIFICATION_FAILED = 2,
    FLOQUET_NO_CONVERGENCE = 3,
    FLOQUET_MALFORMED_INPUT = 4,
    FLOQUET_DEGENERATE_SPECTRUM = 5
} floquet_status;

typedef struct floquet_problem floquet_problem;
typedef struct floquet_candidate floquet_candidate;
typedef struct floquet_form floquet_form;
typedef struct floquet_report floquet_report;
typedef struct floquet_bundles floquet_bundles;

/* Message and error name of the last failure on the calling thread. */
const char* floquet_last_error(void);
const char* floquet_last_error_name(void);
const char* floquet_version(void);

/* 0 restores the hardware default. */
void floquet_set_threads(int threads);
/* 0 silent, 1 info, 2 debug; FLOQUET_LOG sets the initial level. */
void floquet_set_log_level(int level);

/* Problems: an orbit file ("field" key) or an explicit sequence ("coeffs"). */
floquet_status floquet_problem_load(const char* path, floquet_problem** out);
floquet_status floquet_problem_parse(const char* json_text, floquet_problem** out);
floquet_status floquet_problem_save(const floquet_problem* p, const char* path);
void floquet_problem_free(floquet_problem* p);
int floquet_problem_dimension(const floquet_problem* p);
int floquet_problem_has_orbit(const floquet_problem* p);
int floquet_problem_conditional(const floquet_problem* p);
double floquet_problem_half_period(const floquet_problem* p);

/* Orbit tools (non-rigorous; results carry the conditional flag). */
floquet_status floquet_orbit_refine(const floquet_problem* guess, long M_gamma, double r_gamma,
                                    floquet_problem** out);
floquet_status floquet_orbit_continue(const floquet_problem* start, const char* param, double target,
                                      int steps, floquet_problem** out);
floquet_status floquet_orbit_shift(const floquet_problem* orbit, double t0, floquet_problem** out);
/* field_json is a field object such as {"kind":"lorenz","params":{...}}. */
floquet_status floquet_orbit_from_state(const char* field_json, const double* state, int n, double period,
                                        long M_gamma, double r_gamma, floquet_problem** out);
/* Sup of |gamma' - g(gamma)| on a uniform grid of the midpoint orbit. */
floquet_status floquet_orbit_residual(const floquet_problem* orbit, int grid, double* out);

typedef struct {
    int m;
    double tol;
    int max_iter;
    double ode_tol;
} floquet_solve_params;

void floquet_solve_params_default(floquet_solve_params* p);
/* Initial guess from the monodromy, then Newton. residual and iterations may be NULL. */
floquet_status floquet_solve(const floquet_problem* p, const floquet_solve_params* params, floquet_candidate** out,
                             double* residual, int* iterations);
floquet_status floquet_candidate_load(const char* path, floquet_candidate** out);
floquet_status floquet_candidate_save(const floquet_candidate* c, const char* path);
void floquet_candidate_free(floquet_candidate* c);
int floquet_candidate_modes(const floquet_candidate* c);
/* Row-major n x n midpoint of R. */
floquet_status floquet_candidate_R(const floquet_candidate* c, double* out);

typedef enum { FLOQUET_L_PAPER = 0, FLOQUET_L_FIXED = 1 } floquet_l_policy;
typedef enum { FLOQUET_SHARP_AUTO = 0, FLOQUET_SHARP_ON = 1, FLOQUET_SHARP_OFF = 2 } floquet_sharp_mode;

typedef struct {
    double s;
    int m; /* 0 means the candidate's mode count */
    int M;
    int l_policy;
    long l_fixed;
    int sharp;
    long k_cap;
} floquet_verify_params;

void floquet_verify_params_default(floquet_verify_params* p);
/* A failed verification returns FLOQUET_VERIFICATION_FAILED with *report set
   and *form NULL. config_json (may be NULL) is echoed into the report. */
floquet_status floquet_verify(const floquet_problem* p, const floquet_candidate* c, const floquet_verify_params* params,
                              const char* config_json, floquet_form** form, floquet_report** report);
/* Non-rigorous sanity check: largest |T(x) - x_bar|_s / r over count random
   points of the ball of radius r. Values below 1 are consistent with a proof. */
floquet_status floquet_contraction_check(const floquet_problem* p, const floquet_candidate* c,
                                         const floquet_verify_params* params, double r, int count,
                                         unsigned long long seed, double* ratio);
void floquet_report_free(floquet_report* r);
int floquet_report_success(const floquet_report* r);
double floquet_report_radius(const floquet_report* r);
/* Returns 0 when no negativity interval exists. */
int floquet_report_interval(const floquet_report* r, double* r_min, double* r_max);
/* Valid until the report is freed. */
const char* floquet_report_json(const floquet_report* r);

floquet_status floquet_form_load(const char* path, floquet_form** out);
floquet_status floquet_form_save(const floquet_form* f, const char* path);
void floquet_form_free(floquet_form* f);
double floquet_form_radius(const floquet_form* f);

/* orbit may be NULL (no base points). trivial_tol < 0 selects the default. */
floquet_status floquet_bundles_compute(const floquet_form* f, const floquet_problem* orbit, int count,
                                       double trivial_tol, floquet_bundles** out);
void floquet_bundles_free(floquet_bundles* b);
const char* floquet_bundles_csv(const floquet_bundles* b);
const char* floquet_bundles_json(const floquet_bundles* b);
int floquet_bundles_exponent_count(const floquet_bundles* b);
/* label is "stable", "trivial" or "unstable"; sign is +1, -1 or 0 when undetermined. */
floquet_status floquet_bundles_exponent(const floquet_bundles* b, int j, double* lo, double* hi, const char** label,
                                        int* sign);

#ifdef __cplusplus
}
#endif

#endif
