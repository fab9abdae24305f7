/*
 * C interface to the spaceform library: Pucci extremal operators on space
 * forms, radial overdetermined solves, cone exponents, 2-D grid Dirichlet
 * solves and the discrete moving-plane harness.
 *
 * All functions return sf_status; on failure sf_last_error() describes the
 * problem. Handles are opaque and must be released with their sf_*_free
 * function.
 */
#ifndef SPACEFORM_H
#define SPACEFORM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sf_status {
    SF_OK = 0,
    SF_ERR_VALIDATION = 1,  /* bad arguments, inadmissible points, parse errors */
    SF_ERR_CONVERGENCE = 2, /* iteration failed to reach its tolerance */
    SF_ERR_IO = 3           /* file read/write problems */
} sf_status;

typedef enum sf_chart {
    SF_CHART_EUCLIDEAN = 0,
    SF_CHART_HYPERBOLIC = 1,
    SF_CHART_SPHERE = 2
} sf_chart;

typedef enum sf_sign { SF_SIGN_MINUS = 0, SF_SIGN_PLUS = 1 } sf_sign;

/* Message describing the most recent failure on this thread. */
const char* sf_last_error(void);

/* ---- randomized verification suites ------------------------------- */

/* suite: "geometry", "pucci", "lemma21", "sphere64" or "all".
 * When fix_params is nonzero the draws use (lambda, Lambda, k) instead of
 * sampling them. The report (pass/fail counts per property) is written to
 * `report`; *all_passed is 1 iff no property failed. */
sf_status sf_verify(const char* suite, unsigned long long seed, long trials, int fix_params,
                    double lambda, double Lambda, double k, char* report, size_t report_cap,
                    int* all_passed);

/* ---- cone homogeneity exponent ------------------------------------ */

typedef struct sf_cone_result sf_cone_result;

sf_status sf_cone_solve(double theta0, double lambda, double Lambda, double tol,
                        sf_cone_result** out);
double sf_cone_beta(const sf_cone_result* r);
double sf_cone_residual(const sf_cone_result* r);
long sf_cone_node_count(const sf_cone_result* r);
/* copies the profile into caller arrays of length sf_cone_node_count */
void sf_cone_profile(const sf_cone_result* r, double* theta, double* phi);
void sf_cone_free(sf_cone_result* r);

/* ---- radial overdetermined solve ----------------------------------- */

typedef struct sf_radial_result sf_radial_result;

/* f(u) = c - b*u */
sf_status sf_radial_solve(sf_chart chart, int dim, double R, double lambda, double Lambda,
                          double k, double c, double b, sf_sign sign, double tol,
                          sf_radial_result** out);
double sf_radial_c0(const sf_radial_result* r);
double sf_radial_residual(const sf_radial_result* r);
long sf_radial_node_count(const sf_radial_result* r);
void sf_radial_profile(const sf_radial_result* r, double* rr, double* u, double* du);
void sf_radial_free(sf_radial_result* r);

/* ---- 2-D grid domains and Dirichlet solves ------------------------- */

typedef struct sf_grid_domain sf_grid_domain;
typedef struct sf_grid_field sf_grid_field;

sf_status sf_grid_build_ball(sf_chart chart, double cx, double cy, double R, double h, int W,
                             sf_grid_domain** out);
sf_status sf_grid_build_ellipse(sf_chart chart, double cx, double cy, double a, double b, double h,
                                int W, sf_grid_domain** out);
sf_status sf_grid_domain_read_csv(const char* path, sf_grid_domain** out);
sf_status sf_grid_domain_write_csv(const sf_grid_domain* dom, const char* path);
long sf_grid_interior_count(const sf_grid_domain* dom);
void sf_grid_domain_free(sf_grid_domain* dom);

/* Howard policy iteration; on SF_ERR_CONVERGENCE the partial field is
 * still returned. */
sf_status sf_grid_solve(const sf_grid_domain* dom, double lambda, double Lambda, double k,
                        double c, double b, sf_sign sign, int W, double tol, int max_policy_iters,
                        double linear_tol, sf_grid_field** out, int* iterations,
                        double* residual_sup);
sf_status sf_grid_field_read_csv(const char* path, const sf_grid_domain* dom,
                                 sf_grid_field** out);
sf_status sf_grid_field_write_csv(const sf_grid_domain* dom, const sf_grid_field* u,
                                  const char* path);
void sf_grid_field_free(sf_grid_field* u);

/* Boundary gradient profile |grad_g u|_g; optionally written as CSV
 * "x1,x2,grad" and summarized as mean and relative spread (max-min)/mean. */
sf_status sf_boundary_profile(const sf_grid_domain* dom, const sf_grid_field* u,
                              const char* csv_path_or_null, double* mean, double* spread,
                              long* count);

/* ---- discrete moving-plane harness --------------------------------- */

typedef struct sf_mp_report sf_mp_report;

typedef enum sf_mp_situation {
    SF_MP_TANGENCY = 0,
    SF_MP_CORNER = 1,
    SF_MP_EXHAUSTED = 2
} sf_mp_situation;

/* direction +1 sweeps the plane from large x1, -1 from small x1 */
sf_status sf_moving_plane(const sf_grid_domain* dom, const sf_grid_field* u, double tol,
                          int direction, sf_mp_report** out);
int sf_mp_symmetric(const sf_mp_report* r);
double sf_mp_s_star(const sf_mp_report* r);
double sf_mp_w_sup(const sf_mp_report* r);
sf_mp_situation sf_mp_situation_of(const sf_mp_report* r);
/* returns 1 and fills (qx, qy) when a corner point was recorded */
int sf_mp_corner_point(const sf_mp_report* r, double* qx, double* qy);
sf_status sf_mp_write_report(const sf_mp_report* r, const char* path);
/* growth-exponent fit of w at the corner; fit is NaN when w vanishes */
sf_status sf_mp_corner_growth(const sf_grid_domain* dom, const sf_grid_field* u,
                              const sf_mp_report* r, double alpha, double beta,
                              const char* samples_csv_or_null, double* fit, int* consistent);
void sf_mp_free(sf_mp_report* r);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SPACEFORM_H */
