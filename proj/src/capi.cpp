#include "spaceform.h"

#include "spaceform/cone.hpp"
#include "spaceform/errors.hpp"
#include "spaceform/grid.hpp"
#include "spaceform/moving_plane.hpp"
#include "spaceform/radial.hpp"
#include "spaceform/verify.hpp"

#include <cstdio>
#include <cstring>
#include <optional>
#include <string>

using namespace spaceform;

namespace {

thread_local std::string g_last_error;

sf_status fail(sf_status code, const char* what) {
    g_last_error = what;
    return code;
}

template <typename F>
sf_status guarded(F&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return fail(SF_ERR_VALIDATION, e.what());
    } catch (const std::domain_error& e) {
        return fail(SF_ERR_VALIDATION, e.what());
    } catch (const io_error& e) {
        return fail(SF_ERR_IO, e.what());
    } catch (const convergence_error& e) {
        return fail(SF_ERR_CONVERGENCE, e.what());
    } catch (const std::exception& e) {
        return fail(SF_ERR_VALIDATION, e.what());
    }
}

SpaceForm chart_of(sf_chart chart, int dim) {
    switch (chart) {
    case SF_CHART_EUCLIDEAN:
        return SpaceForm(ChartKind::Euclidean, dim);
    case SF_CHART_HYPERBOLIC:
        return SpaceForm(ChartKind::HyperbolicHalfSpace, dim);
    case SF_CHART_SPHERE:
        return SpaceForm(ChartKind::SphereStereographic, dim);
    }
    throw std::invalid_argument("unknown chart id");
}

PucciSign sign_of(sf_sign s) {
    return s == SF_SIGN_MINUS ? PucciSign::Minus : PucciSign::Plus;
}

} // namespace

struct sf_cone_result {
    ConeExponentResult r;
};
struct sf_radial_result {
    RadialSolution r;
};
struct sf_grid_domain {
    GridDomain d;
};
struct sf_grid_field {
    GridField f;
};
struct sf_mp_report {
    MovingPlaneReport r;
};

extern "C" {

const char* sf_last_error(void) { return g_last_error.c_str(); }

sf_status sf_verify(const char* suite, unsigned long long seed, long trials, int fix_params,
                    double lambda, double Lambda, double k, char* report, size_t report_cap,
                    int* all_passed) {
    return guarded([&]() {
        std::optional<PucciParams> fixed;
        if (fix_params) fixed.emplace(lambda, Lambda, k);
        const auto results = run_verify_suite(suite ? suite : "all", seed, trials, fixed);
        const std::string text = format_suite_report(results);
        if (report && report_cap > 0) {
            std::strncpy(report, text.c_str(), report_cap - 1);
            report[report_cap - 1] = '\0';
        }
        bool ok = true;
        for (const auto& r : results) ok = ok && r.passed();
        if (all_passed) *all_passed = ok ? 1 : 0;
        return SF_OK;
    });
}

sf_status sf_cone_solve(double theta0, double lambda, double Lambda, double tol,
                        sf_cone_result** out) {
    return guarded([&]() {
        ConeProblem pb(theta0, PucciParams(lambda, Lambda, 0.0));
        auto* h = new sf_cone_result{solve_beta(pb, tol)};
        *out = h;
        return SF_OK;
    });
}

double sf_cone_beta(const sf_cone_result* r) { return r->r.beta; }
double sf_cone_residual(const sf_cone_result* r) { return r->r.residual_sup; }
long sf_cone_node_count(const sf_cone_result* r) {
    return static_cast<long>(r->r.theta_nodes.size());
}
void sf_cone_profile(const sf_cone_result* r, double* theta, double* phi) {
    for (size_t i = 0; i < r->r.theta_nodes.size(); ++i) {
        if (theta) theta[i] = r->r.theta_nodes[i];
        if (phi) phi[i] = r->r.phi_values[i];
    }
}
void sf_cone_free(sf_cone_result* r) { delete r; }

sf_status sf_radial_solve(sf_chart chart, int dim, double R, double lambda, double Lambda,
                          double k, double c, double b, sf_sign sign, double tol,
                          sf_radial_result** out) {
    return guarded([&]() {
        RadialProblem pb(chart_of(chart, dim), R, PucciParams(lambda, Lambda, k), sign_of(sign),
                         AffineSource{c, b});
        auto* h = new sf_radial_result{shoot(pb, tol)};
        *out = h;
        return SF_OK;
    });
}

double sf_radial_c0(const sf_radial_result* r) { return r->r.c0; }
double sf_radial_residual(const sf_radial_result* r) { return r->r.residual_sup; }
long sf_radial_node_count(const sf_radial_result* r) {
    return static_cast<long>(r->r.r_nodes.size());
}
void sf_radial_profile(const sf_radial_result* r, double* rr, double* u, double* du) {
    for (size_t i = 0; i < r->r.r_nodes.size(); ++i) {
        if (rr) rr[i] = r->r.r_nodes[i];
        if (u) u[i] = r->r.u_values[i];
        if (du) du[i] = r->r.du_values[i];
    }
}
void sf_radial_free(sf_radial_result* r) { delete r; }

sf_status sf_grid_build_ball(sf_chart chart, double cx, double cy, double R, double h, int W,
                             sf_grid_domain** out) {
    return guarded([&]() {
        auto* d = new sf_grid_domain{
            build_geodesic_ball(chart_of(chart, 2), Eigen::Vector2d(cx, cy), R, h, W)};
        *out = d;
        return SF_OK;
    });
}

sf_status sf_grid_build_ellipse(sf_chart chart, double cx, double cy, double a, double b, double h,
                                int W, sf_grid_domain** out) {
    return guarded([&]() {
        auto* d = new sf_grid_domain{
            build_ellipse_domain(chart_of(chart, 2), Eigen::Vector2d(cx, cy), a, b, h, W)};
        *out = d;
        return SF_OK;
    });
}

sf_status sf_grid_domain_read_csv(const char* path, sf_grid_domain** out) {
    return guarded([&]() {
        auto* d = new sf_grid_domain{read_domain_csv(path)};
        *out = d;
        return SF_OK;
    });
}

sf_status sf_grid_domain_write_csv(const sf_grid_domain* dom, const char* path) {
    return guarded([&]() {
        write_domain_csv(path, dom->d);
        return SF_OK;
    });
}

long sf_grid_interior_count(const sf_grid_domain* dom) { return dom->d.interior_count(); }
void sf_grid_domain_free(sf_grid_domain* dom) { delete dom; }

sf_status sf_grid_solve(const sf_grid_domain* dom, double lambda, double Lambda, double k,
                        double c, double b, sf_sign sign, int W, double tol, int max_policy_iters,
                        double linear_tol, sf_grid_field** out, int* iterations,
                        double* residual_sup) {
    return guarded([&]() {
        SolverConfig cfg;
        cfg.W = W;
        cfg.tol = tol;
        cfg.max_policy_iters = max_policy_iters;
        cfg.linear_tol = linear_tol;
        SolveStats st;
        auto* f = new sf_grid_field{howard_solve(dom->d, PucciParams(lambda, Lambda, k),
                                                 AffineSource{c, b}, sign_of(sign), cfg, &st)};
        *out = f;
        if (iterations) *iterations = st.policy_iterations;
        if (residual_sup) *residual_sup = st.residual_sup;
        if (!st.converged)
            return fail(SF_ERR_CONVERGENCE, "policy iteration stagnated above the tolerance");
        return SF_OK;
    });
}

sf_status sf_grid_field_read_csv(const char* path, const sf_grid_domain* dom,
                                 sf_grid_field** out) {
    return guarded([&]() {
        auto* f = new sf_grid_field{read_field_csv(path, dom->d)};
        *out = f;
        return SF_OK;
    });
}

sf_status sf_grid_field_write_csv(const sf_grid_domain* dom, const sf_grid_field* u,
                                  const char* path) {
    return guarded([&]() {
        write_field_csv(path, dom->d, u->f);
        return SF_OK;
    });
}

void sf_grid_field_free(sf_grid_field* u) { delete u; }

sf_status sf_boundary_profile(const sf_grid_domain* dom, const sf_grid_field* u,
                              const char* csv_path_or_null, double* mean, double* spread,
                              long* count) {
    return guarded([&]() {
        const auto prof = boundary_gradient_profile(u->f, dom->d);
        if (prof.empty()) return fail(SF_ERR_CONVERGENCE, "no usable boundary samples");
        double lo = prof[0].value, hi = prof[0].value, sum = 0.0;
        for (const auto& s : prof) {
            lo = std::min(lo, s.value);
            hi = std::max(hi, s.value);
            sum += s.value;
        }
        const double m = sum / static_cast<double>(prof.size());
        if (mean) *mean = m;
        if (spread) *spread = m != 0.0 ? (hi - lo) / m : 0.0;
        if (count) *count = static_cast<long>(prof.size());
        if (csv_path_or_null) {
            FILE* f = std::fopen(csv_path_or_null, "w");
            if (!f) throw io_error(std::string("cannot open '") + csv_path_or_null + "'");
            std::fprintf(f, "x1,x2,grad\n");
            for (const auto& s : prof) std::fprintf(f, "%.9g,%.9g,%.9g\n", s.x1, s.x2, s.value);
            if (std::fclose(f) != 0)
                throw io_error(std::string("error writing '") + csv_path_or_null + "'");
        }
        return SF_OK;
    });
}

sf_status sf_moving_plane(const sf_grid_domain* dom, const sf_grid_field* u, double tol,
                          int direction, sf_mp_report** out) {
    return guarded([&]() {
        auto* r = new sf_mp_report{find_critical_s(u->f, dom->d, tol, direction)};
        *out = r;
        return SF_OK;
    });
}

int sf_mp_symmetric(const sf_mp_report* r) { return r->r.symmetric ? 1 : 0; }
double sf_mp_s_star(const sf_mp_report* r) { return r->r.s_star; }
double sf_mp_w_sup(const sf_mp_report* r) { return r->r.w_sup_at_star; }
sf_mp_situation sf_mp_situation_of(const sf_mp_report* r) {
    switch (r->r.situation) {
    case StopSituation::Tangency:
        return SF_MP_TANGENCY;
    case StopSituation::Corner:
        return SF_MP_CORNER;
    default:
        return SF_MP_EXHAUSTED;
    }
}

int sf_mp_corner_point(const sf_mp_report* r, double* qx, double* qy) {
    if (!r->r.corner_point) return 0;
    if (qx) *qx = (*r->r.corner_point)[0];
    if (qy) *qy = (*r->r.corner_point)[1];
    return 1;
}

sf_status sf_mp_write_report(const sf_mp_report* r, const char* path) {
    return guarded([&]() {
        write_report(path, r->r);
        return SF_OK;
    });
}

sf_status sf_mp_corner_growth(const sf_grid_domain* dom, const sf_grid_field* u,
                              const sf_mp_report* r, double alpha, double beta,
                              const char* samples_csv_or_null, double* fit, int* consistent) {
    return guarded([&]() {
        const CornerGrowth g = corner_growth_check(u->f, dom->d, r->r, alpha, beta);
        if (fit) *fit = g.fit;
        if (consistent) *consistent = g.consistent ? 1 : 0;
        if (samples_csv_or_null) write_corner_samples_csv(samples_csv_or_null, g);
        return SF_OK;
    });
}

void sf_mp_free(sf_mp_report* r) { delete r; }

} // extern "C"
