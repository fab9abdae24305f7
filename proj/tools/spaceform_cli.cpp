// Command-line front end; talks to the library exclusively through the
// C interface in spaceform.h.
//
// Exit codes: 0 success, 1 validation error, 2 numerical-convergence
// error, 3 I/O error.

#include "spaceform.h"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int code_of(sf_status s) { return static_cast<int>(s); }

int fail_with(sf_status s) {
    std::fprintf(stderr, "error: %s\n", sf_last_error());
    return code_of(s);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        size_t pos = 0;
        const double v = std::stod(item, &pos);
        if (pos != item.size()) throw CLI::ValidationError("list", "cannot parse '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw CLI::ValidationError("list", "empty list");
    return out;
}

FILE* open_out(const std::string& path) {
    if (path.empty() || path == "-") return stdout;
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) {
        std::fprintf(stderr, "error: cannot open '%s' for writing\n", path.c_str());
        return nullptr;
    }
    return f;
}

void close_out(FILE* f) {
    if (f && f != stdout) std::fclose(f);
}

sf_chart chart_of(const std::string& name) {
    if (name == "euclidean") return SF_CHART_EUCLIDEAN;
    if (name == "hyperbolic") return SF_CHART_HYPERBOLIC;
    return SF_CHART_SPHERE;
}

struct VerifyArgs {
    std::string suite = "all";
    unsigned long long seed = 0;
    long trials = 10000;
    double lambda = 0.0, Lambda = 0.0, k = 0.0;
    bool fixed = false;
};

int run_verify(const VerifyArgs& a) {
    std::vector<char> report(1 << 16);
    int ok = 0;
    const sf_status s = sf_verify(a.suite.c_str(), a.seed, a.trials, a.fixed ? 1 : 0, a.lambda,
                                  a.Lambda, a.k, report.data(), report.size(), &ok);
    if (s != SF_OK) return fail_with(s);
    std::fputs(report.data(), stdout);
    if (!ok) return 2;
    return 0;
}

struct ConeArgs {
    double theta0 = M_PI / 2.0;
    double lambda = 1.0;
    double Lambda = 1.0;
    double tol = 1e-7;
    std::string sweep;
    std::string out;
};

int run_cone(const ConeArgs& a) {
    FILE* f = open_out(a.out);
    if (!f) return 3;
    std::fprintf(f, "epsilon,beta,residual\n");
    std::vector<double> eps_list;
    if (!a.sweep.empty()) {
        eps_list = parse_list(a.sweep);
    } else {
        eps_list = {a.Lambda / a.lambda - 1.0};
    }
    for (double eps : eps_list) {
        const double Lam = a.sweep.empty() ? a.Lambda : a.lambda * (1.0 + eps);
        sf_cone_result* r = nullptr;
        const sf_status s = sf_cone_solve(a.theta0, a.lambda, Lam, a.tol, &r);
        if (s != SF_OK) {
            close_out(f);
            return fail_with(s);
        }
        std::fprintf(f, "%.9g,%.9g,%.9g\n", eps, sf_cone_beta(r), sf_cone_residual(r));
        sf_cone_free(r);
    }
    close_out(f);
    return 0;
}

struct RadialArgs {
    std::string space = "euclidean";
    int N = 2;
    double R = 1.0;
    double lambda = 1.0, Lambda = 1.0, k = 0.0;
    double c = 1.0, b = 0.0;
    std::string sign = "minus";
    double tol = 1e-10;
    std::string rlist;
    std::string out;
};

int run_radial(const RadialArgs& a) {
    const sf_sign sign = a.sign == "plus" ? SF_SIGN_PLUS : SF_SIGN_MINUS;
    if (!a.rlist.empty()) {
        FILE* f = open_out(a.out);
        if (!f) return 3;
        std::fprintf(f, "R,c0\n");
        for (double R : parse_list(a.rlist)) {
            sf_radial_result* r = nullptr;
            const sf_status s = sf_radial_solve(chart_of(a.space), a.N, R, a.lambda, a.Lambda, a.k,
                                                a.c, a.b, sign, a.tol, &r);
            if (s != SF_OK) {
                close_out(f);
                return fail_with(s);
            }
            std::fprintf(f, "%.9g,%.9g\n", R, sf_radial_c0(r));
            sf_radial_free(r);
        }
        close_out(f);
        return 0;
    }
    sf_radial_result* r = nullptr;
    const sf_status s = sf_radial_solve(chart_of(a.space), a.N, a.R, a.lambda, a.Lambda, a.k, a.c,
                                        a.b, sign, a.tol, &r);
    if (s != SF_OK) return fail_with(s);
    FILE* f = open_out(a.out);
    if (!f) {
        sf_radial_free(r);
        return 3;
    }
    const long n = sf_radial_node_count(r);
    std::vector<double> rr(static_cast<size_t>(n)), u(static_cast<size_t>(n)),
        du(static_cast<size_t>(n));
    sf_radial_profile(r, rr.data(), u.data(), du.data());
    std::fprintf(f, "r,u,du\n");
    for (long i = 0; i < n; ++i)
        std::fprintf(f, "%.9g,%.9g,%.9g\n", rr[static_cast<size_t>(i)], u[static_cast<size_t>(i)],
                     du[static_cast<size_t>(i)]);
    close_out(f);
    std::printf("c0 = %.9g\n", sf_radial_c0(r));
    std::printf("residual_sup = %.9g\n", sf_radial_residual(r));
    sf_radial_free(r);
    return 0;
}

struct Solve2dArgs {
    std::string space = "hyperbolic";
    std::string domain = "ball";
    double cx = 0.0, cy = 1.0;
    double R = 0.5;
    double ax = 0.5, bx = 0.25;
    double h = 1.0 / 64.0;
    double lambda = 1.0, Lambda = 1.0, k = 0.0;
    double c = 1.0, b = 0.0;
    std::string sign = "minus";
    int W = 3;
    double tol = 1e-8;
    int max_iters = 60;
    double linear_tol = 1e-12;
    std::string out = "field.csv";
    std::string domain_out;
    std::string profile_out;
};

int run_solve2d(const Solve2dArgs& a) {
    sf_grid_domain* dom = nullptr;
    sf_status s;
    if (a.domain == "ball")
        s = sf_grid_build_ball(chart_of(a.space), a.cx, a.cy, a.R, a.h, a.W, &dom);
    else
        s = sf_grid_build_ellipse(chart_of(a.space), a.cx, a.cy, a.ax, a.bx, a.h, a.W, &dom);
    if (s != SF_OK) return fail_with(s);

    sf_grid_field* u = nullptr;
    int iters = 0;
    double residual = 0.0;
    const sf_sign sign = a.sign == "plus" ? SF_SIGN_PLUS : SF_SIGN_MINUS;
    const sf_status solve_status =
        sf_grid_solve(dom, a.lambda, a.Lambda, a.k, a.c, a.b, sign, a.W, a.tol, a.max_iters,
                      a.linear_tol, &u, &iters, &residual);
    if (solve_status != SF_OK && solve_status != SF_ERR_CONVERGENCE) {
        sf_grid_domain_free(dom);
        return fail_with(solve_status);
    }

    std::printf("interior_nodes = %ld\n", sf_grid_interior_count(dom));
    std::printf("policy_iterations = %d\n", iters);
    std::printf("residual_sup = %.9g\n", residual);

    sf_status ws = sf_grid_field_write_csv(dom, u, a.out.c_str());
    if (ws != SF_OK) {
        sf_grid_field_free(u);
        sf_grid_domain_free(dom);
        return fail_with(ws);
    }
    if (solve_status == SF_ERR_CONVERGENCE) {
        // mark the partial field
        std::ifstream in(a.out);
        std::stringstream body;
        body << in.rdbuf();
        in.close();
        std::ofstream outf(a.out);
        outf << "# WARN: policy iteration stopped above tolerance, residual_sup = " << residual
             << "\n"
             << body.str();
    }
    if (!a.domain_out.empty()) {
        ws = sf_grid_domain_write_csv(dom, a.domain_out.c_str());
        if (ws != SF_OK) {
            sf_grid_field_free(u);
            sf_grid_domain_free(dom);
            return fail_with(ws);
        }
    }
    if (!a.profile_out.empty()) {
        double mean = 0.0, spread = 0.0;
        long count = 0;
        ws = sf_boundary_profile(dom, u, a.profile_out.c_str(), &mean, &spread, &count);
        if (ws != SF_OK) {
            sf_grid_field_free(u);
            sf_grid_domain_free(dom);
            return fail_with(ws);
        }
        std::printf("boundary_gradient_mean = %.9g\n", mean);
        std::printf("boundary_gradient_spread = %.9g\n", spread);
    }
    sf_grid_field_free(u);
    sf_grid_domain_free(dom);
    return solve_status == SF_ERR_CONVERGENCE ? 2 : 0;
}

struct MovingPlaneArgs {
    std::string field;
    std::string domain;
    double tol = 1e-3;
    std::string direction = "+e1";
    std::string out;
    std::string corner_csv;
    double alpha = 0.5;
    double beta = 2.0;
};

int run_moving_plane(const MovingPlaneArgs& a) {
    sf_grid_domain* dom = nullptr;
    sf_status s = sf_grid_domain_read_csv(a.domain.c_str(), &dom);
    if (s != SF_OK) return fail_with(s);
    sf_grid_field* u = nullptr;
    s = sf_grid_field_read_csv(a.field.c_str(), dom, &u);
    if (s != SF_OK) {
        sf_grid_domain_free(dom);
        return fail_with(s);
    }

    std::vector<int> dirs;
    if (a.direction == "+e1")
        dirs = {+1};
    else if (a.direction == "-e1")
        dirs = {-1};
    else
        dirs = {+1, -1};

    FILE* f = open_out(a.out);
    if (!f) {
        sf_grid_field_free(u);
        sf_grid_domain_free(dom);
        return 3;
    }
    int rc = 0;
    for (size_t d = 0; d < dirs.size(); ++d) {
        sf_mp_report* rep = nullptr;
        s = sf_moving_plane(dom, u, a.tol, dirs[d], &rep);
        if (s != SF_OK) {
            rc = fail_with(s);
            break;
        }
        // reuse the library's report text through a temp write
        const std::string tmp = a.out.empty() ? ".mp_report.tmp" : a.out + ".tmp";
        if (sf_mp_write_report(rep, tmp.c_str()) == SF_OK) {
            std::ifstream in(tmp);
            std::stringstream body;
            body << in.rdbuf();
            if (d > 0) std::fputs("\n", f);
            std::fputs(body.str().c_str(), f);
            if (f != stdout) std::fputs(body.str().c_str(), stdout);
            std::remove(tmp.c_str());
        }
        if (!a.corner_csv.empty() && sf_mp_situation_of(rep) == SF_MP_CORNER) {
            double fit = 0.0;
            int consistent = 0;
            const sf_status gs = sf_mp_corner_growth(dom, u, rep, a.alpha, a.beta,
                                                     a.corner_csv.c_str(), &fit, &consistent);
            if (gs == SF_OK)
                std::printf("corner_growth_fit = %.9g\nconsistent = %s\n", fit,
                            consistent ? "true" : "false");
        }
        sf_mp_free(rep);
    }
    close_out(f);
    sf_grid_field_free(u);
    sf_grid_domain_free(dom);
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pucci operators, overdetermined solves and the moving-plane "
                 "harness on space forms"};
    app.require_subcommand(1);

    VerifyArgs va;
    CLI::App* verify = app.add_subcommand("verify", "run a randomized property suite");
    verify->add_option("--suite", va.suite, "geometry, pucci, lemma21, sphere64 or all");
    verify->add_option("--seed", va.seed, "rng seed")->required();
    verify->add_option("--trials", va.trials, "trials per property");
    auto* vl = verify->add_option("--lambda", va.lambda, "pin lambda for the draws");
    verify->add_option("--Lambda", va.Lambda, "pin Lambda for the draws")->needs(vl);
    verify->add_option("--k", va.k, "pin k for the draws")->needs(vl);
    verify->set_config("--config");

    ConeArgs ca;
    CLI::App* cone = app.add_subcommand("cone-beta", "homogeneity exponent on a planar cone");
    cone->add_option("--theta0", ca.theta0, "cone opening angle (radians)");
    cone->add_option("--lambda", ca.lambda, "lower ellipticity constant")->required();
    cone->add_option("--Lambda", ca.Lambda, "upper ellipticity constant");
    cone->add_option("--tol", ca.tol, "exponent tolerance");
    cone->add_option("--sweep", ca.sweep, "comma list of epsilon values, Lambda = lambda(1+eps)");
    cone->add_option("--out", ca.out, "output CSV path (default stdout)");
    cone->set_config("--config");

    RadialArgs ra;
    CLI::App* radial = app.add_subcommand("radial", "radial overdetermined solve on a ball");
    radial->add_option("--space", ra.space, "euclidean, hyperbolic or sphere")
        ->check(CLI::IsMember({"euclidean", "hyperbolic", "sphere"}));
    radial->add_option("--N", ra.N, "dimension");
    radial->add_option("--R", ra.R, "geodesic radius");
    radial->add_option("--lambda", ra.lambda, "lower ellipticity constant");
    radial->add_option("--Lambda", ra.Lambda, "upper ellipticity constant");
    radial->add_option("--k", ra.k, "gradient constant");
    radial->add_option("--c", ra.c, "source constant term");
    radial->add_option("--b", ra.b, "source slope, f(u) = c - b u");
    radial->add_option("--sign", ra.sign, "minus or plus")
        ->check(CLI::IsMember({"minus", "plus"}));
    radial->add_option("--tol", ra.tol, "shooting tolerance");
    radial->add_option("--R-list", ra.rlist, "comma list of radii (Serrin sweep)");
    radial->add_option("--out", ra.out, "output CSV path (default stdout)");
    radial->set_config("--config");

    Solve2dArgs sa;
    CLI::App* solve2d = app.add_subcommand("solve2d", "Dirichlet solve on a masked 2-D grid");
    solve2d->add_option("--space", sa.space, "euclidean or hyperbolic")
        ->check(CLI::IsMember({"euclidean", "hyperbolic"}));
    solve2d->add_option("--domain", sa.domain, "ball or ellipse")
        ->check(CLI::IsMember({"ball", "ellipse"}));
    solve2d->add_option("--cx", sa.cx, "domain center x1");
    solve2d->add_option("--cy", sa.cy, "domain center x2");
    solve2d->add_option("--R", sa.R, "geodesic ball radius");
    solve2d->add_option("--a", sa.ax, "ellipse semi-axis along x1");
    solve2d->add_option("--b-axis", sa.bx, "ellipse semi-axis along x2");
    solve2d->add_option("--h", sa.h, "grid spacing");
    solve2d->add_option("--lambda", sa.lambda, "lower ellipticity constant");
    solve2d->add_option("--Lambda", sa.Lambda, "upper ellipticity constant");
    solve2d->add_option("--k", sa.k, "gradient constant");
    solve2d->add_option("--c", sa.c, "source constant term");
    solve2d->add_option("--b", sa.b, "source slope, f(u) = c - b u");
    solve2d->add_option("--sign", sa.sign, "minus or plus")
        ->check(CLI::IsMember({"minus", "plus"}));
    solve2d->add_option("--W", sa.W, "stencil width");
    solve2d->add_option("--tol", sa.tol, "residual tolerance");
    solve2d->add_option("--max-iters", sa.max_iters, "policy iteration cap");
    solve2d->add_option("--linear-tol", sa.linear_tol, "inner linear solver tolerance");
    solve2d->add_option("--out", sa.out, "field CSV path");
    solve2d->add_option("--domain-out", sa.domain_out, "domain CSV path");
    solve2d->add_option("--profile-out", sa.profile_out, "boundary gradient CSV path");
    solve2d->set_config("--config");

    MovingPlaneArgs ma;
    CLI::App* mp = app.add_subcommand("moving-plane", "discrete moving-plane symmetry verdict");
    mp->add_option("--field", ma.field, "solved field CSV")->required();
    mp->add_option("--domain", ma.domain, "domain CSV")->required();
    mp->add_option("--tol", ma.tol, "symmetry tolerance on sup |w|");
    mp->add_option("--direction", ma.direction, "+e1, -e1 or both")
        ->check(CLI::IsMember({"+e1", "-e1", "both"}));
    mp->add_option("--out", ma.out, "report path (default stdout)");
    mp->add_option("--corner-csv", ma.corner_csv, "corner growth samples CSV");
    mp->add_option("--alpha", ma.alpha, "Taylor exponent offset for the growth window");
    mp->add_option("--beta", ma.beta, "cone exponent for the growth window");
    mp->set_config("--config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    va.fixed = verify->count("--lambda") > 0;
    if (va.fixed && verify->count("--Lambda") == 0) {
        std::fprintf(stderr, "error: --lambda requires --Lambda\n");
        return 1;
    }

    if (app.got_subcommand(verify)) return run_verify(va);
    if (app.got_subcommand(cone)) return run_cone(ca);
    if (app.got_subcommand(radial)) return run_radial(ra);
    if (app.got_subcommand(solve2d)) return run_solve2d(sa);
    if (app.got_subcommand(mp)) return run_moving_plane(ma);
    return 1;
}
