#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "spaceform/errors.hpp"
#include "spaceform/radial.hpp"

#include <cmath>
#include <random>

using namespace spaceform;

namespace {

// independent RK4 integrator over the same radial reduction, used for
// step-halving cross-checks; written against the equation directly
double reference_c0(const RadialProblem& pb, double u0, int steps) {
    const int n = pb.space.dim;
    const double eps0 = 1e-6;
    auto d2 = [&](double r, double u, double du) {
        const double ct = curvature_cotangent(pb.space, r);
        const double tang = du * ct;
        auto w = [&](double v) {
            if (pb.sign == PucciSign::Minus) return v > 0 ? pb.params.lambda : pb.params.Lambda;
            return v > 0 ? pb.params.Lambda : pb.params.lambda;
        };
        const double f = pb.source.c - pb.source.b * u;
        double target = -f - (n - 1) * w(tang) * tang;
        target += (pb.sign == PucciSign::Minus ? 1.0 : -1.0) * pb.params.k * std::abs(du);
        return target / w(target);
    };
    const double f0 = pb.source.c - pb.source.b * u0;
    const double lam_eff = (pb.sign == PucciSign::Minus) == (f0 > 0.0) ? pb.params.Lambda
                                                                       : pb.params.lambda;
    const double upp0 = -f0 / (n * lam_eff);
    double r = eps0, u = u0 + 0.5 * upp0 * eps0 * eps0, du = upp0 * eps0;
    const double h = (pb.R - eps0) / steps;
    for (int i = 0; i < steps; ++i) {
        const double k1u = du, k1d = d2(r, u, du);
        const double k2u = du + 0.5 * h * k1d, k2d = d2(r + 0.5 * h, u + 0.5 * h * k1u, du + 0.5 * h * k1d);
        const double k3u = du + 0.5 * h * k2d, k3d = d2(r + 0.5 * h, u + 0.5 * h * k2u, du + 0.5 * h * k2d);
        const double k4u = du + h * k3d, k4d = d2(r + h, u + h * k3u, du + h * k3d);
        u += (h / 6.0) * (k1u + 2 * k2u + 2 * k3u + k4u);
        du += (h / 6.0) * (k1d + 2 * k2d + 2 * k3d + k4d);
        r += h;
    }
    return std::abs(du);
}

} // namespace

TEST_CASE("curvature cotangent") {
    const SpaceForm euc(ChartKind::Euclidean, 2);
    const SpaceForm hyp(ChartKind::HyperbolicHalfSpace, 2);
    const SpaceForm sph(ChartKind::SphereStereographic, 2);
    CHECK(curvature_cotangent(euc, 2.0) == doctest::Approx(0.5));
    CHECK(curvature_cotangent(hyp, 50.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(curvature_cotangent(hyp, 0.001) == doctest::Approx(1000.000333).epsilon(1e-9));
    CHECK(curvature_cotangent(sph, M_PI / 4.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(curvature_cotangent(euc, 0.0), std::domain_error);
    CHECK_THROWS_AS(curvature_cotangent(sph, 3.2), std::domain_error);

    // all three behave like 1/r near the origin
    for (double r : {1e-3, 1e-4}) {
        CHECK(std::abs(curvature_cotangent(hyp, r) - 1.0 / r) < r);
        CHECK(std::abs(curvature_cotangent(sph, r) - 1.0 / r) < r);
    }
}

TEST_CASE("radial operator") {
    const SpaceForm hyp(ChartKind::HyperbolicHalfSpace, 3);
    const PucciParams lap(1.0, 1.0, 0.0);
    std::mt19937_64 rng(61);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> rr(0.05, 2.0);

    // lambda = Lambda collapses to the radial Laplace-Beltrami
    for (int t = 0; t < 500; ++t) {
        const double r = rr(rng), du = g(rng), d2u = g(rng);
        const double ct = curvature_cotangent(hyp, r);
        CHECK(radial_operator(hyp, r, du, d2u, lap, PucciSign::Minus) ==
              doctest::Approx(d2u + 2.0 * ct * du).epsilon(1e-12));
    }

    const PucciParams p12(1.0, 2.0, 0.0);
    CHECK(radial_operator(hyp, 1.0, 0.0, -1.0, p12, PucciSign::Minus) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(radial_operator(hyp, 0.0, 1.0, 1.0, p12, PucciSign::Minus),
                    std::domain_error);

    // cross-module consistency: the full chart Hessian of u = P(dist(x, c))
    // on the axis, built from finite differences of the distance function,
    // reproduces the radial spectrum {P''} u {P' ct(r)}^{N-1}
    const Vector center = [] {
        Vector c(3);
        c << 0.0, 0.0, 1.0;
        return c;
    }();
    auto dist = [&](const Vector& x) { return hyperbolic_distance(x, center); };
    auto profile = [](double r) { return std::cos(r); };
    auto dprofile = [](double r) { return -std::sin(r); };
    auto d2profile = [](double r) { return -std::cos(r); };

    for (double r0 : {0.3, 0.7, 1.2}) {
        Vector x(3);
        x << 0.0, 0.0, std::exp(r0); // on the axis at geodesic distance r0
        const double fd = 1e-5;
        Vector grad(3);
        SymMatrix hess(3, 3);
        for (int i = 0; i < 3; ++i) {
            Vector xp = x, xm = x;
            xp[i] += fd;
            xm[i] -= fd;
            grad[i] = (profile(dist(xp)) - profile(dist(xm))) / (2 * fd);
            for (int j = 0; j <= i; ++j) {
                Vector xpp = x, xpm = x, xmp = x, xmm = x;
                xpp[i] += fd; xpp[j] += fd;
                xpm[i] += fd; xpm[j] -= fd;
                xmp[i] -= fd; xmp[j] += fd;
                xmm[i] -= fd; xmm[j] -= fd;
                hess(i, j) = hess(j, i) =
                    (profile(dist(xpp)) - profile(dist(xpm)) - profile(dist(xmp)) +
                     profile(dist(xmm))) / (4 * fd * fd);
            }
        }
        for (auto sign : {PucciSign::Minus, PucciSign::Plus}) {
            const PucciParams pk(1.0, 1.7, 0.4);
            const double via_chart = riemannian_pucci(
                SpaceForm(ChartKind::HyperbolicHalfSpace, 3), x, grad, hess, pk, sign)
                + (sign == PucciSign::Minus ? -1.0 : 1.0) * pk.k *
                    riemannian_gradient_norm(SpaceForm(ChartKind::HyperbolicHalfSpace, 3), x, grad);
            const double via_radial = radial_operator(
                SpaceForm(ChartKind::HyperbolicHalfSpace, 3), r0, dprofile(r0), d2profile(r0), pk,
                sign);
            CHECK(via_chart == doctest::Approx(via_radial).epsilon(5e-4));
        }
    }
}

TEST_CASE("shoot on exact euclidean quadratics") {
    const SpaceForm e2(ChartKind::Euclidean, 2);
    const RadialProblem pb(e2, 1.0, PucciParams(1.0, 1.0, 0.0), PucciSign::Minus,
                           AffineSource{2.0, 0.0});
    const RadialSolution sol = shoot(pb, 1e-10);
    CHECK(sol.c0 == doctest::Approx(1.0).epsilon(1e-8));
    double sup = 0.0;
    for (size_t i = 0; i < sol.r_nodes.size(); ++i) {
        const double exact = 0.5 * (1.0 - sol.r_nodes[i] * sol.r_nodes[i]);
        sup = std::max(sup, std::abs(sol.u_values[i] - exact));
        CHECK(sol.u_values[i] >= 0.0);
    }
    CHECK(sup <= 1e-8);
    CHECK(std::abs(sol.u_values.back()) <= 1e-9);
    CHECK(sol.du_values.front() == 0.0);
    CHECK(sol.residual_sup <= 1e-7);

    const SpaceForm e3(ChartKind::Euclidean, 3);
    const RadialSolution s3 =
        shoot(RadialProblem(e3, 1.0, PucciParams(1.0, 1.0, 0.0), PucciSign::Minus,
                            AffineSource{3.0, 0.0}),
              1e-10);
    CHECK(s3.c0 == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("shoot: hyperbolic profile against step-halved reference") {
    const SpaceForm h2(ChartKind::HyperbolicHalfSpace, 2);
    const RadialProblem pb(h2, 1.0, PucciParams(1.0, 1.1, 0.0), PucciSign::Minus,
                           AffineSource{1.0, 0.0});
    const RadialSolution sol = shoot(pb, 1e-10);
    CHECK(sol.residual_sup <= 1e-7);
    // recompute c0 with the reference integrator at double resolution,
    // starting from the solved u(0)
    const double c0_ref = reference_c0(pb, sol.u_values.front(), 8192);
    CHECK(sol.c0 == doctest::Approx(c0_ref).epsilon(1e-6));
}

TEST_CASE("shoot errors and validation") {
    const SpaceForm sph(ChartKind::SphereStereographic, 2);
    CHECK_THROWS_AS(RadialProblem(sph, 1.6, PucciParams(1.0, 1.0, 0.0), PucciSign::Minus,
                                  AffineSource{1.0, 0.0}),
                    std::invalid_argument);
    const SpaceForm e2(ChartKind::Euclidean, 2);
    CHECK_THROWS_AS(RadialProblem(e2, 1.0, PucciParams(1.0, 1.0, 0.0), PucciSign::Minus,
                                  AffineSource{1.0, -0.5}),
                    std::invalid_argument);
    // c <= 0 leaves no positive profile to find
    CHECK_THROWS_AS(shoot(RadialProblem(e2, 1.0, PucciParams(1.0, 1.0, 0.0), PucciSign::Minus,
                                        AffineSource{-1.0, 0.0}),
                          1e-8),
                    convergence_error);
}

TEST_CASE("comparison sanity: larger sources lift the profile") {
    const SpaceForm h2(ChartKind::HyperbolicHalfSpace, 2);
    const PucciParams p(1.0, 1.3, 0.0);
    const RadialSolution a =
        shoot(RadialProblem(h2, 0.8, p, PucciSign::Minus, AffineSource{1.0, 0.0}), 1e-9);
    const RadialSolution b =
        shoot(RadialProblem(h2, 0.8, p, PucciSign::Minus, AffineSource{2.0, 0.0}), 1e-9);
    CHECK(b.u_values.front() > a.u_values.front());
    CHECK(b.c0 > a.c0);
}

TEST_CASE("serrin map") {
    const SpaceForm e2(ChartKind::Euclidean, 2);
    const auto rows = serrin_map(e2, PucciParams(1.0, 1.0, 0.0), AffineSource{2.0, 0.0},
                                 PucciSign::Minus, {0.25, 0.5, 1.0});
    REQUIRE(rows.size() == 3);
    for (const auto& [R, c0] : rows) CHECK(c0 == doctest::Approx(R).epsilon(1e-7));

    // hyperbolic sweep: strictly increasing Serrin constant
    const SpaceForm h2(ChartKind::HyperbolicHalfSpace, 2);
    const auto hyp = serrin_map(h2, PucciParams(1.0, 1.1, 0.0), AffineSource{1.0, 0.0},
                                PucciSign::Minus, {0.5, 1.0, 1.5});
    CHECK(hyp[0].second < hyp[1].second);
    CHECK(hyp[1].second < hyp[2].second);

    // c0 -> 0 as R -> 0
    const auto tiny = serrin_map(e2, PucciParams(1.0, 1.0, 0.0), AffineSource{2.0, 0.0},
                                 PucciSign::Minus, {1e-3});
    CHECK(tiny[0].second < 2e-3);
}
