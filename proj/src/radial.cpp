#include "spaceform/radial.hpp"

#include "spaceform/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spaceform {

RadialProblem::RadialProblem(SpaceForm space_, double R_, PucciParams params_, PucciSign sign_,
                             AffineSource source_)
    : space(std::move(space_)), R(R_), params(std::move(params_)), sign(sign_), source(source_) {
    if (!(R > 0.0)) throw std::invalid_argument("RadialProblem: R must be > 0");
    if (space.kind == ChartKind::SphereStereographic && !(R < M_PI / 2.0))
        throw std::invalid_argument(
            "RadialProblem: spherical ball must stay inside a hemisphere (R < pi/2)");
    if (!(source.b >= 0.0)) throw std::invalid_argument("RadialProblem: need b >= 0");
}

double curvature_cotangent(const SpaceForm& space, double r) {
    if (!(r > 0.0)) throw std::domain_error("curvature_cotangent: r must be > 0");
    switch (space.kind) {
    case ChartKind::Euclidean:
        return 1.0 / r;
    case ChartKind::HyperbolicHalfSpace:
        return 1.0 / std::tanh(r);
    case ChartKind::SphereStereographic:
        if (!(r < M_PI)) throw std::domain_error("curvature_cotangent: need r < pi on the sphere");
        return 1.0 / std::tan(r);
    }
    throw std::logic_error("unreachable");
}

namespace {

double branch_weight(const PucciParams& p, PucciSign sign, double value) {
    if (sign == PucciSign::Minus) return value > 0.0 ? p.lambda : p.Lambda;
    return value > 0.0 ? p.Lambda : p.lambda;
}

// Solve pucci_sign({d2u, tang^(N-1)}) + sign*k|du| + f = 0 for d2u.
// The Pucci value is piecewise linear and strictly increasing in d2u,
// so the inversion is exact.
double invert_for_d2u(const SpaceForm& space, double r, double du, double f_val,
                      const PucciParams& p, PucciSign sign) {
    const int n = space.dim;
    const double tang = du * curvature_cotangent(space, r);
    double target = -f_val - (n - 1) * branch_weight(p, sign, tang) * tang;
    if (sign == PucciSign::Minus)
        target -= -p.k * std::abs(du);
    else
        target -= p.k * std::abs(du);
    // target = omega_sign(d2u); slopes are lambda on the side where the
    // weight is lambda and Lambda on the other.
    return target / branch_weight(p, sign, target);
}

struct March {
    std::vector<double> r, u, du;
    double u_end;   // u at R
    bool positive;  // u stayed > 0 on [0, R)
};

// RK4 on (u, du)' = (du, d2u(r, u, du)) from eps0 to R; initial data from
// the Taylor substitute at the regular singular origin.
March integrate(const RadialProblem& pb, double u0, int steps, bool record) {
    const double eps0 = 1e-6;
    const int n = pb.space.dim;
    const double f0 = pb.source.c - pb.source.b * u0;
    // At the origin all N Hessian eigenvalues equal u''(0):
    // N * w * u''(0) + f = 0 with w the branch weight of u''(0).
    const double lam_eff = branch_weight(pb.params, pb.sign, -f0);
    const double upp0 = -f0 / (n * lam_eff);

    double r = eps0;
    double u = u0 + 0.5 * upp0 * eps0 * eps0;
    double du = upp0 * eps0;
    const double h = (pb.R - eps0) / steps;

    March out;
    out.positive = u0 > 0.0;
    if (record) {
        out.r.reserve(static_cast<size_t>(steps) + 2);
        out.u.reserve(static_cast<size_t>(steps) + 2);
        out.du.reserve(static_cast<size_t>(steps) + 2);
        out.r.push_back(0.0);
        out.u.push_back(u0);
        out.du.push_back(0.0);
    }

    auto rhs = [&](double rr, double uu, double dd) {
        const double f = pb.source.c - pb.source.b * uu;
        return invert_for_d2u(pb.space, rr, dd, f, pb.params, pb.sign);
    };

    for (int i = 0; i < steps; ++i) {
        if (record) {
            out.r.push_back(r);
            out.u.push_back(u);
            out.du.push_back(du);
        }
        const double k1u = du, k1d = rhs(r, u, du);
        const double k2u = du + 0.5 * h * k1d, k2d = rhs(r + 0.5 * h, u + 0.5 * h * k1u, du + 0.5 * h * k1d);
        const double k3u = du + 0.5 * h * k2d, k3d = rhs(r + 0.5 * h, u + 0.5 * h * k2u, du + 0.5 * h * k2d);
        const double k4u = du + h * k3d, k4d = rhs(r + h, u + h * k3u, du + h * k3d);
        u += (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += (h / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        r += h;
        if (u <= 0.0 && i + 1 < steps) out.positive = false;
    }
    if (record) {
        out.r.push_back(r);
        out.u.push_back(u);
        out.du.push_back(du);
    }
    out.u_end = u;
    return out;
}

} // namespace

double radial_operator(const SpaceForm& space, double r, double du, double d2u,
                       const PucciParams& p, PucciSign sign) {
    if (!(r > 0.0)) throw std::domain_error("radial_operator: r must be > 0");
    const int n = space.dim;
    Vector mu(n);
    mu[0] = d2u;
    const double tang = du * curvature_cotangent(space, r);
    for (int i = 1; i < n; ++i) mu[i] = tang;
    const double scale = std::max(std::abs(d2u), std::abs(tang));
    double value = pucci_spectrum(mu, p, sign, scale);
    value += (sign == PucciSign::Minus ? -1.0 : 1.0) * p.k * std::abs(du);
    return value;
}

RadialSolution shoot(const RadialProblem& problem, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("shoot: tol must be > 0");
    const int steps = 4096;

    // u(R) as a function of u(0) is strictly increasing; record every
    // evaluation and check that along the way.
    std::vector<std::pair<double, double>> evals;
    auto miss = [&](double u0) {
        const double m = integrate(problem, u0, steps, false).u_end;
        evals.emplace_back(u0, m);
        std::sort(evals.begin(), evals.end());
        for (size_t i = 1; i < evals.size(); ++i) {
            if (evals[i].second < evals[i - 1].second - 1e-12)
                throw convergence_error("shoot: u(0) -> u(R) lost monotonicity in the bracket");
        }
        return m;
    };

    double lo = 0.0;
    double miss_lo = miss(lo);
    if (miss_lo > 0.0)
        throw convergence_error("shoot: no solution found in bracket (u(R) > 0 at u(0) = 0)");

    const int n = problem.space.dim;
    double hi = std::max(1e-4, std::abs(problem.source.c) * problem.R * problem.R /
                                   (2.0 * n * problem.params.lambda));
    double miss_hi = miss(hi);
    int expand = 0;
    while (miss_hi < 0.0) {
        if (++expand > 60)
            throw convergence_error("shoot: no sign change found in the u(0) bracket");
        lo = hi;
        miss_lo = miss_hi;
        hi *= 2.0;
        miss_hi = miss(hi);
    }

    while (hi - lo > std::min(tol, 1e-12) || std::abs(miss_lo) > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double m = miss(mid);
        if (m < 0.0) {
            lo = mid;
            miss_lo = m;
        } else {
            hi = mid;
            miss_hi = m;
        }
    }

    const double u0 = 0.5 * (lo + hi);
    March final = integrate(problem, u0, steps, true);
    if (!final.positive)
        throw convergence_error("shoot: profile loses positivity before R");

    RadialSolution sol;
    sol.r_nodes = std::move(final.r);
    sol.u_values = std::move(final.u);
    sol.du_values = std::move(final.du);
    sol.u_values.back() = std::max(sol.u_values.back(), 0.0);
    sol.c0 = std::abs(sol.du_values.back());

    // Resampled PDE residual: central differences of du at interior radii.
    double worst = 0.0;
    const size_t m = sol.r_nodes.size();
    for (int q = 1; q < 100; ++q) {
        const size_t i = 1 + static_cast<size_t>((m - 3) * (q / 100.0));
        const double dr = sol.r_nodes[i + 1] - sol.r_nodes[i - 1];
        if (dr <= 0.0) continue;
        const double d2u = (sol.du_values[i + 1] - sol.du_values[i - 1]) / dr;
        const double f = problem.source.c - problem.source.b * sol.u_values[i];
        const double res = radial_operator(problem.space, sol.r_nodes[i], sol.du_values[i], d2u,
                                           problem.params, problem.sign) +
                           f;
        worst = std::max(worst, std::abs(res));
    }
    sol.residual_sup = worst;
    return sol;
}

std::vector<std::pair<double, double>> serrin_map(const SpaceForm& space, const PucciParams& p,
                                                  AffineSource source, PucciSign sign,
                                                  const std::vector<double>& radii, double tol) {
    std::vector<std::pair<double, double>> out;
    out.reserve(radii.size());
    for (double R : radii) {
        RadialProblem pb(space, R, p, sign, source);
        out.emplace_back(R, shoot(pb, tol).c0);
    }
    return out;
}

} // namespace spaceform
