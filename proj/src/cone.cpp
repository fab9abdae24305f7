#include "spaceform/cone.hpp"

#include "spaceform/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace spaceform {

ConeProblem::ConeProblem(double theta0_, PucciParams params_)
    : theta0(theta0_), params(std::move(params_)) {
    if (!(theta0 > 0.0) || !(theta0 <= M_PI))
        throw std::invalid_argument("ConeProblem: theta0 must lie in (0, pi]");
}

SymMatrix polar_hessian(double beta, double phi, double dphi, double d2phi) {
    SymMatrix h(2, 2);
    h(0, 0) = beta * (beta - 1.0) * phi;
    h(0, 1) = h(1, 0) = (beta - 1.0) * dphi;
    h(1, 1) = beta * phi + d2phi;
    return h;
}

namespace {

// pucci_minus of [[a, b], [b, t]] in closed form; hot path of the profile ODE.
double pminus_2x2(double a, double b, double t, const PucciParams& p) {
    const double tr = a + t;
    const double d1 = a - t, d2 = 2.0 * b;
    const double disc = std::sqrt(d1 * d1 + d2 * d2);
    const double mu1 = 0.5 * (tr - disc);
    const double mu2 = 0.5 * (tr + disc);
    const double band = 1e-14 * std::max(std::abs(mu1), std::abs(mu2));
    double v = 0.0;
    v += (mu1 < -band ? p.Lambda : p.lambda) * mu1;
    v += (mu2 < -band ? p.Lambda : p.lambda) * mu2;
    return v;
}

// Root of t -> pminus_2x2(a, b, t) (strictly increasing), bisection with a
// caller-supplied center to keep the bracket tight along the march.
double solve_profile_t(double a, double b, const PucciParams& p, double hint) {
    // hints track the march closely, so start from a narrow bracket
    double w = std::max(1e-3, 0.02 * (std::abs(a) + 2.0 * std::abs(b) + std::abs(hint)));
    double lo = hint - w, hi = hint + w;
    int guard = 0;
    while (pminus_2x2(a, b, lo, p) > 0.0) {
        hi = lo;
        lo -= w;
        w *= 2.0;
        if (++guard > 200) throw convergence_error("profile_rhs: bisection bracket failure");
    }
    guard = 0;
    while (pminus_2x2(a, b, hi, p) < 0.0) {
        lo = hi;
        hi += w;
        w *= 2.0;
        if (++guard > 200) throw convergence_error("profile_rhs: bisection bracket failure");
    }
    const double vscale = std::max({1.0, std::abs(a), std::abs(b)}) * p.Lambda;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double v = pminus_2x2(a, b, mid, p);
        if (std::abs(v) <= 1e-14 * vscale) return mid;
        if (v < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

double profile_d2(double phi, double dphi, double beta, const PucciParams& p, double hint) {
    const double a = beta * (beta - 1.0) * phi;
    const double b = (beta - 1.0) * dphi;
    const double t = solve_profile_t(a, b, p, beta * phi + hint);
    return t - beta * phi;
}

struct ProfileState {
    double theta, phi, dphi;
    double d2_hint = 0.0;
};

// One RK4 step of the profile ODE.
ProfileState step_rk4(const ProfileState& s, double h, double beta, const PucciParams& p) {
    double hint = s.d2_hint;
    auto rhs = [&](double phi, double dphi) {
        hint = profile_d2(phi, dphi, beta, p, hint);
        return hint;
    };
    const double k1p = s.dphi, k1d = rhs(s.phi, s.dphi);
    const double k2p = s.dphi + 0.5 * h * k1d, k2d = rhs(s.phi + 0.5 * h * k1p, s.dphi + 0.5 * h * k1d);
    const double k3p = s.dphi + 0.5 * h * k2d, k3d = rhs(s.phi + 0.5 * h * k2p, s.dphi + 0.5 * h * k2d);
    const double k4p = s.dphi + h * k3d, k4d = rhs(s.phi + h * k3p, s.dphi + h * k3d);
    ProfileState out;
    out.theta = s.theta + h;
    out.phi = s.phi + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    out.dphi = s.dphi + (h / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    out.d2_hint = hint;
    return out;
}

std::optional<double> first_zero_up_to(double beta, const PucciParams& p, double step,
                                       double theta_max) {
    ProfileState s{0.0, 0.0, 1.0, 0.0};
    while (s.theta < theta_max) {
        const ProfileState next = step_rk4(s, step, beta, p);
        if (next.phi <= 0.0 && next.theta > step) {
            // refine the crossing: bisect the substep length from s
            double lo = 0.0, hi = step;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                const ProfileState probe = step_rk4(s, mid, beta, p);
                if (probe.phi > 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            return s.theta + 0.5 * (lo + hi);
        }
        s = next;
    }
    return std::nullopt;
}

} // namespace

double profile_rhs(double /*theta*/, double phi, double dphi, double beta, const PucciParams& p) {
    return profile_d2(phi, dphi, beta, p, -beta * beta * std::abs(phi));
}

double first_zero(double beta, const PucciParams& p, double step) {
    if (!(beta > 0.0)) throw std::invalid_argument("first_zero: beta must be > 0");
    if (!(step > 0.0)) throw std::invalid_argument("first_zero: step must be > 0");
    const double margin = 0.5;
    const auto z = first_zero_up_to(beta, p, step, M_PI + margin);
    if (!z) throw convergence_error("first_zero: no zero found before pi + margin");
    return *z;
}

ConeExponentResult solve_beta(const ConeProblem& problem, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("solve_beta: tol must be > 0");
    const double theta0 = problem.theta0;
    const PucciParams& p = problem.params;
    const double step = theta0 / 16384.0;
    const double theta_max = M_PI + 0.5;

    // theta*(beta) is decreasing; a missing zero below theta_max counts as
    // "beyond theta0" since theta0 <= pi < theta_max.
    std::vector<std::pair<double, double>> seen;
    auto theta_star = [&](double beta) {
        const auto z = first_zero_up_to(beta, p, step, theta_max);
        if (z) {
            seen.emplace_back(beta, *z);
            std::sort(seen.begin(), seen.end());
            for (size_t i = 1; i < seen.size(); ++i) {
                if (seen[i].second >= seen[i - 1].second - 1e-13)
                    throw convergence_error(
                        "solve_beta: theta*(beta) is not strictly decreasing on the bracket");
            }
        }
        return z;
    };
    auto above = [&](double beta) { // theta*(beta) > theta0 ?
        const auto z = theta_star(beta);
        return !z || *z > theta0;
    };

    // lambda = Lambda gives theta* = pi / beta; anchor the bracket there.
    double lo = 0.5 * M_PI / theta0;
    double hi = 2.0 * M_PI / theta0;
    int guard = 0;
    while (!above(lo)) {
        hi = lo;
        lo *= 0.5;
        if (++guard > 60) throw convergence_error("solve_beta: cannot bracket the exponent");
    }
    guard = 0;
    while (above(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 60) throw convergence_error("solve_beta: cannot bracket the exponent");
    }
    while (hi - lo > 0.5 * tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (above(mid))
            lo = mid;
        else
            hi = mid;
    }
    const double beta = 0.5 * (lo + hi);

    // step-halving acceptance check on the located zero
    {
        const auto z1 = first_zero_up_to(beta, p, step, theta_max);
        const auto z2 = first_zero_up_to(beta, p, 0.5 * step, theta_max);
        if (!z1 || !z2 || std::abs(*z1 - *z2) > std::max(1e-9, 0.1 * tol))
            throw convergence_error("solve_beta: step-halving check failed");
    }

    ConeExponentResult out;
    out.beta = beta;
    const int n_steps = 16384;
    out.theta_nodes.reserve(n_steps + 1);
    out.phi_values.reserve(n_steps + 1);
    out.dphi_values.reserve(n_steps + 1);
    out.d2phi_values.reserve(n_steps + 1);
    ProfileState s{0.0, 0.0, 1.0, 0.0};
    for (int i = 0; i <= n_steps; ++i) {
        out.theta_nodes.push_back(s.theta);
        out.phi_values.push_back(s.phi);
        out.dphi_values.push_back(s.dphi);
        out.d2phi_values.push_back(profile_d2(s.phi, s.dphi, beta, p, s.d2_hint));
        if (i < n_steps) s = step_rk4(s, step, beta, p);
    }
    double worst = 0.0;
    for (size_t i = 0; i < out.theta_nodes.size(); ++i) {
        const SymMatrix h =
            polar_hessian(beta, out.phi_values[i], out.dphi_values[i], out.d2phi_values[i]);
        worst = std::max(worst, std::abs(pucci_minus(h, p)));
    }
    out.residual_sup = worst;
    return out;
}

double growth_exponent_fit(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 3) throw std::invalid_argument("growth_exponent_fit: need >= 3 samples");
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& [t, w] : samples) {
        if (!(t > 0.0) || t >= prev)
            throw std::invalid_argument("growth_exponent_fit: t must be positive, strictly decreasing");
        if (!(w > 0.0)) throw std::invalid_argument("growth_exponent_fit: w must be positive");
        prev = t;
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(samples.size());
    for (const auto& [t, w] : samples) {
        const double x = std::log(t), y = std::log(w);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace spaceform
