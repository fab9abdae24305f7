#pragma once

#include "spaceform/pucci.hpp"

#include <utility>
#include <vector>

namespace spaceform {

/// Planar cone of opening theta0 in (0, pi]; k is not used by the
/// homogeneous profile equation.
struct ConeProblem {
    double theta0;
    PucciParams params;

    ConeProblem(double theta0_, PucciParams params_);
};

struct ConeExponentResult {
    double beta = 0.0;
    std::vector<double> theta_nodes;
    std::vector<double> phi_values;
    std::vector<double> dphi_values;
    std::vector<double> d2phi_values;
    double residual_sup = 0.0;
};

/// r^(beta-2)-scaled Hessian of r^beta phi(theta) in the orthonormal
/// polar frame: [[b(b-1)phi, (b-1)phi'], [(b-1)phi', b phi + phi'']].
SymMatrix polar_hessian(double beta, double phi, double dphi, double d2phi);

/// The unique d2phi with pucci_minus(polar_hessian(...)) = 0, found by
/// bisection (the Pucci value is strictly increasing in d2phi).
double profile_rhs(double theta, double phi, double dphi, double beta, const PucciParams& p);

/// First theta* > 0 where the profile started from (phi, phi')(0) = (0, 1)
/// returns to zero. Errors out if none is found before pi + margin.
double first_zero(double beta, const PucciParams& p, double step = M_PI / 16384.0);

/// Homogeneity exponent beta with first_zero(beta) = theta0, by bisection
/// on beta; asserts that theta*(beta) is decreasing across the bracket.
ConeExponentResult solve_beta(const ConeProblem& problem, double tol);

/// Least-squares slope of log w against log t.
double growth_exponent_fit(const std::vector<std::pair<double, double>>& samples);

} // namespace spaceform
