#pragma once

#include "spaceform/pucci.hpp"

#include <utility>
#include <vector>

namespace spaceform {

/// Affine source f(u) = c - b*u with b >= 0 (keeps the comparison
/// structure the monotone shooting needs).
struct AffineSource {
    double c = 0.0;
    double b = 0.0;
};

/// Overdetermined problem on a geodesic ball of radius R, reduced to the
/// radial profile of the extremal operators F^{+/-}.
struct RadialProblem {
    SpaceForm space;
    double R;
    PucciParams params;
    PucciSign sign;
    AffineSource source;

    RadialProblem(SpaceForm space_, double R_, PucciParams params_, PucciSign sign_,
                  AffineSource source_);
};

struct RadialSolution {
    std::vector<double> r_nodes;
    std::vector<double> u_values;
    std::vector<double> du_values;
    double c0 = 0.0;          // |u'(R)|
    double residual_sup = 0.0; // sup |F(u) + f(u)| resampled on interior radii
};

/// Radial mean-curvature coefficient of the distance spheres:
/// coth r, cot r, or 1/r.
double curvature_cotangent(const SpaceForm& space, double r);

/// F^{sign} of a radial function: Pucci over the spectrum
/// {d2u} u {du * ct(r)}^(N-1), plus sign * k * |du|.
double radial_operator(const SpaceForm& space, double r, double du, double d2u,
                       const PucciParams& p, PucciSign sign);

/// Shooting solve of F(u) + f(u) = 0, u'(0) = 0, u(R) = 0, u > 0;
/// bisection on u(0) wrapped around a fixed-step RK4 march.
RadialSolution shoot(const RadialProblem& problem, double tol);

/// Serrin constant c0 per radius.
std::vector<std::pair<double, double>> serrin_map(const SpaceForm& space, const PucciParams& p,
                                                  AffineSource source, PucciSign sign,
                                                  const std::vector<double>& radii,
                                                  double tol = 1e-10);

} // namespace spaceform
