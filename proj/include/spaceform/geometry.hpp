#pragma once

#include <Eigen/Dense>

#include <vector>

namespace spaceform {

using Vector = Eigen::VectorXd;
using SymMatrix = Eigen::MatrixXd;

enum class ChartKind { Euclidean, HyperbolicHalfSpace, SphereStereographic };

/// One of the three space forms, presented through a conformally flat
/// chart: g_ij = m(x) delta_ij with m > 0 on the admissible set.
struct SpaceForm {
    ChartKind kind;
    int dim;

    SpaceForm(ChartKind k, int n);
};

/// Below this height the hyperbolic chart is treated as degenerate
/// (the plane x_N = 0 consists of points at infinity).
inline constexpr double kHyperbolicMargin = 1e-8;

bool admissible(const SpaceForm& space, const Vector& x);
void require_admissible(const SpaceForm& space, const Vector& x);

/// Conformal factor m(x): 1, x_N^-2, or 4/(1+|x|^2)^2.
double conformal_factor(const SpaceForm& space, const Vector& x);

/// Christoffel symbols, entry [k](i,j) = Gamma^k_ij.
struct Rank3Symbols {
    std::vector<Eigen::MatrixXd> values;

    double operator()(int k, int i, int j) const { return values[static_cast<size_t>(k)](i, j); }
    int dim() const { return static_cast<int>(values.size()); }
};

/// Christoffel symbols of the chart metric, computed from the general
/// conformal formula (one code path for all three models).
Rank3Symbols christoffel(const SpaceForm& space, const Vector& x);

/// Coordinate matrix of the Riemannian Hessian:
/// (hess)_ij - sum_k grad_k Gamma^k_ij.
SymMatrix riemannian_hessian(const SpaceForm& space, const Vector& x,
                             const Vector& grad, const SymMatrix& hess);

/// |grad u|_g = m(x)^{-1/2} |grad u|.
double riemannian_gradient_norm(const SpaceForm& space, const Vector& x, const Vector& grad);

/// Geodesic distance in the half-space model,
/// arccosh(1 + |x-y|^2 / (2 x_N y_N)).
double hyperbolic_distance(const Vector& x, const Vector& y);

/// Geodesic distance of the chart (Euclidean or hyperbolic half-space).
double chart_distance(const SpaceForm& space, const Vector& x, const Vector& y);

/// Reflection across the totally geodesic hypersurface {x_1 = s}.
Vector reflect(double s, const Vector& x);

double laplace_beltrami(const SpaceForm& space, const Vector& x,
                        const Vector& grad, const SymMatrix& hess);

} // namespace spaceform
