#pragma once

#include "spaceform/geometry.hpp"

#include <cstdint>

namespace spaceform {

/// Ellipticity data of (H2): 0 < lambda <= Lambda, gradient constant k >= 0.
struct PucciParams {
    double lambda;
    double Lambda;
    double k;

    PucciParams(double lambda_, double Lambda_, double k_ = 0.0);
};

enum class PucciSign { Minus, Plus };

/// Sorted (ascending) spectrum of a symmetric matrix.
Vector eigenvalues(const SymMatrix& m);

struct EigenSystem {
    Vector values;          // ascending
    Eigen::MatrixXd vectors; // columns
};
EigenSystem eigensystem(const SymMatrix& m);

/// Extremal Pucci operators: lambda * (positive eigenvalue sum)
/// + Lambda * (negative eigenvalue sum) for the minus variant; the plus
/// variant is its dual, pucci_plus(M) = -pucci_minus(-M).
double pucci_minus(const SymMatrix& m, const PucciParams& p);
double pucci_plus(const SymMatrix& m, const PucciParams& p);
double pucci(const SymMatrix& m, const PucciParams& p, PucciSign sign);

/// Same operators evaluated on an explicit (unsorted) spectrum.
double pucci_spectrum(const Vector& mu, const PucciParams& p, PucciSign sign, double scale = 1.0);

/// Brute-force evaluation of inf over A in A_{lambda,Lambda} of tr(A M):
/// samples Q diag(d) Q^T with random orthogonal Q and d uniform in
/// [lambda, Lambda]^N, optionally adding the analytically optimal A built
/// from M's eigenvectors (which makes the sampled infimum exact).
double pucci_oracle(const SymMatrix& m, const PucciParams& p, int samples,
                    std::uint64_t seed, bool include_analytic = true);

/// m(x)^{-1} * pucci(coordinate matrix of the Riemannian Hessian).
double riemannian_pucci(const SpaceForm& space, const Vector& x, const Vector& grad,
                        const SymMatrix& hess, const PucciParams& p, PucciSign sign);

/// Correction matrix of the half-space Hessian,
/// K(u)_ij = d_j u delta_iN + d_i u delta_jN - d_N u delta_ij.
SymMatrix k_matrix(const Vector& grad);

/// Spectrum of K(u): {-d_N u (N-2 times), -|grad u|, +|grad u|}, ascending.
Vector k_spectrum_closed_form(const Vector& grad);

/// delta^{N-2} [delta*beta - (a_1^2 + ... + a_{N-1}^2)], the determinant of
/// the arrowhead matrix diag(delta,...,delta,beta) bordered by a.
double det_pencil(double delta, double beta, const Vector& a);

struct InequalitySides {
    double lhs;
    double rhs;
};

/// Half-space comparison between the Riemannian and Euclidean Pucci
/// operators, mu = Lambda (N-1) + k. Minus variant guarantees lhs >= rhs,
/// plus variant lhs <= rhs.
InequalitySides lemma21_sides(const Vector& x, const Vector& grad, const SymMatrix& hess,
                              const PucciParams& p, PucciSign variant);

/// Stereographic-chart analogue; contract lhs >= rhs with penalty
/// 2 lambda (N+1) |x| (1+|x|^2) |grad u|.
InequalitySides sphere_inequality_sides(const Vector& x, const Vector& grad,
                                        const SymMatrix& hess, const PucciParams& p);

} // namespace spaceform
