#include "spaceform/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace spaceform {

SpaceForm::SpaceForm(ChartKind k, int n) : kind(k), dim(n) {
    if (n < 2) throw std::invalid_argument("SpaceForm: dimension must be >= 2");
}

bool admissible(const SpaceForm& space, const Vector& x) {
    if (x.size() != space.dim) return false;
    if (!x.allFinite()) return false;
    if (space.kind == ChartKind::HyperbolicHalfSpace)
        return x[x.size() - 1] >= kHyperbolicMargin;
    return true;
}

void require_admissible(const SpaceForm& space, const Vector& x) {
    if (x.size() != space.dim)
        throw std::invalid_argument("point dimension does not match the chart");
    if (!admissible(space, x))
        throw std::domain_error("point is not admissible in this chart");
}

double conformal_factor(const SpaceForm& space, const Vector& x) {
    require_admissible(space, x);
    switch (space.kind) {
    case ChartKind::Euclidean:
        return 1.0;
    case ChartKind::HyperbolicHalfSpace: {
        const double xn = x[x.size() - 1];
        return 1.0 / (xn * xn);
    }
    case ChartKind::SphereStereographic: {
        const double q = 1.0 + x.squaredNorm();
        return 4.0 / (q * q);
    }
    }
    throw std::logic_error("unreachable");
}

namespace {

// grad of log m(x) / 2, i.e. of phi with g = e^{2 phi} delta.
Vector conformal_exponent_gradient(const SpaceForm& space, const Vector& x) {
    const int n = space.dim;
    Vector dphi = Vector::Zero(n);
    switch (space.kind) {
    case ChartKind::Euclidean:
        break;
    case ChartKind::HyperbolicHalfSpace:
        dphi[n - 1] = -1.0 / x[n - 1];
        break;
    case ChartKind::SphereStereographic:
        dphi = (-2.0 / (1.0 + x.squaredNorm())) * x;
        break;
    }
    return dphi;
}

} // namespace

Rank3Symbols christoffel(const SpaceForm& space, const Vector& x) {
    require_admissible(space, x);
    const int n = space.dim;
    // For g = m delta the general formula collapses to
    // Gamma^k_ij = d_i phi delta_kj + d_j phi delta_ik - d_k phi delta_ij,
    // phi = log(m)/2.
    const Vector dphi = conformal_exponent_gradient(space, x);
    Rank3Symbols out;
    out.values.assign(static_cast<size_t>(n), Eigen::MatrixXd::Zero(n, n));
    for (int k = 0; k < n; ++k) {
        auto& gk = out.values[static_cast<size_t>(k)];
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                double v = 0.0;
                if (k == j) v += dphi[i];
                if (k == i) v += dphi[j];
                if (i == j) v -= dphi[k];
                gk(i, j) = v;
                gk(j, i) = v;
            }
        }
    }
    return out;
}

SymMatrix riemannian_hessian(const SpaceForm& space, const Vector& x,
                             const Vector& grad, const SymMatrix& hess) {
    require_admissible(space, x);
    const int n = space.dim;
    if (grad.size() != n || hess.rows() != n || hess.cols() != n)
        throw std::invalid_argument("riemannian_hessian: dimension mismatch");
    if (space.kind == ChartKind::Euclidean) return hess;

    const Vector dphi = conformal_exponent_gradient(space, x);
    // hess_ij - grad_k Gamma^k_ij
    //   = hess_ij - dphi_i grad_j - dphi_j grad_i + (grad . dphi) delta_ij
    SymMatrix out = hess;
    out.noalias() -= dphi * grad.transpose();
    out.noalias() -= grad * dphi.transpose();
    out.diagonal().array() += grad.dot(dphi);
    return out;
}

double riemannian_gradient_norm(const SpaceForm& space, const Vector& x, const Vector& grad) {
    require_admissible(space, x);
    if (grad.size() != space.dim)
        throw std::invalid_argument("riemannian_gradient_norm: dimension mismatch");
    return grad.norm() / std::sqrt(conformal_factor(space, x));
}

double hyperbolic_distance(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("hyperbolic_distance: dimension mismatch");
    const double xn = x[x.size() - 1];
    const double yn = y[y.size() - 1];
    if (xn < kHyperbolicMargin || yn < kHyperbolicMargin)
        throw std::domain_error("hyperbolic_distance: point outside the open half-space");
    const double q = (x - y).squaredNorm() / (2.0 * xn * yn);
    // acosh(1+q) written to stay accurate for small q
    return std::log1p(q + std::sqrt(q * (q + 2.0)));
}

double chart_distance(const SpaceForm& space, const Vector& x, const Vector& y) {
    switch (space.kind) {
    case ChartKind::Euclidean:
        return (x - y).norm();
    case ChartKind::HyperbolicHalfSpace:
        return hyperbolic_distance(x, y);
    case ChartKind::SphereStereographic:
        throw std::invalid_argument("chart_distance: not provided for the stereographic chart");
    }
    throw std::logic_error("unreachable");
}

Vector reflect(double s, const Vector& x) {
    Vector out = x;
    out[0] = 2.0 * s - x[0];
    return out;
}

double laplace_beltrami(const SpaceForm& space, const Vector& x,
                        const Vector& grad, const SymMatrix& hess) {
    require_admissible(space, x);
    const int n = space.dim;
    if (grad.size() != n || hess.rows() != n || hess.cols() != n)
        throw std::invalid_argument("laplace_beltrami: dimension mismatch");
    switch (space.kind) {
    case ChartKind::Euclidean:
        return hess.trace();
    case ChartKind::HyperbolicHalfSpace: {
        const double xn = x[n - 1];
        return xn * xn * hess.trace() + (2.0 - n) * xn * grad[n - 1];
    }
    case ChartKind::SphereStereographic:
        return riemannian_hessian(space, x, grad, hess).trace() / conformal_factor(space, x);
    }
    throw std::logic_error("unreachable");
}

} // namespace spaceform
