#include "spaceform/pucci.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace spaceform {

PucciParams::PucciParams(double lambda_, double Lambda_, double k_)
    : lambda(lambda_), Lambda(Lambda_), k(k_) {
    if (!(lambda > 0.0) || !(Lambda >= lambda))
        throw std::invalid_argument("PucciParams: need Lambda >= lambda > 0");
    if (!(k >= 0.0)) throw std::invalid_argument("PucciParams: need k >= 0");
}

namespace {

void require_symmetric(const SymMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("matrix is not symmetric");
}

} // namespace

Vector eigenvalues(const SymMatrix& m) {
    require_symmetric(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
    return es.eigenvalues();
}

EigenSystem eigensystem(const SymMatrix& m) {
    require_symmetric(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

double pucci_spectrum(const Vector& mu, const PucciParams& p, PucciSign sign, double scale) {
    // Eigenvalues within the rounding band contribute with factor lambda;
    // the operator value is continuous there either way.
    const double band = 1e-12 * scale;
    double pos = 0.0, neg = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        if (mu[i] > band)
            pos += mu[i];
        else if (mu[i] < -band)
            neg += mu[i];
        else
            pos += mu[i];
    }
    if (sign == PucciSign::Minus) return p.lambda * pos + p.Lambda * neg;
    return p.Lambda * pos + p.lambda * neg;
}

double pucci_minus(const SymMatrix& m, const PucciParams& p) {
    const Vector mu = eigenvalues(m);
    const double scale = mu.size() ? mu.cwiseAbs().maxCoeff() : 0.0;
    return pucci_spectrum(mu, p, PucciSign::Minus, scale);
}

double pucci_plus(const SymMatrix& m, const PucciParams& p) {
    // Dual form; keeps pucci_plus(M) == -pucci_minus(-M) exact.
    return -pucci_minus(-m, p);
}

double pucci(const SymMatrix& m, const PucciParams& p, PucciSign sign) {
    return sign == PucciSign::Minus ? pucci_minus(m, p) : pucci_plus(m, p);
}

double pucci_oracle(const SymMatrix& m, const PucciParams& p, int samples,
                    std::uint64_t seed, bool include_analytic) {
    require_symmetric(m);
    if (samples < 1) throw std::invalid_argument("pucci_oracle: samples must be >= 1");
    const Eigen::Index n = m.rows();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(p.lambda, p.Lambda);

    double best = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd g(n, n);
    for (int s = 0; s < samples; ++s) {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) g(i, j) = gauss(rng);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ();
        Vector d(n);
        for (Eigen::Index i = 0; i < n; ++i) d[i] = unif(rng);
        // tr(Q diag(d) Q^T M) = sum_i d_i q_i^T M q_i
        double tr = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) tr += d[i] * q.col(i).dot(m * q.col(i));
        best = std::min(best, tr);
    }
    if (include_analytic) {
        const EigenSystem es = eigensystem(m);
        double tr = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            tr += (es.values[i] < 0.0 ? p.Lambda : p.lambda) * es.values[i];
        best = std::min(best, tr);
    }
    return best;
}

double riemannian_pucci(const SpaceForm& space, const Vector& x, const Vector& grad,
                        const SymMatrix& hess, const PucciParams& p, PucciSign sign) {
    const SymMatrix hg = riemannian_hessian(space, x, grad, hess);
    return pucci(hg, p, sign) / conformal_factor(space, x);
}

SymMatrix k_matrix(const Vector& grad) {
    const Eigen::Index n = grad.size();
    SymMatrix k = SymMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double v = 0.0;
            if (i == n - 1) v += grad[j];
            if (j == n - 1) v += grad[i];
            if (i == j) v -= grad[n - 1];
            k(i, j) = v;
        }
    }
    return k;
}

Vector k_spectrum_closed_form(const Vector& grad) {
    const Eigen::Index n = grad.size();
    if (n < 2) throw std::invalid_argument("k_spectrum_closed_form: need N >= 2");
    const double gn = grad.norm();
    Vector mu(n);
    for (Eigen::Index i = 0; i + 2 < n; ++i) mu[i] = -grad[n - 1];
    mu[n - 2] = -gn;
    mu[n - 1] = gn;
    std::sort(mu.begin(), mu.end());
    return mu;
}

double det_pencil(double delta, double beta, const Vector& a) {
    if (a.size() < 1) throw std::invalid_argument("det_pencil: need N >= 2");
    const int n = static_cast<int>(a.size()) + 1;
    return std::pow(delta, n - 2) * (delta * beta - a.squaredNorm());
}

InequalitySides lemma21_sides(const Vector& x, const Vector& grad, const SymMatrix& hess,
                              const PucciParams& p, PucciSign variant) {
    const int n = static_cast<int>(x.size());
    const SpaceForm hyp(ChartKind::HyperbolicHalfSpace, n);
    require_admissible(hyp, x);
    const double xn = x[n - 1];
    const double mu = p.Lambda * (n - 1) + p.k;
    const double grad_norm = grad.norm();

    InequalitySides s{};
    if (variant == PucciSign::Minus) {
        s.lhs = riemannian_pucci(hyp, x, grad, hess, p, PucciSign::Minus)
                - p.k * riemannian_gradient_norm(hyp, x, grad);
        s.rhs = xn * xn * pucci_minus(hess, p) - mu * xn * grad_norm;
    } else {
        s.lhs = riemannian_pucci(hyp, x, grad, hess, p, PucciSign::Plus)
                + p.k * riemannian_gradient_norm(hyp, x, grad);
        s.rhs = xn * xn * pucci_plus(hess, p) + mu * xn * grad_norm;
    }
    return s;
}

InequalitySides sphere_inequality_sides(const Vector& x, const Vector& grad,
                                        const SymMatrix& hess, const PucciParams& p) {
    const int n = static_cast<int>(x.size());
    const SpaceForm sph(ChartKind::SphereStereographic, n);
    require_admissible(sph, x);
    const double q = 1.0 + x.squaredNorm();
    const double xa = x.norm();

    InequalitySides s{};
    s.lhs = riemannian_pucci(sph, x, grad, hess, p, PucciSign::Minus);
    s.rhs = (q * q / 4.0) * pucci_minus(hess, p)
            - 2.0 * p.lambda * (n + 1) * xa * q * grad.norm();
    return s;
}

} // namespace spaceform
