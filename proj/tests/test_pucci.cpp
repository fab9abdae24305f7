#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "spaceform/pucci.hpp"

#include <cmath>
#include <random>

using namespace spaceform;

namespace {

SymMatrix diag(std::initializer_list<double> v) {
    SymMatrix m = SymMatrix::Zero(static_cast<Eigen::Index>(v.size()),
                                  static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) m(i, i) = x, ++i;
    return m;
}

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

SymMatrix random_sym(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    SymMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = g(rng);
    return m;
}

} // namespace

TEST_CASE("params validation") {
    CHECK_THROWS_AS(PucciParams(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PucciParams(2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PucciParams(1.0, 2.0, -0.5), std::invalid_argument);
}

TEST_CASE("eigenvalues") {
    CHECK((eigenvalues(diag({3.0, 1.0, 2.0})) - vec({1.0, 2.0, 3.0})).cwiseAbs().maxCoeff() <
          1e-14);
    SymMatrix flip(2, 2);
    flip << 0, 1, 1, 0;
    CHECK((eigenvalues(flip) - vec({-1.0, 1.0})).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((eigenvalues(SymMatrix::Identity(5, 5)) - Vector::Ones(5)).cwiseAbs().maxCoeff() <
          1e-14);

    SymMatrix bad(2, 2);
    bad << 0, 1, 0, 0;
    CHECK_THROWS_AS(eigenvalues(bad), std::invalid_argument);

    // spectrum sums to the trace; reconstruction from the eigensystem
    std::mt19937_64 rng(17);
    for (int t = 0; t < 300; ++t) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const SymMatrix m = random_sym(rng, n);
        const auto es = eigensystem(m);
        CHECK(std::abs(es.values.sum() - m.trace()) <=
              1e-10 * std::max(1.0, std::abs(m.trace())));
        const SymMatrix rec = es.vectors * es.values.asDiagonal() * es.vectors.transpose();
        CHECK((rec - m).norm() <= 1e-10 * std::max(1.0, m.norm()));
        for (Eigen::Index i = 1; i < es.values.size(); ++i) CHECK(es.values[i] >= es.values[i - 1]);
    }
}

TEST_CASE("pucci extremal values") {
    const PucciParams p12(1.0, 2.0);
    CHECK(pucci_minus(diag({1.0, -1.0}), p12) == doctest::Approx(-1.0));
    CHECK(pucci_plus(diag({1.0, -1.0}), p12) == doctest::Approx(1.0));
    CHECK(pucci_minus(SymMatrix::Zero(3, 3), p12) == 0.0);

    const PucciParams lap(1.0, 1.0);
    std::mt19937_64 rng(23);
    for (int t = 0; t < 100; ++t) {
        const SymMatrix m = random_sym(rng, 4);
        CHECK(pucci_minus(m, lap) ==
              doctest::Approx(m.trace()).epsilon(1e-12)); // collapses to the Laplacian
        const PucciParams p(0.7, 2.5, 0.0);
        CHECK(pucci_minus(m, p) <= pucci_plus(m, p));
        CHECK(pucci_plus(m, p) == -pucci_minus(-m, p)); // exact duality
    }
}

TEST_CASE("pucci oracle") {
    std::mt19937_64 rng(29);
    const PucciParams p(0.8, 2.0);
    for (int t = 0; t < 200; ++t) {
        const int n = (t % 2) ? 3 : 5;
        const SymMatrix m = random_sym(rng, n);
        const double exact = pucci_minus(m, p);
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        CHECK(std::abs(pucci_oracle(m, p, 16, 1000 + t) - exact) <= 1e-10 * scale);
        const double random_only = pucci_oracle(m, p, 16, 1000 + t, false);
        CHECK(random_only >= exact - 1e-12 * scale);
    }
    CHECK(pucci_oracle(SymMatrix::Zero(3, 3), p, 4, 0) == 0.0);

    // the random-only gap shrinks with more samples (brute-force refinement)
    const SymMatrix m = random_sym(rng, 3);
    const double exact = pucci_minus(m, p);
    double gap_small = 0.0, gap_large = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        gap_small += pucci_oracle(m, p, 4, 100 + rep, false) - exact;
        gap_large += pucci_oracle(m, p, 256, 100 + rep, false) - exact;
    }
    CHECK(gap_large < gap_small);
}

TEST_CASE("riemannian pucci") {
    const PucciParams p12(1.0, 2.0);
    const SpaceForm euc(ChartKind::Euclidean, 3);
    std::mt19937_64 rng(31);
    const SymMatrix m = random_sym(rng, 3);
    CHECK(riemannian_pucci(euc, Vector::Zero(3), Vector::Zero(3), m, p12, PucciSign::Minus) ==
          doctest::Approx(pucci_minus(m, p12)).epsilon(1e-14));

    // u = x_N on H^3 at height 1: eigenvalues (-1,-1,1), minus value -3
    const SpaceForm hyp(ChartKind::HyperbolicHalfSpace, 3);
    const Vector x = vec({0.0, 0.0, 1.0});
    const Vector grad = vec({0.0, 0.0, 1.0});
    CHECK(riemannian_pucci(hyp, x, grad, SymMatrix::Zero(3, 3), p12, PucciSign::Minus) ==
          doctest::Approx(-3.0).epsilon(1e-13));

    // lambda = Lambda reduces to the Laplace-Beltrami operator
    const PucciParams lap(1.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        Vector xx(3), gr(3);
        xx << g(rng), g(rng), 0.3 + std::abs(g(rng));
        gr << g(rng), g(rng), g(rng);
        const SymMatrix h = random_sym(rng, 3);
        const double pv = riemannian_pucci(hyp, xx, gr, h, lap, PucciSign::Minus);
        const double lb = laplace_beltrami(hyp, xx, gr, h);
        CHECK(std::abs(pv - lb) <= 1e-10 * std::max(1.0, std::abs(lb)));
    }
}

TEST_CASE("k matrix and closed-form spectrum") {
    SymMatrix expected(2, 2);
    expected << -4, 3, 3, 4;
    CHECK((k_matrix(vec({3.0, 4.0})) - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK(k_matrix(Vector::Zero(4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((k_matrix(vec({0.0, 0.0, 1.0})) - diag({-1.0, -1.0, 1.0})).cwiseAbs().maxCoeff() == 0.0);

    CHECK((k_spectrum_closed_form(vec({3.0, 4.0})) - vec({-5.0, 5.0})).cwiseAbs().maxCoeff() <
          1e-14);
    CHECK((k_spectrum_closed_form(vec({0.0, 3.0, 4.0})) - vec({-5.0, -4.0, 5.0}))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    CHECK(k_spectrum_closed_form(Vector::Zero(3)).cwiseAbs().maxCoeff() == 0.0);

    std::mt19937_64 rng(37);
    std::normal_distribution<double> g(0.0, 2.0);
    for (int t = 0; t < 500; ++t) {
        const int n = 2 + static_cast<int>(rng() % 5);
        Vector grad(n);
        for (int i = 0; i < n; ++i) grad[i] = g(rng);
        const Vector closed = k_spectrum_closed_form(grad);
        const Vector numeric = eigenvalues(k_matrix(grad));
        CHECK((closed - numeric).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, grad.norm()));
    }
}

TEST_CASE("arrowhead determinant identity") {
    CHECK(det_pencil(2.0, 1.0, vec({1.0, 1.0})) == doctest::Approx(0.0));
    CHECK(det_pencil(1.0, 1.0, vec({0.0})) == doctest::Approx(1.0));

    std::mt19937_64 rng(41);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const int n = 2 + static_cast<int>(rng() % 7); // N <= 8
        const double delta = g(rng), beta = g(rng);
        Vector a(n - 1);
        for (int i = 0; i < n - 1; ++i) a[i] = g(rng);
        SymMatrix m = SymMatrix::Zero(n, n);
        for (int i = 0; i < n - 1; ++i) {
            m(i, i) = delta;
            m(i, n - 1) = m(n - 1, i) = a[i];
        }
        m(n - 1, n - 1) = beta;
        const double direct = m.determinant();
        CHECK(std::abs(det_pencil(delta, beta, a) - direct) <=
              1e-10 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("lemma 2.1 sides") {
    // frozen hand-evaluated case
    const PucciParams p(1.0, 1.0, 0.0);
    const auto s = lemma21_sides(vec({0.0, 0.0, 1.0}), vec({0.0, 0.0, 1.0}),
                                 SymMatrix::Zero(3, 3), p, PucciSign::Minus);
    CHECK(s.lhs == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(s.rhs == doctest::Approx(-2.0).epsilon(1e-13));
    CHECK(s.lhs >= s.rhs);

    // zero gradient collapses both sides
    std::mt19937_64 rng(43);
    const SymMatrix h = random_sym(rng, 3);
    const PucciParams p2(1.0, 2.0, 0.7);
    const auto z = lemma21_sides(vec({0.2, -1.0, 0.8}), Vector::Zero(3), h, p2, PucciSign::Minus);
    CHECK(z.lhs == doctest::Approx(z.rhs).epsilon(1e-12));

    // fuzzing both variants
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> lam(0.5, 2.0), ratio(1.0, 8.0), kk(0.0, 2.0),
        ht(0.05, 5.0);
    for (int t = 0; t < 10000; ++t) {
        const int n = 2 + static_cast<int>(rng() % 5);
        Vector x(n), gr(n);
        for (int i = 0; i < n; ++i) {
            x[i] = g(rng);
            gr[i] = g(rng);
        }
        x[n - 1] = ht(rng);
        const SymMatrix hh = random_sym(rng, n);
        const double l = lam(rng);
        const PucciParams pp(l, l * ratio(rng), kk(rng));
        const auto sm = lemma21_sides(x, gr, hh, pp, PucciSign::Minus);
        const auto sp = lemma21_sides(x, gr, hh, pp, PucciSign::Plus);
        const double scale = std::max({1.0, std::abs(sm.lhs), std::abs(sm.rhs)});
        CHECK(sm.lhs >= sm.rhs - 1e-9 * scale);
        CHECK(sp.lhs <= sp.rhs + 1e-9 * scale);
    }
}

TEST_CASE("sphere chart inequality sides") {
    const PucciParams p(1.0, 1.5, 0.0);
    std::mt19937_64 rng(47);
    const SymMatrix h = random_sym(rng, 3);

    // |x| = 0 kills the penalty; equality at zero gradient
    const auto z = sphere_inequality_sides(Vector::Zero(3), Vector::Zero(3), h, p);
    CHECK(z.lhs == doctest::Approx(z.rhs).epsilon(1e-12));

    const auto zg = sphere_inequality_sides(vec({0.4, -0.3, 0.9}), Vector::Zero(3), h, p);
    CHECK(zg.lhs == doctest::Approx(zg.rhs).epsilon(1e-12));

    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> lam(0.5, 2.0), ratio(1.0, 4.0);
    for (int t = 0; t < 10000; ++t) {
        const int n = 2 + static_cast<int>(rng() % 5);
        Vector x(n), gr(n);
        for (int i = 0; i < n; ++i) {
            x[i] = g(rng);
            gr[i] = g(rng);
        }
        const SymMatrix hh = random_sym(rng, n);
        const double l = lam(rng);
        const PucciParams pp(l, l * ratio(rng), 0.0);
        const auto s = sphere_inequality_sides(x, gr, hh, pp);
        const double scale = std::max({1.0, std::abs(s.lhs), std::abs(s.rhs)});
        CHECK(s.lhs >= s.rhs - 1e-9 * scale);
    }
}

TEST_CASE("degenerate ellipticity and superadditivity") {
    std::mt19937_64 rng(53);
    const PucciParams p(0.6, 3.0);
    for (int t = 0; t < 2000; ++t) {
        const int n = 2 + static_cast<int>(rng() % 4);
        const SymMatrix a = random_sym(rng, n);
        const SymMatrix b = random_sym(rng, n);
        const SymMatrix e = b * b.transpose();
        const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        CHECK(pucci_minus(a + e, p) >= pucci_minus(a, p) - 1e-10 * scale);
        CHECK(pucci_minus(a + b, p) >=
              pucci_minus(a, p) + pucci_minus(b, p) - 1e-10 * scale);
        CHECK(pucci_plus(a + b, p) <= pucci_plus(a, p) + pucci_plus(b, p) + 1e-10 * scale);
    }
}
