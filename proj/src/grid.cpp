#include "spaceform/grid.hpp"

#include "spaceform/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

namespace spaceform {

long GridDomain::interior_count() const {
    return std::count(mask.begin(), mask.end(),
                      static_cast<unsigned char>(NodeKind::Interior));
}

void SolverConfig::validate() const {
    if (W < 1) throw std::invalid_argument("SolverConfig: W must be >= 1");
    if (!(tol > 0.0) || !(linear_tol > 0.0))
        throw std::invalid_argument("SolverConfig: tolerances must be > 0");
    if (max_policy_iters < 1) throw std::invalid_argument("SolverConfig: max_policy_iters >= 1");
}

namespace {

struct Dir {
    int p, q;
    double len, e1, e2; // |(p,q)| and unit components
};

// Canonical direction family: gcd(|p|,|q|) = 1, q > 0 or (q = 0, p > 0),
// max(|p|,|q|) <= W. Closed under x1-reflection up to canonicalization.
std::vector<Dir> make_directions(int W) {
    std::vector<Dir> dirs;
    for (int q = 0; q <= W; ++q) {
        for (int p = -W; p <= W; ++p) {
            if (p == 0 && q == 0) continue;
            if (q == 0 && p <= 0) continue;
            if (std::gcd(std::abs(p), std::abs(q)) != 1) continue;
            const double len = std::hypot(double(p), double(q));
            dirs.push_back({p, q, len, p / len, q / len});
        }
    }
    return dirs;
}

int canonical_index(const std::vector<Dir>& dirs, int p, int q) {
    if (q < 0 || (q == 0 && p < 0)) {
        p = -p;
        q = -q;
    }
    for (size_t d = 0; d < dirs.size(); ++d)
        if (dirs[d].p == p && dirs[d].q == q) return static_cast<int>(d);
    return -1;
}

std::vector<std::pair<int, int>> make_frames(const std::vector<Dir>& dirs) {
    std::vector<std::pair<int, int>> frames;
    for (size_t d = 0; d < dirs.size(); ++d) {
        const int perp = canonical_index(dirs, -dirs[d].q, dirs[d].p);
        if (perp < 0) continue;
        const int a = std::min<int>(static_cast<int>(d), perp);
        const int b = std::max<int>(static_cast<int>(d), perp);
        if (std::find(frames.begin(), frames.end(), std::make_pair(a, b)) == frames.end())
            frames.emplace_back(a, b);
    }
    return frames;
}

double crossing_fraction(const std::function<double(double, double)>& level, double x1, double x2,
                         double dx, double dy) {
    // level < 0 at (x1,x2), >= 0 at the far end; bisect the zero fraction
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (level(x1 + mid * dx, x2 + mid * dy) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return std::clamp(0.5 * (lo + hi), 1e-9, 1.0);
}

struct Workspace {
    const GridDomain* dom = nullptr;
    PucciParams params{1.0, 1.0, 0.0};
    PucciSign sign = PucciSign::Minus;
    bool hyperbolic = false;
    bool minimize = true;
    std::vector<Dir> dirs;
    std::vector<std::pair<int, int>> frames;
    std::vector<int> interior;  // flat indices
    std::vector<int> col_of;    // flat index -> interior column, or -1
    std::vector<double> arm_p, arm_m; // [interior][dir]
    std::vector<double> m_inv, x2inv, m_inv_sqrt;
};

// The Dirichlet closure places the zero boundary value at the level-set
// crossing of each exiting ray (fractional arms); the plain operator
// evaluation keeps full arms and reads the field's ring values instead.
Workspace make_workspace(const GridDomain& dom, const PucciParams& p, PucciSign sign,
                         const SolverConfig& cfg, bool dirichlet_closure) {
    cfg.validate();
    if (cfg.W > dom.stencil_margin)
        throw std::invalid_argument("stencil width exceeds the margin the domain was built for");
    Workspace ws;
    ws.dom = &dom;
    ws.params = p;
    ws.sign = sign;
    ws.minimize = (sign == PucciSign::Minus);
    ws.hyperbolic = dom.chart.kind == ChartKind::HyperbolicHalfSpace;

    // At lambda == Lambda every frame discretizes the same operator; use the
    // canonical axis pair so the scheme coincides with the five-point one.
    const bool isotropic = (p.Lambda - p.lambda) <= 1e-14 * p.lambda;
    ws.dirs = make_directions(isotropic ? 1 : cfg.W);
    ws.frames = make_frames(ws.dirs);
    if (isotropic) {
        const int ax = canonical_index(ws.dirs, 1, 0);
        const int ay = canonical_index(ws.dirs, 0, 1);
        ws.frames = {{std::min(ax, ay), std::max(ax, ay)}};
    }

    ws.col_of.assign(dom.mask.size(), -1);
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i)
            if (dom.is_interior(i, j)) {
                ws.col_of[static_cast<size_t>(dom.index(i, j))] =
                    static_cast<int>(ws.interior.size());
                ws.interior.push_back(dom.index(i, j));
            }
    if (ws.interior.empty()) throw std::invalid_argument("grid domain has no interior nodes");

    const size_t nd = ws.dirs.size();
    ws.arm_p.assign(ws.interior.size() * nd, 1.0);
    ws.arm_m.assign(ws.interior.size() * nd, 1.0);
    ws.m_inv.resize(ws.interior.size());
    ws.x2inv.resize(ws.interior.size());
    ws.m_inv_sqrt.resize(ws.interior.size());

    for (size_t k = 0; k < ws.interior.size(); ++k) {
        const int idx = ws.interior[k];
        const int i = idx % dom.nx, j = idx / dom.nx;
        const double x1 = dom.x1(i), x2 = dom.x2(j);
        if (ws.hyperbolic) {
            ws.m_inv[k] = x2 * x2;
            ws.x2inv[k] = 1.0 / x2;
            ws.m_inv_sqrt[k] = x2;
        } else {
            ws.m_inv[k] = 1.0;
            ws.x2inv[k] = 0.0;
            ws.m_inv_sqrt[k] = 1.0;
        }
        for (size_t d = 0; d < nd; ++d) {
            const Dir& e = ws.dirs[d];
            for (int sgn : {+1, -1}) {
                const int ii = i + sgn * e.p, jj = j + sgn * e.q;
                if (!dom.in_bounds(ii, jj))
                    throw std::invalid_argument("interior stencil leaves the grid");
                double t = 1.0;
                if (dirichlet_closure && !dom.is_interior(ii, jj) && dom.level)
                    t = crossing_fraction(dom.level, x1, x2, sgn * e.p * dom.h, sgn * e.q * dom.h);
                (sgn > 0 ? ws.arm_p : ws.arm_m)[k * nd + d] = t;
            }
        }
    }
    return ws;
}

struct DirData {
    double sec, fwd, bwd;            // primitive values
    double up, um;                   // neighbor values (0 beyond the boundary)
    int up_col, um_col;              // interior column ids or -1
    double c_up, c_um, c_diag;       // second-difference coefficients
    double f_up, f_diag;             // forward-difference coefficients
    double b_um, b_diag;             // backward-difference coefficients
};

void fill_dirdata(const Workspace& ws, size_t k, const std::vector<double>& u,
                  std::vector<DirData>& out) {
    const GridDomain& dom = *ws.dom;
    const int idx = ws.interior[k];
    const int i = idx % dom.nx, j = idx / dom.nx;
    const double u0 = u[static_cast<size_t>(idx)];
    const size_t nd = ws.dirs.size();
    out.resize(nd);
    for (size_t d = 0; d < nd; ++d) {
        const Dir& e = ws.dirs[d];
        DirData& dd = out[d];
        const double tp = ws.arm_p[k * nd + d], tm = ws.arm_m[k * nd + d];
        const int ip = i + e.p, jp = j + e.q, im = i - e.p, jm = j - e.q;
        dd.up_col = ws.col_of[static_cast<size_t>(dom.index(ip, jp))];
        dd.um_col = ws.col_of[static_cast<size_t>(dom.index(im, jm))];
        // full arms read the node (interior or ring); fractional arms sit on
        // the boundary crossing, which carries the Dirichlet value 0
        dd.up = tp == 1.0 ? u[static_cast<size_t>(dom.index(ip, jp))] : 0.0;
        dd.um = tm == 1.0 ? u[static_cast<size_t>(dom.index(im, jm))] : 0.0;
        const double hl = dom.h * e.len;
        const double s = 2.0 / (hl * hl);
        dd.c_up = s / (tp * (tp + tm));
        dd.c_um = s / (tm * (tp + tm));
        dd.c_diag = -s / (tp * tm);
        dd.f_up = 1.0 / (tp * hl);
        dd.f_diag = -dd.f_up;
        dd.b_diag = 1.0 / (tm * hl);
        dd.b_um = -dd.b_diag;
        dd.sec = dd.c_up * dd.up + dd.c_um * dd.um + dd.c_diag * u0;
        dd.fwd = dd.f_up * dd.up + dd.f_diag * u0;
        dd.bwd = dd.b_um * dd.um + dd.b_diag * u0;
    }
}

struct NodePolicy {
    int d1 = 0, d2 = 0;     // frame direction indices
    double a1 = 0.0, a2 = 0.0; // chosen coefficients in {lambda, Lambda}
    int k_dir = -1;         // gradient branch direction, -1 = zero branch
    int k_sgn = 0;
};

// Value of one linear policy member at a node. The Christoffel term of the
// half-space chart is written on the frame's own rays,
//   tr(A x2^{-1} K(grad u)) = x2^{-1} sum_d (a_d - a_other) e_{d,2} (grad u . e_d),
// and each ray coefficient is upwinded by its sign.
double frame_branch_value(const Workspace& ws, size_t k, const std::vector<DirData>& dd,
                          int d1, int d2, double a1, double a2) {
    double v = ws.m_inv[k] * (a1 * dd[static_cast<size_t>(d1)].sec + a2 * dd[static_cast<size_t>(d2)].sec);
    if (ws.hyperbolic) {
        const double g1 = ws.m_inv[k] * ws.x2inv[k] * (a1 - a2) * ws.dirs[static_cast<size_t>(d1)].e2;
        const double g2 = ws.m_inv[k] * ws.x2inv[k] * (a2 - a1) * ws.dirs[static_cast<size_t>(d2)].e2;
        v += g1 * (g1 > 0.0 ? dd[static_cast<size_t>(d1)].fwd : dd[static_cast<size_t>(d1)].bwd);
        v += g2 * (g2 > 0.0 ? dd[static_cast<size_t>(d2)].fwd : dd[static_cast<size_t>(d2)].bwd);
    }
    return v;
}

// Extremal policy and operator value F^{sign}_h(u) at interior node k.
double choose_policy(const Workspace& ws, size_t k, const std::vector<DirData>& dd,
                     NodePolicy& pol) {
    const double lam = ws.params.lambda, Lam = ws.params.Lambda;
    const double sgn = ws.minimize ? 1.0 : -1.0; // minimize sgn * value
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [d1, d2] : ws.frames) {
        for (double a1 : {lam, Lam}) {
            for (double a2 : {lam, Lam}) {
                const double v = frame_branch_value(ws, k, dd, d1, d2, a1, a2);
                if (sgn * v < best) {
                    best = sgn * v;
                    pol.d1 = d1;
                    pol.d2 = d2;
                    pol.a1 = a1;
                    pol.a2 = a2;
                }
            }
        }
    }
    double value = sgn * best;

    pol.k_dir = -1;
    pol.k_sgn = 0;
    if (ws.params.k > 0.0) {
        // |grad u| realized as a max over upwinded directional branches;
        // the zero branch keeps it nonnegative.
        double grad_best = 0.0;
        for (size_t d = 0; d < ws.dirs.size(); ++d) {
            const double vp = ws.minimize ? dd[d].bwd : dd[d].fwd;
            const double vm = ws.minimize ? -dd[d].fwd : -dd[d].bwd;
            if (vp > grad_best) {
                grad_best = vp;
                pol.k_dir = static_cast<int>(d);
                pol.k_sgn = +1;
            }
            if (vm > grad_best) {
                grad_best = vm;
                pol.k_dir = static_cast<int>(d);
                pol.k_sgn = -1;
            }
        }
        value += (ws.minimize ? -1.0 : 1.0) * ws.params.k * ws.m_inv_sqrt[k] * grad_best;
    }
    return value;
}

// Scatter the chosen policy's linear coefficients into the system
// A = b*I - L (row k), so that A u = c solves L u + c - b u = 0.
void assemble_row(const Workspace& ws, size_t k, const std::vector<DirData>& dd,
                  const NodePolicy& pol, double b_coeff,
                  std::vector<Eigen::Triplet<double>>& trips) {
    const int row = static_cast<int>(k);
    double diag = b_coeff;
    auto add = [&](int col, double w) {
        if (w == 0.0) return;
        if (col >= 0) trips.emplace_back(row, col, -w);
    };
    auto add_diag = [&](double w) { diag -= w; };

    auto add_second = [&](int d, double a) {
        const DirData& x = dd[static_cast<size_t>(d)];
        const double w = ws.m_inv[k] * a;
        add(x.up_col, w * x.c_up);
        add(x.um_col, w * x.c_um);
        add_diag(w * x.c_diag);
    };
    auto add_first = [&](int d, double g) { // g * (grad u . e_d), upwinded
        if (g == 0.0) return;
        const DirData& x = dd[static_cast<size_t>(d)];
        if (g > 0.0) {
            add(x.up_col, g * x.f_up);
            add_diag(g * x.f_diag);
        } else {
            add(x.um_col, g * x.b_um);
            add_diag(g * x.b_diag);
        }
    };

    add_second(pol.d1, pol.a1);
    add_second(pol.d2, pol.a2);
    if (ws.hyperbolic) {
        add_first(pol.d1, ws.m_inv[k] * ws.x2inv[k] * (pol.a1 - pol.a2) *
                              ws.dirs[static_cast<size_t>(pol.d1)].e2);
        add_first(pol.d2, ws.m_inv[k] * ws.x2inv[k] * (pol.a2 - pol.a1) *
                              ws.dirs[static_cast<size_t>(pol.d2)].e2);
    }
    if (pol.k_dir >= 0) {
        // minus: -k m^{-1/2} * s * (grad u . e); plus: +k m^{-1/2} * s * (...)
        const double g = (ws.minimize ? -1.0 : 1.0) * ws.params.k * ws.m_inv_sqrt[k] *
                         static_cast<double>(pol.k_sgn);
        add_first(pol.k_dir, g);
    }
    trips.emplace_back(row, row, diag);
}

GridDomain build_masked_domain(const SpaceForm& chart, const Eigen::Vector2d& center,
                               double ext_x, double ext_lo, double ext_hi, double h, int W,
                               std::function<double(double, double)> level) {
    if (chart.dim != 2) throw std::invalid_argument("grid domains are two-dimensional");
    if (chart.kind == ChartKind::SphereStereographic)
        throw std::invalid_argument("grid solving is not provided on the sphere chart");
    if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be > 0");
    if (W < 1) throw std::invalid_argument("stencil margin must be >= 1");

    GridDomain dom;
    dom.chart = chart;
    dom.h = h;
    dom.stencil_margin = W;
    const int margin = W + 1;
    const int ic = static_cast<int>(std::ceil(ext_x / h)) + margin;
    const int jd = static_cast<int>(std::ceil(ext_lo / h)) + margin;
    const int ju = static_cast<int>(std::ceil(ext_hi / h)) + margin;
    dom.nx = 2 * ic + 1;
    dom.ny = jd + ju + 1;
    dom.origin = {center[0] - ic * h, center[1] - jd * h};
    if (chart.kind == ChartKind::HyperbolicHalfSpace && dom.origin[1] < kHyperbolicMargin)
        throw std::domain_error("domain touches the chart boundary x2 = 0");

    dom.mask.assign(static_cast<size_t>(dom.nx) * dom.ny, 0);
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i)
            if (level(dom.x1(i), dom.x2(j)) < 0.0)
                dom.mask[static_cast<size_t>(dom.index(i, j))] =
                    static_cast<unsigned char>(NodeKind::Interior);

    const auto dirs = make_directions(W);
    for (int j = 0; j < dom.ny; ++j) {
        for (int i = 0; i < dom.nx; ++i) {
            if (!dom.is_interior(i, j)) continue;
            for (const Dir& e : dirs) {
                for (int sgn : {+1, -1}) {
                    const int ii = i + sgn * e.p, jj = j + sgn * e.q;
                    if (!dom.in_bounds(ii, jj))
                        throw std::logic_error("stencil margin too small");
                    if (dom.kind(ii, jj) == NodeKind::Exterior)
                        dom.mask[static_cast<size_t>(dom.index(ii, jj))] =
                            static_cast<unsigned char>(NodeKind::Boundary);
                }
            }
        }
    }
    for (size_t n = 0; n < dom.mask.size(); ++n)
        if (dom.mask[n] == static_cast<unsigned char>(NodeKind::Boundary))
            dom.boundary_nodes.push_back(static_cast<int>(n));
    dom.level = std::move(level);
    return dom;
}

} // namespace

GridDomain build_geodesic_ball(const SpaceForm& chart, const Eigen::Vector2d& center, double R,
                               double h, int W) {
    if (!(R > 0.0)) throw std::invalid_argument("ball radius must be > 0");
    SpaceForm c = chart;
    if (c.kind == ChartKind::HyperbolicHalfSpace) {
        Vector cv(2);
        cv << center[0], center[1];
        require_admissible(c, cv);
    }
    double ext_x, ext_lo, ext_hi;
    if (c.kind == ChartKind::HyperbolicHalfSpace) {
        // in the chart the geodesic ball is the Euclidean disc centered at
        // (c1, c2 cosh R) with radius c2 sinh R
        ext_x = center[1] * std::sinh(R);
        ext_lo = center[1] - center[1] * std::exp(-R);
        ext_hi = center[1] * std::exp(R) - center[1];
    } else {
        ext_x = ext_lo = ext_hi = R;
    }
    auto level = [c, center, R](double x1, double x2) {
        Vector pt(2), ctr(2);
        pt << x1, x2;
        ctr << center[0], center[1];
        return chart_distance(c, pt, ctr) - R;
    };
    return build_masked_domain(c, center, ext_x, ext_lo, ext_hi, h, W, level);
}

GridDomain build_ellipse_domain(const SpaceForm& chart, const Eigen::Vector2d& center, double a,
                                double b, double h, int W) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ellipse semi-axes must be > 0");
    auto level = [center, a, b](double x1, double x2) {
        const double u = (x1 - center[0]) / a, v = (x2 - center[1]) / b;
        return u * u + v * v - 1.0;
    };
    return build_masked_domain(chart, center, a, b, b, h, W, level);
}

GridField discrete_pucci_residual(const GridField& u, const GridDomain& dom,
                                  const PucciParams& p, PucciSign sign, const SolverConfig& cfg) {
    if (u.values.size() != dom.mask.size())
        throw std::invalid_argument("field is not aligned with the domain");
    Workspace ws = make_workspace(dom, p, sign, cfg, false);
    GridField out;
    out.values.assign(dom.mask.size(), 0.0);
    std::vector<DirData> dd;
    NodePolicy pol;
    for (size_t k = 0; k < ws.interior.size(); ++k) {
        fill_dirdata(ws, k, u.values, dd);
        out.values[static_cast<size_t>(ws.interior[k])] = choose_policy(ws, k, dd, pol);
    }
    return out;
}

GridField howard_solve(const GridDomain& dom, const PucciParams& p, AffineSource source,
                       PucciSign sign, const SolverConfig& cfg, SolveStats* stats) {
    if (!(source.b >= 0.0)) throw std::invalid_argument("howard_solve: need b >= 0");
    Workspace ws = make_workspace(dom, p, sign, cfg, true);
    const size_t n = ws.interior.size();

    std::vector<double> u(dom.mask.size(), 0.0);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd rhs = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), source.c);

    std::vector<NodePolicy> policy(n);
    std::vector<DirData> dd;
    SolveStats st;

    for (int iter = 0; iter <= cfg.max_policy_iters; ++iter) {
        // policy improvement + residual of the current iterate
        double res_sup = 0.0;
        for (size_t k = 0; k < n; ++k) {
            fill_dirdata(ws, k, u, dd);
            const double fval = choose_policy(ws, k, dd, policy[k]);
            const double uk = u[static_cast<size_t>(ws.interior[k])];
            res_sup = std::max(res_sup, std::abs(fval + source.c - source.b * uk));
        }
        st.residual_sup = res_sup;
        if (res_sup <= cfg.tol) {
            st.converged = true;
            break;
        }
        if (iter == cfg.max_policy_iters) break;

        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(n * 8);
        for (size_t k = 0; k < n; ++k) {
            fill_dirdata(ws, k, u, dd);
            assemble_row(ws, k, dd, policy[k], source.b, trips);
        }
        Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        A.setFromTriplets(trips.begin(), trips.end());

        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> solver;
        solver.setTolerance(cfg.linear_tol);
        solver.setMaxIterations(4000);
        solver.compute(A);
        Eigen::VectorXd xn = solver.solveWithGuess(rhs, x);
        if (solver.info() != Eigen::Success) {
            Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
            if (lu.info() != Eigen::Success)
                throw convergence_error("howard_solve: linear solve failed");
            xn = lu.solve(rhs);
        }
        x = xn;
        for (size_t k = 0; k < n; ++k) u[static_cast<size_t>(ws.interior[k])] = x[static_cast<Eigen::Index>(k)];
        st.policy_iterations = iter + 1;
    }
    if (stats) *stats = st;

    GridField out;
    out.values = std::move(u);
    return out;
}

// Signed distance approximation from the mask, positive inside, in chart
// coordinates; accurate near the interface, clamped far away.
std::vector<double> mask_signed_distance(const GridDomain& dom) {
    const int Wn = 5;
    std::vector<double> d(dom.mask.size(), 0.0);
    for (int j = 0; j < dom.ny; ++j) {
        for (int i = 0; i < dom.nx; ++i) {
            const bool in = dom.is_interior(i, j);
            double best = (Wn + 1) * 1.0;
            for (int dj = -Wn; dj <= Wn; ++dj) {
                for (int di = -Wn; di <= Wn; ++di) {
                    const int ii = i + di, jj = j + dj;
                    if (!dom.in_bounds(ii, jj)) continue;
                    if (dom.is_interior(ii, jj) != in)
                        best = std::min(best, std::hypot(double(di), double(dj)));
                }
            }
            d[static_cast<size_t>(dom.index(i, j))] = (in ? 1.0 : -1.0) * (best - 0.5) * dom.h;
        }
    }
    return d;
}

namespace {

bool bilinear(const GridDomain& dom, const std::vector<double>& vals, double x1, double x2,
              double* out) {
    const double fi = (x1 - dom.origin[0]) / dom.h;
    const double fj = (x2 - dom.origin[1]) / dom.h;
    const int i0 = static_cast<int>(std::floor(fi));
    const int j0 = static_cast<int>(std::floor(fj));
    if (i0 < 0 || j0 < 0 || i0 + 1 >= dom.nx || j0 + 1 >= dom.ny) return false;
    const double ti = fi - i0, tj = fj - j0;
    const auto v = [&](int i, int j) { return vals[static_cast<size_t>(dom.index(i, j))]; };
    *out = (1 - ti) * (1 - tj) * v(i0, j0) + ti * (1 - tj) * v(i0 + 1, j0) +
           (1 - ti) * tj * v(i0, j0 + 1) + ti * tj * v(i0 + 1, j0 + 1);
    return true;
}

} // namespace

bool interpolate_field(const GridDomain& dom, const GridField& u, double x1, double x2,
                       double* out) {
    const double fi = (x1 - dom.origin[0]) / dom.h;
    const double fj = (x2 - dom.origin[1]) / dom.h;
    int i0 = static_cast<int>(std::floor(fi));
    int j0 = static_cast<int>(std::floor(fj));
    i0 = std::clamp(i0, 0, dom.nx - 2);
    j0 = std::clamp(j0, 0, dom.ny - 2);
    const double ti = fi - i0, tj = fj - j0;
    if (ti < -1e-9 || ti > 1.0 + 1e-9 || tj < -1e-9 || tj > 1.0 + 1e-9) return false;
    const double w[4] = {(1 - ti) * (1 - tj), ti * (1 - tj), (1 - ti) * tj, ti * tj};
    const int ii[4] = {i0, i0 + 1, i0, i0 + 1};
    const int jj[4] = {j0, j0, j0 + 1, j0 + 1};
    double v = 0.0;
    for (int c = 0; c < 4; ++c) {
        if (std::abs(w[c]) <= 1e-12) continue;
        if (dom.kind(ii[c], jj[c]) == NodeKind::Exterior) return false;
        v += w[c] * u.values[static_cast<size_t>(dom.index(ii[c], jj[c]))];
    }
    *out = v;
    return true;
}

std::vector<BoundaryGradientSample> boundary_gradient_profile(const GridField& u,
                                                              const GridDomain& dom) {
    if (u.values.size() != dom.mask.size())
        throw std::invalid_argument("field is not aligned with the domain");
    std::vector<double> dsd;
    if (!dom.level) dsd = mask_signed_distance(dom);
    // outward-increasing boundary indicator
    auto outward = [&](double x1, double x2) -> double {
        if (dom.level) return dom.level(x1, x2);
        double v = 0.0;
        if (!bilinear(dom, dsd, x1, x2, &v)) return 1.0;
        return -v;
    };

    std::vector<BoundaryGradientSample> out;
    const double h = dom.h;
    for (int node : dom.boundary_nodes) {
        const int i = node % dom.nx, j = node / dom.nx;
        bool near = false;
        for (int dj = -1; dj <= 1 && !near; ++dj)
            for (int di = -1; di <= 1 && !near; ++di)
                if (dom.in_bounds(i + di, j + dj) && dom.is_interior(i + di, j + dj)) near = true;
        if (!near) continue;

        const double zx = dom.x1(i), zy = dom.x2(j);
        const double fd = 0.1 * h;
        const double gx = (outward(zx + fd, zy) - outward(zx - fd, zy)) / (2 * fd);
        const double gy = (outward(zx, zy + fd) - outward(zx, zy - fd)) / (2 * fd);
        const double gn = std::hypot(gx, gy);
        if (!(gn > 0.0)) continue;
        const double nx = gx / gn, ny = gy / gn;

        // first inward point below the zero level, then bisect the crossing
        const double tmax = (dom.stencil_margin + 2) * h;
        double t_in = -1.0, t_out = 0.0;
        for (double t = 0.25 * h; t <= tmax; t += 0.25 * h) {
            if (outward(zx - t * nx, zy - t * ny) < 0.0) {
                t_in = t;
                break;
            }
            t_out = t;
        }
        if (t_in < 0.0) {
            if (outward(zx, zy) > 0.0) continue;
            t_in = 0.0;
        }
        double lo = t_out, hi = t_in;
        for (int it = 0; it < 50 && hi > lo; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (outward(zx - mid * nx, zy - mid * ny) < 0.0)
                hi = mid;
            else
                lo = mid;
        }
        const double tc = 0.5 * (lo + hi);
        const double px = zx - tc * nx, py = zy - tc * ny;

        const double depth = 2.0 * h;
        double u1 = 0.0, u2 = 0.0;
        if (!interpolate_field(dom, u, px - depth * nx, py - depth * ny, &u1)) continue;
        if (!interpolate_field(dom, u, px - 2 * depth * nx, py - 2 * depth * ny, &u2)) continue;
        const double g = (4.0 * u1 - u2) / (2.0 * depth);

        double scale = 1.0;
        if (dom.chart.kind == ChartKind::HyperbolicHalfSpace) scale = py;
        out.push_back({node, px, py, g * scale});
    }
    return out;
}

namespace {

void write_csv(const std::string& path, const GridDomain& dom, const char* header,
               const std::function<void(FILE*, int, int)>& row) {
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw io_error("cannot open '" + path + "' for writing");
    std::fprintf(f, "%s\n", header);
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i) row(f, i, j);
    if (std::fclose(f) != 0) throw io_error("error writing '" + path + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& s, const std::string& path, size_t row, size_t col) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw io_error(path + ": row " + std::to_string(row) + ", column " + std::to_string(col) +
                       ": cannot parse '" + s + "'");
    }
}

struct CsvTable {
    std::vector<std::array<double, 3>> rows;
};

CsvTable read_three_columns(const std::string& path, const std::string& header) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw io_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header)
        throw io_error(path + ": row 1: expected header '" + header + "', got '" + line + "'");
    CsvTable t;
    size_t rowno = 1;
    while (std::getline(in, line)) {
        ++rowno;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 3)
            throw io_error(path + ": row " + std::to_string(rowno) + ": expected 3 columns, got " +
                           std::to_string(f.size()));
        t.rows.push_back({parse_number(f[0], path, rowno, 1), parse_number(f[1], path, rowno, 2),
                          parse_number(f[2], path, rowno, 3)});
    }
    if (t.rows.empty()) throw io_error(path + ": no data rows");
    return t;
}

} // namespace

void write_field_csv(const std::string& path, const GridDomain& dom, const GridField& u) {
    if (u.values.size() != dom.mask.size())
        throw std::invalid_argument("field is not aligned with the domain");
    write_csv(path, dom, "x1,x2,u", [&](FILE* f, int i, int j) {
        std::fprintf(f, "%.9g,%.9g,%.9g\n", dom.x1(i), dom.x2(j),
                     u.values[static_cast<size_t>(dom.index(i, j))]);
    });
}

void write_domain_csv(const std::string& path, const GridDomain& dom) {
    write_csv(path, dom, "x1,x2,mask", [&](FILE* f, int i, int j) {
        std::fprintf(f, "%.9g,%.9g,%d\n", dom.x1(i), dom.x2(j),
                     static_cast<int>(dom.mask[static_cast<size_t>(dom.index(i, j))]));
    });
}

GridDomain read_domain_csv(const std::string& path) {
    const CsvTable t = read_three_columns(path, "x1,x2,mask");
    GridDomain dom;
    // loaded domains carry the chart-plane grid only (enough for the
    // moving-plane harness); chart-specific data is not in the format
    dom.chart = SpaceForm(ChartKind::Euclidean, 2);
    const double y0 = t.rows[0][1];
    size_t nx = 0;
    while (nx < t.rows.size() && t.rows[nx][1] == y0) ++nx;
    if (nx < 2 || t.rows.size() % nx != 0)
        throw io_error(path + ": rows do not form a row-major rectangular grid");
    dom.nx = static_cast<int>(nx);
    dom.ny = static_cast<int>(t.rows.size() / nx);
    if (dom.ny < 2) throw io_error(path + ": grid must have at least two rows");
    dom.origin = {t.rows[0][0], t.rows[0][1]};
    dom.h = t.rows[1][0] - t.rows[0][0];
    if (!(dom.h > 0.0)) throw io_error(path + ": nonincreasing x1 coordinates");
    const double ctol = 1e-6 * dom.h;
    dom.mask.assign(t.rows.size(), 0);
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const int i = static_cast<int>(r) % dom.nx, j = static_cast<int>(r) / dom.nx;
        if (std::abs(t.rows[r][0] - dom.x1(i)) > ctol)
            throw io_error(path + ": row " + std::to_string(r + 2) + ", column 1: grid is not uniform");
        if (std::abs(t.rows[r][1] - dom.x2(j)) > ctol)
            throw io_error(path + ": row " + std::to_string(r + 2) + ", column 2: grid is not uniform");
        const double mv = t.rows[r][2];
        if (mv != 0.0 && mv != 1.0 && mv != 2.0)
            throw io_error(path + ": row " + std::to_string(r + 2) +
                           ", column 3: mask must be 0, 1 or 2");
        dom.mask[r] = static_cast<unsigned char>(mv);
    }
    for (size_t r = 0; r < dom.mask.size(); ++r)
        if (dom.mask[r] == static_cast<unsigned char>(NodeKind::Boundary))
            dom.boundary_nodes.push_back(static_cast<int>(r));
    // largest stencil width whose reach stays inside interior + ring
    dom.stencil_margin = 0;
    for (int W = 3; W >= 1; --W) {
        const auto dirs = make_directions(W);
        bool ok = true;
        for (int j = 0; j < dom.ny && ok; ++j) {
            for (int i = 0; i < dom.nx && ok; ++i) {
                if (!dom.is_interior(i, j)) continue;
                for (const Dir& e : dirs) {
                    for (int sgn : {+1, -1}) {
                        const int ii = i + sgn * e.p, jj = j + sgn * e.q;
                        if (!dom.in_bounds(ii, jj) || dom.kind(ii, jj) == NodeKind::Exterior) {
                            ok = false;
                            break;
                        }
                    }
                    if (!ok) break;
                }
            }
        }
        if (ok) {
            dom.stencil_margin = W;
            break;
        }
    }
    return dom;
}

GridField read_field_csv(const std::string& path, const GridDomain& dom) {
    const CsvTable t = read_three_columns(path, "x1,x2,u");
    if (t.rows.size() != dom.mask.size())
        throw io_error(path + ": expected " + std::to_string(dom.mask.size()) + " rows, got " +
                       std::to_string(t.rows.size()));
    const double ctol = 1e-6 * dom.h;
    GridField u;
    u.values.assign(t.rows.size(), 0.0);
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const int i = static_cast<int>(r) % dom.nx, j = static_cast<int>(r) / dom.nx;
        if (std::abs(t.rows[r][0] - dom.x1(i)) > ctol || std::abs(t.rows[r][1] - dom.x2(j)) > ctol)
            throw io_error(path + ": row " + std::to_string(r + 2) +
                           ": coordinates do not match the domain grid");
        u.values[r] = t.rows[r][2];
    }
    for (int node : dom.boundary_nodes)
        if (u.values[static_cast<size_t>(node)] != 0.0)
            throw io_error(path + ": nonzero value at a Dirichlet boundary node");
    return u;
}

} // namespace spaceform
