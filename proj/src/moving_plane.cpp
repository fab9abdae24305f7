#include "spaceform/moving_plane.hpp"

#include "spaceform/cone.hpp"
#include "spaceform/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace spaceform {

namespace {

constexpr double kNormalTieTol = 1e-6;

struct MirrorPair {
    GridDomain dom;
    GridField u;
    double mid; // reflection axis used for the index mirror
};

// Index mirror i -> nx-1-i; lets the -e1 sweep reuse the +e1 machinery.
MirrorPair mirror(const GridDomain& dom, const GridField& u) {
    MirrorPair out;
    out.dom = dom;
    out.dom.level = nullptr;
    out.u.values.assign(u.values.size(), 0.0);
    out.dom.boundary_nodes.clear();
    for (int j = 0; j < dom.ny; ++j) {
        for (int i = 0; i < dom.nx; ++i) {
            const int src = dom.index(i, j);
            const int dst = dom.index(dom.nx - 1 - i, j);
            out.dom.mask[static_cast<size_t>(dst)] = dom.mask[static_cast<size_t>(src)];
            out.u.values[static_cast<size_t>(dst)] = u.values[static_cast<size_t>(src)];
        }
    }
    for (size_t n = 0; n < out.dom.mask.size(); ++n)
        if (out.dom.mask[n] == static_cast<unsigned char>(NodeKind::Boundary))
            out.dom.boundary_nodes.push_back(static_cast<int>(n));
    out.mid = dom.origin[0] + 0.5 * (dom.nx - 1) * dom.h;
    return out;
}

struct NormalField {
    std::vector<double> nu1, nu2;
    std::vector<unsigned char> ok;
};

NormalField boundary_normals(const GridDomain& dom) {
    const std::vector<double> sd = mask_signed_distance(dom);
    NormalField nf;
    nf.nu1.assign(dom.mask.size(), 0.0);
    nf.nu2.assign(dom.mask.size(), 0.0);
    nf.ok.assign(dom.mask.size(), 0);
    for (int node : dom.boundary_nodes) {
        const int i = node % dom.nx, j = node / dom.nx;
        if (i <= 0 || j <= 0 || i + 1 >= dom.nx || j + 1 >= dom.ny) continue;
        const double gx = (sd[static_cast<size_t>(dom.index(i + 1, j))] -
                           sd[static_cast<size_t>(dom.index(i - 1, j))]) /
                          (2.0 * dom.h);
        const double gy = (sd[static_cast<size_t>(dom.index(i, j + 1))] -
                           sd[static_cast<size_t>(dom.index(i, j - 1))]) /
                          (2.0 * dom.h);
        const double gn = std::hypot(gx, gy);
        if (!(gn > 0.0)) continue;
        // sd grows inward, the outward normal is -grad sd
        nf.nu1[static_cast<size_t>(node)] = -gx / gn;
        nf.nu2[static_cast<size_t>(node)] = -gy / gn;
        nf.ok[static_cast<size_t>(node)] = 1;
    }
    return nf;
}

enum class Violation { None, Cap, Normal };

// Guards at plane position s. (a) every interior node of Sigma_s must
// reflect into the interior; (b) the outward normal at boundary nodes on
// T_s must keep <nu, e1> above the tie tolerance.
Violation guards_at(const GridDomain& dom, const NormalField& nf, double s, int* corner_node) {
    const double fuzz = 1e-9 * dom.h;
    for (int node : dom.boundary_nodes) {
        const int i = node % dom.nx;
        if (std::abs(dom.x1(i) - s) <= 0.5 * dom.h + fuzz && nf.ok[static_cast<size_t>(node)] &&
            nf.nu1[static_cast<size_t>(node)] <= kNormalTieTol) {
            if (corner_node) *corner_node = node;
            return Violation::Normal;
        }
    }
    for (int j = 0; j < dom.ny; ++j) {
        for (int i = 0; i < dom.nx; ++i) {
            if (!dom.is_interior(i, j)) continue;
            const double x1 = dom.x1(i);
            if (x1 <= s + fuzz) continue;
            const double xr = 2.0 * s - x1;
            const double fir = (xr - dom.origin[0]) / dom.h;
            const int ir = static_cast<int>(std::lround(fir));
            if (!dom.in_bounds(ir, j) || !dom.is_interior(ir, j)) return Violation::Cap;
        }
    }
    return Violation::None;
}

double w_sup_at(const GridField& u, const GridDomain& dom, double s) {
    std::vector<unsigned char> valid;
    const GridField w = w_field(u, dom, s, &valid);
    double sup = 0.0;
    for (size_t n = 0; n < w.values.size(); ++n)
        if (valid[n]) sup = std::max(sup, std::abs(w.values[n]));
    return sup;
}

MovingPlaneReport sweep_from_right(const GridField& u, const GridDomain& dom, double tol) {
    if (dom.interior_count() == 0)
        throw std::invalid_argument("moving plane: degenerate domain with no interior nodes");

    double dmax = -std::numeric_limits<double>::infinity();
    double dmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < dom.ny; ++j) {
        for (int i = 0; i < dom.nx; ++i) {
            if (dom.kind(i, j) == NodeKind::Exterior) continue;
            dmax = std::max(dmax, dom.x1(i));
            dmin = std::min(dmin, dom.x1(i));
        }
    }
    const NormalField nf = boundary_normals(dom);

    MovingPlaneReport rep;
    rep.direction = +1;
    rep.tol = tol;

    const double half = 0.5 * dom.h;
    long k = static_cast<long>(std::floor((dmax - dom.origin[0]) / half));
    const long k_end = static_cast<long>(std::ceil((dmin - dom.origin[0]) / half)) - 1;
    double s_prev = dmax;
    Violation hit = Violation::None;
    int corner_node = -1;
    double s_hit = dmin;
    for (; k >= k_end; --k) {
        const double s = dom.origin[0] + k * half;
        if (s >= dmax) continue;
        hit = guards_at(dom, nf, s, &corner_node);
        if (hit != Violation::None) {
            s_hit = s;
            break;
        }
        s_prev = s;
    }

    if (hit == Violation::None) {
        rep.situation = StopSituation::Exhausted;
        rep.s_star = dmax;
        rep.w_sup_at_star = w_sup_at(u, dom, dmax);
        rep.symmetric = rep.w_sup_at_star <= tol;
        return rep;
    }

    // refine the threshold position inside (s_hit, s_prev]
    double lo = s_hit, hi = s_prev;
    for (int it = 0; it < 12 && hi - lo > dom.h / 256.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (guards_at(dom, nf, mid, nullptr) != Violation::None)
            lo = mid;
        else
            hi = mid;
    }
    rep.s_star = 0.5 * (lo + hi);
    rep.situation = hit == Violation::Normal ? StopSituation::Corner : StopSituation::Tangency;
    if (hit == Violation::Normal && corner_node >= 0) {
        const int i = corner_node % dom.nx, j = corner_node / dom.nx;
        rep.corner_point = Eigen::Vector2d(dom.x1(i), dom.x2(j));
    }
    rep.w_sup_at_star = w_sup_at(u, dom, rep.s_star);
    rep.symmetric = rep.w_sup_at_star <= tol;
    return rep;
}

} // namespace

GridField reflected_field(const GridField& u, const GridDomain& dom, double s,
                          std::vector<unsigned char>* valid) {
    if (u.values.size() != dom.mask.size())
        throw std::invalid_argument("field is not aligned with the domain");
    GridField out;
    out.values.assign(dom.mask.size(), 0.0);
    if (valid) valid->assign(dom.mask.size(), 0);
    const double fuzz = 1e-9 * dom.h;
    for (int j = 0; j < dom.ny; ++j) {
        for (int i = 0; i < dom.nx; ++i) {
            if (!dom.is_interior(i, j)) continue;
            const double x1 = dom.x1(i);
            if (x1 <= s + fuzz) continue;
            double v = 0.0;
            if (interpolate_field(dom, u, 2.0 * s - x1, dom.x2(j), &v)) {
                out.values[static_cast<size_t>(dom.index(i, j))] = v;
                if (valid) (*valid)[static_cast<size_t>(dom.index(i, j))] = 1;
            }
        }
    }
    return out;
}

GridField w_field(const GridField& u, const GridDomain& dom, double s,
                  std::vector<unsigned char>* valid) {
    std::vector<unsigned char> local;
    std::vector<unsigned char>& flags = valid ? *valid : local;
    GridField w = reflected_field(u, dom, s, &flags);
    for (size_t n = 0; n < w.values.size(); ++n)
        if (flags[n]) w.values[n] -= u.values[n];
    return w;
}

MovingPlaneReport find_critical_s(const GridField& u, const GridDomain& dom, double tol,
                                  int direction) {
    if (!(tol > 0.0)) throw std::invalid_argument("find_critical_s: tol must be > 0");
    if (direction != +1 && direction != -1)
        throw std::invalid_argument("find_critical_s: direction must be +1 or -1");
    if (direction == +1) return sweep_from_right(u, dom, tol);
    const MirrorPair m = mirror(dom, u);
    MovingPlaneReport rep = sweep_from_right(m.u, m.dom, tol);
    rep.direction = -1;
    rep.s_star = 2.0 * m.mid - rep.s_star;
    if (rep.corner_point)
        rep.corner_point = Eigen::Vector2d(2.0 * m.mid - (*rep.corner_point)[0], (*rep.corner_point)[1]);
    return rep;
}

CornerGrowth corner_growth_check(const GridField& u, const GridDomain& dom,
                                 const MovingPlaneReport& report, double alpha, double beta) {
    if (report.situation != StopSituation::Corner || !report.corner_point)
        throw std::invalid_argument("corner_growth_check: report does not carry a corner point");

    const Eigen::Vector2d q = *report.corner_point;
    const double s = report.s_star;
    const int dirsign = report.direction;

    // inward direction from the mask geometry at the corner
    const NormalField nf = boundary_normals(dom);
    const int iq = static_cast<int>(std::lround((q[0] - dom.origin[0]) / dom.h));
    const int jq = static_cast<int>(std::lround((q[1] - dom.origin[1]) / dom.h));
    Eigen::Vector2d inward(0.0, 0.0);
    if (dom.in_bounds(iq, jq) && nf.ok[static_cast<size_t>(dom.index(iq, jq))]) {
        inward = {-nf.nu1[static_cast<size_t>(dom.index(iq, jq))],
                  -nf.nu2[static_cast<size_t>(dom.index(iq, jq))]};
    }
    Eigen::Vector2d e = inward + Eigen::Vector2d(static_cast<double>(dirsign), 0.0);
    if (e.norm() < 1e-12) e = Eigen::Vector2d(static_cast<double>(dirsign), 0.0);
    e.normalize();

    auto w_at = [&](double t, double* out) {
        const Eigen::Vector2d pt = q + t * e;
        if (dirsign * (pt[0] - s) <= 0.0) return false;
        double a = 0.0, b = 0.0;
        if (!interpolate_field(dom, u, 2.0 * s - pt[0], pt[1], &a)) return false;
        if (!interpolate_field(dom, u, pt[0], pt[1], &b)) return false;
        *out = a - b;
        return true;
    };

    CornerGrowth growth;
    const double t_min = 3.5 * dom.h;
    double t_max = 0.45 * std::min(dom.nx, dom.ny) * dom.h;
    double probe = 0.0;
    while (t_max > t_min && !w_at(t_max, &probe)) t_max *= 0.8;
    for (double t = t_max; t >= t_min; t *= 0.7) {
        double w = 0.0;
        if (w_at(t, &w)) growth.samples.emplace_back(t, w);
    }

    double wmax = 0.0;
    for (const auto& [t, w] : growth.samples) wmax = std::max(wmax, std::abs(w));
    if (growth.samples.empty() || wmax <= report.tol) {
        // the symmetric branch: nothing to measure
        growth.fit = std::numeric_limits<double>::quiet_NaN();
        growth.consistent = true;
        return growth;
    }

    std::vector<std::pair<double, double>> positive;
    for (const auto& [t, w] : growth.samples)
        if (w > 0.0) positive.emplace_back(t, w);
    if (positive.size() < 3)
        throw convergence_error("corner_growth_check: fewer than 3 usable radii");
    growth.fit = growth_exponent_fit(positive);
    growth.consistent = growth.fit >= beta - 0.2 && growth.fit <= 2.0 + alpha + 0.2;
    return growth;
}

std::string format_report(const MovingPlaneReport& report) {
    char buf[256];
    std::string out;
    out += std::string("direction = ") + (report.direction > 0 ? "+e1" : "-e1") + "\n";
    std::snprintf(buf, sizeof buf, "s_star = %.9g\n", report.s_star);
    out += buf;
    const char* sit = report.situation == StopSituation::Tangency   ? "Tangency"
                      : report.situation == StopSituation::Corner ? "Corner"
                                                                  : "Exhausted";
    out += std::string("situation = ") + sit + "\n";
    std::snprintf(buf, sizeof buf, "w_sup_at_star = %.9g\n", report.w_sup_at_star);
    out += buf;
    std::snprintf(buf, sizeof buf, "tol = %.9g\n", report.tol);
    out += buf;
    out += std::string("symmetric = ") + (report.symmetric ? "true" : "false") + "\n";
    if (report.corner_point) {
        std::snprintf(buf, sizeof buf, "corner_point = (%.9g, %.9g)\n", (*report.corner_point)[0],
                      (*report.corner_point)[1]);
        out += buf;
    }
    return out;
}

void write_report(const std::string& path, const MovingPlaneReport& report) {
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw io_error("cannot open '" + path + "' for writing");
    const std::string text = format_report(report);
    std::fputs(text.c_str(), f);
    if (std::fclose(f) != 0) throw io_error("error writing '" + path + "'");
}

void write_corner_samples_csv(const std::string& path, const CornerGrowth& growth) {
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw io_error("cannot open '" + path + "' for writing");
    std::fprintf(f, "t,w\n");
    for (const auto& [t, w] : growth.samples) std::fprintf(f, "%.9g,%.9g\n", t, w);
    if (std::fclose(f) != 0) throw io_error("error writing '" + path + "'");
}

} // namespace spaceform
