#pragma once

#include "spaceform/pucci.hpp"
#include "spaceform/radial.hpp"

#include <functional>
#include <string>
#include <vector>

namespace spaceform {

enum class NodeKind : unsigned char { Exterior = 0, Interior = 1, Boundary = 2 };

/// Masked 2-D chart grid. Interior nodes carry unknowns; boundary nodes are
/// the exterior ring reachable by the stencil and carry Dirichlet value 0.
/// When the domain was built from a level set, `level` (< 0 inside) is kept
/// so the solver can place fractional-arm boundary closures exactly on the
/// zero set.
struct GridDomain {
    SpaceForm chart;
    Eigen::Vector2d origin{0.0, 0.0};
    double h = 0.0;
    int nx = 0, ny = 0;
    int stencil_margin = 0; // ring was built for stencil widths <= this
    std::vector<unsigned char> mask; // NodeKind per node, size nx*ny
    std::vector<int> boundary_nodes; // flat indices of the ring
    std::function<double(double, double)> level; // may be empty

    GridDomain() : chart(ChartKind::Euclidean, 2) {}

    int index(int i, int j) const { return j * nx + i; }
    double x1(int i) const { return origin[0] + i * h; }
    double x2(int j) const { return origin[1] + j * h; }
    bool in_bounds(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
    NodeKind kind(int i, int j) const { return static_cast<NodeKind>(mask[index(i, j)]); }
    bool is_interior(int i, int j) const { return kind(i, j) == NodeKind::Interior; }
    long interior_count() const;
};

/// Nodal field aligned with a GridDomain (exterior entries are zero).
struct GridField {
    std::vector<double> values;
};

struct SolverConfig {
    int W = 3;                 // max integer offset of the direction family
    double tol = 1e-8;         // sup-norm residual target
    int max_policy_iters = 60;
    double linear_tol = 1e-12; // relative tolerance of the inner solves

    void validate() const;
};

struct SolveStats {
    int policy_iterations = 0;
    double residual_sup = 0.0;
    bool converged = false;
};

/// Geodesic ball {dist(x, center) < R}; mask is exactly symmetric under
/// x1-reflection through the center (the center sits on a node).
GridDomain build_geodesic_ball(const SpaceForm& chart, const Eigen::Vector2d& center, double R,
                               double h, int W = 3);

/// Chart-coordinate ellipse ((x1-c1)/a)^2 + ((x2-c2)/b)^2 < 1; the
/// non-ball domain used by the symmetry experiments.
GridDomain build_ellipse_domain(const SpaceForm& chart, const Eigen::Vector2d& center, double a,
                                double b, double h, int W = 3);

/// Wide-stencil extremal operator F^{sign}_h applied to u, one value per
/// interior node (zero elsewhere).
GridField discrete_pucci_residual(const GridField& u, const GridDomain& dom,
                                  const PucciParams& p, PucciSign sign, const SolverConfig& cfg);

/// Policy (Howard) iteration for F^{sign}(grad^2_g u, grad_g u) + c - b u = 0,
/// u = 0 on the boundary closure.
GridField howard_solve(const GridDomain& dom, const PucciParams& p, AffineSource source,
                       PucciSign sign, const SolverConfig& cfg, SolveStats* stats = nullptr);

struct BoundaryGradientSample {
    int node;       // flat index of the ring node
    double x1, x2;  // boundary crossing point
    double value;   // |grad_g u|_g there
};

/// One-sided second-order normal derivative per boundary node, referenced
/// to the true boundary crossing and scaled to the Riemannian norm.
std::vector<BoundaryGradientSample> boundary_gradient_profile(const GridField& u,
                                                              const GridDomain& dom);

/// Bilinear interpolation of u at a chart point. Corners that carry weight
/// must be interior or boundary nodes; returns false otherwise.
bool interpolate_field(const GridDomain& dom, const GridField& u, double x1, double x2,
                       double* out);

/// Signed-distance approximation built from the mask alone (positive
/// inside, chart-coordinate units); accurate near the interface.
std::vector<double> mask_signed_distance(const GridDomain& dom);

// CSV formats: field "x1,x2,u", domain "x1,x2,mask"; one node per row,
// row-major, 9 significant digits.
void write_field_csv(const std::string& path, const GridDomain& dom, const GridField& u);
void write_domain_csv(const std::string& path, const GridDomain& dom);
GridDomain read_domain_csv(const std::string& path);
GridField read_field_csv(const std::string& path, const GridDomain& dom);

} // namespace spaceform
