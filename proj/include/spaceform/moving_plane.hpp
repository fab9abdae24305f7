#pragma once

#include "spaceform/grid.hpp"

#include <optional>
#include <string>

namespace spaceform {

enum class StopSituation { Tangency, Corner, Exhausted };

struct MovingPlaneReport {
    int direction = +1; // +1: plane comes from large x1, -1: from small x1
    double s_star = 0.0;
    StopSituation situation = StopSituation::Exhausted;
    double w_sup_at_star = 0.0;
    double tol = 0.0;
    bool symmetric = false;
    std::optional<Eigen::Vector2d> corner_point;
};

/// u(R_s(x)) over Sigma_s = {x1 > s} intersected with the interior;
/// bilinear interpolation where the reflection is not node-aligned. Nodes
/// whose reflection leaves the solved region are flagged 0 in `valid`.
GridField reflected_field(const GridField& u, const GridDomain& dom, double s,
                          std::vector<unsigned char>* valid = nullptr);

/// w_s(x) = u(R_s(x)) - u(x) on Sigma_s.
GridField w_field(const GridField& u, const GridDomain& dom, double s,
                  std::vector<unsigned char>* valid = nullptr);

/// Discrete moving-plane sweep: decreases s from the far extent in h/2
/// steps, guarding (a) the reflected cap stays inside the interior and
/// (b) the outward normal on T_s keeps a positive e1 component; refines
/// the stopping position by bisection and classifies the situation.
MovingPlaneReport find_critical_s(const GridField& u, const GridDomain& dom, double tol,
                                  int direction = +1);

struct CornerGrowth {
    double fit = 0.0; // NaN when w vanishes at the corner
    bool consistent = false;
    std::vector<std::pair<double, double>> samples; // (t, w)
};

/// Samples w_{s*} along a direction entering the cap at geometric radii
/// from the corner point and fits the growth exponent; consistency means
/// fit within [beta - 0.2, 2 + alpha + 0.2].
CornerGrowth corner_growth_check(const GridField& u, const GridDomain& dom,
                                 const MovingPlaneReport& report, double alpha, double beta);

std::string format_report(const MovingPlaneReport& report);
void write_report(const std::string& path, const MovingPlaneReport& report);
void write_corner_samples_csv(const std::string& path, const CornerGrowth& growth);

} // namespace spaceform
