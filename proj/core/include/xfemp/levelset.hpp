#pragma once

/// \file levelset.hpp
/// \brief Signed-distance geometries, nodal level-set fields and edge cuts.
///
/// Sign convention: phase 1 (the matrix) has phi < 0, phase 2 (the
/// inclusion) has phi > 0.

#include <cstddef>
#include <variant>
#include <vector>

#include "xfemp/mesh.hpp"

namespace xfemp {

/// Straight interface x = offset. `phase2_right` selects which half-plane
/// is the inclusion.
struct VerticalPlane {
  double offset = 0.0;
  bool phase2_right = true;
};

/// Circular inclusion; the disc is phase 2.
struct Circle {
  Vec2 center = Vec2::Zero();
  double radius = 1.0;
};

using GeometrySpec = std::variant<VerticalPlane, Circle>;

/// Default snapping factor: phi_min = factor * sqrt(A^e / pi).
inline constexpr double kDefaultSnapFactor = 2e-9;

double sample_signed_distance(const GeometrySpec& geom, const Vec2& x);

struct LevelSetField {
  std::vector<double> phi;
  double phi_min = 0.0;
  std::size_t num_snapped = 0;

  double operator[](int node) const { return phi[static_cast<std::size_t>(node)]; }
};

double snap_threshold(double element_area, double snap_factor = kDefaultSnapFactor);

/// Samples the geometry at every node and replaces |phi_i| < phi_min by
/// -phi_min. Throws std::invalid_argument for a non-positive circle radius.
LevelSetField build_levelset(const StructuredMesh& mesh, const GeometrySpec& geom,
                             double snap_factor = kDefaultSnapFactor);

/// Zero of the linear interpolant of phi along the edge (x_a, x_b).
/// Precondition phi_a * phi_b < 0 (std::invalid_argument otherwise). The
/// result does not depend on the orientation of the edge, so neighbouring
/// elements produce bit-identical crossing points.
Vec2 edge_zero_crossing(double phi_a, double phi_b, const Vec2& x_a, const Vec2& x_b);

}  // namespace xfemp
