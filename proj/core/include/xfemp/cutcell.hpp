#pragma once

/// \file cutcell.hpp
/// \brief Interface-aligned triangulation of cut quadrilaterals and the
/// quadrature rules used on sub-triangles and interface segments.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "xfemp/levelset.hpp"
#include "xfemp/mesh.hpp"

namespace xfemp {

enum class Phase : std::uint8_t { One = 1, Two = 2 };

inline Phase phase_of(double phi) { return phi > 0.0 ? Phase::Two : Phase::One; }
inline int phase_index(Phase p) { return p == Phase::One ? 0 : 1; }
inline int phase_number(Phase p) { return static_cast<int>(p); }

struct Triangle {
  std::array<Vec2, 3> v;
  Phase phase = Phase::One;
  int region = 0;

  double area() const;
  Vec2 centroid() const { return (v[0] + v[1] + v[2]) / 3.0; }
};

/// Straight piece of the interface inside one element. `normal` is a unit
/// vector pointing from the phase-1 side into the phase-2 side.
struct InterfaceSegment {
  std::array<Vec2, 2> ends;
  Vec2 normal;
  int region1 = -1;  ///< region on the phase-1 side
  int region2 = -1;  ///< region on the phase-2 side

  double length() const { return (ends[1] - ends[0]).norm(); }
};

/// Part of an element edge owned by a single region.
struct EdgePiece {
  std::array<Vec2, 2> ends;
  int region = -1;
};

/// Connected single-phase subregion of an element (a convex polygon).
struct Region {
  Phase phase = Phase::One;
  std::vector<Vec2> polygon;  ///< counter-clockwise
  double area = 0.0;
};

struct ElementPartition {
  int element_id = -1;
  std::vector<Region> regions;
  std::vector<Triangle> triangles;
  std::vector<InterfaceSegment> interface_segments;
  std::array<int, 4> node_region{};  ///< region containing each corner node
  std::array<std::vector<EdgePiece>, 4> edge_pieces;  ///< local edge k: nodes k -> k+1

  bool is_cut() const { return regions.size() > 1; }
  double area() const;
};

/// Splits a quadrilateral by the straight-line zero set of phi along its
/// edges. Diagonal sign patterns are resolved with the sign of the bilinear
/// interpolant at the element centroid. All nodal values must be non-zero.
ElementPartition partition_element(const std::array<Vec2, 4>& element_coords,
                                   const std::array<double, 4>& nodal_phi, int element_id = -1);

std::vector<ElementPartition> partition_mesh(const StructuredMesh& mesh, const LevelSetField& levelset);

double phase_area(const ElementPartition& partition, Phase phase);

struct QuadraturePoint {
  Vec2 x;
  double w = 0.0;
};
using QuadratureRule = std::vector<QuadraturePoint>;

/// Symmetric positive-weight rule exact for polynomials of degree `order`
/// (1, 2 or 3). Throws std::invalid_argument for a non-positive area.
QuadratureRule triangle_quadrature(const std::array<Vec2, 3>& triangle, int order);

/// Gauss-Legendre rule with `points` nodes (1..5). Zero-length segments
/// yield an empty rule.
QuadratureRule segment_quadrature(const Vec2& a, const Vec2& b, int points);

inline constexpr int kTriangleOrder = 2;
inline constexpr int kInterfacePoints = 3;

}  // namespace xfemp
