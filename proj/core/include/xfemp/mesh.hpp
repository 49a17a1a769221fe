#pragma once

/// \file mesh.hpp
/// \brief Structured quadrilateral meshes and the bilinear reference element.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace xfemp {

using Vec2 = Eigen::Vector2d;

/// Axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
struct Rect {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;
};

enum class BoundarySide : std::uint8_t { Left = 0, Right = 1, Bottom = 2, Top = 3 };

inline constexpr std::array<BoundarySide, 4> kAllSides = {
    BoundarySide::Left, BoundarySide::Right, BoundarySide::Bottom, BoundarySide::Top};

const char* to_string(BoundarySide side);

/// Element edge lying on the domain boundary. `local_edge` k joins local
/// nodes k and (k+1) mod 4.
struct BoundaryEdge {
  BoundarySide side;
  int element;
  int local_edge;
  std::array<int, 2> nodes;
};

class DegenerateElementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform nx-by-ny mesh of bilinear quadrilaterals. Nodes are numbered
/// x-fastest; element nodes are counter-clockwise from the lower-left corner.
/// Immutable after construction.
class StructuredMesh {
 public:
  StructuredMesh(int nx, int ny, const Rect& bounds);

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  const Rect& bounds() const noexcept { return bounds_; }
  double hx() const noexcept { return hx_; }
  double hy() const noexcept { return hy_; }
  double element_area() const noexcept { return hx_ * hy_; }

  int num_nodes() const noexcept { return (nx_ + 1) * (ny_ + 1); }
  int num_elements() const noexcept { return nx_ * ny_; }

  const Vec2& node(int i) const { return coords_[static_cast<std::size_t>(i)]; }
  int node_id(int ix, int iy) const noexcept { return iy * (nx_ + 1) + ix; }
  int element_id(int ex, int ey) const noexcept { return ey * nx_ + ex; }

  std::array<int, 4> element_nodes(int e) const;
  std::array<Vec2, 4> element_coords(int e) const;
  Vec2 element_center(int e) const;

  /// Elements sharing node i (the support patch E_i), ascending ids.
  std::span<const int> elements_of_node(int i) const;

  /// Bit set over BoundarySide (1 << side) of the sides a node lies on.
  std::uint8_t boundary_flags(int i) const { return boundary_flags_[static_cast<std::size_t>(i)]; }
  bool on_side(int i, BoundarySide side) const {
    return (boundary_flags(i) & (1u << static_cast<unsigned>(side))) != 0;
  }

  std::vector<BoundaryEdge> boundary_edges(BoundarySide side) const;

  /// Element containing x (points on shared edges go to the lower/left
  /// element index after clamping), or -1 when x lies outside the domain.
  int locate(const Vec2& x, double tol = 1e-12) const;

  /// Reference coordinates (xi, eta) of x within element e.
  Vec2 to_reference(int e, const Vec2& x) const;

 private:
  int nx_;
  int ny_;
  Rect bounds_;
  double hx_;
  double hy_;
  std::vector<Vec2> coords_;
  std::vector<std::uint8_t> boundary_flags_;
  std::vector<int> node_elem_offsets_;
  std::vector<int> node_elems_;
};

StructuredMesh build_structured_mesh(int nx, int ny, const Rect& bounds);

/// Bilinear basis values on [-1,1]^2 in local node order.
std::array<double, 4> shape_values(double xi, double eta);

/// Reference-coordinate derivatives (dN/dxi, dN/deta) per local node.
std::array<Vec2, 4> shape_derivatives(double xi, double eta);

struct ShapeGradients {
  std::array<Vec2, 4> grad;
  double det_j = 0.0;
};

/// Physical gradients of the bilinear basis at (xi, eta) for the element
/// with the given corner coordinates. Throws DegenerateElementError when the
/// Jacobian determinant is not positive.
ShapeGradients shape_gradients(double xi, double eta, const std::array<Vec2, 4>& element_coords);

}  // namespace xfemp
