#include "xfemp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

namespace xfemp {

const char* to_string(BoundarySide side) {
  switch (side) {
    case BoundarySide::Left:
      return "left";
    case BoundarySide::Right:
      return "right";
    case BoundarySide::Bottom:
      return "bottom";
    case BoundarySide::Top:
      return "top";
  }
  return "?";
}

StructuredMesh::StructuredMesh(int nx, int ny, const Rect& bounds)
    : nx_(nx), ny_(ny), bounds_(bounds) {
  if (nx < 1 || ny < 1) {
    throw std::invalid_argument("mesh: element counts must be >= 1 (got " + std::to_string(nx) +
                                "x" + std::to_string(ny) + ")");
  }
  if (!(bounds.xmax > bounds.xmin) || !(bounds.ymax > bounds.ymin)) {
    throw std::invalid_argument("mesh: degenerate bounds");
  }
  hx_ = (bounds.xmax - bounds.xmin) / nx;
  hy_ = (bounds.ymax - bounds.ymin) / ny;

  const auto n = static_cast<std::size_t>(num_nodes());
  coords_.resize(n);
  boundary_flags_.assign(n, 0);
  for (int iy = 0; iy <= ny_; ++iy) {
    const double y = iy == ny_ ? bounds.ymax : bounds.ymin + iy * hy_;
    for (int ix = 0; ix <= nx_; ++ix) {
      const double x = ix == nx_ ? bounds.xmax : bounds.xmin + ix * hx_;
      const auto id = static_cast<std::size_t>(node_id(ix, iy));
      coords_[id] = Vec2(x, y);
      std::uint8_t flags = 0;
      if (ix == 0) flags |= 1u << static_cast<unsigned>(BoundarySide::Left);
      if (ix == nx_) flags |= 1u << static_cast<unsigned>(BoundarySide::Right);
      if (iy == 0) flags |= 1u << static_cast<unsigned>(BoundarySide::Bottom);
      if (iy == ny_) flags |= 1u << static_cast<unsigned>(BoundarySide::Top);
      boundary_flags_[id] = flags;
    }
  }

  // CSR node -> element adjacency.
  std::vector<int> counts(n, 0);
  for (int e = 0; e < num_elements(); ++e)
    for (int v : element_nodes(e)) ++counts[static_cast<std::size_t>(v)];
  node_elem_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) node_elem_offsets_[i + 1] = node_elem_offsets_[i] + counts[i];
  node_elems_.resize(static_cast<std::size_t>(node_elem_offsets_[n]));
  std::vector<int> fill(node_elem_offsets_.begin(), node_elem_offsets_.end() - 1);
  for (int e = 0; e < num_elements(); ++e)
    for (int v : element_nodes(e)) node_elems_[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] = e;
}

std::array<int, 4> StructuredMesh::element_nodes(int e) const {
  const int ex = e % nx_;
  const int ey = e / nx_;
  return {node_id(ex, ey), node_id(ex + 1, ey), node_id(ex + 1, ey + 1), node_id(ex, ey + 1)};
}

std::array<Vec2, 4> StructuredMesh::element_coords(int e) const {
  const auto nodes = element_nodes(e);
  return {node(nodes[0]), node(nodes[1]), node(nodes[2]), node(nodes[3])};
}

Vec2 StructuredMesh::element_center(int e) const {
  const auto c = element_coords(e);
  return 0.5 * (c[0] + c[2]);
}

std::span<const int> StructuredMesh::elements_of_node(int i) const {
  const auto b = static_cast<std::size_t>(node_elem_offsets_[static_cast<std::size_t>(i)]);
  const auto end = static_cast<std::size_t>(node_elem_offsets_[static_cast<std::size_t>(i) + 1]);
  return {node_elems_.data() + b, end - b};
}

std::vector<BoundaryEdge> StructuredMesh::boundary_edges(BoundarySide side) const {
  std::vector<BoundaryEdge> edges;
  switch (side) {
    case BoundarySide::Bottom:
      for (int ex = 0; ex < nx_; ++ex) {
        const int e = element_id(ex, 0);
        const auto nd = element_nodes(e);
        edges.push_back({side, e, 0, {nd[0], nd[1]}});
      }
      break;
    case BoundarySide::Right:
      for (int ey = 0; ey < ny_; ++ey) {
        const int e = element_id(nx_ - 1, ey);
        const auto nd = element_nodes(e);
        edges.push_back({side, e, 1, {nd[1], nd[2]}});
      }
      break;
    case BoundarySide::Top:
      for (int ex = 0; ex < nx_; ++ex) {
        const int e = element_id(ex, ny_ - 1);
        const auto nd = element_nodes(e);
        edges.push_back({side, e, 2, {nd[2], nd[3]}});
      }
      break;
    case BoundarySide::Left:
      for (int ey = 0; ey < ny_; ++ey) {
        const int e = element_id(0, ey);
        const auto nd = element_nodes(e);
        edges.push_back({side, e, 3, {nd[3], nd[0]}});
      }
      break;
  }
  return edges;
}

int StructuredMesh::locate(const Vec2& x, double tol) const {
  const double sx = (x.x() - bounds_.xmin) / hx_;
  const double sy = (x.y() - bounds_.ymin) / hy_;
  if (sx < -tol || sy < -tol || sx > nx_ + tol || sy > ny_ + tol) return -1;
  const int ex = std::clamp(static_cast<int>(std::floor(sx)), 0, nx_ - 1);
  const int ey = std::clamp(static_cast<int>(std::floor(sy)), 0, ny_ - 1);
  return element_id(ex, ey);
}

Vec2 StructuredMesh::to_reference(int e, const Vec2& x) const {
  const Vec2 c = element_center(e);
  return Vec2(2.0 * (x.x() - c.x()) / hx_, 2.0 * (x.y() - c.y()) / hy_);
}

StructuredMesh build_structured_mesh(int nx, int ny, const Rect& bounds) {
  return StructuredMesh(nx, ny, bounds);
}

namespace {
constexpr std::array<double, 4> kXiSign = {-1.0, 1.0, 1.0, -1.0};
constexpr std::array<double, 4> kEtaSign = {-1.0, -1.0, 1.0, 1.0};
}  // namespace

std::array<double, 4> shape_values(double xi, double eta) {
  std::array<double, 4> n{};
  for (std::size_t a = 0; a < 4; ++a) n[a] = 0.25 * (1.0 + kXiSign[a] * xi) * (1.0 + kEtaSign[a] * eta);
  return n;
}

std::array<Vec2, 4> shape_derivatives(double xi, double eta) {
  std::array<Vec2, 4> d;
  for (std::size_t a = 0; a < 4; ++a) {
    d[a] = Vec2(0.25 * kXiSign[a] * (1.0 + kEtaSign[a] * eta), 0.25 * kEtaSign[a] * (1.0 + kXiSign[a] * xi));
  }
  return d;
}

ShapeGradients shape_gradients(double xi, double eta, const std::array<Vec2, 4>& element_coords) {
  const auto dref = shape_derivatives(xi, eta);
  // J = [dx/dxi dx/deta; dy/dxi dy/deta]
  Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
  for (std::size_t a = 0; a < 4; ++a) jac += element_coords[a] * dref[a].transpose();
  const double det = jac.determinant();
  if (!(det > 0.0)) throw DegenerateElementError("shape_gradients: non-positive Jacobian determinant");
  const Eigen::Matrix2d inv_t = jac.inverse().transpose();
  ShapeGradients out;
  out.det_j = det;
  for (std::size_t a = 0; a < 4; ++a) out.grad[a] = inv_t * dref[a];
  return out;
}

}  // namespace xfemp
