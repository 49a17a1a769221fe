#include "xfemp/levelset.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace xfemp {

namespace {

struct DistanceVisitor {
  const Vec2& x;
  double operator()(const VerticalPlane& p) const {
    const double d = x.x() - p.offset;
    return p.phase2_right ? d : -d;
  }
  double operator()(const Circle& c) const { return c.radius - (x - c.center).norm(); }
};

bool lexicographic_less(const Vec2& a, const Vec2& b) {
  return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
}

}  // namespace

double sample_signed_distance(const GeometrySpec& geom, const Vec2& x) {
  return std::visit(DistanceVisitor{x}, geom);
}

double snap_threshold(double element_area, double snap_factor) {
  return snap_factor * std::sqrt(element_area / std::numbers::pi);
}

LevelSetField build_levelset(const StructuredMesh& mesh, const GeometrySpec& geom, double snap_factor) {
  if (!(snap_factor > 0.0)) throw std::invalid_argument("levelset: snap factor must be positive");
  if (const auto* c = std::get_if<Circle>(&geom); c != nullptr && !(c->radius > 0.0)) {
    throw std::invalid_argument("levelset: circle radius must be positive");
  }
  LevelSetField field;
  // Uniform mesh: every element has the same area.
  field.phi_min = snap_threshold(mesh.element_area(), snap_factor);
  field.phi.resize(static_cast<std::size_t>(mesh.num_nodes()));
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    double v = sample_signed_distance(geom, mesh.node(i));
    if (std::abs(v) < field.phi_min || v == 0.0) {
      v = -field.phi_min;
      ++field.num_snapped;
    }
    field.phi[static_cast<std::size_t>(i)] = v;
  }
  return field;
}

Vec2 edge_zero_crossing(double phi_a, double phi_b, const Vec2& x_a, const Vec2& x_b) {
  if (!(phi_a * phi_b < 0.0)) {
    throw std::invalid_argument("edge_zero_crossing: nodal values must have opposite signs");
  }
  if (lexicographic_less(x_b, x_a)) return edge_zero_crossing(phi_b, phi_a, x_b, x_a);
  const double t = phi_a / (phi_a - phi_b);
  return x_a + t * (x_b - x_a);
}

}  // namespace xfemp
