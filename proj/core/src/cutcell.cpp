#include "xfemp/cutcell.hpp"

#include <cmath>
#include <stdexcept>

namespace xfemp {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double polygon_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t j = 1; j + 1 < poly.size(); ++j) a += 0.5 * cross(poly[j] - poly[0], poly[j + 1] - poly[0]);
  return a;
}

struct CyclePoint {
  Vec2 x;
  int node = -1;  ///< local node, or -1 for an edge crossing
  int edge = -1;  ///< edge index for crossings
};

}  // namespace

double Triangle::area() const { return 0.5 * cross(v[1] - v[0], v[2] - v[0]); }

double ElementPartition::area() const {
  double a = 0.0;
  for (const auto& r : regions) a += r.area;
  return a;
}

ElementPartition partition_element(const std::array<Vec2, 4>& xs, const std::array<double, 4>& phi,
                                   int element_id) {
  ElementPartition part;
  part.element_id = element_id;

  std::vector<CyclePoint> cycle;
  std::array<int, 4> crossing_at_edge = {-1, -1, -1, -1};
  for (int k = 0; k < 4; ++k) {
    const int k1 = (k + 1) % 4;
    cycle.push_back({xs[static_cast<std::size_t>(k)], k, -1});
    if (phase_of(phi[static_cast<std::size_t>(k)]) != phase_of(phi[static_cast<std::size_t>(k1)])) {
      crossing_at_edge[static_cast<std::size_t>(k)] = static_cast<int>(cycle.size());
      cycle.push_back({edge_zero_crossing(phi[static_cast<std::size_t>(k)], phi[static_cast<std::size_t>(k1)],
                                          xs[static_cast<std::size_t>(k)], xs[static_cast<std::size_t>(k1)]),
                       -1, k});
    }
  }

  std::vector<int> crossings;
  for (int i = 0; i < static_cast<int>(cycle.size()); ++i)
    if (cycle[static_cast<std::size_t>(i)].node < 0) crossings.push_back(i);

  // Each region is a list of cycle indices (counter-clockwise).
  std::vector<std::vector<int>> region_idx;
  std::vector<std::array<int, 2>> chords;  // pairs of cycle indices
  const auto n_cycle = static_cast<int>(cycle.size());
  if (crossings.empty()) {
    region_idx.push_back({0, 1, 2, 3});
  } else if (crossings.size() == 2) {
    const int i1 = crossings[0];
    const int i2 = crossings[1];
    std::vector<int> a;
    std::vector<int> b;
    for (int i = i1; i <= i2; ++i) a.push_back(i);
    for (int i = i2; i != i1; i = (i + 1) % n_cycle) b.push_back(i);
    b.push_back(i1);
    region_idx.push_back(std::move(a));
    region_idx.push_back(std::move(b));
    chords.push_back({i2, i1});
  } else {
    // Diagonal pattern: nodes 0/2 share a phase, nodes 1/3 the other.
    const double center = 0.25 * (phi[0] + phi[1] + phi[2] + phi[3]);
    const Phase connected = center > 0.0 ? Phase::Two : Phase::One;
    const bool cut_odd = phase_of(phi[0]) == connected;  // isolate corners 1 and 3
    const std::array<int, 2> corners = cut_odd ? std::array<int, 2>{1, 3} : std::array<int, 2>{0, 2};
    std::vector<int> central;
    std::vector<bool> is_corner_node(static_cast<std::size_t>(n_cycle), false);
    for (int c : corners) {
      int node_pos = -1;
      for (int i = 0; i < n_cycle; ++i)
        if (cycle[static_cast<std::size_t>(i)].node == c) node_pos = i;
      const int before = crossing_at_edge[static_cast<std::size_t>((c + 3) % 4)];
      const int after = crossing_at_edge[static_cast<std::size_t>(c)];
      region_idx.push_back({before, node_pos, after});
      chords.push_back({after, before});
      is_corner_node[static_cast<std::size_t>(node_pos)] = true;
    }
    for (int i = 0; i < n_cycle; ++i)
      if (!is_corner_node[static_cast<std::size_t>(i)]) central.push_back(i);
    region_idx.insert(region_idx.begin(), std::move(central));
  }

  // Region phases, polygons, node ownership.
  for (std::size_t r = 0; r < region_idx.size(); ++r) {
    Region reg;
    bool phase_set = false;
    for (int i : region_idx[r]) {
      const auto& cp = cycle[static_cast<std::size_t>(i)];
      reg.polygon.push_back(cp.x);
      if (cp.node >= 0) {
        reg.phase = phase_of(phi[static_cast<std::size_t>(cp.node)]);
        phase_set = true;
        part.node_region[static_cast<std::size_t>(cp.node)] = static_cast<int>(r);
      }
    }
    if (!phase_set) throw std::logic_error("partition_element: region without a corner node");
    reg.area = polygon_area(reg.polygon);
    part.regions.push_back(std::move(reg));
  }

  for (std::size_t r = 0; r < part.regions.size(); ++r) {
    const auto& poly = part.regions[r].polygon;
    for (std::size_t j = 1; j + 1 < poly.size(); ++j) {
      part.triangles.push_back({{poly[0], poly[j], poly[j + 1]}, part.regions[r].phase, static_cast<int>(r)});
    }
  }

  // Interface segments: each chord separates the two regions that contain it.
  for (const auto& ch : chords) {
    InterfaceSegment seg;
    seg.ends = {cycle[static_cast<std::size_t>(ch[0])].x, cycle[static_cast<std::size_t>(ch[1])].x};
    int ra = -1;
    int rb = -1;
    for (std::size_t r = 0; r < region_idx.size(); ++r) {
      bool has0 = false;
      bool has1 = false;
      for (int i : region_idx[r]) {
        has0 = has0 || i == ch[0];
        has1 = has1 || i == ch[1];
      }
      if (has0 && has1) (ra < 0 ? ra : rb) = static_cast<int>(r);
    }
    if (part.regions[static_cast<std::size_t>(ra)].phase == Phase::One) {
      seg.region1 = ra;
      seg.region2 = rb;
    } else {
      seg.region1 = rb;
      seg.region2 = ra;
    }
    const Vec2 t = seg.ends[1] - seg.ends[0];
    Vec2 n(t.y(), -t.x());
    n /= n.norm();
    // Any polygon vertex of the phase-2 region off the chord fixes the side.
    const auto& poly2 = part.regions[static_cast<std::size_t>(seg.region2)].polygon;
    double side = 0.0;
    for (const auto& p : poly2) {
      const double s = n.dot(p - seg.ends[0]);
      if (std::abs(s) > std::abs(side)) side = s;
    }
    if (side < 0.0) n = -n;
    seg.normal = n;
    part.interface_segments.push_back(seg);
  }

  for (int k = 0; k < 4; ++k) {
    const int k1 = (k + 1) % 4;
    auto& pieces = part.edge_pieces[static_cast<std::size_t>(k)];
    const Vec2& a = xs[static_cast<std::size_t>(k)];
    const Vec2& b = xs[static_cast<std::size_t>(k1)];
    const int ci = crossing_at_edge[static_cast<std::size_t>(k)];
    if (ci < 0) {
      pieces.push_back({{a, b}, part.node_region[static_cast<std::size_t>(k)]});
    } else {
      const Vec2& c = cycle[static_cast<std::size_t>(ci)].x;
      pieces.push_back({{a, c}, part.node_region[static_cast<std::size_t>(k)]});
      pieces.push_back({{c, b}, part.node_region[static_cast<std::size_t>(k1)]});
    }
  }
  return part;
}

std::vector<ElementPartition> partition_mesh(const StructuredMesh& mesh, const LevelSetField& ls) {
  std::vector<ElementPartition> parts;
  parts.reserve(static_cast<std::size_t>(mesh.num_elements()));
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    const std::array<double, 4> phi = {ls[nodes[0]], ls[nodes[1]], ls[nodes[2]], ls[nodes[3]]};
    parts.push_back(partition_element(mesh.element_coords(e), phi, e));
  }
  return parts;
}

double phase_area(const ElementPartition& partition, Phase phase) {
  double a = 0.0;
  for (const auto& r : partition.regions)
    if (r.phase == phase) a += r.area;
  return a;
}

QuadratureRule triangle_quadrature(const std::array<Vec2, 3>& t, int order) {
  const double area = 0.5 * cross(t[1] - t[0], t[2] - t[0]);
  if (!(area > 0.0) || !std::isfinite(area)) {
    throw std::invalid_argument("triangle_quadrature: degenerate or negatively oriented triangle");
  }
  auto at = [&](double l1, double l2) { return Vec2((1.0 - l1 - l2) * t[0] + l1 * t[1] + l2 * t[2]); };
  QuadratureRule rule;
  switch (order) {
    case 1:
      rule.push_back({at(1.0 / 3.0, 1.0 / 3.0), area});
      break;
    case 2: {
      const double a = 1.0 / 6.0;
      const double b = 2.0 / 3.0;
      rule.push_back({at(a, a), area / 3.0});
      rule.push_back({at(b, a), area / 3.0});
      rule.push_back({at(a, b), area / 3.0});
      break;
    }
    case 3: {
      // Six-point symmetric rule (degree 4).
      const double a = 0.445948490915965;
      const double wa = 0.223381589678011;
      const double b = 0.091576213509771;
      const double wb = 1.0 / 3.0 - wa;  // 0.109951743655322
      for (const auto& [l, w] : {std::pair{a, wa}, std::pair{b, wb}}) {
        const double m = 1.0 - 2.0 * l;
        rule.push_back({at(l, l), w * area});
        rule.push_back({at(m, l), w * area});
        rule.push_back({at(l, m), w * area});
      }
      break;
    }
    default:
      throw std::invalid_argument("triangle_quadrature: order must be 1, 2 or 3");
  }
  return rule;
}

QuadratureRule segment_quadrature(const Vec2& a, const Vec2& b, int points) {
  static const std::array<std::vector<std::pair<double, double>>, 5> kGauss = {{
      {{0.0, 2.0}},
      {{-0.5773502691896257645, 1.0}, {0.5773502691896257645, 1.0}},
      {{-0.7745966692414833770, 5.0 / 9.0}, {0.0, 8.0 / 9.0}, {0.7745966692414833770, 5.0 / 9.0}},
      {{-0.8611363115940525752, 0.3478548451374538574},
       {-0.3399810435848562648, 0.6521451548625461426},
       {0.3399810435848562648, 0.6521451548625461426},
       {0.8611363115940525752, 0.3478548451374538574}},
      {{-0.9061798459386639928, 0.2369268850561890875},
       {-0.5384693101056830910, 0.4786286704993664680},
       {0.0, 0.5688888888888888889},
       {0.5384693101056830910, 0.4786286704993664680},
       {0.9061798459386639928, 0.2369268850561890875}},
  }};
  if (points < 1 || points > 5) throw std::invalid_argument("segment_quadrature: 1..5 points supported");
  QuadratureRule rule;
  const double len = (b - a).norm();
  if (len == 0.0) return rule;
  for (const auto& [s, w] : kGauss[static_cast<std::size_t>(points - 1)]) {
    rule.push_back({Vec2(0.5 * (1.0 - s) * a + 0.5 * (1.0 + s) * b), 0.5 * w * len});
  }
  return rule;
}

}  // namespace xfemp
