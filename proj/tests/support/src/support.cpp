#include "xfemp_test/support.hpp"

#include "xfemp/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "xfemp/pipeline.hpp"
#include "xfemp/precond.hpp"

namespace xfemp::testing {

namespace {

std::string describe(const std::string& what, double value) {
  std::ostringstream os;
  os.precision(6);
  os << what << " (" << value << ")";
  return os.str();
}

bool lex_less(const Vec2& a, const Vec2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); }

bool same_point(const Vec2& a, const Vec2& b) { return a.x() == b.x() && a.y() == b.y(); }

bool share_full_edge(const Triangle& a, const Triangle& b) {
  int common = 0;
  for (const auto& p : a.v)
    for (const auto& q : b.v)
      if (same_point(p, q)) ++common;
  return common >= 2;
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      i = parent[static_cast<std::size_t>(i)];
    }
    return i;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

int local_index(const StructuredMesh& mesh, int element, int node) {
  const auto nodes = mesh.element_nodes(element);
  for (int a = 0; a < 4; ++a)
    if (nodes[static_cast<std::size_t>(a)] == node) return a;
  return -1;
}

double away_from_zero(double v) {
  constexpr double kGap = 1e-3;
  if (std::abs(v) >= kGap) return v;
  return v < 0.0 ? -kGap : kGap;
}

}  // namespace

LevelSetField levelset_from_values(std::vector<double> phi) {
  LevelSetField f;
  f.phi = std::move(phi);
  return f;
}

LevelSetField random_levelset(const StructuredMesh& mesh, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> phi(static_cast<std::size_t>(mesh.num_nodes()));
  const auto& b = mesh.bounds();
  if (unit(rng) < 0.5) {
    for (auto& v : phi) v = away_from_zero(2.0 * unit(rng) - 1.0);
  } else {
    const int discs = 1 + static_cast<int>(unit(rng) * 3.0);
    const double w = b.xmax - b.xmin;
    std::vector<std::pair<Vec2, double>> shapes;
    for (int k = 0; k < discs; ++k) {
      const Vec2 c(b.xmin + unit(rng) * w, b.ymin + unit(rng) * (b.ymax - b.ymin));
      shapes.emplace_back(c, (0.1 + 0.25 * unit(rng)) * w);
    }
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      double v = -std::numeric_limits<double>::infinity();
      for (const auto& [c, r] : shapes) v = std::max(v, r - (mesh.node(i) - c).norm());
      phi[static_cast<std::size_t>(i)] = away_from_zero(v);
    }
  }
  return levelset_from_values(std::move(phi));
}

CenterNodeCase center_node_case() {
  CenterNodeCase c;
  std::vector<double> phi(9, -1.0);
  phi[0] = 1.0;  // lower-left corner
  phi[2] = 1.0;  // lower-right corner
  phi[8] = 1.0;  // upper-right corner
  c.levelset = levelset_from_values(std::move(phi));
  return c;
}

std::vector<PatchComponents> flood_fill_components(const StructuredMesh& mesh,
                                                   std::span<const ElementPartition> partitions) {
  std::vector<PatchComponents> out;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    for (Phase p : {Phase::One, Phase::Two}) {
      std::vector<TriangleRef> tris;
      for (int e : mesh.elements_of_node(i)) {
        const auto& part = partitions[static_cast<std::size_t>(e)];
        for (int t = 0; t < static_cast<int>(part.triangles.size()); ++t)
          if (part.triangles[static_cast<std::size_t>(t)].phase == p) tris.push_back({e, t});
      }
      if (tris.empty()) continue;
      auto tri = [&](const TriangleRef& r) -> const Triangle& {
        return partitions[static_cast<std::size_t>(r.element)].triangles[static_cast<std::size_t>(r.triangle)];
      };
      DisjointSets sets(tris.size());
      for (std::size_t a = 0; a < tris.size(); ++a)
        for (std::size_t b = a + 1; b < tris.size(); ++b)
          if (share_full_edge(tri(tris[a]), tri(tris[b]))) sets.unite(static_cast<int>(a), static_cast<int>(b));

      std::vector<std::vector<TriangleRef>> groups;
      std::vector<int> group_of_root(tris.size(), -1);
      for (std::size_t a = 0; a < tris.size(); ++a) {
        const auto root = static_cast<std::size_t>(sets.find(static_cast<int>(a)));
        if (group_of_root[root] < 0) {
          group_of_root[root] = static_cast<int>(groups.size());
          groups.emplace_back();
        }
        groups[static_cast<std::size_t>(group_of_root[root])].push_back(tris[a]);
      }
      auto min_centroid = [&](const std::vector<TriangleRef>& g) {
        Vec2 best = tri(g.front()).centroid();
        for (const auto& r : g)
          if (lex_less(tri(r).centroid(), best)) best = tri(r).centroid();
        return best;
      };
      std::sort(groups.begin(), groups.end(),
                [&](const auto& a, const auto& b) { return lex_less(min_centroid(a), min_centroid(b)); });
      out.push_back({i, p, std::move(groups)});
    }
  }
  return out;
}

PropertyResult compare_with_flood_fill(const StructuredMesh& mesh, std::span<const ElementPartition> partitions,
                                       const EnrichmentTable& table) {
  PropertyResult res;
  const auto comps = flood_fill_components(mesh, partitions);
  int expected_total = 0;
  for (const auto& pc : comps) {
    const int n = static_cast<int>(pc.components.size());
    expected_total += n;
    const int levels = table.num_levels(pc.node, pc.phase);
    if (levels != n) {
      res.fail("node " + std::to_string(pc.node) + " phase " + std::to_string(phase_number(pc.phase)) + ": " +
               std::to_string(levels) + " levels, oracle " + std::to_string(n));
      res.worst = std::max(res.worst, static_cast<double>(std::abs(levels - n)));
      continue;
    }
    std::vector<int> seen;
    for (int k = 0; k < n; ++k) {
      int dof = -1;
      for (const auto& ref : pc.components[static_cast<std::size_t>(k)]) {
        const auto& t = partitions[static_cast<std::size_t>(ref.element)].triangles[static_cast<std::size_t>(ref.triangle)];
        const int d = table.region_dof(ref.element, t.region, local_index(mesh, ref.element, pc.node));
        if (dof < 0) dof = d;
        if (d != dof) res.fail("node " + std::to_string(pc.node) + ": one oracle component maps to several dofs");
      }
      if (std::find(seen.begin(), seen.end(), dof) != seen.end())
        res.fail("node " + std::to_string(pc.node) + ": two oracle components share a dof");
      seen.push_back(dof);
      const auto& key = table.key(dof);
      if (key.node != pc.node || key.phase != pc.phase || key.level != k + 1)
        res.fail("node " + std::to_string(pc.node) + ": dof key does not match the oracle level order");
    }
  }
  if (table.total_dofs() != expected_total) {
    res.fail("total dofs " + std::to_string(table.total_dofs()) + ", oracle " + std::to_string(expected_total));
    res.worst = std::max(res.worst, static_cast<double>(std::abs(table.total_dofs() - expected_total)));
  }
  for (int d = 0; d < table.total_dofs(); ++d)
    if (table.support(d).empty()) res.fail("dof " + std::to_string(d) + " has an empty support");
  return res;
}

double series_bar_temperature(double x, double r, double L, double k_left, double k_right, double u0, double uL) {
  const double q = (uL - u0) / (r / k_left + (L - r) / k_right);
  if (x <= r) return u0 + q * x / k_left;
  return u0 + q * r / k_left + q * (x - r) / k_right;
}

PropertyResult check_partition_of_unity(std::mt19937_64& rng, int samples) {
  PropertyResult res;
  std::uniform_real_distribution<double> ref(-1.0, 1.0);
  std::uniform_real_distribution<double> size(0.1, 5.0);
  for (int s = 0; s < samples; ++s) {
    const double xi = ref(rng);
    const double eta = ref(rng);
    const auto n = shape_values(xi, eta);
    const double sum = n[0] + n[1] + n[2] + n[3];
    const double a = size(rng);
    const double b = size(rng);
    const std::array<Vec2, 4> xs = {Vec2(0, 0), Vec2(a, 0), Vec2(a, b), Vec2(0, b)};
    const auto g = shape_gradients(xi, eta, xs);
    const Vec2 gsum = g.grad[0] + g.grad[1] + g.grad[2] + g.grad[3];
    res.worst = std::max({res.worst, std::abs(sum - 1.0), gsum.norm()});
    if (std::abs(sum - 1.0) > 1e-14) res.fail(describe("basis sum deviates from 1", sum - 1.0));
    if (gsum.norm() > 1e-12 / std::min(a, b)) res.fail(describe("gradient sum is not zero", gsum.norm()));
  }
  return res;
}

PropertyResult check_area_conservation(std::mt19937_64& rng, int samples) {
  PropertyResult res;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    const double x0 = 20.0 * unit(rng) - 10.0;
    const double y0 = 20.0 * unit(rng) - 10.0;
    const double a = 0.1 + 5.0 * unit(rng);
    const double b = 0.1 + 5.0 * unit(rng);
    const std::array<Vec2, 4> xs = {Vec2(x0, y0), Vec2(x0 + a, y0), Vec2(x0 + a, y0 + b), Vec2(x0, y0 + b)};
    std::array<double, 4> phi{};
    for (auto& v : phi) {
      v = 2.0 * unit(rng) - 1.0;
      if (unit(rng) < 0.1) v *= 1e-9;  // near-node cuts
      if (v == 0.0) v = -1e-12;
    }
    const auto part = partition_element(xs, phi);
    const double area = a * b;
    double tri_sum = 0.0;
    for (const auto& t : part.triangles) {
      const double ta = t.area();
      tri_sum += ta;
      if (!(ta > 0.0)) res.fail(describe("non-positive triangle", ta));
    }
    const double rel = std::abs(phase_area(part, Phase::One) + phase_area(part, Phase::Two) - area) / area;
    const double rel_tri = std::abs(tri_sum - area) / area;
    res.worst = std::max({res.worst, rel, rel_tri});
    if (rel > 1e-12 || rel_tri > 1e-12) res.fail(describe("phase areas do not add up", std::max(rel, rel_tri)));
    for (const auto& seg : part.interface_segments) {
      if (std::abs(seg.normal.norm() - 1.0) > 1e-14) res.fail("interface normal is not of unit length");
      auto centroid = [&](int r) {
        const auto& poly = part.regions[static_cast<std::size_t>(r)].polygon;
        Vec2 c = Vec2::Zero();
        for (const auto& p : poly) c += p;
        return Vec2(c / static_cast<double>(poly.size()));
      };
      if (!(seg.normal.dot(centroid(seg.region2) - centroid(seg.region1)) > 0.0))
        res.fail("interface normal does not point into phase 2");
      for (const auto& p : seg.ends) {
        const double dx = std::min(std::abs(p.x() - x0), std::abs(p.x() - x0 - a));
        const double dy = std::min(std::abs(p.y() - y0), std::abs(p.y() - y0 - b));
        if (std::min(dx, dy) > 1e-12 * (a + b)) res.fail("interface endpoint is off the element boundary");
      }
    }
  }
  return res;
}

PropertyResult check_patch_test(const ConstraintMethod& method, std::mt19937_64& rng, int cases, double tol) {
  PropertyResult res;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const StructuredMesh mesh(6, 6, Rect{0.0, 3.0, 0.0, 3.0});
  for (int c = 0; c < cases; ++c) {
    const Circle circle{Vec2(0.8 + 1.4 * unit(rng), 0.8 + 1.4 * unit(rng)), 0.3 + 0.7 * unit(rng)};
    const auto disc = discretize(mesh, circle);
    const double k = 0.5 + 4.5 * unit(rng);
    const double a0 = 2.0 * unit(rng) - 1.0;
    const double bx = 2.0 * unit(rng) - 1.0;
    const double cy = 2.0 * unit(rng) - 1.0;
    const auto exact = linear_field(a0, bx, cy);
    BoundaryConditions bcs;
    for (auto side : kAllSides) bcs.dirichlet.push_back({side, exact});
    const auto sys = assemble(disc, MaterialSpec{k, k, {}}, bcs, method);
    const auto P = build_preconditioner(disc, sys, {PrecondKind::TB});
    const auto out = solve_linear(sys, P, SolverConfig{});
    if (!out.ok) {
      res.fail("patch solve failed: " + out.error);
      continue;
    }
    double scale = 0.0;
    for (int i = 0; i < mesh.num_nodes(); ++i) scale = std::max(scale, std::abs(exact(mesh.node(i))));
    for (int d = 0; d < sys.size(); ++d) {
      const double err = std::abs(out.u_hat[d] - exact(mesh.node(disc.table.key(d).node))) / scale;
      res.worst = std::max(res.worst, err);
      if (err > tol)
        res.fail(describe("linear field not reproduced at dof " + std::to_string(d) + " (case " + std::to_string(c) +
                              ", T " + std::to_string(P.diag[d]) + ", cond " +
                              std::to_string(condition_number(out.reduced.J)) + ")",
                          err));
    }
  }
  return res;
}

PropertyResult check_jacobian_fd(const ConstraintMethod& method, std::mt19937_64& rng, int cases, double tol) {
  PropertyResult res;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const StructuredMesh mesh(4, 4, Rect{0.0, 2.0, 0.0, 2.0});
  for (int c = 0; c < cases; ++c) {
    const Circle circle{Vec2(0.6 + 0.8 * unit(rng), 0.6 + 0.8 * unit(rng)), 0.3 + 0.4 * unit(rng)};
    const auto disc = discretize(mesh, circle);
    BoundaryConditions bcs;
    bcs.dirichlet.push_back({BoundarySide::Left, constant_field(0.0)});
    bcs.dirichlet.push_back({BoundarySide::Right, constant_field(1.0)});
    bcs.neumann.push_back({BoundarySide::Top, constant_field(0.3)});
    const auto sys = assemble(disc, MaterialSpec{1.0, 10.0, constant_field(0.5)}, bcs, method);
    const Eigen::MatrixXd J(jacobian(sys));
    const int n = sys.size();
    Vector u(n);
    for (int i = 0; i < n; ++i) u[i] = 2.0 * unit(rng) - 1.0;
    const double h = 1e-5;
    const double jmax = J.cwiseAbs().maxCoeff();
    for (int j = 0; j < n; ++j) {
      Vector up = u;
      Vector um = u;
      up[j] += h;
      um[j] -= h;
      const Vector fd = (residual(sys, up) - residual(sys, um)) / (2.0 * h);
      const double err = (fd - J.col(j)).cwiseAbs().maxCoeff() / jmax;
      res.worst = std::max(res.worst, err);
      if (err > tol) res.fail(describe("Jacobian column " + std::to_string(j) + " differs from finite differences", err));
    }
  }
  return res;
}

PropertyResult check_congruence_eigenvalues(std::mt19937_64& rng, int cases, double tol) {
  PropertyResult res;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 0; c < cases; ++c) {
    const int n = 5 + static_cast<int>(unit(rng) * 26.0);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = 2.0 * unit(rng) - 1.0;
    const Eigen::MatrixXd a = m * m.transpose() + static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);
    GeometricPreconditioner P = make_identity(n);
    P.kind = PrecondKind::TB;
    for (int i = 0; i < n; ++i) P.diag[i] = std::pow(10.0, 3.0 * unit(rng));

    // Oracle: entrywise congruence on the dense matrix.
    Eigen::MatrixXd oracle(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) oracle(i, j) = P.diag[i] * a(i, j) * P.diag[j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(oracle, Eigen::EigenvaluesOnly);

    const SparseMatrix sa = a.sparseView();
    const auto rs = transform_system(Vector::Zero(n), sa, P);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> got(Eigen::MatrixXd(rs.J), Eigen::EigenvaluesOnly);
    const double scale = ref.eigenvalues().cwiseAbs().maxCoeff();
    const double err = (got.eigenvalues() - ref.eigenvalues()).cwiseAbs().maxCoeff() / scale;
    res.worst = std::max(res.worst, err);
    if (err > tol) res.fail(describe("eigenvalues differ from congruence oracle", err));
  }
  return res;
}

}  // namespace xfemp::testing
