#include "xfemp/assembly.hpp"

#include <array>
#include <set>
#include <stdexcept>
#include <string>

namespace xfemp {

ScalarField constant_field(double value) {
  return [value](const Vec2&) { return value; };
}

ScalarField linear_field(double a, double b, double c) {
  return [a, b, c](const Vec2& x) { return a + b * x.x() + c * x.y(); };
}

void MaterialSpec::validate() const {
  if (!(k1 > 0.0) || !(k2 > 0.0)) throw std::invalid_argument("material: conductivities must be positive");
}

void BoundaryConditions::validate() const {
  std::set<BoundarySide> seen;
  for (const auto& d : dirichlet) {
    if (!d.value) throw std::invalid_argument("boundary: empty Dirichlet value");
    seen.insert(d.side);
  }
  for (const auto& n : neumann) {
    if (!n.flux) throw std::invalid_argument("boundary: empty Neumann flux");
    if (seen.contains(n.side)) {
      throw std::invalid_argument(std::string("boundary: side '") + to_string(n.side) +
                                  "' is both Dirichlet and Neumann");
    }
  }
}

const char* method_name(const ConstraintMethod& m) {
  return std::holds_alternative<StabilizedLagrange>(m) ? "stabilized_lagrange" : "nitsche";
}

Discretization discretize(const StructuredMesh& mesh, const GeometrySpec& geom, double snap_factor) {
  auto ls = build_levelset(mesh, geom, snap_factor);
  auto parts = partition_mesh(mesh, ls);
  auto table = build_enrichment(mesh, parts);
  return {mesh, std::move(ls), std::move(parts), std::move(table)};
}

namespace {

struct PointBasis {
  std::array<double, 4> n;
  std::array<Vec2, 4> grad;
};

struct ElementGeometry {
  const StructuredMesh& mesh;
  int element;
  std::array<Vec2, 4> coords;

  PointBasis at(const Vec2& x) const {
    const Vec2 ref = mesh.to_reference(element, x);
    PointBasis b;
    b.n = shape_values(ref.x(), ref.y());
    b.grad = shape_gradients(ref.x(), ref.y(), coords).grad;
    return b;
  }
};

class TripletSink {
 public:
  explicit TripletSink(int n) : f_(Vector::Zero(n)) {}
  void add(int i, int j, double v) { trip_.emplace_back(i, j, v); }
  void add_rhs(int i, double v) { f_[i] += v; }
  SparseMatrix matrix(int n) const {
    SparseMatrix k(n, n);
    k.setFromTriplets(trip_.begin(), trip_.end());
    return k;
  }
  Vector& rhs() { return f_; }

 private:
  std::vector<Eigen::Triplet<double>> trip_;
  Vector f_;
};

void add_interface_terms(TripletSink& sink, const ElementGeometry& geom, const ElementPartition& part,
                         const EnrichmentTable& table, const MaterialSpec& mat, const ConstraintMethod& method) {
  for (const auto& seg : part.interface_segments) {
    const auto& d1 = table.region_dofs(geom.element, seg.region1);
    const auto& d2 = table.region_dofs(geom.element, seg.region2);
    std::array<int, 8> dofs{};
    for (std::size_t a = 0; a < 4; ++a) {
      dofs[a] = d1[a];
      dofs[a + 4] = d2[a];
    }
    const auto rule = segment_quadrature(seg.ends[0], seg.ends[1], kInterfacePoints);
    // jump [[u]] = u1 - u2 and mean flux {k grad u . n}
    std::array<std::array<double, 8>, kInterfacePoints> jump{};
    std::array<std::array<double, 8>, kInterfacePoints> flux{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto b = geom.at(rule[q].x);
      for (std::size_t a = 0; a < 4; ++a) {
        const double dn = b.grad[a].dot(seg.normal);
        jump[q][a] = b.n[a];
        jump[q][a + 4] = -b.n[a];
        flux[q][a] = 0.5 * mat.k1 * dn;
        flux[q][a + 4] = 0.5 * mat.k2 * dn;
      }
    }
    if (const auto* nit = std::get_if<Nitsche>(&method)) {
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double w = rule[q].w;
        for (std::size_t i = 0; i < 8; ++i)
          for (std::size_t j = 0; j < 8; ++j) {
            const double v =
                -jump[q][i] * flux[q][j] - flux[q][i] * jump[q][j] + nit->gamma * jump[q][i] * jump[q][j];
            sink.add(dofs[i], dofs[j], w * v);
          }
      }
    } else {
      const double gamma = std::get<StabilizedLagrange>(method).gamma;
      // Constant multiplier on the segment: |G| lambda = int {k grad u . n} - gamma int [[u]],
      // substituted into -int [[v]] lambda.
      std::array<double, 8> bj{};
      std::array<double, 8> cj{};
      double len = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        len += rule[q].w;
        for (std::size_t i = 0; i < 8; ++i) {
          bj[i] += rule[q].w * jump[q][i];
          cj[i] += rule[q].w * flux[q][i];
        }
      }
      if (len <= 0.0) continue;
      for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) sink.add(dofs[i], dofs[j], -bj[i] * (cj[j] - gamma * bj[j]) / len);
    }
  }
}

}  // namespace

LinearSystem assemble(const StructuredMesh& mesh, std::span<const ElementPartition> parts,
                      const EnrichmentTable& table, const MaterialSpec& mat, const BoundaryConditions& bcs,
                      const ConstraintMethod& method) {
  mat.validate();
  bcs.validate();
  std::visit([](const auto& m) {
    if (!(m.gamma > 0.0)) throw std::invalid_argument("constraint factor must be positive");
  }, method);
  if (static_cast<int>(parts.size()) != mesh.num_elements()) {
    throw std::invalid_argument("assemble: partition count does not match mesh");
  }

  const int n = table.total_dofs();
  TripletSink sink(n);

  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& part = parts[static_cast<std::size_t>(e)];
    const ElementGeometry geom{mesh, e, mesh.element_coords(e)};
    for (const auto& tri : part.triangles) {
      const auto& dofs = table.region_dofs(e, tri.region);
      const double k = mat.conductivity(tri.phase);
      for (const auto& qp : triangle_quadrature(tri.v, kTriangleOrder)) {
        const auto b = geom.at(qp.x);
        for (std::size_t i = 0; i < 4; ++i) {
          for (std::size_t j = 0; j < 4; ++j) sink.add(dofs[i], dofs[j], qp.w * k * b.grad[i].dot(b.grad[j]));
          if (mat.source) sink.add_rhs(dofs[i], qp.w * mat.source(qp.x) * b.n[i]);
        }
      }
    }
    if (part.is_cut()) add_interface_terms(sink, geom, part, table, mat, method);
  }

  for (const auto& nc : bcs.neumann) {
    for (const auto& edge : mesh.boundary_edges(nc.side)) {
      const auto& part = parts[static_cast<std::size_t>(edge.element)];
      const ElementGeometry geom{mesh, edge.element, mesh.element_coords(edge.element)};
      for (const auto& piece : part.edge_pieces[static_cast<std::size_t>(edge.local_edge)]) {
        const auto& dofs = table.region_dofs(edge.element, piece.region);
        for (const auto& qp : segment_quadrature(piece.ends[0], piece.ends[1], 2)) {
          const auto b = geom.at(qp.x);
          const double q = nc.flux(qp.x);
          for (std::size_t i = 0; i < 4; ++i) sink.add_rhs(dofs[i], qp.w * q * b.n[i]);
        }
      }
    }
  }

  LinearSystem sys;
  sys.K = sink.matrix(n);
  sys.f = std::move(sink.rhs());

  // Strong Dirichlet data on every dof whose region owns part of a Dirichlet edge.
  for (const auto& dc : bcs.dirichlet) {
    for (const auto& edge : mesh.boundary_edges(dc.side)) {
      const auto& part = parts[static_cast<std::size_t>(edge.element)];
      const auto nodes = mesh.element_nodes(edge.element);
      for (const auto& piece : part.edge_pieces[static_cast<std::size_t>(edge.local_edge)]) {
        for (int a : {edge.local_edge, (edge.local_edge + 1) % 4}) {
          const int dof = table.region_dof(edge.element, piece.region, a);
          sys.dirichlet.emplace(dof, dc.value(mesh.node(nodes[static_cast<std::size_t>(a)])));
        }
      }
    }
  }
  return sys;
}

Vector residual(const LinearSystem& sys, const Vector& u) {
  if (u.size() != sys.f.size()) throw std::invalid_argument("residual: dimension mismatch");
  Vector r = sys.K * u - sys.f;
  for (const auto& [d, v] : sys.dirichlet) r[d] = u[d] - v;
  return r;
}

SparseMatrix jacobian(const LinearSystem& sys) {
  const int n = sys.size();
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  for (const auto& [d, v] : sys.dirichlet) fixed[static_cast<std::size_t>(d)] = 1;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(sys.K.nonZeros()) + sys.dirichlet.size());
  for (int c = 0; c < sys.K.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(sys.K, c); it; ++it)
      if (!fixed[static_cast<std::size_t>(it.row())]) trip.emplace_back(it.row(), it.col(), it.value());
  for (const auto& [d, v] : sys.dirichlet) trip.emplace_back(d, d, 1.0);
  SparseMatrix j(n, n);
  j.setFromTriplets(trip.begin(), trip.end());
  return j;
}

Vector dirichlet_lift(const LinearSystem& sys) {
  Vector u = Vector::Zero(sys.size());
  for (const auto& [d, v] : sys.dirichlet) u[d] = v;
  return u;
}

}  // namespace xfemp
