#include "xfemp/precond.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace xfemp {

const char* to_string(PrecondKind k) {
  switch (k) {
    case PrecondKind::Identity:
      return "I";
    case PrecondKind::TN:
      return "TN";
    case PrecondKind::TB:
      return "TB";
    case PrecondKind::Tjac:
      return "Tjac";
  }
  return "?";
}

PrecondKind parse_precond_kind(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "i" || l == "identity" || l == "none") return PrecondKind::Identity;
  if (l == "tn") return PrecondKind::TN;
  if (l == "tb") return PrecondKind::TB;
  if (l == "tjac" || l == "jacobi") return PrecondKind::Tjac;
  throw std::invalid_argument("unknown preconditioner kind '" + s + "'");
}

int GeometricPreconditioner::num_constrained() const {
  return static_cast<int>(std::count(constrained.begin(), constrained.end(), 1));
}

namespace {

enum class Integrand { Value, GradSquared };

double integrate_basis(const StructuredMesh& mesh, int e, const std::vector<Triangle>& tris, int region,
                       int local, Integrand what) {
  const auto coords = mesh.element_coords(e);
  double s = 0.0;
  for (const auto& tri : tris) {
    if (region >= 0 && tri.region != region) continue;
    for (const auto& qp : triangle_quadrature(tri.v, kTriangleOrder)) {
      const Vec2 ref = mesh.to_reference(e, qp.x);
      if (what == Integrand::Value) {
        s += qp.w * shape_values(ref.x(), ref.y())[static_cast<std::size_t>(local)];
      } else {
        const auto g = shape_gradients(ref.x(), ref.y(), coords).grad[static_cast<std::size_t>(local)];
        s += qp.w * g.squaredNorm();
      }
    }
  }
  return s;
}

Vector build_ratio_scaling(const StructuredMesh& mesh, std::span<const ElementPartition> parts,
                           const EnrichmentTable& table, Integrand what) {
  const int n = table.total_dofs();
  Vector t = Vector::Ones(n);
  for (int d = 0; d < n; ++d) {
    const int node = table.key(d).node;
    double best = 0.0;
    bool touches_cut = false;
    for (const auto& ref : table.support(d)) {
      const auto& part = parts[static_cast<std::size_t>(ref.element)];
      if (!part.is_cut()) {
        best = 1.0;
        continue;
      }
      touches_cut = true;
      const auto nodes = mesh.element_nodes(ref.element);
      const int local = static_cast<int>(std::find(nodes.begin(), nodes.end(), node) - nodes.begin());
      const double num = integrate_basis(mesh, ref.element, part.triangles, ref.region, local, what);
      const double den = integrate_basis(mesh, ref.element, part.triangles, -1, local, what);
      best = std::max(best, num / den);
    }
    if (!(best > 0.0)) throw std::logic_error("geometric scaling: dof without region of influence");
    if (touches_cut) t[d] = 1.0 / std::sqrt(std::min(best, 1.0));
  }
  return t;
}

}  // namespace

Vector build_TN(const StructuredMesh& mesh, std::span<const ElementPartition> parts, const EnrichmentTable& table) {
  return build_ratio_scaling(mesh, parts, table, Integrand::Value);
}

Vector build_TB(const StructuredMesh& mesh, std::span<const ElementPartition> parts, const EnrichmentTable& table) {
  return build_ratio_scaling(mesh, parts, table, Integrand::GradSquared);
}

Vector build_Tjac(const SparseMatrix& J) {
  Vector t(J.rows());
  const Vector d = J.diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) {
      throw std::domain_error("Jacobi scaling: non-positive diagonal entry at dof " + std::to_string(i));
    }
    t[i] = 1.0 / std::sqrt(d[i]);
  }
  return t;
}

std::vector<char> mark_constrained(const Vector& diag, double T_tol) {
  if (!(T_tol > 1.0)) throw std::invalid_argument("mark_constrained: T_tol must exceed 1");
  std::vector<char> c(static_cast<std::size_t>(diag.size()), 0);
  for (Eigen::Index i = 0; i < diag.size(); ++i) c[static_cast<std::size_t>(i)] = diag[i] > T_tol ? 1 : 0;
  return c;
}

GeometricPreconditioner make_identity(int n) {
  return {Vector::Ones(n), std::vector<char>(static_cast<std::size_t>(n), 0), PrecondKind::Identity};
}

ReducedSystem transform_system(const Vector& R, const SparseMatrix& J, const GeometricPreconditioner& P,
                               std::span<const char> fixed) {
  const auto n = J.rows();
  if (J.cols() != n || R.size() != n || P.diag.size() != n ||
      static_cast<Eigen::Index>(P.constrained.size()) != n ||
      (!fixed.empty() && static_cast<Eigen::Index>(fixed.size()) != n)) {
    throw std::invalid_argument("transform_system: dimension mismatch");
  }
  ReducedSystem rs;
  std::vector<int> map(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (P.constrained[u] || (!fixed.empty() && fixed[u])) continue;
    map[u] = static_cast<int>(rs.retained.size());
    rs.retained.push_back(static_cast<int>(i));
  }
  const auto m = static_cast<Eigen::Index>(rs.retained.size());
  rs.scale.resize(m);
  rs.R.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const int i = rs.retained[static_cast<std::size_t>(k)];
    rs.scale[k] = P.diag[i];
    rs.R[k] = P.diag[i] * R[i];
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(J.nonZeros()));
  for (Eigen::Index c = 0; c < J.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(J, c); it; ++it) {
      const int ri = map[static_cast<std::size_t>(it.row())];
      const int ci = map[static_cast<std::size_t>(it.col())];
      if (ri >= 0 && ci >= 0) trip.emplace_back(ri, ci, P.diag[it.row()] * it.value() * P.diag[it.col()]);
    }
  rs.J.resize(m, m);
  rs.J.setFromTriplets(trip.begin(), trip.end());
  return rs;
}

Vector untransform(const ReducedSystem& rs, const Vector& u_tilde, int full_size) {
  if (u_tilde.size() != static_cast<Eigen::Index>(rs.retained.size())) {
    throw std::invalid_argument("untransform: dimension mismatch");
  }
  Vector u = Vector::Zero(full_size);
  for (std::size_t k = 0; k < rs.retained.size(); ++k) {
    const auto ki = static_cast<Eigen::Index>(k);
    u[rs.retained[k]] = rs.scale[ki] * u_tilde[ki];
  }
  return u;
}

Vector untransform_solution(const Vector& u_tilde, const GeometricPreconditioner& P) {
  if (u_tilde.size() != P.diag.size()) throw std::invalid_argument("untransform_solution: dimension mismatch");
  Vector u(u_tilde.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    u[i] = P.constrained[static_cast<std::size_t>(i)] ? 0.0 : P.diag[i] * u_tilde[i];
  return u;
}

Vector transform_initial_guess(const Vector& u_hat, const GeometricPreconditioner& P) {
  if (u_hat.size() != P.diag.size()) throw std::invalid_argument("transform_initial_guess: dimension mismatch");
  Vector u(u_hat.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    u[i] = P.constrained[static_cast<std::size_t>(i)] ? 0.0 : u_hat[i] / P.diag[i];
  return u;
}

}  // namespace xfemp
