#include "xfemp/pipeline.hpp"

#include <cmath>

namespace xfemp {

std::vector<char> dirichlet_flags(const LinearSystem& sys) {
  std::vector<char> f(static_cast<std::size_t>(sys.size()), 0);
  for (const auto& [d, v] : sys.dirichlet) f[static_cast<std::size_t>(d)] = 1;
  return f;
}

namespace {

Vector geometric_scaling(const Discretization& disc, PrecondKind kind) {
  switch (kind) {
    case PrecondKind::TN:
      return build_TN(disc.mesh, disc.partitions, disc.table);
    case PrecondKind::TB:
      return build_TB(disc.mesh, disc.partitions, disc.table);
    default:
      return Vector::Ones(disc.table.total_dofs());
  }
}

}  // namespace

GeometricPreconditioner build_preconditioner(const Discretization& disc, const LinearSystem& sys,
                                             const PrecondSetup& setup) {
  const int n = sys.size();
  GeometricPreconditioner P;
  P.kind = setup.kind;
  switch (setup.kind) {
    case PrecondKind::Identity:
      P.diag = Vector::Ones(n);
      break;
    case PrecondKind::TN:
    case PrecondKind::TB:
      P.diag = geometric_scaling(disc, setup.kind);
      break;
    case PrecondKind::Tjac:
      P.diag = build_Tjac(jacobian(sys));
      break;
  }
  P.constrained.assign(static_cast<std::size_t>(n), 0);
  if (std::isfinite(setup.T_tol)) {
    const Vector source = setup.constraint_source == setup.kind && setup.kind != PrecondKind::Tjac
                              ? P.diag
                              : geometric_scaling(disc, setup.constraint_source);
    P.constrained = mark_constrained(source, setup.T_tol);
    for (const auto& [d, v] : sys.dirichlet) P.constrained[static_cast<std::size_t>(d)] = 0;
  }
  return P;
}

ReducedSystem reduced_system(const LinearSystem& sys, const GeometricPreconditioner& P) {
  Vector u0 = dirichlet_lift(sys);
  return transform_system(residual(sys, u0), jacobian(sys), P, dirichlet_flags(sys));
}

SolveOutcome solve_linear(const LinearSystem& sys, const GeometricPreconditioner& P, const SolverConfig& config) {
  SolveOutcome out;
  const Vector u0 = dirichlet_lift(sys);
  out.reduced = transform_system(residual(sys, u0), jacobian(sys), P, dirichlet_flags(sys));
  const auto& rs = out.reduced;
  try {
    if (config.method == SolveMethod::Direct) {
      out.u_tilde = direct_solve(rs.J, -rs.R);
      out.iterations = 1;
      out.converged = true;
    } else {
      const auto M = make_solver_preconditioner(config.solver_precond, rs.J);
      auto g = gmres_solve(rs.J, -rs.R, config, M.get(), rs.scale.cwiseInverse());
      out.u_tilde = std::move(g.x);
      out.iterations = g.iterations;
      out.converged = g.converged;
      out.residual = g.residual_norm;
    }
  } catch (const SingularMatrixError& e) {
    out.error = e.what();
    return out;
  }
  out.u_hat = u0 + untransform(rs, out.u_tilde, sys.size());
  out.ok = out.converged;
  if (!out.ok) out.error = "iterative solve did not converge";
  return out;
}

}  // namespace xfemp
