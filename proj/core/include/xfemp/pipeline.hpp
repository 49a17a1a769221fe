#pragma once

/// \file pipeline.hpp
/// \brief One preconditioned linear solve of an assembled system: scaling,
/// elimination, transformed solve and recovery of the physical dofs.

#include <limits>
#include <optional>
#include <string>

#include "xfemp/assembly.hpp"
#include "xfemp/precond.hpp"
#include "xfemp/solver.hpp"

namespace xfemp {

struct PrecondSetup {
  PrecondKind kind = PrecondKind::TB;
  double T_tol = std::numeric_limits<double>::infinity();
  /// Scaling that decides the constrained set; Identity and Tjac runs use
  /// it as well so all kinds eliminate the same dofs.
  PrecondKind constraint_source = PrecondKind::TB;
};

/// Dirichlet dofs are never constrained.
GeometricPreconditioner build_preconditioner(const Discretization& disc, const LinearSystem& sys,
                                             const PrecondSetup& setup);

std::vector<char> dirichlet_flags(const LinearSystem& sys);

struct SolveOutcome {
  bool ok = false;
  std::string error;
  Vector u_hat;          ///< physical dofs
  Vector u_tilde;        ///< transformed retained unknowns
  ReducedSystem reduced; ///< J~ and R~ at the initial guess
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
};

/// Single Newton step from the Dirichlet lift; exact for the linear problem.
SolveOutcome solve_linear(const LinearSystem& sys, const GeometricPreconditioner& P, const SolverConfig& config);

/// The transformed system without solving it.
ReducedSystem reduced_system(const LinearSystem& sys, const GeometricPreconditioner& P);

}  // namespace xfemp
