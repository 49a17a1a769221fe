#pragma once

/// \file precond.hpp
/// \brief Diagonal geometric scaling of enriched systems and elimination of
/// degrees of freedom with vanishing region of influence.

#include <span>
#include <string>
#include <vector>

#include "xfemp/cutcell.hpp"
#include "xfemp/enrichment.hpp"
#include "xfemp/linalg.hpp"
#include "xfemp/mesh.hpp"

namespace xfemp {

enum class PrecondKind { Identity, TN, TB, Tjac };

const char* to_string(PrecondKind k);
/// Accepts "identity"/"I", "TN", "TB", "Tjac" (case-insensitive).
PrecondKind parse_precond_kind(const std::string& s);

struct GeometricPreconditioner {
  Vector diag;                    ///< T entry per dof
  std::vector<char> constrained;  ///< 1 where the dof is removed
  PrecondKind kind = PrecondKind::Identity;

  int size() const { return static_cast<int>(diag.size()); }
  int num_constrained() const;
};

/// Basis ratio scaling: (max_e int_{region} N / int_{element} N)^(-1/2).
Vector build_TN(const StructuredMesh& mesh, std::span<const ElementPartition> partitions,
                const EnrichmentTable& table);

/// Gradient ratio scaling: as build_TN with |grad N|^2.
Vector build_TB(const StructuredMesh& mesh, std::span<const ElementPartition> partitions,
                const EnrichmentTable& table);

/// diag(J)^(-1/2). Throws std::domain_error on a non-positive diagonal.
Vector build_Tjac(const SparseMatrix& J);

/// Flags {d : diag_d > T_tol}. Throws std::invalid_argument unless T_tol > 1.
std::vector<char> mark_constrained(const Vector& diag, double T_tol);

GeometricPreconditioner make_identity(int n);

/// Transformed system restricted to the retained dofs.
struct ReducedSystem {
  SparseMatrix J;             ///< T J T on retained rows/columns
  Vector R;                   ///< T R on retained rows
  std::vector<int> retained;  ///< full-space index of each reduced unknown
  Vector scale;               ///< T on retained dofs
};

/// Eliminates dofs flagged in `fixed` (e.g. Dirichlet) together with the
/// constrained set of `P`, then applies the diagonal congruence.
ReducedSystem transform_system(const Vector& R, const SparseMatrix& J, const GeometricPreconditioner& P,
                               std::span<const char> fixed = {});

/// u_hat = T u_tilde on retained dofs and zero elsewhere.
Vector untransform(const ReducedSystem& rs, const Vector& u_tilde, int full_size);

/// Pure map form: u_hat_d = T_d u_tilde_d, constrained dofs set to zero.
Vector untransform_solution(const Vector& u_tilde, const GeometricPreconditioner& P);
/// u_tilde_d = u_hat_d / T_d, constrained dofs set to zero.
Vector transform_initial_guess(const Vector& u_hat, const GeometricPreconditioner& P);

}  // namespace xfemp
