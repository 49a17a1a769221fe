#pragma once

/// \file assembly.hpp
/// \brief Conduction matrix and load vector for two-phase stationary
/// diffusion with weakly enforced interface continuity.

#include <functional>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include "xfemp/cutcell.hpp"
#include "xfemp/enrichment.hpp"
#include "xfemp/levelset.hpp"
#include "xfemp/linalg.hpp"
#include "xfemp/mesh.hpp"

namespace xfemp {

using ScalarField = std::function<double(const Vec2&)>;

ScalarField constant_field(double value);
/// a + b x + c y
ScalarField linear_field(double a, double b, double c);

struct MaterialSpec {
  double k1 = 1.0;
  double k2 = 1.0;
  ScalarField source;  ///< volumetric source; empty means zero

  double conductivity(Phase p) const { return p == Phase::One ? k1 : k2; }
  void validate() const;
};

struct DirichletCondition {
  BoundarySide side;
  ScalarField value;
};

struct NeumannCondition {
  BoundarySide side;
  ScalarField flux;
};

/// Sides absent from both lists are adiabatic.
struct BoundaryConditions {
  std::vector<DirichletCondition> dirichlet;
  std::vector<NeumannCondition> neumann;

  void validate() const;
};

/// Elementwise-constant multiplier, condensed per interface segment.
struct StabilizedLagrange {
  double gamma = 1.0;
};

/// Symmetric Nitsche coupling.
struct Nitsche {
  double gamma = 1.0;
};

using ConstraintMethod = std::variant<StabilizedLagrange, Nitsche>;

const char* method_name(const ConstraintMethod& m);

using DirichletMap = std::map<int, double>;

struct LinearSystem {
  SparseMatrix K;  ///< before Dirichlet elimination
  Vector f;
  DirichletMap dirichlet;

  int size() const { return static_cast<int>(f.size()); }
};

/// Mesh, level set, cut partition and dof table of one interface
/// configuration.
struct Discretization {
  StructuredMesh mesh;
  LevelSetField levelset;
  std::vector<ElementPartition> partitions;
  EnrichmentTable table;
};

Discretization discretize(const StructuredMesh& mesh, const GeometrySpec& geom,
                          double snap_factor = kDefaultSnapFactor);

LinearSystem assemble(const StructuredMesh& mesh, std::span<const ElementPartition> partitions,
                      const EnrichmentTable& table, const MaterialSpec& material, const BoundaryConditions& bcs,
                      const ConstraintMethod& method);

inline LinearSystem assemble(const Discretization& d, const MaterialSpec& material, const BoundaryConditions& bcs,
                             const ConstraintMethod& method) {
  return assemble(d.mesh, d.partitions, d.table, material, bcs, method);
}

/// R = K u - f, with Dirichlet rows replaced by u_d - u_s.
Vector residual(const LinearSystem& sys, const Vector& u_hat);

/// dR/du: K with Dirichlet rows set to identity rows.
SparseMatrix jacobian(const LinearSystem& sys);

/// Vector with Dirichlet values in place and zeros elsewhere.
Vector dirichlet_lift(const LinearSystem& sys);

}  // namespace xfemp
