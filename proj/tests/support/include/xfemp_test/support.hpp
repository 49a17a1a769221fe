#pragma once

/// \file support.hpp
/// \brief Fixtures, independent oracles and property checks shared by the
/// unit tests and the acceptance driver.

#include <random>
#include <span>
#include <string>
#include <vector>

#include "xfemp/assembly.hpp"
#include "xfemp/cutcell.hpp"
#include "xfemp/enrichment.hpp"
#include "xfemp/levelset.hpp"
#include "xfemp/mesh.hpp"

namespace xfemp::testing {

/// Outcome of a property check. `worst` is the largest violation measure
/// seen (an error norm, a count, ...), `detail` describes the first failure.
struct PropertyResult {
  bool ok = true;
  double worst = 0.0;
  std::string detail;

  void fail(std::string what) {
    if (ok) detail = std::move(what);
    ok = false;
  }
};

/// Wraps raw nodal values; no snapping is applied.
LevelSetField levelset_from_values(std::vector<double> phi);

/// Random nodal field: either independent values in [-1, 1] (many diagonal
/// and multi-region patterns) or the union of a few random discs, chosen
/// with equal probability. Values are kept at least 1e-3 away from zero.
LevelSetField random_levelset(const StructuredMesh& mesh, std::mt19937_64& rng);

/// 2x2 patch on [0,2]^2 whose center node sees three disjoint phase-2
/// corner inclusions in three of its four elements.
struct CenterNodeCase {
  StructuredMesh mesh{2, 2, Rect{0.0, 2.0, 0.0, 2.0}};
  LevelSetField levelset;
  int center_node = 4;
  std::array<int, 3> inclusion_elements{0, 1, 3};
};
CenterNodeCase center_node_case();

// ---- enrichment oracle ----------------------------------------------------

/// Per (node, phase): connected components of the phase triangles in the
/// nodal patch, computed by brute force over exact shared triangle edges.
struct TriangleRef {
  int element = -1;
  int triangle = -1;
};
struct PatchComponents {
  int node = -1;
  Phase phase = Phase::One;
  std::vector<std::vector<TriangleRef>> components;  ///< ordered by smallest centroid
};
std::vector<PatchComponents> flood_fill_components(const StructuredMesh& mesh,
                                                   std::span<const ElementPartition> partitions);

/// Compares the table against flood_fill_components: dof counts per node
/// and phase, triangle-to-dof consistency, level ordering and density.
PropertyResult compare_with_flood_fill(const StructuredMesh& mesh, std::span<const ElementPartition> partitions,
                                       const EnrichmentTable& table);

// ---- closed forms -----------------------------------------------------------

/// Temperature of a two-layer bar [0, L] with the k_left layer on [0, r]
/// and fixed end values.
double series_bar_temperature(double x, double r, double L, double k_left, double k_right, double u0, double uL);

// ---- property suites --------------------------------------------------------

/// Sum of basis values is 1 and of gradients is 0 at random points.
PropertyResult check_partition_of_unity(std::mt19937_64& rng, int samples = 100);

/// Phase areas of random cuts add up to the element area (rel. 1e-12), all
/// triangles positive, normals of unit length pointing into phase 2.
PropertyResult check_area_conservation(std::mt19937_64& rng, int samples = 1000);

/// Linear field with k1 = k2 and Dirichlet data on all sides is reproduced
/// at every dof to `tol` on random circular cuts.
PropertyResult check_patch_test(const ConstraintMethod& method, std::mt19937_64& rng, int cases = 10,
                                double tol = 1e-10);

/// Jacobian against central differences of the residual (rel. `tol`) for
/// random iterates on a cut system.
PropertyResult check_jacobian_fd(const ConstraintMethod& method, std::mt19937_64& rng, int cases = 3,
                                 double tol = 1e-6);

/// Eigenvalues of the transformed SPD matrix against a dense congruence
/// T J T computed independently.
PropertyResult check_congruence_eigenvalues(std::mt19937_64& rng, int cases = 20, double tol = 1e-10);

}  // namespace xfemp::testing
