#pragma once

/// \file diagnostics.hpp
/// \brief Condition numbers, cut-area metrics, error norms and field
/// sampling for parameter sweeps.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "xfemp/assembly.hpp"
#include "xfemp/cutcell.hpp"
#include "xfemp/linalg.hpp"

namespace xfemp {

enum class CondMethod { Auto, Dense, Iterative };

struct CondOptions {
  CondMethod method = CondMethod::Auto;
  int dense_limit = 400;     ///< Auto uses the dense SVD up to this size
  int max_lanczos = 120;     ///< Krylov steps per extreme singular value
  double rel_accuracy = 1e-3;
};

/// 2-norm condition number sigma_max / sigma_min. Returns +infinity for a
/// matrix that is singular to working precision.
double condition_number(const SparseMatrix& A, const CondOptions& options = {});
double condition_number_dense(const Eigen::MatrixXd& A);

/// Minimum over cut elements of the phase-1 / phase-2 area ratio, or of
/// min(D1/D2, D2/D1) when `symmetrized`. Empty when no element is cut.
std::optional<double> min_area_ratio(std::span<const ElementPartition> partitions, bool symmetrized = false);

/// ||u - u_ref||_2 / ||u_ref||_2. Throws on size mismatch or zero reference.
double l2_relative_error(const Vector& u, const Vector& u_ref);

/// Trapezoidal integral of sampled (r, v) pairs with increasing r.
double integrate_over_sweep(std::span<const std::pair<double, double>> samples);

/// Distance within which a point is considered to lie on the interface and
/// is evaluated from the phase-1 side.
inline constexpr double kInterfaceTieTol = 1e-9;

/// Temperature of the enriched field at x; nullopt outside the mesh.
std::optional<double> evaluate_field(const Discretization& disc, const Vector& u_hat, const Vec2& x);

/// Regular (n x n) grid of probe points covering `bounds`, row-major in y.
std::vector<Vec2> probe_grid(const Rect& bounds, int n);

Vector sample_field(const Discretization& disc, const Vector& u_hat, std::span<const Vec2> points);

/// One row of sweep output.
struct SweepRecord {
  double r = 0.0;
  std::optional<double> cond;
  std::optional<double> a_min;
  std::optional<double> e_l2;
  std::optional<int> n_itr_none;
  std::optional<int> n_itr_jac;
  std::optional<int> n_itr_ilu;
  int gmres_failed = 0;  ///< bit 0: none, bit 1: Jacobi, bit 2: ILU(0)
  int n_constrained = 0;
  int dofs = 0;
};

/// Population coefficient of variation (stddev / mean).
double coefficient_of_variation(std::span<const double> values);

}  // namespace xfemp
