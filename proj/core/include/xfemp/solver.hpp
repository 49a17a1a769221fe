#pragma once

/// \file solver.hpp
/// \brief Direct and Krylov linear solvers and the Newton driver operating
/// in the transformed space.

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "xfemp/linalg.hpp"
#include "xfemp/precond.hpp"

namespace xfemp {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolveMethod { Direct, GMRES };
enum class SolverPrecond { None, Jacobi, ILU0 };

const char* to_string(SolverPrecond p);
SolverPrecond parse_solver_precond(const std::string& s);

struct SolverConfig {
  SolveMethod method = SolveMethod::Direct;
  double gmres_tol = 1e-6;  ///< absolute bound on the weighted true residual
  int gmres_max_iter = 0;   ///< 0 selects the system dimension
  int restart = 0;          ///< 0 disables restarting
  SolverPrecond solver_precond = SolverPrecond::None;

  void validate() const;
};

/// Applies z = M^{-1} v.
class LinearPreconditioner {
 public:
  virtual ~LinearPreconditioner() = default;
  virtual void apply(const Vector& v, Vector& z) const = 0;
};

class JacobiPreconditioner final : public LinearPreconditioner {
 public:
  /// Throws SingularMatrixError on a zero diagonal entry.
  explicit JacobiPreconditioner(const SparseMatrix& A);
  void apply(const Vector& v, Vector& z) const override;

 private:
  Vector inv_diag_;
};

/// Incomplete LU factorization restricted to the sparsity pattern of A.
class Ilu0Preconditioner final : public LinearPreconditioner {
 public:
  /// Throws SingularMatrixError on a zero pivot.
  explicit Ilu0Preconditioner(const SparseMatrix& A);
  void apply(const Vector& v, Vector& z) const override;

  /// Combined factors: strictly lower part holds L (unit diagonal implied),
  /// the rest holds U.
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& factors() const { return lu_; }

 private:
  Eigen::SparseMatrix<double, Eigen::RowMajor> lu_;
  std::vector<Eigen::Index> diag_pos_;
};

std::unique_ptr<LinearPreconditioner> build_ilu0(const SparseMatrix& A);
std::unique_ptr<LinearPreconditioner> make_solver_preconditioner(SolverPrecond kind, const SparseMatrix& A);

/// Sparse LU with partial pivoting. Throws SingularMatrixError when the
/// factorization breaks down, the result is not finite, or the relative
/// residual exceeds `residual_tol`.
Vector direct_solve(const SparseMatrix& A, const Vector& b, double residual_tol = 1e-10);

struct GmresResult {
  Vector x;
  int iterations = 0;
  bool converged = false;
  double residual_norm = 0.0;  ///< weighted true residual of the returned x
};

/// Right-preconditioned GMRES on A x = b from x0. Convergence means
/// ||S (b - A x)||_2 < tol with S = diag(weights) (identity when empty);
/// it is always confirmed with an explicit true residual.
GmresResult gmres_solve(const SparseMatrix& A, const Vector& b, const SolverConfig& config,
                        const LinearPreconditioner* M = nullptr, const Vector& weights = Vector(),
                        const Vector& x0 = Vector());

/// Residual and Jacobian callbacks in the full dof space. `fixed` flags
/// dofs with prescribed values that the initial guess already carries.
struct NonlinearProblem {
  std::function<Vector(const Vector&)> residual;
  std::function<SparseMatrix(const Vector&)> jacobian;
  std::vector<char> fixed;
  int size = 0;
};

struct NewtonOptions {
  double tol_drop = 1e-10;  ///< stop when ||R~|| <= tol_drop * ||R~_0||
  int max_iter = 20;
  SolverConfig linear;
};

struct NewtonResult {
  Vector u_hat;
  int iterations = 0;
  double initial_norm = 0.0;
  double final_norm = 0.0;
  int linear_iterations = 0;  ///< Krylov steps of the last linear solve
  bool linear_converged = true;
  GeometricPreconditioner preconditioner;  ///< the one used in the last step
};

class NewtonDivergenceError : public std::runtime_error {
 public:
  NewtonDivergenceError(const std::string& what, Vector iterate)
      : std::runtime_error(what), iterate_(std::move(iterate)) {}
  const Vector& iterate() const { return iterate_; }

 private:
  Vector iterate_;
};

/// Rebuilds the scaling from the current physical iterate.
using PreconditionerFactory = std::function<GeometricPreconditioner(const Vector& u_hat, const SparseMatrix& J)>;

/// Newton iteration in the transformed space. The scaling is taken from
/// `P`, or re-evaluated every step through `rebuild` when it is set.
/// A linear solve that fails (singular factorization) propagates; GMRES
/// non-convergence is reported through `linear_converged`.
NewtonResult newton_solve(const NonlinearProblem& problem, const GeometricPreconditioner& P,
                          const NewtonOptions& options, const Vector& u0, const PreconditionerFactory& rebuild = {});

}  // namespace xfemp
