#include "xfemp/solver.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

namespace xfemp {

const char* to_string(SolverPrecond p) {
  switch (p) {
    case SolverPrecond::None:
      return "none";
    case SolverPrecond::Jacobi:
      return "jacobi";
    case SolverPrecond::ILU0:
      return "ilu0";
  }
  return "?";
}

SolverPrecond parse_solver_precond(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "none") return SolverPrecond::None;
  if (l == "jacobi" || l == "jac") return SolverPrecond::Jacobi;
  if (l == "ilu0" || l == "ilu") return SolverPrecond::ILU0;
  throw std::invalid_argument("unknown solver preconditioner '" + s + "'");
}

void SolverConfig::validate() const {
  if (!(gmres_tol > 0.0)) throw std::invalid_argument("solver: gmres_tol must be positive");
  if (gmres_max_iter < 0) throw std::invalid_argument("solver: gmres_max_iter must be non-negative");
  if (restart < 0) throw std::invalid_argument("solver: restart must be non-negative");
}

JacobiPreconditioner::JacobiPreconditioner(const SparseMatrix& A) : inv_diag_(A.rows()) {
  const Vector d = A.diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] == 0.0) throw SingularMatrixError("Jacobi preconditioner: zero diagonal entry");
    inv_diag_[i] = 1.0 / d[i];
  }
}

void JacobiPreconditioner::apply(const Vector& v, Vector& z) const { z = inv_diag_.cwiseProduct(v); }

Ilu0Preconditioner::Ilu0Preconditioner(const SparseMatrix& A) : lu_(A) {
  lu_.makeCompressed();
  const Eigen::Index n = lu_.rows();
  auto* val = lu_.valuePtr();
  const auto* col = lu_.innerIndexPtr();
  const auto* start = lu_.outerIndexPtr();
  diag_pos_.assign(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i)
    for (auto p = start[i]; p < start[i + 1]; ++p)
      if (col[p] == i) diag_pos_[static_cast<std::size_t>(i)] = p;

  std::vector<Eigen::Index> pos(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (diag_pos_[static_cast<std::size_t>(i)] < 0) throw SingularMatrixError("ILU(0): missing diagonal entry");
    for (auto p = start[i]; p < start[i + 1]; ++p) pos[static_cast<std::size_t>(col[p])] = p;
    for (auto p = start[i]; p < start[i + 1] && col[p] < i; ++p) {
      const Eigen::Index k = col[p];
      val[p] /= val[diag_pos_[static_cast<std::size_t>(k)]];
      for (auto q = diag_pos_[static_cast<std::size_t>(k)] + 1; q < start[k + 1]; ++q) {
        const auto target = pos[static_cast<std::size_t>(col[q])];
        if (target >= 0) val[target] -= val[p] * val[q];
      }
    }
    for (auto p = start[i]; p < start[i + 1]; ++p) pos[static_cast<std::size_t>(col[p])] = -1;
    const double piv = val[diag_pos_[static_cast<std::size_t>(i)]];
    if (piv == 0.0 || !std::isfinite(piv)) throw SingularMatrixError("ILU(0): zero pivot");
  }
}

void Ilu0Preconditioner::apply(const Vector& v, Vector& z) const {
  const Eigen::Index n = lu_.rows();
  const auto* val = lu_.valuePtr();
  const auto* col = lu_.innerIndexPtr();
  const auto* start = lu_.outerIndexPtr();
  z = v;
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = z[i];
    for (auto p = start[i]; p < diag_pos_[static_cast<std::size_t>(i)]; ++p) s -= val[p] * z[col[p]];
    z[i] = s;
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    const auto d = diag_pos_[static_cast<std::size_t>(i)];
    double s = z[i];
    for (auto p = d + 1; p < start[i + 1]; ++p) s -= val[p] * z[col[p]];
    z[i] = s / val[d];
  }
}

std::unique_ptr<LinearPreconditioner> build_ilu0(const SparseMatrix& A) {
  return std::make_unique<Ilu0Preconditioner>(A);
}

std::unique_ptr<LinearPreconditioner> make_solver_preconditioner(SolverPrecond kind, const SparseMatrix& A) {
  switch (kind) {
    case SolverPrecond::None:
      return nullptr;
    case SolverPrecond::Jacobi:
      return std::make_unique<JacobiPreconditioner>(A);
    case SolverPrecond::ILU0:
      return build_ilu0(A);
  }
  return nullptr;
}

Vector direct_solve(const SparseMatrix& A, const Vector& b, double residual_tol) {
  if (A.rows() != A.cols() || A.rows() != b.size()) throw std::invalid_argument("direct_solve: dimension mismatch");
  if (A.rows() == 0) return Vector();
  SparseMatrix a = A;
  a.makeCompressed();
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) throw SingularMatrixError("direct_solve: factorization failed: " + lu.lastErrorMessage());
  Vector x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw SingularMatrixError("direct_solve: non-finite solution");
  const double bn = b.norm();
  const double rn = (a * x - b).norm();
  if (rn > residual_tol * bn) {
    throw SingularMatrixError("direct_solve: relative residual " + std::to_string(rn / bn) +
                              " indicates a numerically singular matrix");
  }
  return x;
}

GmresResult gmres_solve(const SparseMatrix& A, const Vector& b, const SolverConfig& cfg,
                        const LinearPreconditioner* M, const Vector& weights, const Vector& x0) {
  cfg.validate();
  const Eigen::Index n = b.size();
  if (A.rows() != n || A.cols() != n) throw std::invalid_argument("gmres_solve: dimension mismatch");
  if (weights.size() != 0 && weights.size() != n) throw std::invalid_argument("gmres_solve: weight size mismatch");
  if (x0.size() != 0 && x0.size() != n) throw std::invalid_argument("gmres_solve: initial guess size mismatch");

  const bool weighted = weights.size() != 0;
  const double smax = weighted && n > 0 ? weights.cwiseAbs().maxCoeff() : 1.0;
  const double smin = weighted && n > 0 ? weights.cwiseAbs().minCoeff() : 1.0;
  const int max_iter = cfg.gmres_max_iter > 0 ? cfg.gmres_max_iter : static_cast<int>(n);
  const int m = cfg.restart > 0 ? std::min(cfg.restart, max_iter) : max_iter;
  const double tol = cfg.gmres_tol;

  GmresResult res;
  res.x = x0.size() != 0 ? x0 : Vector::Zero(n);
  auto weighted_residual = [&](const Vector& x) {
    const Vector r = b - A * x;
    return weighted ? weights.cwiseProduct(r).norm() : r.norm();
  };
  auto precondition = [&](const Vector& v) {
    if (!M) return v;
    Vector z;
    M->apply(v, z);
    return z;
  };

  Eigen::MatrixXd V;
  Eigen::MatrixXd H;
  Vector cs;
  Vector sn;
  Vector g;
  while (true) {
    const Vector r = b - A * res.x;
    res.residual_norm = weighted ? weights.cwiseProduct(r).norm() : r.norm();
    if (res.residual_norm < tol) {
      res.converged = true;
      return res;
    }
    if (res.iterations >= max_iter) return res;
    const double beta = r.norm();
    if (!std::isfinite(beta)) return res;

    V.setZero(n, m + 1);
    H.setZero(m + 1, m);
    cs.setZero(m);
    sn.setZero(m);
    g.setZero(m + 1);
    V.col(0) = r / beta;
    g[0] = beta;

    auto correction = [&](int k) {
      const Vector y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
      return precondition(V.leftCols(k) * y);
    };

    int k = 0;
    while (k < m && res.iterations < max_iter) {
      Vector w = A * precondition(V.col(k));
      // Modified Gram-Schmidt with one reorthogonalization pass.
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= k; ++i) {
          const double h = V.col(i).dot(w);
          H(i, k) += h;
          w -= h * V.col(i);
        }
      const double hnext = w.norm();
      H(k + 1, k) = hnext;
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      const double denom = std::hypot(H(k, k), H(k + 1, k));
      if (denom == 0.0 || !std::isfinite(denom)) break;
      cs[k] = H(k, k) / denom;
      sn[k] = H(k + 1, k) / denom;
      H(k, k) = denom;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++k;
      ++res.iterations;

      const double est = std::abs(g[k]);
      const bool breakdown = hnext <= 1e-14 * denom;
      if (breakdown || smax * est < tol) break;
      if (smin * est >= tol) {
        V.col(k) = w / hnext;
        continue;
      }
      if (weighted_residual(res.x + correction(k)) < tol) break;
      V.col(k) = w / hnext;
    }
    if (k == 0) return res;
    res.x += correction(k);
  }
}

NewtonResult newton_solve(const NonlinearProblem& problem, const GeometricPreconditioner& P,
                          const NewtonOptions& opt, const Vector& u0, const PreconditionerFactory& rebuild) {
  const int n = problem.size;
  if (u0.size() != n) throw std::invalid_argument("newton_solve: initial guess size mismatch");
  if (!problem.fixed.empty() && static_cast<int>(problem.fixed.size()) != n) {
    throw std::invalid_argument("newton_solve: fixed-flag size mismatch");
  }
  opt.linear.validate();

  NewtonResult out;
  out.u_hat = u0;
  out.preconditioner = P;
  bool first = true;
  for (int it = 0;; ++it) {
    const SparseMatrix J = problem.jacobian(out.u_hat);
    if (rebuild) out.preconditioner = rebuild(out.u_hat, J);
    if (first) {
      // u~_0 = T^{-1} u^_0 zeroes the constrained dofs.
      for (int d = 0; d < n; ++d) {
        const auto u = static_cast<std::size_t>(d);
        const bool fixed = !problem.fixed.empty() && problem.fixed[u];
        if (out.preconditioner.constrained[u] && !fixed) out.u_hat[d] = 0.0;
      }
    }
    const Vector R = problem.residual(out.u_hat);
    const ReducedSystem rs = transform_system(R, J, out.preconditioner, problem.fixed);
    const double norm = rs.R.norm();
    if (first) out.initial_norm = norm;
    out.final_norm = norm;
    first = false;
    if (norm == 0.0 || norm <= opt.tol_drop * out.initial_norm) return out;
    if (it >= opt.max_iter) {
      throw NewtonDivergenceError("newton_solve: no convergence after " + std::to_string(opt.max_iter) +
                                      " iterations",
                                  out.u_hat);
    }

    Vector du;
    if (opt.linear.method == SolveMethod::Direct) {
      du = direct_solve(rs.J, -rs.R);
      out.linear_iterations = 1;
      out.linear_converged = true;
    } else {
      const auto M = make_solver_preconditioner(opt.linear.solver_precond, rs.J);
      const Vector weights = rs.scale.cwiseInverse();
      auto g = gmres_solve(rs.J, -rs.R, opt.linear, M.get(), weights);
      du = std::move(g.x);
      out.linear_iterations = g.iterations;
      out.linear_converged = g.converged;
      if (!g.converged) {
        out.u_hat += untransform(rs, du, n);
        out.iterations = it + 1;
        return out;
      }
    }
    out.u_hat += untransform(rs, du, n);
    out.iterations = it + 1;
  }
}

}  // namespace xfemp
