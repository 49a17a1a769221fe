#include "xfemp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

namespace xfemp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Largest eigenvalue of a symmetric positive semidefinite operator by
/// Lanczos with full reorthogonalization.
double largest_eigenvalue(const std::function<Vector(const Vector&)>& op, Eigen::Index n, int max_steps,
                          double rel_acc) {
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  Vector q(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] = dist(rng);
  q.normalize();

  const int steps = static_cast<int>(std::min<Eigen::Index>(max_steps, n));
  Eigen::MatrixXd Q(n, steps + 1);
  Q.col(0) = q;
  std::vector<double> alpha;
  std::vector<double> beta;
  double prev = 0.0;
  double theta = 0.0;
  for (int k = 0; k < steps; ++k) {
    Vector w = op(Q.col(k));
    if (!w.allFinite()) return kInf;
    const double a = Q.col(k).dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(k + 1) * (Q.leftCols(k + 1).transpose() * w);
    const double b = w.norm();

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (int i = 0; i <= k; ++i) {
      T(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i < k) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    theta = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(T, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    if (k > 2 && std::abs(theta - prev) <= rel_acc * std::abs(theta)) break;
    prev = theta;
    if (b <= 1e-14 * std::abs(theta)) break;
    beta.push_back(b);
    Q.col(k + 1) = w / b;
  }
  return theta;
}

}  // namespace

double condition_number_dense(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("condition_number: matrix must be square");
  if (A.rows() == 0) return 1.0;
  const Vector s = Eigen::BDCSVD<Eigen::MatrixXd>(A).singularValues();
  const double smin = s[s.size() - 1];
  if (!(smin > 0.0)) return kInf;
  return s[0] / smin;
}

double condition_number(const SparseMatrix& A, const CondOptions& opt) {
  if (A.rows() != A.cols()) throw std::invalid_argument("condition_number: matrix must be square");
  const Eigen::Index n = A.rows();
  const bool dense =
      opt.method == CondMethod::Dense || (opt.method == CondMethod::Auto && n <= opt.dense_limit);
  if (dense) return condition_number_dense(Eigen::MatrixXd(A));

  SparseMatrix a = A;
  a.makeCompressed();
  const SparseMatrix at = a.transpose();
  const double smax2 = largest_eigenvalue([&](const Vector& v) { return Vector(at * (a * v)); }, n,
                                          opt.max_lanczos, opt.rel_accuracy);
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) return kInf;
  // (A^T A)^{-1} = A^{-1} A^{-T}
  const double inv_smin2 = largest_eigenvalue(
      [&](const Vector& v) {
        const Vector y = lu.transpose().solve(v);
        return Vector(lu.solve(y));
      },
      n, opt.max_lanczos, opt.rel_accuracy);
  if (!std::isfinite(inv_smin2) || !(smax2 > 0.0)) return kInf;
  return std::sqrt(smax2 * inv_smin2);
}

std::optional<double> min_area_ratio(std::span<const ElementPartition> parts, bool symmetrized) {
  std::optional<double> best;
  for (const auto& p : parts) {
    if (!p.is_cut()) continue;
    const double a1 = phase_area(p, Phase::One);
    const double a2 = phase_area(p, Phase::Two);
    double r = a1 / a2;
    if (symmetrized) r = std::min(r, a2 / a1);
    if (!best || r < *best) best = r;
  }
  return best;
}

double l2_relative_error(const Vector& u, const Vector& u_ref) {
  if (u.size() != u_ref.size()) throw std::invalid_argument("l2_relative_error: size mismatch");
  const double den = u_ref.norm();
  if (!(den > 0.0)) throw std::invalid_argument("l2_relative_error: zero reference norm");
  return (u - u_ref).norm() / den;
}

double integrate_over_sweep(std::span<const std::pair<double, double>> s) {
  if (s.size() < 2) throw std::invalid_argument("integrate_over_sweep: need at least two samples");
  double total = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double dr = s[i].first - s[i - 1].first;
    if (!(dr > 0.0)) throw std::invalid_argument("integrate_over_sweep: r must be strictly increasing");
    total += 0.5 * dr * (s[i].second + s[i - 1].second);
  }
  return total;
}

namespace {

/// Largest outward distance of x from the edges of a convex CCW polygon;
/// non-positive inside.
double outside_distance(const std::vector<Vec2>& poly, const Vec2& x) {
  double d = -kInf;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    const Vec2 t = b - a;
    const double len = t.norm();
    if (len == 0.0) continue;
    d = std::max(d, (t.x() * (x.y() - a.y()) - t.y() * (x.x() - a.x())) / -len);
  }
  return d;
}

}  // namespace

std::optional<double> evaluate_field(const Discretization& disc, const Vector& u, const Vec2& x) {
  const int e = disc.mesh.locate(x);
  if (e < 0) return std::nullopt;
  const auto& part = disc.partitions[static_cast<std::size_t>(e)];
  int region = 0;
  if (part.is_cut()) {
    int best = -1;
    double best_d = kInf;
    int phase1_hit = -1;
    for (int r = 0; r < static_cast<int>(part.regions.size()); ++r) {
      const auto& reg = part.regions[static_cast<std::size_t>(r)];
      const double d = outside_distance(reg.polygon, x);
      if (reg.phase == Phase::One && d <= kInterfaceTieTol && phase1_hit < 0) phase1_hit = r;
      if (d < best_d) {
        best_d = d;
        best = r;
      }
    }
    region = phase1_hit >= 0 ? phase1_hit : best;
  }
  const Vec2 ref = disc.mesh.to_reference(e, x);
  const auto n = shape_values(ref.x(), ref.y());
  const auto& dofs = disc.table.region_dofs(e, region);
  double v = 0.0;
  for (std::size_t a = 0; a < 4; ++a) v += n[a] * u[dofs[a]];
  return v;
}

std::vector<Vec2> probe_grid(const Rect& b, int n) {
  if (n < 2) throw std::invalid_argument("probe_grid: need at least 2 points per side");
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double s = static_cast<double>(i) / (n - 1);
      const double t = static_cast<double>(j) / (n - 1);
      pts.emplace_back(b.xmin + s * (b.xmax - b.xmin), b.ymin + t * (b.ymax - b.ymin));
    }
  return pts;
}

Vector sample_field(const Discretization& disc, const Vector& u, std::span<const Vec2> pts) {
  Vector out(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto v = evaluate_field(disc, u, pts[i]);
    if (!v) throw std::out_of_range("sample_field: probe point outside the mesh");
    out[static_cast<Eigen::Index>(i)] = *v;
  }
  return out;
}

double coefficient_of_variation(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("coefficient_of_variation: no samples");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  return std::sqrt(var) / mean;
}

}  // namespace xfemp
