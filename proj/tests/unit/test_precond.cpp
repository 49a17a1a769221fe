#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>

#include "xfemp/pipeline.hpp"
#include "xfemp/precond.hpp"
#include "xfemp_test/support.hpp"

namespace xfemp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int dof(const EnrichmentTable& t, int node, Phase p, int level = 1) {
  const auto d = t.dof_of(node, p, level);
  EXPECT_TRUE(d.has_value());
  return d.value_or(-1);
}

TEST(GeometricScaling, HalfCutUnitElement) {
  const StructuredMesh mesh(1, 1, Rect{});
  const auto disc = discretize(mesh, VerticalPlane{0.5, true});
  const auto tn = build_TN(mesh, disc.partitions, disc.table);
  const auto tb = build_TB(mesh, disc.partitions, disc.table);
  const int d = dof(disc.table, 0, Phase::One);
  EXPECT_NEAR(tn[d], 1.0 / std::sqrt(0.75), 1e-12);
  EXPECT_NEAR(tn[d], 1.15470, 1e-5);
  EXPECT_NEAR(tb[d], 1.0 / std::sqrt(0.6875), 1e-12);
  EXPECT_NEAR(tb[d], 1.20605, 1e-5);
  for (Eigen::Index i = 0; i < tn.size(); ++i) {
    EXPECT_GE(tn[i], 1.0);
    EXPECT_GE(tb[i], 1.0);
  }
}

TEST(GeometricScaling, SymmetricDiagonalCut) {
  // Interface x + y = 1 through nodes 1 and 2, which are snapped into phase 1.
  const StructuredMesh mesh(1, 1, Rect{});
  auto ls = build_levelset(mesh, VerticalPlane{-5.0});  // only for phi_min
  ls.phi = {-1.0, -ls.phi_min, -ls.phi_min, 1.0};
  const auto parts = partition_mesh(mesh, ls);
  const auto table = build_enrichment(mesh, parts);
  const auto tn = build_TN(mesh, parts, table);
  const auto tb = build_TB(mesh, parts, table);
  for (Phase p : {Phase::One, Phase::Two}) {
    const int d = dof(table, 1, p);
    EXPECT_NEAR(tn[d], std::sqrt(2.0), 1e-6) << phase_number(p);
    EXPECT_NEAR(tb[d], std::sqrt(2.0), 1e-6) << phase_number(p);
  }
}

TEST(GeometricScaling, UncutSupportGivesOne) {
  const StructuredMesh mesh(5, 1, Rect{0, 5, 0, 1});
  const auto disc = discretize(mesh, VerticalPlane{2.3});
  const auto tb = build_TB(mesh, disc.partitions, disc.table);
  const auto tn = build_TN(mesh, disc.partitions, disc.table);
  for (int node : {0, 1, 4, 5, 6, 7, 10, 11}) {
    for (Phase p : {Phase::One, Phase::Two}) {
      for (int l = 1; l <= disc.table.num_levels(node, p); ++l) {
        EXPECT_EQ(tb[dof(disc.table, node, p, l)], 1.0);
        EXPECT_EQ(tn[dof(disc.table, node, p, l)], 1.0);
      }
    }
  }
}

TEST(GeometricScaling, MonotoneUnderShrinkingRegion) {
  const StructuredMesh mesh(5, 1, Rect{0, 5, 0, 1});
  double prev_tn = 0.0;
  double prev_tb = 0.0;
  // node 3 sits at x = 3; its phase-1 region in element 2 is [2, r]
  for (double r = 2.9; r > 2.0 + 1e-7; r = 2.0 + (r - 2.0) * 0.5) {
    const auto disc = discretize(mesh, VerticalPlane{r});
    const int d = dof(disc.table, 3, Phase::One);
    const double tn = build_TN(mesh, disc.partitions, disc.table)[d];
    const double tb = build_TB(mesh, disc.partitions, disc.table)[d];
    EXPECT_GE(tn, prev_tn);
    EXPECT_GE(tb, prev_tb);
    prev_tn = tn;
    prev_tb = tb;
  }
  EXPECT_GT(prev_tb, 1e3);
}

TEST(GeometricScaling, SliverGrowsWithoutBound) {
  const StructuredMesh mesh(1, 1, Rect{});
  // the strip ratio is linear in eps, so T grows like eps^(-1/2)
  double prev = 0.7;
  for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const auto disc = discretize(mesh, VerticalPlane{eps});
    const double t = build_TB(mesh, disc.partitions, disc.table)[dof(disc.table, 0, Phase::One)];
    EXPECT_GT(t, prev * 9.0);
    EXPECT_NEAR(t * std::sqrt(eps), std::sqrt(0.5), 0.1);
    prev = t;
  }
}

TEST(MarkConstrained, Threshold) {
  Vector d(3);
  d << 1.0, 1.2, 1e9;
  EXPECT_EQ(mark_constrained(d, 1e8), (std::vector<char>{0, 0, 1}));
  EXPECT_EQ(mark_constrained(d, kInf), (std::vector<char>{0, 0, 0}));
  EXPECT_EQ(mark_constrained(d, 1.0 + 1e-12), (std::vector<char>{0, 1, 1}));
  EXPECT_THROW(mark_constrained(d, 1.0), std::invalid_argument);
  EXPECT_THROW(mark_constrained(d, 0.5), std::invalid_argument);
}

TEST(BuildTjac, Examples) {
  SparseMatrix j(2, 2);
  j.insert(0, 0) = 4.0;
  j.insert(1, 1) = 9.0;
  const auto t = build_Tjac(j);
  EXPECT_DOUBLE_EQ(t[0], 0.5);
  EXPECT_DOUBLE_EQ(t[1], 1.0 / 3.0);
  SparseMatrix id(3, 3);
  id.setIdentity();
  EXPECT_EQ(build_Tjac(id), Vector::Ones(3));
  SparseMatrix bad(2, 2);
  bad.insert(0, 0) = 1.0;
  bad.insert(1, 1) = -1.0;
  EXPECT_THROW(build_Tjac(bad), std::domain_error);
}

TEST(BuildTjac, UnitDiagonalAfterTransform) {
  const StructuredMesh mesh(8, 8, Rect{-2, 2, -2, 2});
  const auto disc = discretize(mesh, Circle{Vec2(0.1, 0.2), 1.1});
  BoundaryConditions bcs;
  bcs.dirichlet.push_back({BoundarySide::Left, constant_field(0.0)});
  const auto sys = assemble(disc, MaterialSpec{1.0, 100.0, {}}, bcs, StabilizedLagrange{101.0});
  GeometricPreconditioner P = make_identity(sys.size());
  P.diag = build_Tjac(jacobian(sys));
  const auto rs = transform_system(Vector::Zero(sys.size()), jacobian(sys), P);
  for (Eigen::Index i = 0; i < rs.J.rows(); ++i) EXPECT_NEAR(rs.J.coeff(i, i), 1.0, 1e-14);
}

TEST(TransformSystem, IdentityLeavesSystemUnchanged) {
  SparseMatrix j(3, 3);
  j.insert(0, 0) = 2;
  j.insert(0, 1) = -1;
  j.insert(1, 0) = -1;
  j.insert(1, 1) = 2;
  j.insert(2, 2) = 5;
  Vector r(3);
  r << 1, 2, 3;
  const auto rs = transform_system(r, j, make_identity(3));
  EXPECT_EQ(rs.R, r);
  EXPECT_EQ(Eigen::MatrixXd(rs.J), Eigen::MatrixXd(j));
  EXPECT_EQ(rs.retained, (std::vector<int>{0, 1, 2}));
}

TEST(TransformSystem, TwoByTwoExpansion) {
  SparseMatrix j(2, 2);
  j.insert(0, 0) = 3;
  j.insert(0, 1) = 5;
  j.insert(1, 0) = 7;
  j.insert(1, 1) = 11;
  GeometricPreconditioner P = make_identity(2);
  P.diag << 2.0, 10.0;
  Vector r(2);
  r << 1.0, -1.0;
  const auto rs = transform_system(r, j, P);
  EXPECT_DOUBLE_EQ(rs.J.coeff(0, 0), 4.0 * 3);
  EXPECT_DOUBLE_EQ(rs.J.coeff(0, 1), 20.0 * 5);
  EXPECT_DOUBLE_EQ(rs.J.coeff(1, 0), 20.0 * 7);
  EXPECT_DOUBLE_EQ(rs.J.coeff(1, 1), 100.0 * 11);
  EXPECT_DOUBLE_EQ(rs.R[0], 2.0);
  EXPECT_DOUBLE_EQ(rs.R[1], -10.0);
}

TEST(TransformSystem, EliminatesConstrainedAndFixed) {
  SparseMatrix j(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) j.insert(i, k) = 1.0 + i * 4 + k;
  GeometricPreconditioner P = make_identity(4);
  P.constrained[1] = 1;
  const std::vector<char> fixed{0, 0, 0, 1};
  const auto rs = transform_system(Vector::Ones(4), j, P, fixed);
  EXPECT_EQ(rs.retained, (std::vector<int>{0, 2}));
  EXPECT_DOUBLE_EQ(rs.J.coeff(1, 0), 9.0);
  EXPECT_DOUBLE_EQ(rs.J.coeff(0, 1), 3.0);
  const Vector u = untransform(rs, Vector::Constant(2, 2.0), 4);
  EXPECT_EQ(u, (Vector(4) << 2.0, 0.0, 2.0, 0.0).finished());
  EXPECT_THROW(transform_system(Vector::Ones(3), j, P), std::invalid_argument);
}

TEST(TransformSystem, CongruenceEigenvalueOracle) {
  std::mt19937_64 rng(515);
  const auto res = testing::check_congruence_eigenvalues(rng, 20, 1e-10);
  EXPECT_TRUE(res.ok) << res.detail;
}

TEST(Untransform, RoundTripAndIdentity) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.5, 50.0);
  GeometricPreconditioner P = make_identity(6);
  Vector x(6);
  for (int i = 0; i < 6; ++i) {
    P.diag[i] = u(rng);
    x[i] = u(rng) - 25.0;
  }
  EXPECT_EQ(untransform_solution(x, make_identity(6)), x);
  const Vector back = untransform_solution(transform_initial_guess(x, P), P);
  EXPECT_LT((back - x).cwiseAbs().maxCoeff(), 1e-13);
  P.constrained[2] = 1;
  EXPECT_EQ(untransform_solution(x, P)[2], 0.0);
  EXPECT_EQ(transform_initial_guess(x, P)[2], 0.0);
}

TEST(SolutionInvariance, RandomDiagonalScaling) {
  const StructuredMesh mesh(10, 10, Rect{-10, 10, -10, 10});
  const auto disc = discretize(mesh, Circle{Vec2(0, 0), 4.37});
  BoundaryConditions bcs;
  bcs.dirichlet.push_back({BoundarySide::Left, constant_field(0.0)});
  bcs.dirichlet.push_back({BoundarySide::Right, constant_field(100.0)});
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (const ConstraintMethod m : {ConstraintMethod(StabilizedLagrange{2002.0}), ConstraintMethod(Nitsche{2.002})}) {
    const auto sys = assemble(disc, MaterialSpec{2.0, 2000.0, {}}, bcs, m);
    const auto ref = solve_linear(sys, make_identity(sys.size()), SolverConfig{});
    ASSERT_TRUE(ref.ok);
    for (int s = 0; s < 5; ++s) {
      GeometricPreconditioner P = make_identity(sys.size());
      for (int i = 0; i < sys.size(); ++i) P.diag[i] = std::pow(10.0, u(rng));
      const auto out = solve_linear(sys, P, SolverConfig{});
      ASSERT_TRUE(out.ok);
      EXPECT_LT((out.u_hat - ref.u_hat).norm() / ref.u_hat.norm(), 1e-9);
    }
    const auto tb = solve_linear(sys, build_preconditioner(disc, sys, {PrecondKind::TB, kInf}), SolverConfig{});
    ASSERT_TRUE(tb.ok);
    EXPECT_LT((tb.u_hat - ref.u_hat).norm() / ref.u_hat.norm(), 1e-9);
  }
}

TEST(SolutionInvariance, BarWithoutConstraints) {
  const StructuredMesh mesh(5, 1, Rect{0, 5, 0, 1});
  BoundaryConditions bcs;
  bcs.dirichlet.push_back({BoundarySide::Left, constant_field(0.0)});
  bcs.dirichlet.push_back({BoundarySide::Right, constant_field(1.0)});
  for (double rl : {0.41, 0.45, 0.5, 0.55, 0.59}) {
    const auto disc = discretize(mesh, VerticalPlane{5.0 * rl});
    const auto sys = assemble(disc, MaterialSpec{1.0, 2.0, {}}, bcs, StabilizedLagrange{3.0});
    const auto P = build_preconditioner(disc, sys, {PrecondKind::TB, kInf});
    EXPECT_EQ(P.num_constrained(), 0);
    const auto a = solve_linear(sys, P, SolverConfig{});
    const auto b = solve_linear(sys, make_identity(sys.size()), SolverConfig{});
    ASSERT_TRUE(a.ok && b.ok);
    EXPECT_LT((a.u_hat - b.u_hat).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(BuildPreconditioner, DirichletDofsNeverConstrained) {
  const StructuredMesh mesh(5, 1, Rect{0, 5, 0, 1});
  const auto disc = discretize(mesh, VerticalPlane{4.0 + 1e-7});
  BoundaryConditions bcs;
  bcs.dirichlet.push_back({BoundarySide::Left, constant_field(0.0)});
  bcs.dirichlet.push_back({BoundarySide::Right, constant_field(1.0)});
  const auto sys = assemble(disc, MaterialSpec{1.0, 2.0, {}}, bcs, StabilizedLagrange{3.0});
  const auto tb = build_TB(mesh, disc.partitions, disc.table);
  const auto P = build_preconditioner(disc, sys, {PrecondKind::TB, 10.0});
  EXPECT_GT(P.num_constrained(), 0);
  for (int d = 0; d < sys.size(); ++d) {
    if (sys.dirichlet.contains(d)) EXPECT_EQ(P.constrained[static_cast<std::size_t>(d)], 0);
    if (P.constrained[static_cast<std::size_t>(d)]) EXPECT_GT(tb[d], 10.0);
  }
  // all kinds share the TB-based constrained set
  for (auto kind : {PrecondKind::Identity, PrecondKind::TN, PrecondKind::Tjac})
    EXPECT_EQ(build_preconditioner(disc, sys, {kind, 10.0}).constrained, P.constrained);
}

TEST(PrecondKind, ParseAndPrint) {
  EXPECT_EQ(parse_precond_kind("I"), PrecondKind::Identity);
  EXPECT_EQ(parse_precond_kind("identity"), PrecondKind::Identity);
  EXPECT_EQ(parse_precond_kind("tb"), PrecondKind::TB);
  EXPECT_EQ(parse_precond_kind("TN"), PrecondKind::TN);
  EXPECT_EQ(parse_precond_kind("Tjac"), PrecondKind::Tjac);
  EXPECT_THROW(parse_precond_kind("ilu"), std::invalid_argument);
  EXPECT_STREQ(to_string(PrecondKind::TB), "TB");
}

}  // namespace
}  // namespace xfemp
