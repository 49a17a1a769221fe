#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xfemp/diagnostics.hpp"
#include "xfemp/pipeline.hpp"
#include "xfemp_tools/config.hpp"

namespace xfemp::tools {

// ---- bar ----------------------------------------------------------------

struct BarRow {
  double r_over_L = 0.0;
  std::string method;
  PrecondKind kind = PrecondKind::TB;
  double T_tol = 0.0;
  std::optional<double> cond;
  std::optional<double> a_min;
  std::optional<double> T_focus1;
  std::optional<double> T_focus2;
  std::optional<double> Jtilde_diag1;
  std::optional<double> Jtilde_diag2;
  double uhat_focus1 = 0.0;
  double uhat_focus2 = 0.0;
  double utilde_focus1 = 0.0;
  double utilde_focus2 = 0.0;
  int n_constrained = 0;
  bool failed = false;
};

struct BarPoint {
  Discretization disc;
  LinearSystem sys;
  GeometricPreconditioner precond;
  SolveOutcome outcome;
  BarRow row;
};

/// Focus dofs: phase 2 at the lower-left node and phase 1 at the
/// lower-right node of the focus element, when that element is cut.
BarPoint evaluate_bar_point(const ExperimentConfig& cfg, double r_over_L, const std::string& method, PrecondKind kind,
                            double T_tol);
std::vector<BarRow> run_bar_sweep(const ExperimentConfig& cfg);
void write_bar_csv(std::ostream& out, const std::vector<BarRow>& rows);

// ---- circle -------------------------------------------------------------

struct CircleRow {
  double r = 0.0;
  std::string method;
  PrecondKind kind = PrecondKind::TB;
  double T_tol = 0.0;
  SweepRecord rec;
  bool solved = false;
  std::string error;
  std::optional<double> a_min_symmetrized;
  std::size_t snapped = 0;
  Vector u_hat;          ///< physical solution (empty when unsolved)
};

/// All (method, kind, T_tol) rows for one radius.
std::vector<CircleRow> evaluate_circle_point(const ExperimentConfig& cfg, double r);
/// Rows ordered by r, then method, kind and T_tol in configuration order.
std::vector<CircleRow> run_circle_sweep(const ExperimentConfig& cfg);
void write_circle_csv(std::ostream& out, const std::vector<CircleRow>& rows);

/// Probe samples of the refined-mesh reference solution at radius r.
std::optional<Vector> fine_reference(const ExperimentConfig& cfg, double r, std::span<const Vec2> probes);

// ---- single solve -------------------------------------------------------

struct SingleSolveResult {
  Discretization disc;
  LinearSystem sys;
  GeometricPreconditioner precond;
  SolveOutcome outcome;
  std::optional<double> cond;
  std::optional<double> e_l2;  ///< against the configured exact field
};

SingleSolveResult run_single_solve(const ExperimentConfig& cfg);
/// node, x, y, phase, level, T, constrained, u_hat
void write_solution_csv(std::ostream& out, const SingleSolveResult& res);
nlohmann::json summary(const SingleSolveResult& res);

/// Runs the configured experiment and writes its output; returns the
/// process exit code (0 success, 1 every solve failed).
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace xfemp::tools
