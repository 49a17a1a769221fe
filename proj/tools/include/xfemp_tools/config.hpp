#pragma once

#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xfemp/assembly.hpp"
#include "xfemp/levelset.hpp"
#include "xfemp/mesh.hpp"
#include "xfemp/precond.hpp"
#include "xfemp/solver.hpp"

namespace xfemp::tools {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { BarSweep, CircleSweep, SingleSolve };

struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  std::vector<double> extra;  ///< additional points merged into the grid

  /// Sorted, duplicates (within 1e-12) removed.
  std::vector<double> values() const;
};

/// Boundary value a + b x + c y.
struct LinearData {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

enum class ReferenceKind { None, FineMesh, IdentityDirect };

struct ExperimentConfig {
  Experiment experiment = Experiment::SingleSolve;

  int nx = 1;
  int ny = 1;
  Rect bounds{0.0, 1.0, 0.0, 1.0};

  std::string geometry = "circle";  ///< "circle" or "plane"
  Vec2 center{0.0, 0.0};
  double radius = 1.0;       ///< single_solve circle
  double plane_offset = 0.5; ///< single_solve plane
  bool phase2_right = true;
  double snap_factor = kDefaultSnapFactor;

  SweepRange sweep;  ///< radius, or r/L for the bar

  double k1 = 1.0;
  double k2 = 1.0;
  std::map<BoundarySide, LinearData> dirichlet;
  std::map<BoundarySide, LinearData> neumann;

  std::vector<std::string> methods{"stabilized_lagrange"};
  std::optional<double> gamma_S;  ///< defaults to k1 + k2
  std::optional<double> gamma_N;  ///< defaults to 1e-3 (k1 + k2)

  std::vector<PrecondKind> precond_kinds{PrecondKind::TB};
  std::vector<double> T_tols{std::numeric_limits<double>::infinity()};

  SolverConfig solver;
  std::vector<SolverPrecond> gmres_variants;

  bool compute_cond = true;
  int dense_cond_limit = 400;

  ReferenceKind reference = ReferenceKind::None;
  int reference_refine = 4;
  int probe_points = 101;
  std::string reference_method = "stabilized_lagrange";

  int focus_element = 2;  ///< bar sweep: element whose dofs are tracked
  std::optional<LinearData> exact;  ///< single_solve: exact linear field

  std::string output;
  int threads = 1;

  ConstraintMethod constraint(const std::string& method) const;
  MaterialSpec material() const;
  BoundaryConditions boundary() const;
  StructuredMesh mesh() const;
  GeometrySpec geometry_at(double parameter) const;
};

/// Applies "a.b.c=value" overrides; the value is parsed as JSON when
/// possible and taken as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

const char* to_string(Experiment e);
BoundarySide parse_side(const std::string& s);

}  // namespace xfemp::tools
