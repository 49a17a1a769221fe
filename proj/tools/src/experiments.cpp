#include "xfemp_tools/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "xfemp_tools/csv.hpp"

namespace xfemp::tools {

namespace {

CondOptions cond_options(const ExperimentConfig& cfg) {
  CondOptions o;
  o.dense_limit = cfg.dense_cond_limit;
  return o;
}

std::optional<Eigen::Index> reduced_index(const ReducedSystem& rs, int dof) {
  const auto it = std::lower_bound(rs.retained.begin(), rs.retained.end(), dof);
  if (it == rs.retained.end() || *it != dof) return std::nullopt;
  return static_cast<Eigen::Index>(it - rs.retained.begin());
}

/// Runs `work(i)` for i in [0, n) on up to `threads` workers.
template <class F>
void parallel_for(std::size_t n, int threads, F&& work) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(workers, n); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) work(i);
    });
  }
  for (auto& th : pool) th.join();
}

double bar_offset(const ExperimentConfig& cfg, double r_over_L) {
  return cfg.bounds.xmin + r_over_L * (cfg.bounds.xmax - cfg.bounds.xmin);
}

}  // namespace

BarPoint evaluate_bar_point(const ExperimentConfig& cfg, double rl, const std::string& method, PrecondKind kind,
                            double T_tol) {
  const auto mesh = cfg.mesh();
  BarPoint bp{discretize(mesh, cfg.geometry_at(bar_offset(cfg, rl)), cfg.snap_factor), {}, {}, {}, {}};
  auto& row = bp.row;
  row.r_over_L = rl;
  row.method = method;
  row.kind = kind;
  row.T_tol = T_tol;
  row.a_min = min_area_ratio(bp.disc.partitions);
  bp.sys = assemble(bp.disc, cfg.material(), cfg.boundary(), cfg.constraint(method));
  try {
    bp.precond = build_preconditioner(bp.disc, bp.sys, {kind, T_tol, PrecondKind::TB});
  } catch (const std::domain_error& e) {
    row.failed = true;
    bp.outcome.error = e.what();
    return bp;
  }
  row.n_constrained = bp.precond.num_constrained();
  bp.outcome = solve_linear(bp.sys, bp.precond, cfg.solver);
  const auto& rs = bp.outcome.reduced;
  if (cfg.compute_cond) row.cond = condition_number(rs.J, cond_options(cfg));
  row.failed = !bp.outcome.ok;

  const int fe = cfg.focus_element;
  if (fe < 0 || fe >= mesh.num_elements() || !bp.disc.partitions[static_cast<std::size_t>(fe)].is_cut()) return bp;
  const auto nodes = mesh.element_nodes(fe);
  const std::array<std::pair<int, Phase>, 2> focus = {std::pair{nodes[0], Phase::Two}, std::pair{nodes[1], Phase::One}};
  for (std::size_t f = 0; f < 2; ++f) {
    const auto level = bp.disc.table.level_of(fe, focus[f].first, focus[f].second);
    if (!level) continue;
    const auto dof = bp.disc.table.dof_of(focus[f].first, focus[f].second, *level);
    if (!dof) continue;
    auto& T = f == 0 ? row.T_focus1 : row.T_focus2;
    auto& Jd = f == 0 ? row.Jtilde_diag1 : row.Jtilde_diag2;
    auto& uh = f == 0 ? row.uhat_focus1 : row.uhat_focus2;
    auto& ut = f == 0 ? row.utilde_focus1 : row.utilde_focus2;
    T = bp.precond.diag[*dof];
    const auto k = reduced_index(rs, *dof);
    if (!k) continue;
    Jd = rs.J.coeff(*k, *k);
    if (bp.outcome.ok) {
      uh = bp.outcome.u_hat[*dof];
      ut = bp.outcome.u_tilde[*k];
    }
  }
  return bp;
}

std::vector<BarRow> run_bar_sweep(const ExperimentConfig& cfg) {
  const auto rs = cfg.sweep.values();
  std::vector<std::vector<BarRow>> per(rs.size());
  parallel_for(rs.size(), cfg.threads, [&](std::size_t i) {
    for (const auto& m : cfg.methods)
      for (auto kind : cfg.precond_kinds)
        for (double tol : cfg.T_tols) per[i].push_back(evaluate_bar_point(cfg, rs[i], m, kind, tol).row);
  });
  std::vector<BarRow> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

void write_bar_csv(std::ostream& out, const std::vector<BarRow>& rows) {
  CsvWriter w(out);
  w.row({"r_over_L", "cond", "A_min", "T_focus1", "T_focus2", "Jtilde_diag1", "Jtilde_diag2", "uhat_focus1",
         "uhat_focus2", "utilde_focus1", "utilde_focus2", "n_constrained", "failed", "precond_kind", "T_tol",
         "method"});
  for (const auto& r : rows) {
    w.row({format_double(r.r_over_L), format_optional(r.cond), format_optional(r.a_min), format_optional(r.T_focus1),
           format_optional(r.T_focus2), format_optional(r.Jtilde_diag1), format_optional(r.Jtilde_diag2),
           format_double(r.uhat_focus1), format_double(r.uhat_focus2), format_double(r.utilde_focus1),
           format_double(r.utilde_focus2), std::to_string(r.n_constrained), r.failed ? "1" : "0", to_string(r.kind),
           format_double(r.T_tol), r.method});
  }
}

std::optional<Vector> fine_reference(const ExperimentConfig& cfg, double r, std::span<const Vec2> probes) {
  const auto mesh = build_structured_mesh(cfg.nx * cfg.reference_refine, cfg.ny * cfg.reference_refine, cfg.bounds);
  const auto disc = discretize(mesh, cfg.geometry_at(r), cfg.snap_factor);
  const auto sys = assemble(disc, cfg.material(), cfg.boundary(), cfg.constraint(cfg.reference_method));
  const auto P = build_preconditioner(disc, sys, {PrecondKind::TB, std::numeric_limits<double>::infinity()});
  const auto out = solve_linear(sys, P, SolverConfig{});
  if (!out.ok) return std::nullopt;
  return sample_field(disc, out.u_hat, probes);
}

std::vector<CircleRow> evaluate_circle_point(const ExperimentConfig& cfg, double r) {
  const auto mesh = cfg.mesh();
  const auto disc = discretize(mesh, cfg.geometry_at(r), cfg.snap_factor);
  const auto a_min = min_area_ratio(disc.partitions);
  const auto a_sym = min_area_ratio(disc.partitions, true);
  std::vector<Vec2> probes;
  std::optional<Vector> ref;
  if (cfg.reference != ReferenceKind::None) probes = probe_grid(cfg.bounds, cfg.probe_points);
  if (cfg.reference == ReferenceKind::FineMesh) ref = fine_reference(cfg, r, probes);

  std::vector<CircleRow> rows;
  for (const auto& method : cfg.methods) {
    const auto sys = assemble(disc, cfg.material(), cfg.boundary(), cfg.constraint(method));
    if (cfg.reference == ReferenceKind::IdentityDirect) {
      const auto o = solve_linear(sys, make_identity(sys.size()), SolverConfig{});
      ref = o.ok ? std::optional<Vector>(sample_field(disc, o.u_hat, probes)) : std::nullopt;
    }
    for (auto kind : cfg.precond_kinds) {
      for (double tol : cfg.T_tols) {
        CircleRow row;
        row.r = r;
        row.method = method;
        row.kind = kind;
        row.T_tol = tol;
        row.a_min_symmetrized = a_sym;
        row.snapped = disc.levelset.num_snapped;
        row.rec.r = r;
        row.rec.a_min = a_min;
        row.rec.dofs = sys.size();
        GeometricPreconditioner P;
        try {
          P = build_preconditioner(disc, sys, {kind, tol, PrecondKind::TB});
        } catch (const std::domain_error& e) {
          row.error = e.what();
          row.rec.gmres_failed = cfg.gmres_variants.empty() ? 0 : 7;
          rows.push_back(std::move(row));
          continue;
        }
        row.rec.n_constrained = P.num_constrained();
        const auto out = solve_linear(sys, P, cfg.solver);
        if (cfg.compute_cond) row.rec.cond = condition_number(out.reduced.J, cond_options(cfg));
        row.solved = out.ok;
        row.error = out.error;
        if (out.ok) {
          row.u_hat = out.u_hat;
          if (ref) row.rec.e_l2 = l2_relative_error(sample_field(disc, out.u_hat, probes), *ref);
        }
        for (auto variant : cfg.gmres_variants) {
          SolverConfig g = cfg.solver;
          g.method = SolveMethod::GMRES;
          g.solver_precond = variant;
          const auto o = solve_linear(sys, P, g);
          const int bit = variant == SolverPrecond::None ? 1 : variant == SolverPrecond::Jacobi ? 2 : 4;
          auto& slot = variant == SolverPrecond::None     ? row.rec.n_itr_none
                       : variant == SolverPrecond::Jacobi ? row.rec.n_itr_jac
                                                          : row.rec.n_itr_ilu;
          slot = o.iterations;
          if (!o.converged) row.rec.gmres_failed |= bit;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<CircleRow> run_circle_sweep(const ExperimentConfig& cfg) {
  const auto rs = cfg.sweep.values();
  std::vector<std::vector<CircleRow>> per(rs.size());
  parallel_for(rs.size(), cfg.threads, [&](std::size_t i) { per[i] = evaluate_circle_point(cfg, rs[i]); });
  std::vector<CircleRow> out;
  for (auto& v : per)
    for (auto& row : v) out.push_back(std::move(row));
  return out;
}

void write_circle_csv(std::ostream& out, const std::vector<CircleRow>& rows) {
  CsvWriter w(out);
  w.row({"r", "method", "precond_kind", "T_tol", "cond", "A_min", "e_L2", "n_itr_none", "n_itr_jac", "n_itr_ilu",
         "gmres_failed", "n_constrained", "dofs"});
  for (const auto& r : rows) {
    w.row({format_double(r.r), r.method, to_string(r.kind), format_double(r.T_tol), format_optional(r.rec.cond),
           format_optional(r.rec.a_min), format_optional(r.rec.e_l2), format_optional(r.rec.n_itr_none),
           format_optional(r.rec.n_itr_jac), format_optional(r.rec.n_itr_ilu), std::to_string(r.rec.gmres_failed),
           std::to_string(r.rec.n_constrained), std::to_string(r.rec.dofs)});
  }
}

SingleSolveResult run_single_solve(const ExperimentConfig& cfg) {
  const auto mesh = cfg.mesh();
  const double p = cfg.geometry == "circle" ? cfg.radius : cfg.plane_offset;
  SingleSolveResult res{discretize(mesh, cfg.geometry_at(p), cfg.snap_factor), {}, {}, {}, {}, {}};
  const std::string method = cfg.methods.empty() ? std::string("stabilized_lagrange") : cfg.methods.front();
  const PrecondKind kind = cfg.precond_kinds.empty() ? PrecondKind::TB : cfg.precond_kinds.front();
  const double tol = cfg.T_tols.empty() ? std::numeric_limits<double>::infinity() : cfg.T_tols.front();
  res.sys = assemble(res.disc, cfg.material(), cfg.boundary(), cfg.constraint(method));
  try {
    res.precond = build_preconditioner(res.disc, res.sys, {kind, tol, PrecondKind::TB});
  } catch (const std::domain_error& e) {
    res.outcome.error = e.what();
    return res;
  }
  res.outcome = solve_linear(res.sys, res.precond, cfg.solver);
  if (cfg.compute_cond) res.cond = condition_number(res.outcome.reduced.J, cond_options(cfg));
  if (res.outcome.ok && cfg.exact) {
    const auto probes = probe_grid(cfg.bounds, cfg.probe_points);
    const auto u = sample_field(res.disc, res.outcome.u_hat, probes);
    Vector ex(u.size());
    for (std::size_t i = 0; i < probes.size(); ++i)
      ex[static_cast<Eigen::Index>(i)] = cfg.exact->a + cfg.exact->b * probes[i].x() + cfg.exact->c * probes[i].y();
    res.e_l2 = l2_relative_error(u, ex);
  }
  return res;
}

void write_solution_csv(std::ostream& out, const SingleSolveResult& res) {
  CsvWriter w(out);
  w.row({"node", "x", "y", "phase", "level", "T", "constrained", "u_hat"});
  const auto& t = res.disc.table;
  for (int d = 0; d < t.total_dofs(); ++d) {
    const auto& k = t.key(d);
    const Vec2 x = res.disc.mesh.node(k.node);
    const bool have_p = res.precond.diag.size() == t.total_dofs();
    w.row({std::to_string(k.node), format_double(x.x()), format_double(x.y()), std::to_string(phase_number(k.phase)),
           std::to_string(k.level), have_p ? format_double(res.precond.diag[d]) : std::string(),
           have_p && res.precond.constrained[static_cast<std::size_t>(d)] ? "1" : "0",
           res.outcome.ok ? format_double(res.outcome.u_hat[d]) : std::string()});
  }
}

nlohmann::json summary(const SingleSolveResult& res) {
  nlohmann::json j;
  j["solved"] = res.outcome.ok;
  if (!res.outcome.error.empty()) j["error"] = res.outcome.error;
  j["dofs"] = res.sys.size();
  j["retained"] = res.outcome.reduced.retained.size();
  j["n_constrained"] = res.precond.constrained.empty() ? 0 : res.precond.num_constrained();
  j["iterations"] = res.outcome.iterations;
  j["converged"] = res.outcome.converged;
  if (res.cond) j["cond"] = std::isfinite(*res.cond) ? nlohmann::json(*res.cond) : nlohmann::json("inf");
  if (res.e_l2) j["e_L2"] = *res.e_l2;
  if (const auto a = min_area_ratio(res.disc.partitions)) j["A_min"] = *a;
  return j;
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  const std::string path = cfg.output.empty() ? std::string(to_string(cfg.experiment)) + ".csv" : cfg.output;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file '" + path + "'");
  switch (cfg.experiment) {
    case Experiment::BarSweep: {
      const auto rows = run_bar_sweep(cfg);
      write_bar_csv(out, rows);
      const auto failed = std::count_if(rows.begin(), rows.end(), [](const BarRow& r) { return r.failed; });
      log << "bar_sweep: " << rows.size() << " rows, " << failed << " failed -> " << path << "\n";
      return !rows.empty() && failed == static_cast<long>(rows.size()) ? 1 : 0;
    }
    case Experiment::CircleSweep: {
      const auto rows = run_circle_sweep(cfg);
      write_circle_csv(out, rows);
      const auto failed = std::count_if(rows.begin(), rows.end(), [](const CircleRow& r) { return !r.solved; });
      log << "circle_sweep: " << rows.size() << " rows, " << failed << " unsolved -> " << path << "\n";
      return !rows.empty() && failed == static_cast<long>(rows.size()) ? 1 : 0;
    }
    case Experiment::SingleSolve: {
      const auto res = run_single_solve(cfg);
      write_solution_csv(out, res);
      log << summary(res).dump() << "\n";
      return res.outcome.ok ? 0 : 1;
    }
  }
  return 1;
}

}  // namespace xfemp::tools
