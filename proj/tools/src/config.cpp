#include "xfemp_tools/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace xfemp::tools {

using nlohmann::json;

std::vector<double> SweepRange::values() const {
  std::vector<double> v;
  if (step > 0.0) {
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) v.push_back(start + static_cast<double>(i) * step);
  } else {
    v.push_back(start);
  }
  v.insert(v.end(), extra.begin(), extra.end());
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || std::abs(x - out.back()) > 1e-12) out.push_back(x);
  return out;
}

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::BarSweep:
      return "bar_sweep";
    case Experiment::CircleSweep:
      return "circle_sweep";
    case Experiment::SingleSolve:
      return "single_solve";
  }
  return "?";
}

BoundarySide parse_side(const std::string& s) {
  for (auto side : kAllSides)
    if (s == to_string(side)) return side;
  throw ConfigError("unknown boundary side '" + s + "'");
}

ConstraintMethod ExperimentConfig::constraint(const std::string& method) const {
  if (method == "stabilized_lagrange" || method == "sl") return StabilizedLagrange{gamma_S.value_or(k1 + k2)};
  if (method == "nitsche") return Nitsche{gamma_N.value_or(1e-3 * (k1 + k2))};
  throw ConfigError("unknown constraint method '" + method + "'");
}

MaterialSpec ExperimentConfig::material() const { return {k1, k2, {}}; }

BoundaryConditions ExperimentConfig::boundary() const {
  BoundaryConditions bc;
  for (const auto& [side, d] : dirichlet) bc.dirichlet.push_back({side, linear_field(d.a, d.b, d.c)});
  for (const auto& [side, d] : neumann) bc.neumann.push_back({side, linear_field(d.a, d.b, d.c)});
  return bc;
}

StructuredMesh ExperimentConfig::mesh() const { return build_structured_mesh(nx, ny, bounds); }

GeometrySpec ExperimentConfig::geometry_at(double p) const {
  if (geometry == "circle") return Circle{center, p};
  return VerticalPlane{p, phase2_right};
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::stringstream ks(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ks, part, '.')) {
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    parts.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ConfigError("override key '" + key + "' descends into a non-object");
    node = &(*node)[parts[i]];
  }
  if (!node->is_object() && !node->is_null()) throw ConfigError("override key '" + key + "' descends into a non-object");
  (*node)[parts.back()] = value;
}

namespace {

double parse_tol(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "Infinity") return std::numeric_limits<double>::infinity();
  }
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  throw ConfigError("T_tol must be a number or \"inf\"");
}

LinearData parse_linear(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0, 0.0};
  if (j.is_array() && j.size() == 3) return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  throw ConfigError("boundary value must be a number or [a, b, c]");
}

template <class T>
std::vector<T> as_list(const json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

ReferenceKind parse_reference(const std::string& s) {
  if (s == "none") return ReferenceKind::None;
  if (s == "fine") return ReferenceKind::FineMesh;
  if (s == "identity_direct") return ReferenceKind::IdentityDirect;
  throw ConfigError("unknown error reference '" + s + "'");
}

Experiment parse_experiment(const std::string& s) {
  if (s == "bar_sweep") return Experiment::BarSweep;
  if (s == "circle_sweep") return Experiment::CircleSweep;
  if (s == "single_solve") return Experiment::SingleSolve;
  throw ConfigError("unknown experiment '" + s + "'");
}

void parse_into(const json& doc, ExperimentConfig& c) {
  if (!doc.is_object()) throw ConfigError("configuration root must be an object");
  if (!doc.contains("experiment")) throw ConfigError("missing 'experiment'");
  c.experiment = parse_experiment(doc.at("experiment").get<std::string>());

  if (doc.contains("mesh")) {
    const auto& m = doc.at("mesh");
    c.nx = m.value("nx", c.nx);
    c.ny = m.value("ny", c.ny);
    if (m.contains("bounds")) {
      const auto b = m.at("bounds").get<std::vector<double>>();
      if (b.size() != 4) throw ConfigError("mesh.bounds must be [xmin, xmax, ymin, ymax]");
      c.bounds = {b[0], b[1], b[2], b[3]};
    }
  }
  if (c.nx < 1 || c.ny < 1) throw ConfigError("mesh.nx and mesh.ny must be positive");
  if (!(c.bounds.xmax > c.bounds.xmin) || !(c.bounds.ymax > c.bounds.ymin)) throw ConfigError("mesh.bounds are empty");

  if (doc.contains("geometry")) {
    const auto& g = doc.at("geometry");
    c.geometry = g.value("type", c.geometry);
    if (c.geometry != "circle" && c.geometry != "plane") throw ConfigError("geometry.type must be circle or plane");
    if (g.contains("center")) {
      const auto v = g.at("center").get<std::vector<double>>();
      if (v.size() != 2) throw ConfigError("geometry.center must have two entries");
      c.center = Vec2(v[0], v[1]);
    }
    c.radius = g.value("radius", c.radius);
    c.plane_offset = g.value("offset", c.plane_offset);
    c.phase2_right = g.value("phase2_right", c.phase2_right);
  }
  if (doc.contains("levelset")) c.snap_factor = doc.at("levelset").value("snap_factor", c.snap_factor);
  if (!(c.snap_factor > 0.0)) throw ConfigError("levelset.snap_factor must be positive");

  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    c.sweep.start = s.at("start").get<double>();
    c.sweep.stop = s.value("stop", c.sweep.start);
    c.sweep.step = s.value("step", 0.0);
    if (s.contains("extra")) c.sweep.extra = s.at("extra").get<std::vector<double>>();
    if (c.sweep.step < 0.0 || (c.sweep.step == 0.0 && c.sweep.stop != c.sweep.start)) {
      throw ConfigError("sweep.step must be positive");
    }
  } else if (c.experiment != Experiment::SingleSolve) {
    throw ConfigError("sweep experiments need a 'sweep' section");
  }

  if (doc.contains("material")) {
    const auto& m = doc.at("material");
    c.k1 = m.value("k1", c.k1);
    c.k2 = m.value("k2", c.k2);
  }
  if (!(c.k1 > 0.0) || !(c.k2 > 0.0)) throw ConfigError("material conductivities must be positive");

  if (doc.contains("boundary")) {
    const auto& b = doc.at("boundary");
    if (b.contains("dirichlet"))
      for (const auto& [k, v] : b.at("dirichlet").items()) c.dirichlet[parse_side(k)] = parse_linear(v);
    if (b.contains("neumann"))
      for (const auto& [k, v] : b.at("neumann").items()) c.neumann[parse_side(k)] = parse_linear(v);
    for (const auto& [side, v] : c.neumann)
      if (c.dirichlet.contains(side)) throw ConfigError(std::string("side '") + to_string(side) + "' is both Dirichlet and Neumann");
  }

  if (doc.contains("methods")) c.methods = as_list<std::string>(doc.at("methods"));
  if (doc.contains("constraint")) {
    const auto& k = doc.at("constraint");
    if (k.contains("gamma_S") && !k.at("gamma_S").is_null()) c.gamma_S = k.at("gamma_S").get<double>();
    if (k.contains("gamma_N") && !k.at("gamma_N").is_null()) c.gamma_N = k.at("gamma_N").get<double>();
  }
  for (const auto& m : c.methods) {
    const auto cm = c.constraint(m);
    std::visit([](const auto& x) {
      if (!(x.gamma > 0.0)) throw ConfigError("constraint factors must be positive");
    }, cm);
  }

  if (doc.contains("precond")) {
    const auto& p = doc.at("precond");
    if (p.contains("kinds")) {
      c.precond_kinds.clear();
      for (const auto& s : as_list<std::string>(p.at("kinds"))) c.precond_kinds.push_back(parse_precond_kind(s));
    }
    if (p.contains("T_tol")) {
      c.T_tols.clear();
      const auto& t = p.at("T_tol");
      if (t.is_array()) {
        for (const auto& x : t) c.T_tols.push_back(parse_tol(x));
      } else {
        c.T_tols.push_back(parse_tol(t));
      }
    }
  }
  for (double t : c.T_tols)
    if (!(t > 1.0)) throw ConfigError("T_tol must exceed 1");

  if (doc.contains("solver")) {
    const auto& s = doc.at("solver");
    const auto method = s.value("method", std::string("direct"));
    if (method == "direct") {
      c.solver.method = SolveMethod::Direct;
    } else if (method == "gmres") {
      c.solver.method = SolveMethod::GMRES;
    } else {
      throw ConfigError("solver.method must be direct or gmres");
    }
    c.solver.gmres_tol = s.value("gmres_tol", c.solver.gmres_tol);
    c.solver.gmres_max_iter = s.value("gmres_max_iter", c.solver.gmres_max_iter);
    c.solver.restart = s.value("restart", c.solver.restart);
    c.solver.solver_precond = parse_solver_precond(s.value("precond", std::string("none")));
    if (s.contains("gmres_variants")) {
      c.gmres_variants.clear();
      for (const auto& v : as_list<std::string>(s.at("gmres_variants"))) c.gmres_variants.push_back(parse_solver_precond(v));
    }
    try {
      c.solver.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  if (doc.contains("cond")) {
    c.compute_cond = doc.at("cond").value("enabled", c.compute_cond);
    c.dense_cond_limit = doc.at("cond").value("dense_limit", c.dense_cond_limit);
  }
  if (doc.contains("error")) {
    const auto& e = doc.at("error");
    c.reference = parse_reference(e.value("reference", std::string("none")));
    c.reference_refine = e.value("refine", c.reference_refine);
    c.probe_points = e.value("probe", c.probe_points);
    c.reference_method = e.value("method", c.reference_method);
    if (c.reference_refine < 1 || c.probe_points < 2) throw ConfigError("error.refine >= 1 and error.probe >= 2 required");
  }
  c.focus_element = doc.value("focus_element", c.focus_element);
  if (doc.contains("exact") && !doc.at("exact").is_null()) c.exact = parse_linear(doc.at("exact"));
  c.output = doc.value("output", c.output);
  c.threads = doc.value("threads", c.threads);
  if (c.threads < 1) throw ConfigError("threads must be positive");
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  try {
    parse_into(doc, c);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path.string() + "'");
  json doc = json::parse(in, nullptr, false, true);
  if (doc.is_discarded()) throw ConfigError("configuration file '" + path.string() + "' is not valid JSON");
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_config(doc);
}

}  // namespace xfemp::tools
