#pragma once

#include "xfemp/assembly.hpp"
#include "xfemp/pipeline.hpp"

namespace xfemp::bench {

inline Discretization circle_disc(int n, double r = 4.37) {
  const auto mesh = build_structured_mesh(n, n, Rect{-10.0, 10.0, -10.0, 10.0});
  return discretize(mesh, Circle{Vec2::Zero(), r});
}

inline BoundaryConditions left_right_dirichlet() {
  BoundaryConditions bc;
  bc.dirichlet.push_back({BoundarySide::Left, [](const Vec2&) { return 0.0; }});
  bc.dirichlet.push_back({BoundarySide::Right, [](const Vec2&) { return 100.0; }});
  return bc;
}

inline MaterialSpec two_phase() { return MaterialSpec{2.0, 2000.0, {}}; }

}  // namespace xfemp::bench
