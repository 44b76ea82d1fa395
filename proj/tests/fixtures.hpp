#pragma once

#include <cmath>
#include <string>

#include "holo/connection.hpp"
#include "holo/path.hpp"

// Shared connection/path fixtures, built in code.  The JSON files under
// fixtures/ present the same data through the config loader; the cocycle and
// acceptance tests cross-check the two presentations against each other.

namespace fx {

using namespace holo;

inline Box box2(double lo0, double hi0, double lo1, double hi1) {
  Box b;
  b.lo = Eigen::Vector2d(lo0, lo1);
  b.hi = Eigen::Vector2d(hi0, hi1);
  return b;
}

inline AtlasPtr plane_atlas(double half_width = 4.0) {
  return std::make_shared<Atlas>(
      2, std::vector<Chart>{{"c", box2(-half_width, half_width, -half_width, half_width)}},
      std::vector<Overlap>{});
}

/// A = a e dx1 on the plane (U(1) flux with constant coefficient).
inline ConnectionData flux_conn(double a, AtlasPtr atlas = plane_atlas()) {
  const auto z = dsl::parse_expr("[[0, 0],[0, 0]]", 2);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "[[0, %.17g],[%.17g, 0]]", -a, a);
  const auto a1 = dsl::parse_expr(buf, 2);
  return ConnectionData(Atlas(*atlas), lie::GroupSpec::u1(), {{"c", {z, a1}}}, {});
}

/// A = x0 e dx1 on the plane: curvature F_01 = e everywhere.
inline ConnectionData gradient_flux_conn(AtlasPtr atlas = plane_atlas()) {
  const auto z = dsl::parse_expr("[[0, 0],[0, 0]]", 2);
  const auto a1 = dsl::parse_expr("[[0, -x0],[x0, 0]]", 2);
  return ConnectionData(Atlas(*atlas), lie::GroupSpec::u1(), {{"c", {z, a1}}}, {});
}

/// A = sin(x0) e dx1: abelian but with non-polynomial line integrals.
inline ConnectionData sine_flux_conn(AtlasPtr atlas = plane_atlas()) {
  const auto z = dsl::parse_expr("[[0, 0],[0, 0]]", 2);
  const auto a1 = dsl::parse_expr("[[0, -sin(x0)],[sin(x0), 0]]", 2);
  return ConnectionData(Atlas(*atlas), lie::GroupSpec::u1(), {{"c", {z, a1}}}, {});
}

/// Pure gauge SO(3): A = g^-1 dg for g = exp(x0 X) exp(x1 Y); flat.
inline ConnectionData pure_gauge_so3(AtlasPtr atlas = plane_atlas()) {
  const char* X = "[[0, 0, 0],[0, 0, -1],[0, 1, 0]]";
  const char* Y = "[[0, 0, 1],[0, 0, 0],[-1, 0, 0]]";
  const std::string a0 = std::string("mexp([[0, 0, -x1],[0, 0, 0],[x1, 0, 0]])*") + X +
                         "*mexp([[0, 0, x1],[0, 0, 0],[-x1, 0, 0]])";
  const auto f0 = dsl::parse_expr(a0, 2, dsl::Shape::matrix(3, 3));
  const auto f1 = dsl::parse_expr(Y, 2, dsl::Shape::matrix(3, 3));
  return ConnectionData(Atlas(*atlas), lie::GroupSpec::so3(), {{"c", {f0, f1}}}, {});
}

// --- round sphere, two stereographic charts ---------------------------------

/// Transition (u,v) |-> (u, -v)/(u^2+v^2); the same formula goes both ways.
inline const char* kStereoMap = "[x0/(x0^2 + x1^2), -x1/(x0^2 + x1^2)]";

/// Frame rotation between the two stereographic frames, written in source
/// coordinates; the same formula serves both directions.
inline const char* kStereoFrame =
    "[[(x1^2 - x0^2)/(x0^2 + x1^2), -2*x0*x1/(x0^2 + x1^2)],"
    "[2*x0*x1/(x0^2 + x1^2), (x1^2 - x0^2)/(x0^2 + x1^2)]]";

inline AtlasPtr sphere_atlas() {
  const auto tau = dsl::parse_expr(kStereoMap, 2);
  std::vector<Chart> charts{{"n", box2(-8, 8, -8, 8)}, {"s", box2(-8, 8, -8, 8)}};
  std::vector<Overlap> overlaps;
  // four boxes per direction cover the annulus 0.36 <= r <= 5 of the overlap;
  // the last, smaller box maps inside the big ones under the inversion, so
  // crossings sampled there are always covered in the reverse direction
  const Box boxes[5] = {box2(0.25, 5, -5, 5), box2(-5, -0.25, -5, 5), box2(-5, 5, 0.25, 5),
                        box2(-5, 5, -5, -0.25), box2(0.6, 1.4, -0.5, 0.5)};
  for (const auto& b : boxes) overlaps.push_back({"n", "s", b, tau});
  for (const auto& b : boxes) overlaps.push_back({"s", "n", b, tau});
  return std::make_shared<Atlas>(2, std::move(charts), std::move(overlaps));
}

/// Levi-Civita connection of the round sphere in the two stereographic
/// charts, structure group SO(2):
///   A = (2 u dv - 2 v du)/(1 + u^2 + v^2) . J  in both charts.
inline ConnectionData sphere_lc_conn() {
  const AtlasPtr atlas = sphere_atlas();
  const auto a0 = dsl::parse_expr(
      "[[0, 2*x1/(1 + x0^2 + x1^2)],[-2*x1/(1 + x0^2 + x1^2), 0]]", 2);
  const auto a1 = dsl::parse_expr(
      "[[0, -2*x0/(1 + x0^2 + x1^2)],[2*x0/(1 + x0^2 + x1^2), 0]]", 2);
  const auto frame = dsl::parse_expr(kStereoFrame, 2);
  std::vector<dsl::ExprFn> transitions(atlas->overlaps().size(), frame);
  return ConnectionData(Atlas(*atlas), lie::GroupSpec::so2(),
                        {{"n", {a0, a1}}, {"s", {a0, a1}}}, std::move(transitions));
}

/// Latitude circle at polar angle theta, in the north stereographic chart,
/// counterclockwise, beta-parameterized.
inline Path latitude_loop(AtlasPtr atlas, double theta) {
  const double r = 1.0 / std::tan(theta / 2.0);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "[%.17g*cos(2*pi*beta(x0)), %.17g*sin(2*pi*beta(x0))]", r, r);
  return Path(atlas, {{"n", dsl::parse_expr(buf, 1), 0.0, 1.0}});
}

// --- torus, four charts -------------------------------------------------------

/// T^2 = R^2/Z^2 covered by C_ab = I_a x I_b with I_0 = (-0.05, 0.55),
/// I_1 = (0.45, 1.05); transitions shift by whole periods.
AtlasPtr torus_atlas();

/// A = 2 pi x J dy on every chart; transitions exp(2 pi s y J) for x-shift s.
ConnectionData torus_flux_conn();

}  // namespace fx
