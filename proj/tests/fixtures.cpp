#include "fixtures.hpp"

namespace fx {

namespace {

struct Interval {
  double lo, hi;
};

// overlap components of I_a against I_b on the circle, as (sub-interval of
// I_a, shift s) with x + s landing in I_b
std::vector<std::pair<Interval, int>> circle_components(int a, int b) {
  const Interval I[2] = {{-0.05, 0.55}, {0.45, 1.05}};
  std::vector<std::pair<Interval, int>> out;
  for (int s = -1; s <= 1; ++s) {
    const double lo = std::max(I[a].lo, I[b].lo - s);
    const double hi = std::min(I[a].hi, I[b].hi - s);
    if (a == b && s == 0) continue;  // identity on the same chart: not an overlap
    if (hi > lo + 1e-9) out.push_back({{lo, hi}, s});
  }
  if (a == b) out.push_back({{I[a].lo, I[a].hi}, 0});  // same factor, no shift
  return out;
}

std::string shift_map(int sx, int sy) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "[x0 + %d, x1 + %d]", sx, sy);
  return buf;
}

std::string shift_transition(int sx) {
  // exp(2 pi s y J), identity when s = 0
  if (sx == 0) return "[[1, 0],[0, 1]]";
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "[[cos(2*pi*%d*x1), -sin(2*pi*%d*x1)],[sin(2*pi*%d*x1), cos(2*pi*%d*x1)]]", sx,
                sx, sx, sx);
  return buf;
}

}  // namespace

AtlasPtr torus_atlas() {
  const Interval I[2] = {{-0.05, 0.55}, {0.45, 1.05}};
  std::vector<Chart> charts;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      charts.push_back({"c" + std::to_string(a) + std::to_string(b),
                        box2(I[a].lo, I[a].hi, I[b].lo, I[b].hi)});

  std::vector<Overlap> overlaps;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int b2 = 0; b2 < 2; ++b2) {
          if (a == a2 && b == b2) continue;
          const std::string from = "c" + std::to_string(a) + std::to_string(b);
          const std::string to = "c" + std::to_string(a2) + std::to_string(b2);
          for (const auto& [ix, sx] : circle_components(a, a2))
            for (const auto& [iy, sy] : circle_components(b, b2)) {
              overlaps.push_back({from, to, box2(ix.lo, ix.hi, iy.lo, iy.hi),
                                  dsl::parse_expr(shift_map(sx, sy), 2)});
            }
        }
  return std::make_shared<Atlas>(2, std::move(charts), std::move(overlaps));
}

ConnectionData torus_flux_conn() {
  const AtlasPtr atlas = torus_atlas();
  const auto a0 = dsl::parse_expr("[[0, 0],[0, 0]]", 2);
  const auto a1 = dsl::parse_expr("[[0, -2*pi*x0],[2*pi*x0, 0]]", 2);
  std::map<std::string, std::vector<dsl::ExprFn>> forms;
  for (const auto& c : atlas->charts()) forms[c.name] = {a0, a1};

  std::vector<dsl::ExprFn> transitions;
  for (const auto& o : atlas->overlaps()) {
    // recover the x-shift from the map itself at the box corner
    const Eigen::VectorXd probe = o.box.lo;
    const Eigen::VectorXd image = dsl::eval(o.map, probe).data;
    const int sx = static_cast<int>(std::lround(image[0] - probe[0]));
    transitions.push_back(dsl::parse_expr(shift_transition(sx), 2));
  }
  return ConnectionData(Atlas(*atlas), lie::GroupSpec::u1(), std::move(forms),
                        std::move(transitions));
}

}  // namespace fx
