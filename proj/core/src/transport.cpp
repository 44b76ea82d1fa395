#include "holo/transport.hpp"

#include <cmath>

#include "holo/detail/matfun.hpp"

namespace holo {

namespace {

using lie::Mat;

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

// dexpinv(u, w) truncated after the double bracket; enough for order 4
Mat dexpinv(const Mat& u, const Mat& w) {
  const Mat c1 = commutator(u, w);
  return w - 0.5 * c1 + (1.0 / 12.0) * commutator(u, c1);
}

struct SegmentIntegrand {
  const ConnectionData* conn;
  const PathSegment* seg;
  const dsl::ExprFn* velocity;

  Mat omega(double t) const {
    const Eigen::VectorXd p = dsl::eval(seg->map, Eigen::VectorXd::Constant(1, t)).data;
    const Eigen::VectorXd v = dsl::eval(*velocity, Eigen::VectorXd::Constant(1, t)).data;
    return -conn->form(seg->chart, p, v).matrix;
  }
};

Mat rkmk4_segment(const SegmentIntegrand& f, double t0, double t1, int steps, const Mat& g0) {
  Mat g = g0;
  const double h = (t1 - t0) / steps;
  const lie::GroupSpec& spec = f.conn->group();
  for (int i = 0; i < steps; ++i) {
    const double t = t0 + i * h;
    const Mat w1 = f.omega(t);
    const Mat wm = f.omega(t + h / 2);
    const Mat w2 = f.omega(t + h);
    const Mat k1 = w1;
    const Mat k2 = dexpinv(0.5 * h * k1, wm);
    const Mat k3 = dexpinv(0.5 * h * k2, wm);
    const Mat k4 = dexpinv(h * k3, w2);
    const Mat theta = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    g = detail::pade_exp(theta) * g;
    if (lie::membership_residual(spec, g) > 1e-12) g = lie::project(spec, g);
  }
  return g;
}

/// One full pass over the path at the given per-unit step budget.
lie::GroupElement run_transport(const ConnectionData& conn, const Path& gamma, int steps) {
  const auto& segs = gamma.segments();
  Mat g = Mat::Identity(conn.group().dim_matrix(), conn.group().dim_matrix());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (i > 0 && segs[i - 1].chart != segs[i].chart) {
      // hand off at rest: g |-> g_ab(x)^-1 g with x the junction point
      const Eigen::VectorXd x =
          dsl::eval(segs[i - 1].map, Eigen::VectorXd::Constant(1, segs[i - 1].t1)).data;
      const lie::GroupElement gab =
          conn.transition_between(segs[i - 1].chart, segs[i].chart, x);
      g = lie::inverse(gab).matrix * g;
    }
    const int n = std::max(16, static_cast<int>(std::lround(steps * (segs[i].t1 - segs[i].t0))));
    const dsl::ExprFn vel = dsl::diff(segs[i].map, 0);
    SegmentIntegrand f{&conn, &segs[i], &vel};
    g = rkmk4_segment(f, segs[i].t0, segs[i].t1, n, g);
  }
  return {conn.group(), g};
}

}  // namespace

TransportResult transport(const ConnectionData& conn, const Path& gamma, int steps) {
  if (steps < 16) throw Error("transport needs steps >= 16");
  if (!conn.has_local_forms()) throw Error("connection carries no local forms");
  for (const auto& s : gamma.segments()) conn.atlas().chart(s.chart);

  const lie::GroupElement coarse = run_transport(conn, gamma, steps);
  const lie::GroupElement fine = run_transport(conn, gamma, 2 * steps);
  const double estimate = lie::dist(coarse, fine);
  if (estimate > 1e-4) throw StepTooCoarse(estimate);

  TransportResult out{gamma.start(), gamma.end(), fine, estimate, estimate > 1e-8, steps};
  return out;
}

TransportResult holonomy(const ConnectionData& conn, const Path& loop, int steps) {
  if (!loop.is_loop()) {
    auto fmt = [](const PathPoint& p) {
      std::string s = p.chart + " (";
      for (int i = 0; i < p.coords.size(); ++i)
        s += (i ? ", " : "") + std::to_string(p.coords[i]);
      return s + ")";
    };
    throw NotALoop("path is not a loop: starts at " + fmt(loop.start()) + ", ends at " +
                   fmt(loop.end()));
  }
  TransportResult res = transport(conn, loop, steps);
  if (res.target.chart != res.source.chart) {
    // express the holonomy in the base point's trivialization
    const lie::GroupElement back =
        conn.transition_between(res.target.chart, res.source.chart, res.target.coords);
    res.element = lie::mul(lie::inverse(back), res.element);
    res.target = res.source;
  }
  return res;
}

Path family_slice(const PathFamily& fam, const Eigen::VectorXd& u) {
  const int k = fam.param_box.dim();
  if (u.size() != k) throw Error("family parameter has wrong dimension");
  std::vector<dsl::ExprFn> args;
  args.reserve(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i < k; ++i) args.push_back(dsl::const_fn(u[i], 1));
  args.push_back(dsl::input_fn(0, 1));
  std::vector<PathSegment> segs;
  segs.reserve(fam.pieces.size());
  for (const auto& p : fam.pieces)
    segs.push_back({p.chart, dsl::subst(p.map, args, 1), p.t0, p.t1});
  return Path(fam.atlas, std::move(segs), fam.sitting_radius);
}

FamilyTable family_transport(const ConnectionData& conn, const PathFamily& fam, int grid,
                             int steps) {
  if (grid < 2) throw Error("family grid needs at least two points");
  const int k = fam.param_box.dim();

  FamilyTable table;
  if (k == 1) {
    for (int j = 0; j < grid; ++j) {
      const double u = fam.param_box.lo[0] +
                       (fam.param_box.hi[0] - fam.param_box.lo[0]) * j / (grid - 1);
      FamilyEntry e;
      e.param = Eigen::VectorXd::Constant(1, u);
      e.result = transport(conn, family_slice(fam, e.param), steps);
      try {
        e.log = lie::log_grp(e.result.element).matrix;
      } catch (const CutLocus&) {
        e.log.reset();
      }
      table.entries.push_back(std::move(e));
    }
    const double h = (fam.param_box.hi[0] - fam.param_box.lo[0]) / (grid - 1);
    for (int j = 1; j + 1 < grid; ++j) {
      const auto& a = table.entries[static_cast<std::size_t>(j - 1)].log;
      const auto& b = table.entries[static_cast<std::size_t>(j)].log;
      const auto& c = table.entries[static_cast<std::size_t>(j + 1)].log;
      if (!a || !b || !c) continue;
      const double second = (*a - 2.0 * *b + *c).norm();
      table.smoothness_coefficient = std::max(table.smoothness_coefficient, second / (h * h));
    }
    return table;
  }

  // k >= 2: plain grid sweep over the box, no smoothness probe
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  for (;;) {
    Eigen::VectorXd u(k);
    for (int i = 0; i < k; ++i)
      u[i] = fam.param_box.lo[i] +
             (fam.param_box.hi[i] - fam.param_box.lo[i]) * idx[static_cast<std::size_t>(i)] /
                 (grid - 1);
    FamilyEntry e;
    e.param = u;
    e.result = transport(conn, family_slice(fam, u), steps);
    table.entries.push_back(std::move(e));
    int carry = k - 1;
    while (carry >= 0 && ++idx[static_cast<std::size_t>(carry)] == grid) {
      idx[static_cast<std::size_t>(carry)] = 0;
      --carry;
    }
    if (carry < 0) break;
  }
  return table;
}

double check_naturality(const GaugeMorphism& f, const ConnectionData& conn,
                        const ConnectionData& conn2, const Path& gamma, int steps) {
  const TransportResult ta = transport(conn, gamma, steps);
  const TransportResult tb = transport(conn2, gamma, steps);

  auto h_at = [&](const PathPoint& p) {
    const auto it = f.h.find(p.chart);
    if (it == f.h.end()) throw Error("morphism has no gauge function on chart " + p.chart);
    const Eigen::MatrixXd m = dsl::eval(it->second, p.coords).data;
    lie::Mat c = m.cast<std::complex<double>>();
    if (lie::membership_residual(conn.group(), c) > 1e-12) c = lie::project(conn.group(), c);
    return lie::GroupElement{conn.group(), c};
  };

  const lie::GroupElement lhs = lie::mul(h_at(ta.target), ta.element);
  const lie::GroupElement rhs = lie::mul(tb.element, h_at(ta.source));
  return lie::dist(lhs, rhs);
}

Path map_path(const ChartMap& m, const Path& gamma) {
  const int dn = m.source->dim();
  std::vector<PathSegment> segs;
  segs.reserve(gamma.segments().size());
  for (const auto& s : gamma.segments()) {
    const ChartMap::Piece* piece = nullptr;
    for (const auto& p : m.pieces)
      if (p.from_chart == s.chart) {
        piece = &p;
        break;
      }
    if (!piece) throw OutOfChart("map has no piece for chart '" + s.chart + "'");
    // substitute the segment's coordinate functions into the map
    std::vector<dsl::ExprFn> comps;
    comps.reserve(static_cast<std::size_t>(dn));
    for (int i = 0; i < dn; ++i) comps.push_back(dsl::component(s.map, i));
    segs.push_back({piece->to_chart, dsl::subst(piece->map, comps, 1), s.t0, s.t1});
  }
  return Path(m.target, std::move(segs), gamma.sitting_radius());
}

TransportResult pullback_transport(const ChartMap& m, const ConnectionData& conn,
                                   const Path& gamma, int steps) {
  return transport(conn, map_path(m, gamma), steps);
}

}  // namespace holo
