#include "holo/reconstruct.hpp"

#include <cmath>
#include <random>

namespace holo {

TransportOracle tp(const ConnectionData& conn, int steps) {
  auto atlas = std::make_shared<Atlas>(conn.atlas());
  auto data = std::make_shared<ConnectionData>(conn);
  return {atlas, conn.group(),
          [data, steps](const Path& p) { return transport(*data, p, steps).element; }};
}

OracleSpotCheck spot_check_oracle(const TransportOracle& oracle, int trials, unsigned seed) {
  OracleSpotCheck out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.15, 0.85);

  for (const auto& chart : oracle.atlas->charts()) {
    const Box& box = chart.box;
    auto sample = [&]() {
      Eigen::VectorXd p(box.dim());
      for (int i = 0; i < box.dim(); ++i)
        p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * u01(rng);
      return p;
    };
    for (int k = 0; k < trials; ++k) {
      const Eigen::VectorXd a = sample(), b = sample(), c = sample();
      const Path leg1 = straight_line(oracle.atlas, chart.name, a, b);
      const Path leg2 = straight_line(oracle.atlas, chart.name, b, c);
      const lie::GroupElement whole = oracle.query(concat(leg2, leg1));
      const lie::GroupElement split = lie::mul(oracle.query(leg2), oracle.query(leg1));
      out.worst_functoriality = std::max(out.worst_functoriality, lie::dist(whole, split));

      const lie::GroupElement at_rest = oracle.query(constant_path(oracle.atlas, chart.name, a));
      out.worst_identity =
          std::max(out.worst_identity, lie::dist(at_rest, lie::identity(oracle.group)));
    }
  }
  return out;
}

lie::GroupElement section_family(const TransportOracle& oracle, const std::string& chart,
                                 const lie::GroupElement& z_triv,
                                 const Eigen::VectorXd& basepoint, const Eigen::VectorXd& y) {
  const Path sigma = straight_line(oracle.atlas, chart, basepoint, y);
  return lie::mul(oracle.query(sigma), z_triv);
}

ReconstructedConnection reconstruct_connection(const TransportOracle& oracle,
                                               const std::string& chart, double h) {
  if (!(h > 1e-6 && h < 1e-1))
    throw Error("reconstruction scale h must lie in (1e-6, 1e-1)");
  TransportOracle o = oracle;
  ReconstructedConnection rec;
  rec.chart = chart;
  rec.h = h;
  rec.sampler = [o, chart, h](const Eigen::VectorXd& point,
                              const Eigen::VectorXd& dir) -> lie::AlgebraElement {
    const Eigen::VectorXd step = h * dir;
    const lie::GroupElement fwd = o.query(straight_line(o.atlas, chart, point, point + step));
    const lie::GroupElement bwd = o.query(straight_line(o.atlas, chart, point, point - step));
    const lie::GroupElement ratio = lie::mul(fwd, lie::inverse(bwd));
    lie::AlgebraElement a = lie::log_grp(ratio);
    a.matrix *= -1.0 / (2.0 * h);
    return a;
  };
  return rec;
}

RoundtripReport roundtrip_check(const ConnectionData& conn, double h, int samples, int steps) {
  RoundtripReport rep;
  const TransportOracle oracle = tp(conn, steps);
  const int d = conn.atlas().dim();

  // coordinate directions alone can miss mixed second-order terms, so the
  // sweep also probes the diagonals
  std::vector<Eigen::VectorXd> dirs;
  for (int i = 0; i < d; ++i) dirs.push_back(Eigen::VectorXd::Unit(d, i));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
      v[i] = v[j] = 1.0 / std::sqrt(2.0);
      dirs.push_back(v);
      v[j] = -v[j];
      dirs.push_back(v);
    }

  for (const auto& chart : conn.atlas().charts()) {
    // keep the finite-difference stencil inside the chart box
    Box inner = chart.box;
    const Eigen::VectorXd margin = Eigen::VectorXd::Constant(d, 2.0 * h + 1e-6);
    inner.lo += margin;
    inner.hi -= margin;

    std::vector<RoundtripRow> rows;
    for (const double scale : {1.0, 0.5, 0.25}) {
      const double hh = h * scale;
      const ReconstructedConnection rec = reconstruct_connection(oracle, chart.name, hh);
      double worst = 0.0;
      for (const auto& p : halton_in_box(inner, samples)) {
        for (const auto& dir : dirs) {
          const lie::AlgebraElement got = rec.sampler(p, dir);
          const lie::AlgebraElement want = conn.form(chart.name, p, dir);
          worst = std::max(worst, (got.matrix - want.matrix).norm());
        }
      }
      rows.push_back({hh, worst});
    }
    std::vector<double> ratios;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
      ratios.push_back(rows[i + 1].max_error / std::max(rows[i].max_error, 1e-300));
    rep.worst_error_at_finest = std::max(rep.worst_error_at_finest, rows.back().max_error);
    rep.tables[chart.name] = std::move(rows);
    rep.ratios[chart.name] = std::move(ratios);
  }
  return rep;
}

// --- transition extraction -----------------------------------------------------

CocycleExtractor::CocycleExtractor(TransportOracle oracle, AccessPaths access)
    : oracle_(std::move(oracle)), access_(std::move(access)) {
  for (const auto& chart : oracle_.atlas->charts()) {
    const auto it = access_.to_anchor.find(chart.name);
    if (it == access_.to_anchor.end())
      throw MissingAccessPath("no access path for chart '" + chart.name + "'");
    if (!points_agree(*oracle_.atlas, it->second.start(), access_.basepoint, 1e-9))
      throw MissingAccessPath("access path for chart '" + chart.name +
                              "' does not start at the base point");
    if (it->second.end().chart != chart.name)
      throw MissingAccessPath("access path for chart '" + chart.name +
                              "' must end in that chart");
  }
}

lie::GroupElement CocycleExtractor::frame(const std::string& chart,
                                          const Eigen::VectorXd& x) const {
  const Path& access = access_.to_anchor.at(chart);
  const Path leg = straight_line(oracle_.atlas, chart, access.end().coords, x);
  return oracle_.query(concat(leg, access));
}

bool CocycleExtractor::extractable(int overlap_index, const Eigen::VectorXd& x) const {
  const Overlap& o = oracle_.atlas->overlaps()[static_cast<std::size_t>(overlap_index)];
  const Eigen::VectorXd xb = dsl::eval(o.map, x).data;
  return oracle_.atlas->find_overlap(o.to, o.from, xb).has_value();
}

lie::GroupElement CocycleExtractor::transition(int overlap_index,
                                               const Eigen::VectorXd& x) const {
  const Overlap& o = oracle_.atlas->overlaps()[static_cast<std::size_t>(overlap_index)];
  const Eigen::VectorXd xb = dsl::eval(o.map, x).data;
  if (!oracle_.atlas->find_overlap(o.to, o.from, xb))
    throw OutOfChart("extraction loop cannot cross back " + o.to + "->" + o.from +
                     " at the image point");

  // base -> anchor_b -> x (in b), switch to a at x, -> anchor_a -> base
  const Path& acc_a = access_.to_anchor.at(o.from);
  const Path& acc_b = access_.to_anchor.at(o.to);
  const Path into_b = straight_line(oracle_.atlas, o.to, acc_b.end().coords, xb);

  // crossing b -> a happens between segments; present the a-side leg with a
  // chart change at rest by concatenating paths whose seam sits at x
  const Path out_of_a = reverse(straight_line(oracle_.atlas, o.from, acc_a.end().coords, x));
  const Path loop = concat(reverse(acc_a), concat(out_of_a, concat(into_b, acc_b)));
  return oracle_.query(loop);
}

SampledCocycle extract_cocycle(const CocycleExtractor& ex, int samples_per_overlap) {
  SampledCocycle out;
  out.group = ex.oracle().group;
  const auto& overlaps = ex.oracle().atlas->overlaps();
  std::size_t extracted = 0;
  for (std::size_t k = 0; k < overlaps.size(); ++k) {
    SampledTransition st;
    st.overlap_index = static_cast<int>(k);
    for (const auto& x : halton_in_box(overlaps[k].box, samples_per_overlap)) {
      if (!ex.extractable(static_cast<int>(k), x)) continue;
      st.points.push_back(x);
      st.values.push_back(ex.transition(static_cast<int>(k), x));
      ++extracted;
    }
    out.transitions.push_back(std::move(st));
  }
  if (extracted == 0 && !overlaps.empty())
    throw OutOfChart("no overlap sample admits an extraction loop");
  return out;
}

double extracted_cocycle_residual(const CocycleExtractor& ex, int samples) {
  double worst = 0.0;
  const Atlas& atlas = *ex.oracle().atlas;
  const auto& overlaps = atlas.overlaps();
  for (std::size_t k1 = 0; k1 < overlaps.size(); ++k1) {
    for (std::size_t k2 = 0; k2 < overlaps.size(); ++k2) {
      if (overlaps[k1].to != overlaps[k2].from) continue;
      for (const auto& x : halton_in_box(overlaps[k1].box, samples)) {
        const Eigen::VectorXd y = dsl::eval(overlaps[k1].map, x).data;
        if (!overlaps[k2].box.contains(y, 1e-12)) continue;
        if (!ex.extractable(static_cast<int>(k1), x) ||
            !ex.extractable(static_cast<int>(k2), y))
          continue;
        const lie::Mat prod = ex.transition(static_cast<int>(k1), x).matrix *
                              ex.transition(static_cast<int>(k2), y).matrix;
        lie::Mat target;
        if (overlaps[k2].to == overlaps[k1].from) {
          target = lie::Mat::Identity(ex.oracle().group.dim_matrix(),
                                      ex.oracle().group.dim_matrix());
        } else {
          const auto k3 = atlas.find_overlap(overlaps[k1].from, overlaps[k2].to, x);
          if (!k3 || !ex.extractable(*k3, x)) continue;
          target = ex.transition(*k3, x).matrix;
        }
        worst = std::max(worst, (prod - target).norm());
      }
    }
  }
  return worst;
}

CohomologyReport cohomology_residual(const CocycleExtractor& ex, const ConnectionData& conn,
                                     int samples) {
  CohomologyReport rep;
  const auto& overlaps = conn.atlas().overlaps();
  for (std::size_t k = 0; k < overlaps.size(); ++k) {
    const Overlap& o = overlaps[k];
    for (const auto& x : halton_in_box(o.box, samples)) {
      if (!ex.extractable(static_cast<int>(k), x)) continue;
      const Eigen::VectorXd xb = dsl::eval(o.map, x).data;
      const lie::GroupElement lhs = lie::mul(
          ex.frame(o.from, x),
          lie::mul(ex.transition(static_cast<int>(k), x), lie::inverse(ex.frame(o.to, xb))));
      rep.worst = std::max(rep.worst, lie::dist(lhs, conn.transition_at(static_cast<int>(k), x)));
      ++rep.compared;
    }
  }
  if (rep.compared == 0 && !overlaps.empty())
    throw OutOfChart("no overlap sample admits an extraction loop");
  return rep;
}

}  // namespace holo
