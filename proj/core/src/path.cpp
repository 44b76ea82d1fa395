#include "holo/path.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "holo/errors.hpp"

namespace holo {

namespace {

constexpr double kSeamTol = 1e-9;

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

/// Inverse of beta on its strictly increasing ramp, by bisection.
double beta_inverse(double y) {
  if (y <= 0.0) return 0.1;
  if (y >= 1.0) return 0.9;
  double lo = 0.1, hi = 0.9;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (dsl::beta(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Path::Path(AtlasPtr atlas, std::vector<PathSegment> segments, double sitting_radius)
    : atlas_(std::move(atlas)), segments_(std::move(segments)), sitting_radius_(sitting_radius) {
  if (!atlas_) throw Error("path needs an atlas");
  if (segments_.empty()) throw Error("path needs at least one segment");
  if (sitting_radius_ <= 0.0 || sitting_radius_ > 0.5)
    throw Error("sitting radius must lie in (0, 0.5]");
  const int d = atlas_->dim();

  if (std::abs(segments_.front().t0) > 1e-12 || std::abs(segments_.back().t1 - 1.0) > 1e-12)
    throw Error("path segments must cover [0,1]");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const PathSegment& s = segments_[i];
    atlas_->chart(s.chart);
    if (s.map.arity != 1 || !(s.map.shape == dsl::Shape::vector(d)))
      throw Error("segment map must be R -> R^" + std::to_string(d));
    if (!(s.t1 > s.t0 + 1e-12)) throw Error("segment intervals must have positive length");
    if (i + 1 < segments_.size() && std::abs(s.t1 - segments_[i + 1].t0) > 1e-12)
      throw Error("segment intervals must be contiguous");
  }

  velocities_.reserve(segments_.size());
  for (const auto& s : segments_) velocities_.push_back(dsl::diff(s.map, 0));

  // continuity across segment boundaries, through a transition map if the
  // chart changes (the junction point must then lie in a declared overlap)
  for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
    const PathSegment& a = segments_[i];
    const PathSegment& b = segments_[i + 1];
    Eigen::VectorXd pa = dsl::eval(a.map, Eigen::VectorXd::Constant(1, a.t1)).data;
    const Eigen::VectorXd pb = dsl::eval(b.map, Eigen::VectorXd::Constant(1, b.t0)).data;
    if (a.chart != b.chart) pa = atlas_->transition(a.chart, b.chart, pa);
    if ((pa - pb).norm() > kSeamTol)
      throw Error("path is discontinuous at t = " + std::to_string(a.t1) + " (" + a.chart +
                  " -> " + b.chart + ")");
  }

  // sitting collars at both ends of every segment
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const PathSegment& s = segments_[i];
    const double w = sitting_radius_ * (s.t1 - s.t0);
    for (int k = 0; k < 8; ++k) {
      const double f = static_cast<double>(k) / 7.0;
      for (const double t : {s.t0 + w * f, s.t1 - w * f}) {
        const double speed =
            dsl::eval(velocities_[i], Eigen::VectorXd::Constant(1, t)).data.norm();
        if (speed > 1e-12)
          throw Error("segment " + std::to_string(i) + " does not sit at t = " +
                      std::to_string(t) + " (|velocity| = " + std::to_string(speed) + ")");
      }
    }
  }

  // chart containment at 64 sampled parameters per segment
  for (const auto& s : segments_) {
    const Box& box = atlas_->chart(s.chart).box;
    for (int k = 0; k < 64; ++k) {
      const double t = s.t0 + (s.t1 - s.t0) * static_cast<double>(k) / 63.0;
      const Eigen::VectorXd p = dsl::eval(s.map, Eigen::VectorXd::Constant(1, t)).data;
      if (!box.contains(p, 1e-9))
        throw OutOfChart("segment leaves chart '" + s.chart + "' at t = " + std::to_string(t));
    }
  }
}

int Path::segment_index(double t) const {
  if (t < -1e-12 || t > 1.0 + 1e-12)
    throw OutOfRange("path parameter " + std::to_string(t) + " outside [0,1]");
  for (std::size_t i = 0; i + 1 < segments_.size(); ++i)
    if (t < segments_[i].t1) return static_cast<int>(i);
  return static_cast<int>(segments_.size()) - 1;
}

PathPoint Path::at(double t) const {
  const PathSegment& s = segments_[static_cast<std::size_t>(segment_index(t))];
  return {s.chart, dsl::eval(s.map, Eigen::VectorXd::Constant(1, clamp01(t))).data};
}

Eigen::VectorXd Path::velocity(double t) const {
  const int i = segment_index(t);
  return dsl::eval(velocities_[static_cast<std::size_t>(i)], Eigen::VectorXd::Constant(1, clamp01(t)))
      .data;
}

bool Path::is_loop(double tol) const { return points_agree(*atlas_, start(), end(), tol); }

bool points_agree(const Atlas& atlas, const PathPoint& a, const PathPoint& b, double tol) {
  if (a.chart == b.chart) return (a.coords - b.coords).norm() <= tol;
  if (atlas.find_overlap(a.chart, b.chart, a.coords)) {
    const Eigen::VectorXd t = atlas.transition(a.chart, b.chart, a.coords);
    return (t - b.coords).norm() <= tol;
  }
  if (atlas.find_overlap(b.chart, a.chart, b.coords)) {
    const Eigen::VectorXd t = atlas.transition(b.chart, a.chart, b.coords);
    return (t - a.coords).norm() <= tol;
  }
  return false;
}

bool paths_agree(const Path& a, const Path& b, int samples, double tol) {
  for (int k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) / (samples - 1);
    if (!points_agree(*a.atlas(), a.at(t), b.at(t), tol)) return false;
  }
  return true;
}

Path concat(const Path& gamma, const Path& tau) {
  if (!points_agree(*gamma.atlas(), tau.end(), gamma.start(), kSeamTol))
    throw EndpointMismatch("concat: tau(1) and gamma(0) differ");

  std::vector<PathSegment> segs;
  segs.reserve(tau.segments().size() + gamma.segments().size());
  const dsl::ExprFn doubled = dsl::affine_input_fn(2.0, 0.0, 1);
  for (const auto& s : tau.segments())
    segs.push_back({s.chart, dsl::subst(s.map, {doubled}, 1), s.t0 / 2, s.t1 / 2});
  const dsl::ExprFn shifted = dsl::affine_input_fn(2.0, -1.0, 1);
  for (const auto& s : gamma.segments())
    segs.push_back({s.chart, dsl::subst(s.map, {shifted}, 1), (s.t0 + 1) / 2, (s.t1 + 1) / 2});

  return Path(gamma.atlas(), std::move(segs),
              std::min(gamma.sitting_radius(), tau.sitting_radius()));
}

Path reverse(const Path& gamma) {
  std::vector<PathSegment> segs;
  segs.reserve(gamma.segments().size());
  const dsl::ExprFn flip = dsl::affine_input_fn(-1.0, 1.0, 1);
  for (auto it = gamma.segments().rbegin(); it != gamma.segments().rend(); ++it)
    segs.push_back({it->chart, dsl::subst(it->map, {flip}, 1), 1.0 - it->t1, 1.0 - it->t0});
  return Path(gamma.atlas(), std::move(segs), gamma.sitting_radius());
}

Path constant_path(AtlasPtr atlas, const std::string& chart, const Eigen::VectorXd& x) {
  std::vector<dsl::ExprFn> comps;
  comps.reserve(static_cast<std::size_t>(x.size()));
  for (int i = 0; i < x.size(); ++i) comps.push_back(dsl::const_fn(x[i], 1));
  return Path(std::move(atlas), {{chart, dsl::fn_vector(comps), 0.0, 1.0}});
}

Path straight_line(AtlasPtr atlas, const std::string& chart, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
  const Box& box = atlas->chart(chart).box;
  if (!box.contains(x) || !box.contains(y))
    throw SegmentLeavesChart("straight line endpoints must lie in chart '" + chart + "'");
  std::vector<dsl::ExprFn> comps;
  comps.reserve(static_cast<std::size_t>(x.size()));
  for (int i = 0; i < x.size(); ++i)
    comps.push_back(
        dsl::fn_add(dsl::const_fn(x[i], 1), dsl::fn_mul(dsl::beta_expr(), dsl::const_fn(y[i] - x[i], 1))));
  return Path(std::move(atlas), {{chart, dsl::fn_vector(comps), 0.0, 1.0}});
}

UpsilonFamily::UpsilonFamily(PathGerm germ) : germ_(std::move(germ)) {
  if (!(germ_.a < 0.0 && 0.0 < germ_.b))
    throw Error("path germ interval must contain 0");
  if (germ_.curve.arity != 1 || !(germ_.curve.shape == dsl::Shape::vector(germ_.atlas->dim())))
    throw Error("germ curve must be R -> R^dim");
}

Path UpsilonFamily::at(double s) const {
  if (s <= germ_.a || s >= germ_.b)
    throw OutOfChart("family parameter " + std::to_string(s) + " outside the germ interval");
  const dsl::ExprFn arg = dsl::fn_mul(dsl::const_fn(s, 1), dsl::beta_expr());
  return Path(germ_.atlas, {{germ_.chart, dsl::subst(germ_.curve, {arg}, 1), 0.0, 1.0}});
}

// --- thin homotopies ---------------------------------------------------------

void check_homotopy_boundary(const Homotopy& h, int samples, double tol) {
  const Atlas& atlas = *h.gamma0.atlas();
  const PathPoint p0 = h.gamma0.start();
  const PathPoint p1 = h.gamma0.end();
  if (!points_agree(atlas, p0, h.gamma1.start(), tol) ||
      !points_agree(atlas, p1, h.gamma1.end(), tol))
    throw BoundaryMismatch("homotopy boundary paths have different endpoints");

  for (int k = 0; k < samples; ++k) {
    const double s = static_cast<double>(k) / (samples - 1);
    if (!points_agree(atlas, h.value(s, 0.0), h.gamma0.at(s), tol))
      throw BoundaryMismatch("H(.,0) differs from gamma0 at s = " + std::to_string(s));
    if (!points_agree(atlas, h.value(s, 1.0), h.gamma1.at(s), tol))
      throw BoundaryMismatch("H(.,1) differs from gamma1 at s = " + std::to_string(s));
    const double t = static_cast<double>(k) / (samples - 1);
    if (!points_agree(atlas, h.value(0.0, t), p0, tol) ||
        !points_agree(atlas, h.value(1.0, t), p1, tol))
      throw BoundaryMismatch("homotopy endpoints move with t");
  }

  // vanishing partials on the declared collars
  for (int k = 0; k < samples; ++k) {
    const double u = static_cast<double>(k) / (samples - 1);
    for (const double tc : {h.collar_t * 0.99, 1.0 - h.collar_t * 0.99}) {
      if (h.jacobian(u, tc).col(1).norm() > tol * 1e3)
        throw BoundaryMismatch("homotopy does not sit on its t-collar");
    }
    for (const double sc : {h.collar_s * 0.99, 1.0 - h.collar_s * 0.99}) {
      if (h.jacobian(sc, u).col(0).norm() > tol * 1e3)
        throw BoundaryMismatch("homotopy does not sit on its s-collar");
    }
  }
}

ThinOutcome certify_thin(const Homotopy& h, int grid, double tol) {
  ThinOutcome out;
  out.grid = grid;
  std::vector<double> sigma2(static_cast<std::size_t>(grid) * grid);
  for (int i = 0; i < grid; ++i) {
    const double s = static_cast<double>(i) / (grid - 1);
    for (int j = 0; j < grid; ++j) {
      const double t = static_cast<double>(j) / (grid - 1);
      const Eigen::MatrixXd jac = h.jacobian(s, t);
      out.max_jacobian_norm = std::max(out.max_jacobian_norm, jac.norm());
      double s2 = 0.0;
      if (jac.rows() >= 2) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
        s2 = svd.singularValues()[1];
      }
      sigma2[static_cast<std::size_t>(i) * grid + j] = s2;
      if (s2 > out.max_sigma2) {
        out.max_sigma2 = s2;
        out.worst_s = s;
        out.worst_t = t;
      }
    }
  }
  out.tol = tol >= 0.0 ? tol : 1e-8 * (1.0 + out.max_jacobian_norm);
  out.certified = out.max_sigma2 <= out.tol;
  return out;
}

bool witness_equal(const ThinClass& c1, const ThinClass& c2, const Homotopy& h, int grid,
                   double tol) {
  if (!paths_agree(h.gamma0, c1.representative, 64, kSeamTol))
    throw BoundaryMismatch("H(.,0) is not the first representative");
  if (!paths_agree(h.gamma1, c2.representative, 64, kSeamTol))
    throw BoundaryMismatch("H(.,1) is not the second representative");
  check_homotopy_boundary(h);
  return certify_thin(h, grid, tol).certified;
}

// --- shipped homotopy builders ----------------------------------------------

Homotopy dsl_homotopy(AtlasPtr atlas, std::vector<HomotopyPiece> pieces, Path gamma0, Path gamma1,
                      double collar_s, double collar_t) {
  if (pieces.empty()) throw Error("homotopy needs at least one piece");
  const int d = atlas->dim();
  for (const auto& p : pieces) {
    atlas->chart(p.chart);
    if (p.map.arity != 2 || !(p.map.shape == dsl::Shape::vector(d)))
      throw Error("homotopy piece must map (s,t) to R^" + std::to_string(d));
  }
  struct Compiled {
    std::vector<HomotopyPiece> pieces;
    std::vector<dsl::ExprFn> ds, dt;
  };
  auto c = std::make_shared<Compiled>();
  for (const auto& p : pieces) {
    c->ds.push_back(dsl::diff(p.map, 0));
    c->dt.push_back(dsl::diff(p.map, 1));
  }
  c->pieces = std::move(pieces);
  auto piece_at = [c](double s) -> std::size_t {
    for (std::size_t i = 0; i + 1 < c->pieces.size(); ++i)
      if (s < c->pieces[i].s1) return i;
    return c->pieces.size() - 1;
  };

  Homotopy h{std::move(gamma0), std::move(gamma1)};
  h.collar_s = collar_s;
  h.collar_t = collar_t;
  h.value = [c, piece_at](double s, double t) {
    const std::size_t i = piece_at(s);
    return PathPoint{c->pieces[i].chart,
                     dsl::eval(c->pieces[i].map, Eigen::Vector2d(s, t)).data};
  };
  h.jacobian = [c, piece_at](double s, double t) {
    const std::size_t i = piece_at(s);
    const Eigen::Vector2d x(s, t);
    Eigen::MatrixXd jac(dsl::eval(c->ds[i], x).data.rows(), 2);
    jac.col(0) = dsl::eval(c->ds[i], x).data;
    jac.col(1) = dsl::eval(c->dt[i], x).data;
    return jac;
  };
  return h;
}

Homotopy warp_homotopy(const Path& target, const TimeWarp& w0, const TimeWarp& w1, Path gamma0,
                       Path gamma1) {
  Homotopy h{std::move(gamma0), std::move(gamma1)};
  h.collar_t = 0.1;
  const auto& first = target.segments().front();
  const auto& last = target.segments().back();
  h.collar_s = target.sitting_radius() * std::min(first.t1 - first.t0, last.t1 - last.t0);

  // copies keep the homotopy self-contained
  auto tgt = std::make_shared<Path>(target);
  auto v0 = w0, v1 = w1;
  h.value = [tgt, v0, v1](double s, double t) {
    const double bt = t <= 0.0 ? 0.0 : (t >= 1.0 ? 1.0 : dsl::beta(t));
    const double m = (1.0 - bt) * v0.w(s) + bt * v1.w(s);
    return tgt->at(clamp01(m));
  };
  h.jacobian = [tgt, v0, v1](double s, double t) {
    const double bt = t <= 0.0 ? 0.0 : (t >= 1.0 ? 1.0 : dsl::beta(t));
    const double dbt = (t <= 0.0 || t >= 1.0) ? 0.0 : dsl::beta_deriv(t);
    const double m = clamp01((1.0 - bt) * v0.w(s) + bt * v1.w(s));
    const double dm_ds = (1.0 - bt) * v0.dw(s) + bt * v1.dw(s);
    const double dm_dt = dbt * (v1.w(s) - v0.w(s));
    const Eigen::VectorXd vel = tgt->velocity(m);
    Eigen::MatrixXd jac(vel.size(), 2);
    jac.col(0) = vel * dm_ds;
    jac.col(1) = vel * dm_dt;
    return jac;
  };
  return h;
}

Path beta_reparam(const Path& gamma) {
  // breakpoints of gamma o beta are the beta-preimages of gamma's breakpoints
  const auto& segs = gamma.segments();
  std::vector<double> cuts;
  cuts.push_back(0.0);
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) cuts.push_back(beta_inverse(segs[i].t1));
  cuts.push_back(1.0);

  std::vector<PathSegment> out;
  out.reserve(segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i)
    out.push_back(
        {segs[i].chart, dsl::subst(segs[i].map, {dsl::beta_expr()}, 1), cuts[i], cuts[i + 1]});

  // the composition sits wherever gamma sits or beta is flat; shrink the
  // sitting radius so every collar lands inside one of those zones
  double sr = 0.1;
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    const double wl = gamma.sitting_radius() * (segs[i].t1 - segs[i].t0);
    const double wr = gamma.sitting_radius() * (segs[i + 1].t1 - segs[i + 1].t0);
    const double lo = beta_inverse(segs[i].t1 - wl);
    const double hi = beta_inverse(segs[i].t1 + wr);
    const double cut = cuts[i + 1];
    sr = std::min(sr, (cut - lo) / (cuts[i + 1] - cuts[i]));
    sr = std::min(sr, (hi - cut) / (cuts[i + 2] - cuts[i + 1]));
  }
  return Path(gamma.atlas(), std::move(out), std::max(1e-3, 0.9 * sr));
}

Homotopy beta_reparam_homotopy(const Path& gamma) {
  TimeWarp wbeta{[](double s) { return s <= 0.1 ? 0.0 : (s >= 0.9 ? 1.0 : dsl::beta(s)); },
                 [](double s) { return (s <= 0.0 || s >= 1.0) ? 0.0 : dsl::beta_deriv(s); }};
  TimeWarp wid{[](double s) { return s; }, [](double) { return 1.0; }};
  return warp_homotopy(gamma, wbeta, wid, beta_reparam(gamma), gamma);
}

Homotopy associator_homotopy(const Path& a, const Path& b, const Path& c) {
  const Path p1 = concat(concat(a, b), c);
  const Path p2 = concat(a, concat(b, c));
  // p1 = p2 o w for the piecewise-linear time warp below
  TimeWarp w{[](double s) {
               if (s <= 0.5) return s / 2;
               if (s <= 0.75) return s - 0.25;
               return 2 * s - 1;
             },
             [](double s) {
               if (s <= 0.5) return 0.5;
               if (s <= 0.75) return 1.0;
               return 2.0;
             }};
  TimeWarp wid{[](double s) { return s; }, [](double) { return 1.0; }};
  return warp_homotopy(p2, w, wid, p1, p2);
}

}  // namespace holo
