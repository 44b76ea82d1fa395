#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "holo/atlas.hpp"

// Paths with sitting instances and thin-homotopy certificates.
//
// A path is a piecewise map [0,1] -> M: an ordered list of segments, each
// living in one chart, with the global parameter t as the expression input.
// Segment boundaries must sit (the map is locally constant there), so chart
// changes happen at rest and concatenations stay smooth.

namespace holo {

using AtlasPtr = std::shared_ptr<const Atlas>;

struct PathSegment {
  std::string chart;
  dsl::ExprFn map;  // arity 1 (global t), shape vector(dim)
  double t0 = 0.0;
  double t1 = 1.0;
};

struct PathPoint {
  std::string chart;
  Eigen::VectorXd coords;
};

class Path {
 public:
  /// Validates the construction: segments partition [0,1] in order, are
  /// continuous across boundaries (through a transition map when the chart
  /// changes), sit inside collars of relative width sitting_radius at each
  /// segment end, and stay inside their chart boxes at 64 sampled parameters.
  Path(AtlasPtr atlas, std::vector<PathSegment> segments, double sitting_radius = 0.1);

  const AtlasPtr& atlas() const { return atlas_; }
  const std::vector<PathSegment>& segments() const { return segments_; }
  double sitting_radius() const { return sitting_radius_; }

  PathPoint at(double t) const;
  Eigen::VectorXd velocity(double t) const;  // in the chart of the segment at t

  PathPoint start() const { return at(0.0); }
  PathPoint end() const { return at(1.0); }

  int segment_index(double t) const;

  bool is_loop(double tol = 1e-9) const;

 private:
  AtlasPtr atlas_;
  std::vector<PathSegment> segments_;
  std::vector<dsl::ExprFn> velocities_;
  double sitting_radius_;
};

/// Same manifold point up to a declared transition, within tol.
bool points_agree(const Atlas& atlas, const PathPoint& a, const PathPoint& b, double tol);

/// Pointwise agreement of two paths at `samples` parameters.
bool paths_agree(const Path& a, const Path& b, int samples, double tol);

/// Concatenation: tau runs first at doubled speed on [0, 1/2], gamma on
/// [1/2, 1].  Precondition: tau ends where gamma starts (EndpointMismatch).
Path concat(const Path& gamma, const Path& tau);

/// reverse(gamma)(t) = gamma(1 - t).
Path reverse(const Path& gamma);

/// Constant path sitting at x.
Path constant_path(AtlasPtr atlas, const std::string& chart, const Eigen::VectorXd& x);

/// Straight line x -> y with sitting instances: t |-> x + beta(t)(y - x).
/// Throws SegmentLeavesChart when [x, y] leaves the chart box.
Path straight_line(AtlasPtr atlas, const std::string& chart, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

/// A smooth curve germ (a, b) -> chart with 0 inside; the family
/// s |-> [t |-> curve(s beta(t))] of sitting-instance paths from curve(0)
/// to curve(s).
struct PathGerm {
  AtlasPtr atlas;
  std::string chart;
  dsl::ExprFn curve;  // arity 1, vector(dim)
  double a = -1.0;
  double b = 1.0;
};

class UpsilonFamily {
 public:
  explicit UpsilonFamily(PathGerm germ);
  /// The path t |-> curve(s beta(t)); s must lie in (a, b).
  Path at(double s) const;

 private:
  PathGerm germ_;
};

// --- thin homotopies ---------------------------------------------------------

/// A homotopy H : [0,1]^2 -> M between gamma0 = H(.,0) and gamma1 = H(.,1),
/// presented by evaluation and Jacobian callables (columns d/ds, d/dt).
/// Boundary collars of the declared widths must sit.
struct Homotopy {
  Path gamma0;
  Path gamma1;
  double collar_s = 0.1;
  double collar_t = 0.1;
  std::function<PathPoint(double s, double t)> value;
  std::function<Eigen::MatrixXd(double s, double t)> jacobian;  // dim x 2
};

/// Checks H's declared boundary behavior: rows match the boundary paths,
/// endpoints are fixed in t, and the collar partials vanish.
/// Throws BoundaryMismatch on failure.
void check_homotopy_boundary(const Homotopy& h, int samples = 64, double tol = 1e-9);

/// Grid evidence for rank(dH) <= 1: the second singular value of the
/// Jacobian at grid x grid points must stay below tol (default
/// 1e-8 * (1 + max |dH|)).  A certificate records the grid and tolerance; it
/// is evidence at the sampled points, not a proof.
struct ThinOutcome {
  bool certified = false;
  int grid = 0;
  double tol = 0.0;
  double max_sigma2 = 0.0;
  double max_jacobian_norm = 0.0;
  double worst_s = 0.0;
  double worst_t = 0.0;
};

ThinOutcome certify_thin(const Homotopy& h, int grid = 33, double tol = -1.0);

/// Thin-homotopy classes are represented by a chosen representative;
/// equality is only ever witnessed by an explicit certified homotopy.
struct ThinClass {
  Path representative;
};

inline ThinClass class_of(Path gamma) { return {std::move(gamma)}; }

/// True iff h's boundary paths match the two representatives and h passes
/// certify_thin.  Mismatched boundaries throw BoundaryMismatch.
bool witness_equal(const ThinClass& c1, const ThinClass& c2, const Homotopy& h, int grid = 33,
                   double tol = -1.0);

// --- shipped homotopy builders ----------------------------------------------

/// Homotopy given by expressions, piecewise in s; piece maps take (s, t) as
/// inputs x0, x1.  This is the form config files use.
struct HomotopyPiece {
  std::string chart;
  double s0 = 0.0;
  double s1 = 1.0;
  dsl::ExprFn map;  // arity 2, vector(dim)
};

Homotopy dsl_homotopy(AtlasPtr atlas, std::vector<HomotopyPiece> pieces, Path gamma0, Path gamma1,
                      double collar_s = 0.1, double collar_t = 0.1);

/// H(s,t) = gamma(m(s,t)) for a smooth-in-t blend m between two time warps;
/// rank dH <= 1 holds by construction since H factors through gamma.
struct TimeWarp {
  std::function<double(double)> w;
  std::function<double(double)> dw;
};

Homotopy warp_homotopy(const Path& target, const TimeWarp& w0, const TimeWarp& w1, Path gamma0,
                       Path gamma1);

/// The reparameterization homotopy between gamma o beta and gamma.
Homotopy beta_reparam_homotopy(const Path& gamma);

/// gamma o beta as a Path (the smoothing reparameterization).
Path beta_reparam(const Path& gamma);

/// The associativity homotopy between concat(concat(a,b),c) and
/// concat(a,concat(b,c)).
Homotopy associator_homotopy(const Path& a, const Path& b, const Path& c);

}  // namespace holo
