#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "holo/connection.hpp"
#include "holo/path.hpp"

// Horizontal-lift integration.  In a chart the frame coefficient solves
//   g'(t) = -A_{gamma(t)}(gamma'(t)) g(t),  g(0) = I,
// integrated with a Runge-Kutta-Munthe-Kaas order-4 scheme (exponential
// updates, so group membership is preserved up to the accuracy of exp).
// At a chart change alpha -> beta the frame hands off as g |-> g_ab(x)^-1 g.
// Every transport is computed twice, at n and 2n steps; the distance between
// the two results is the reported error estimate (the 2n result is returned).

namespace holo {

struct TransportResult {
  PathPoint source;        // start point, in the first segment's chart
  PathPoint target;        // end point, in the final trivialization's chart
  lie::GroupElement element;
  double error_estimate = 0.0;
  bool accuracy_warning = false;  // estimate > 1e-8
  int steps = 0;                  // requested per-unit-parameter step count
};

/// Parallel transport along gamma.  steps >= 16 is the per-unit-parameter
/// step budget (a segment covering [t0,t1] gets ~steps*(t1-t0) steps).
/// Throws StepTooCoarse when the step-halving estimate exceeds 1e-4.
TransportResult transport(const ConnectionData& conn, const Path& gamma, int steps);

/// Transport around a loop, re-expressed in the first segment's chart when
/// the path returns through a different one.  Throws NotALoop.
TransportResult holonomy(const ConnectionData& conn, const Path& loop, int steps);

// --- smooth families of paths -------------------------------------------------

/// A k-parameter family of paths: pieces take (u_1..u_k, t) as inputs and
/// every slice u = const is a valid sitting-instance path.
struct PathFamily {
  AtlasPtr atlas;
  Box param_box;  // k-dimensional
  struct Piece {
    std::string chart;
    dsl::ExprFn map;  // arity k+1, vector(dim); t is the last input
    double t0 = 0.0;
    double t1 = 1.0;
  };
  std::vector<Piece> pieces;
  double sitting_radius = 0.1;
};

/// The path t |-> F(u, t).
Path family_slice(const PathFamily& fam, const Eigen::VectorXd& u);

struct FamilyEntry {
  Eigen::VectorXd param;
  TransportResult result;
  std::optional<Eigen::MatrixXcd> log;  // principal log, absent at the cut locus
};

struct FamilyTable {
  std::vector<FamilyEntry> entries;
  /// max |second difference of log| / h^2 over the grid (1-parameter
  /// families only); a bound C with second differences <= C h^2.
  double smoothness_coefficient = 0.0;
};

/// Transports every slice on a uniform grid over the parameter box.
FamilyTable family_transport(const ConnectionData& conn, const PathFamily& fam, int grid,
                             int steps);

// --- morphisms and pullbacks ---------------------------------------------------

/// Connection-preserving bundle morphism data, chart-wise: a group-valued
/// gauge function per chart.  Covers the identity on the base.
struct GaugeMorphism {
  std::map<std::string, dsl::ExprFn> h;  // per chart, group-valued
};

/// Residual of the intertwining square for the transports of conn and conn2:
///   dist( h(end) . T_conn(gamma),  T_conn2(gamma) . h(start) ).
/// Zero (up to integration error) exactly when the morphism maps conn to
/// conn2, i.e. A2 = Ad(h) A - (dh) h^-1 chart-wise.
double check_naturality(const GaugeMorphism& f, const ConnectionData& conn,
                        const ConnectionData& conn2, const Path& gamma, int steps);

/// A smooth map between chart-presented manifolds, given chart-wise.  Each
/// source chart maps into one declared target chart; maps must be written as
/// coordinate-list literals so paths can be composed symbolically.
struct ChartMap {
  AtlasPtr source;
  AtlasPtr target;
  struct Piece {
    std::string from_chart;
    std::string to_chart;
    dsl::ExprFn map;  // arity dim(source), vector(dim(target))
  };
  std::vector<Piece> pieces;
};

/// The composed path m o gamma in the target atlas.
Path map_path(const ChartMap& m, const Path& gamma);

/// Transport of the pulled-back connection along gamma, i.e. the transport
/// of conn along m o gamma.
TransportResult pullback_transport(const ChartMap& m, const ConnectionData& conn,
                                   const Path& gamma, int steps);

}  // namespace holo
