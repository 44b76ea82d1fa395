#pragma once

#include <functional>
#include <map>
#include <vector>

#include "holo/transport.hpp"

// Recovering a connection and its transition data from parallel transport
// alone.  A TransportOracle is a black box Path -> GroupElement; in tests it
// is backed by the integrator over hidden connection data, but nothing here
// looks inside.  The reconstruction differentiates transports along short
// straight lines anchored at the sample point; the transition extraction
// queries loops through per-chart anchor points.

namespace holo {

struct TransportOracle {
  AtlasPtr atlas;
  lie::GroupSpec group;
  std::function<lie::GroupElement(const Path&)> query;
};

/// The oracle defined by a connection (queries run the transport integrator).
TransportOracle tp(const ConnectionData& conn, int steps = 1024);

struct OracleSpotCheck {
  double worst_functoriality = 0.0;  // concat versus product on random pairs
  double worst_identity = 0.0;       // constant paths versus the identity
};

/// Samples random composable straight-line pairs inside each chart box.
OracleSpotCheck spot_check_oracle(const TransportOracle& oracle, int trials, unsigned seed = 7);

/// F(y, z) = [sigma(basepoint, y)] . z: transport along the straight line,
/// applied to the frame z.
lie::GroupElement section_family(const TransportOracle& oracle, const std::string& chart,
                                 const lie::GroupElement& z_triv,
                                 const Eigen::VectorXd& basepoint, const Eigen::VectorXd& y);

/// Pointwise connection samples recovered from the oracle: the value A(p)(v)
/// is the central difference of the section family anchored at p,
///   A(p)(v) = -log( F(p + h v) F(p - h v)^-1 ) / (2h),
/// an algebra element by construction.
struct ReconstructedConnection {
  std::string chart;
  double h = 1e-3;
  std::function<lie::AlgebraElement(const Eigen::VectorXd& point, const Eigen::VectorXd& dir)>
      sampler;
};

ReconstructedConnection reconstruct_connection(const TransportOracle& oracle,
                                               const std::string& chart, double h);

struct RoundtripRow {
  double h = 0.0;
  double max_error = 0.0;
};

struct RoundtripReport {
  std::map<std::string, std::vector<RoundtripRow>> tables;  // per chart, h then h/2 then h/4
  std::map<std::string, std::vector<double>> ratios;        // error(h/2)/error(h)
  double worst_error_at_finest = 0.0;
};

/// Compares the reconstructed sampler against conn's own local forms on
/// sampled (point, direction) pairs, refining h twice for the ratio table.
RoundtripReport roundtrip_check(const ConnectionData& conn, double h, int samples,
                                int steps = 1024);

// --- transition extraction -----------------------------------------------------

/// Paths from a common base point to an anchor in each chart; the anchor is
/// the path's endpoint.  Charts unreachable from the base must be absent.
struct AccessPaths {
  PathPoint basepoint;
  std::map<std::string, Path> to_anchor;
};

/// Queries the oracle for transition data: over atlas overlap k (a -> b) at
/// a point x,
///   g_hat(x) = u_a(x)^-1 . g(x) . u_b(tau(x))
/// in terms of the unknown true data, where u_c(y) is the oracle transport
/// base -> anchor_c -> y.  The extracted data is therefore cohomologous to
/// the true transitions whenever the oracle is genuine transport.
class CocycleExtractor {
 public:
  CocycleExtractor(TransportOracle oracle, AccessPaths access);

  const TransportOracle& oracle() const { return oracle_; }
  const AccessPaths& access() const { return access_; }

  /// u_chart(x): transport base -> anchor -> x (straight leg inside chart).
  lie::GroupElement frame(const std::string& chart, const Eigen::VectorXd& x) const;

  /// Extracted transition on atlas overlap k at x (in source coordinates).
  /// The extraction loop crosses charts at the image of x, so the reverse
  /// overlap must be declared there; extractable() reports whether it is.
  lie::GroupElement transition(int overlap_index, const Eigen::VectorXd& x) const;
  bool extractable(int overlap_index, const Eigen::VectorXd& x) const;

 private:
  TransportOracle oracle_;
  AccessPaths access_;
};

struct SampledTransition {
  int overlap_index = 0;
  std::vector<Eigen::VectorXd> points;
  std::vector<lie::GroupElement> values;
};

struct SampledCocycle {
  lie::GroupSpec group;
  std::vector<SampledTransition> transitions;
};

/// Extracted transitions on Halton samples of every overlap box.
SampledCocycle extract_cocycle(const CocycleExtractor& ex, int samples_per_overlap);

/// Worst residual of g_ab(x) g_bc(tau x) = g_ac(x) for the extracted data
/// (fresh oracle queries at the chained points).
double extracted_cocycle_residual(const CocycleExtractor& ex, int samples);

struct CohomologyReport {
  double worst = 0.0;
  int compared = 0;  // overlap samples that admitted an extraction loop
};

/// Worst residual of u_a(x) ghat_ab(x) u_b(tau x)^-1 = g_ab(x) against the
/// shipped transitions of conn, over `samples` points per overlap entry.
CohomologyReport cohomology_residual(const CocycleExtractor& ex, const ConnectionData& conn,
                                     int samples);

}  // namespace holo
