#pragma once

#include "holo/reconstruct.hpp"

// Descent data over the cover groupoid of a finite atlas.  The groupoid has
// one object component per chart and one arrow component per declared overlap
// (source x in the from-chart, target tau(x) in the to-chart); composable
// arrow pairs carry the three face maps d0 (second arrow), d1 (composite),
// d2 (first arrow), and the cocycle condition d2*phi . d0*phi = d1*phi reads
//   phi_k1(x) . phi_k2(tau_k1 x) = phi_k3(x)
// pointwise.  Only cover groupoids are supported here.

namespace holo {

struct CoverGroupoidReport {
  double worst_simplicial = 0.0;  // tau_k2(tau_k1 x) versus tau_k3(x)
  int composable_samples = 0;
  std::string where;
};

/// Simplicial consistency of the cover groupoid's face data at samples.
CoverGroupoidReport check_cover_groupoid(const Atlas& atlas, int samples);

/// A group-valued function on one overlap region.
struct OverlapFn {
  std::function<lie::GroupElement(const Eigen::VectorXd&)> at;
};

/// Transport-side cocycle object: a chart-local transport oracle per chart
/// and a natural-isomorphism component phi per overlap.  Pure cocycle data
/// (no oracles) is allowed; naturality checks are skipped then.
struct TransCocycleObject {
  AtlasPtr atlas;
  lie::GroupSpec group;
  std::map<std::string, TransportOracle> oracles;
  std::vector<OverlapFn> phi;
};

struct CocycleCheckReport {
  double worst_cocycle = 0.0;
  bool cocycle_vacuous = true;  // no triple of three distinct charts met
  std::string cocycle_where;
  double worst_naturality = 0.0;
  std::string naturality_where;
};

/// The cocycle law at sampled double overlaps plus (when oracles are
/// present) naturality of phi against the chart transports on sampled
/// straight test paths inside each overlap box.
CocycleCheckReport check_cocycle(const TransCocycleObject& obj, int samples);

/// Connection-side objects share the representation with ConnectionData;
/// their cocycle law is the descent validation.
inline DescentReport check_cocycle(const ConnectionData& conn, int samples) {
  return validate_descent(conn, samples);
}

/// The holonomy functor on descent data: chart-local transport oracles from
/// the chart-local connections, phi from the transition functions.
TransCocycleObject hol_gamma(const ConnectionData& conn, int steps = 1024);

// --- induced functors between cocycle categories --------------------------------

/// A Lie group homomorphism with enough structure to move cocycle data.
struct GroupHom {
  lie::GroupSpec source;
  lie::GroupSpec target;
  std::function<lie::GroupElement(const lie::GroupElement&)> map;
};

GroupHom identity_hom(const lie::GroupSpec& g);
/// SO(2) -> SO(3): rotation about the z axis.
GroupHom so2_to_so3_z();
/// GL(n) -> GL(1): the determinant.
GroupHom det_hom(int n);

/// Worst |rho(ab) - rho(a) rho(b)| over random pairs.
double homomorphism_residual(const GroupHom& hom, int trials, unsigned seed = 11);

/// Applies rho chart-wise and overlap-wise.  Verifies the homomorphism
/// property on samples first (NotAHomomorphism if it fails); the output
/// satisfies the cocycle law whenever the input does.
TransCocycleObject induced_functor(const GroupHom& hom, const TransCocycleObject& obj,
                                   int trials = 32);

// --- morphisms of cocycle objects ----------------------------------------------

/// A candidate morphism between transport cocycle objects: one group-valued
/// function per chart.
struct CocycleMorphism {
  std::map<std::string, dsl::ExprFn> alpha;
};

struct EquivalenceReport {
  bool equivalent = false;
  double worst_square = 0.0;      // alpha_a(x) phi'_k(x) = phi_k(x) alpha_b(tau x)
  double worst_naturality = 0.0;  // alpha(end) O_b = O_a alpha(start) on test paths
};

/// True iff the commuting-square residual stays below 1e-6 at samples and
/// the candidate intertwines the chart transports on sampled test paths.
EquivalenceReport equivalent_objects(const TransCocycleObject& a, const TransCocycleObject& b,
                                     const CocycleMorphism& candidate, int samples);

}  // namespace holo
