#pragma once

#include <map>
#include <string>
#include <vector>

#include "holo/atlas.hpp"
#include "holo/lie.hpp"

// Descent data for a principal bundle with connection: a Lie-algebra-valued
// local 1-form per chart (coefficients A_i of A = sum_i A_i dx^i) and a
// group-valued transition function per overlap component.
//
// Conventions, fixed once for the whole engine (right principal action):
//   * sections transform as s_beta = s_alpha . g_ab,
//   * local forms transform as  A_beta = Ad(g_ab^-1) A_alpha + g_ab^-1 dg_ab
//     (pulled back through the overlap's transition map),
//   * a frame coefficient hands off as h |-> g_ab(x)^-1 h at a chart change,
//   * the transport ODE in a chart reads g'(t) = -A(gamma(t))(gamma'(t)) g(t).

namespace holo {

class ConnectionData {
 public:
  /// `local_forms[chart]` lists the dim coefficient functions A_i, each an
  /// ExprFn of the chart coordinates valued in n x n matrices.
  /// `transitions[k]` is the group-valued transition on atlas overlap k.
  /// Cocycle-only data (no local forms) is allowed: pass an empty map.
  ConnectionData(Atlas atlas, lie::GroupSpec group,
                 std::map<std::string, std::vector<dsl::ExprFn>> local_forms,
                 std::vector<dsl::ExprFn> transitions);

  const Atlas& atlas() const { return atlas_; }
  const lie::GroupSpec& group() const { return group_; }
  bool has_local_forms() const { return !local_forms_.empty(); }
  const std::map<std::string, std::vector<dsl::ExprFn>>& local_forms() const {
    return local_forms_;
  }
  const std::vector<dsl::ExprFn>& transitions() const { return transitions_; }

  /// A_i(point) as an algebra element.
  lie::AlgebraElement coefficient(const std::string& chart, int i,
                                  const Eigen::VectorXd& point) const;

  /// A(point)(v) = sum_i A_i(point) v_i.
  lie::AlgebraElement form(const std::string& chart, const Eigen::VectorXd& point,
                           const Eigen::VectorXd& direction) const;

  /// d A_j / d x_i at the point (exact symbolic derivative).
  lie::AlgebraElement derivative_of_coefficient(const std::string& chart, int j, int i,
                                                const Eigen::VectorXd& point) const;

  /// Transition group element on overlap k, evaluated in source coordinates.
  lie::GroupElement transition_at(int overlap_index, const Eigen::VectorXd& x) const;

  /// Transition from->to at x; throws OutOfChart when no overlap covers x.
  lie::GroupElement transition_between(const std::string& from, const std::string& to,
                                       const Eigen::VectorXd& x) const;

  /// d/dx_i of the transition on overlap k (matrix-valued).
  Eigen::MatrixXd transition_derivative(int overlap_index, int i,
                                        const Eigen::VectorXd& x) const;

 private:
  Atlas atlas_;
  lie::GroupSpec group_;
  std::map<std::string, std::vector<dsl::ExprFn>> local_forms_;
  std::vector<dsl::ExprFn> transitions_;
  // dA_[chart][j][i] = d A_j / d x_i, precomputed symbolically
  std::map<std::string, std::vector<std::vector<dsl::ExprFn>>> form_derivs_;
  std::vector<std::vector<dsl::ExprFn>> transition_derivs_;
};

/// Curvature components F_ij at one point; antisymmetric by construction
/// (only i < j is stored, F(j,i) is returned negated).
struct CurvatureSample {
  std::string chart;
  Eigen::VectorXd point;
  int dim = 0;
  std::vector<lie::AlgebraElement> upper;  // (i,j), i < j, lexicographic

  const Eigen::MatrixXcd component(int i, int j) const;
  double max_norm() const;
};

/// F_ij = d_i A_j - d_j A_i + [A_i, A_j], with exact symbolic derivatives.
CurvatureSample curvature_at(const ConnectionData& conn, const std::string& chart,
                             const Eigen::VectorXd& point);

struct FlatnessReport {
  bool flat = false;
  double worst_residual = 0.0;
  std::string chart;
  Eigen::VectorXd point;
};

/// Max curvature norm over a deterministic low-discrepancy sample of every
/// chart box, compared against tol.
FlatnessReport is_flat(const ConnectionData& conn, int samples, double tol);

struct DescentReport {
  double worst_cocycle = 0.0;          // |g_ab g_bc - g_ac| on triple overlaps
  std::string cocycle_where;
  bool cocycle_vacuous = true;         // no triple overlap was found
  double worst_compatibility = 0.0;    // transition law residual on overlaps
  std::string compatibility_where;
  double worst_inverse = 0.0;          // atlas transition round trips
  std::string inverse_where;
  double worst_membership = 0.0;       // group/algebra membership of the data
  std::string membership_where;
};

/// Checks the cocycle law, the connection compatibility law, transition
/// inverses and value membership on sampled points.  Reporting only.
DescentReport validate_descent(const ConnectionData& conn, int samples);

/// A group-valued function together with its pointwise inverse.  The inverse
/// is caller-provided because the expression language has no matrix inverse;
/// gauge_transform verifies h * h_inv = I on samples.
struct GaugeFunction {
  dsl::ExprFn h;
  dsl::ExprFn h_inv;
};

/// Change of trivialization by per-chart group-valued functions h:
///   A'_a = Ad(h_a^-1) A_a + h_a^-1 dh_a,
///   g'_ab(x) = h_a(x)^-1 g_ab(x) h_b(tau_ab(x)).
/// The result presents the same bundle-with-connection in new frames.
ConnectionData gauge_transform(const ConnectionData& conn,
                               const std::map<std::string, GaugeFunction>& h);

}  // namespace holo
