#pragma once

#include <Eigen/Dense>
#include <string>

#include "holo/errors.hpp"

// Matrix Lie groups used as structure groups: U(1) (realized as SO(2) so all
// group arithmetic over the reals stays real), SO(2), SO(3), SU(2) and GL(n).
// Elements live in complex matrices uniformly; the real groups simply carry a
// zero imaginary part.  All values are immutable and operations pure.

namespace holo::lie {

using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

enum class GroupName { U1, SO2, SO3, SU2, GL };

struct GroupSpec {
  GroupName name = GroupName::SO2;
  int n = 2;  // matrix dimension

  static GroupSpec u1() { return {GroupName::U1, 2}; }
  static GroupSpec so2() { return {GroupName::SO2, 2}; }
  static GroupSpec so3() { return {GroupName::SO3, 3}; }
  static GroupSpec su2() { return {GroupName::SU2, 2}; }
  static GroupSpec gl(int n) { return {GroupName::GL, n}; }

  /// Accepts the config spellings: "U1", "SO2", "SO3", "SU2", "GL<n>".
  static GroupSpec from_string(const std::string& s);
  std::string str() const;

  int dim_matrix() const { return n; }
  int dim_algebra() const;

  bool operator==(const GroupSpec&) const = default;
};

struct GroupElement {
  GroupSpec group;
  Mat matrix;
};

struct AlgebraElement {
  GroupSpec group;
  Mat matrix;
};

GroupElement identity(const GroupSpec& g);
AlgebraElement zero_alg(const GroupSpec& g);

/// How far the matrix is from satisfying the group's defining relations
/// (orthogonality + det for SO(n), unitarity + det for SU(2), invertibility
/// for GL).  Values <= 1e-9 count as membership.
double membership_residual(const GroupSpec& g, const Mat& m);
double algebra_residual(const GroupSpec& g, const Mat& m);

/// Wraps a matrix as a group element, checking membership (<= tol).
GroupElement element(const GroupSpec& g, const Mat& m, double tol = 1e-9);
AlgebraElement algebra(const GroupSpec& g, const Mat& m, double tol = 1e-9);

/// Lift a real matrix produced by the expression DSL.
GroupElement element_from_real(const GroupSpec& g, const RMat& m, double tol = 1e-9);
AlgebraElement algebra_from_real(const GroupSpec& g, const RMat& m, double tol = 1e-9);

/// Nearest group element (polar projection for SO/SU; identity map for GL).
Mat project(const GroupSpec& g, const Mat& m);
/// Nearest algebra element (antisymmetric / traceless anti-Hermitian part).
Mat project_algebra(const GroupSpec& g, const Mat& m);

/// Product, re-projected to the group when the residual drifts past 1e-12.
GroupElement mul(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& a);

GroupElement exp_alg(const AlgebraElement& x);

/// Principal logarithm; throws CutLocus when an eigenvalue sits within
/// 1e-6 of the negative real axis (rotation angle at pi).
AlgebraElement log_grp(const GroupElement& g);

/// Ad(g) X = g X g^-1.
AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& x);

/// Frobenius norm of a^-1 b - I; the tolerance metric used everywhere.
double dist(const GroupElement& a, const GroupElement& b);

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y);

/// Rotation angle of g: signed in (-pi, pi] for SO(2)/U(1), unsigned in
/// [0, pi] for SO(3), in [0, 2 pi] for SU(2), Frobenius norm of log for GL.
double rotation_angle(const GroupElement& g);

/// SO(2) rotation by theta and its generator [[0,-1],[1,0]].  U(1) shares the
/// realization, so the spec parameter picks which of the two names to carry.
GroupElement rot2(double theta, const GroupSpec& g = GroupSpec::so2());
AlgebraElement so2_generator(const GroupSpec& g = GroupSpec::so2());

double frobenius(const Mat& m);

}  // namespace holo::lie
