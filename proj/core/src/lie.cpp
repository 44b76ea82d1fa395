#include "holo/lie.hpp"

#include <cmath>
#include <complex>

#include "holo/detail/matfun.hpp"

namespace holo::lie {

namespace {

void require_same_group(const GroupSpec& a, const GroupSpec& b, const char* op) {
  if (!(a == b))
    throw GroupMismatch(std::string(op) + ": operands from " + a.str() + " and " + b.str());
}

bool is_special_orthogonal(const GroupSpec& g) {
  return g.name == GroupName::U1 || g.name == GroupName::SO2 || g.name == GroupName::SO3;
}

}  // namespace

GroupSpec GroupSpec::from_string(const std::string& s) {
  if (s == "U1") return u1();
  if (s == "SO2") return so2();
  if (s == "SO3") return so3();
  if (s == "SU2") return su2();
  if (s.rfind("GL", 0) == 0 && s.size() > 2) {
    const int n = std::atoi(s.c_str() + 2);
    if (n >= 1 && n <= 12) return gl(n);
  }
  throw Error("unknown group name '" + s + "'");
}

std::string GroupSpec::str() const {
  switch (name) {
    case GroupName::U1:
      return "U1";
    case GroupName::SO2:
      return "SO2";
    case GroupName::SO3:
      return "SO3";
    case GroupName::SU2:
      return "SU2";
    case GroupName::GL:
      return "GL" + std::to_string(n);
  }
  return "?";
}

int GroupSpec::dim_algebra() const {
  switch (name) {
    case GroupName::U1:
    case GroupName::SO2:
      return 1;
    case GroupName::SO3:
    case GroupName::SU2:
      return 3;
    case GroupName::GL:
      return n * n;
  }
  return 0;
}

double frobenius(const Mat& m) { return m.norm(); }

GroupElement identity(const GroupSpec& g) { return {g, Mat::Identity(g.n, g.n)}; }

AlgebraElement zero_alg(const GroupSpec& g) { return {g, Mat::Zero(g.n, g.n)}; }

double membership_residual(const GroupSpec& g, const Mat& m) {
  if (m.rows() != g.n || m.cols() != g.n) return 1e30;
  switch (g.name) {
    case GroupName::U1:
    case GroupName::SO2:
    case GroupName::SO3: {
      const double ortho = (m.transpose() * m - Mat::Identity(g.n, g.n)).norm();
      const double realness = m.imag().norm();
      const double det = std::abs(m.determinant() - std::complex<double>(1.0, 0.0));
      return ortho + realness + det;
    }
    case GroupName::SU2: {
      const double unit = (m.adjoint() * m - Mat::Identity(2, 2)).norm();
      const double det = std::abs(m.determinant() - std::complex<double>(1.0, 0.0));
      return unit + det;
    }
    case GroupName::GL: {
      const double det = std::abs(m.determinant());
      return det > 1e-12 ? 0.0 : 1e30;
    }
  }
  return 1e30;
}

double algebra_residual(const GroupSpec& g, const Mat& m) {
  if (m.rows() != g.n || m.cols() != g.n) return 1e30;
  switch (g.name) {
    case GroupName::U1:
    case GroupName::SO2:
    case GroupName::SO3:
      return (m + m.transpose()).norm() + m.imag().norm();
    case GroupName::SU2:
      return (m + m.adjoint()).norm() + std::abs(m.trace());
    case GroupName::GL:
      return 0.0;
  }
  return 1e30;
}

GroupElement element(const GroupSpec& g, const Mat& m, double tol) {
  const double r = membership_residual(g, m);
  if (r > tol)
    throw GroupMismatch("matrix is not in " + g.str() + " (residual " + std::to_string(r) + ")");
  return {g, m};
}

AlgebraElement algebra(const GroupSpec& g, const Mat& m, double tol) {
  const double r = algebra_residual(g, m);
  if (r > tol)
    throw GroupMismatch("matrix is not in the algebra of " + g.str() + " (residual " +
                        std::to_string(r) + ")");
  return {g, m};
}

GroupElement element_from_real(const GroupSpec& g, const RMat& m, double tol) {
  return element(g, m.cast<std::complex<double>>(), tol);
}

AlgebraElement algebra_from_real(const GroupSpec& g, const RMat& m, double tol) {
  return algebra(g, m.cast<std::complex<double>>(), tol);
}

Mat project(const GroupSpec& g, const Mat& m) {
  if (g.name == GroupName::GL) return m;
  if (is_special_orthogonal(g)) {
    // polar factor of the real part, with the determinant pinned to +1
    const RMat re = m.real();
    Eigen::JacobiSVD<RMat> svd(re, Eigen::ComputeFullU | Eigen::ComputeFullV);
    RMat u = svd.matrixU();
    const RMat v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0) u.col(g.n - 1) *= -1.0;
    return (u * v.transpose()).cast<std::complex<double>>();
  }
  // SU(2): complex polar factor rescaled to unit determinant
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat p = svd.matrixU() * svd.matrixV().adjoint();
  const std::complex<double> det = p.determinant();
  p /= std::sqrt(det);
  return p;
}

Mat project_algebra(const GroupSpec& g, const Mat& m) {
  if (g.name == GroupName::GL) return m;
  if (is_special_orthogonal(g)) {
    const RMat re = m.real();
    return (0.5 * (re - re.transpose())).cast<std::complex<double>>();
  }
  Mat a = 0.5 * (m - m.adjoint());
  a -= (a.trace() / 2.0) * Mat::Identity(2, 2);
  return a;
}

GroupElement mul(const GroupElement& a, const GroupElement& b) {
  require_same_group(a.group, b.group, "mul");
  Mat m = a.matrix * b.matrix;
  if (membership_residual(a.group, m) > 1e-12) m = project(a.group, m);
  return {a.group, m};
}

GroupElement inverse(const GroupElement& a) {
  if (is_special_orthogonal(a.group)) return {a.group, a.matrix.transpose()};
  if (a.group.name == GroupName::SU2) return {a.group, a.matrix.adjoint()};
  return {a.group, a.matrix.partialPivLu().solve(Mat::Identity(a.group.n, a.group.n))};
}

GroupElement exp_alg(const AlgebraElement& x) {
  Mat m = detail::pade_exp(x.matrix);
  if (membership_residual(x.group, m) > 1e-12) m = project(x.group, m);
  return {x.group, m};
}

AlgebraElement log_grp(const GroupElement& g) {
  constexpr double pi = 3.14159265358979323846;
  // principal log exists iff no eigenvalue sits on the negative real axis
  Eigen::ComplexEigenSolver<Mat> eig(g.matrix, false);
  for (int i = 0; i < g.group.n; ++i) {
    const std::complex<double> lam = eig.eigenvalues()[i];
    if (std::abs(std::arg(lam)) > pi - 1e-6)
      throw CutLocus("log: eigenvalue " + std::to_string(lam.real()) + "+" +
                     std::to_string(lam.imag()) + "i at the cut locus");
  }
  Mat l = detail::pade_log(g.matrix);
  return {g.group, project_algebra(g.group, l)};
}

AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& x) {
  require_same_group(g.group, x.group, "adjoint");
  const Mat gi = inverse(g).matrix;
  return {g.group, g.matrix * x.matrix * gi};
}

double dist(const GroupElement& a, const GroupElement& b) {
  require_same_group(a.group, b.group, "dist");
  return (inverse(a).matrix * b.matrix - Mat::Identity(a.group.n, a.group.n)).norm();
}

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_group(x.group, y.group, "bracket");
  return {x.group, x.matrix * y.matrix - y.matrix * x.matrix};
}

double rotation_angle(const GroupElement& g) {
  switch (g.group.name) {
    case GroupName::U1:
    case GroupName::SO2:
      return std::atan2(g.matrix(1, 0).real(), g.matrix(0, 0).real());
    case GroupName::SO3: {
      const double c = std::clamp((g.matrix.trace().real() - 1.0) / 2.0, -1.0, 1.0);
      return std::acos(c);
    }
    case GroupName::SU2: {
      const double c = std::clamp(g.matrix.trace().real() / 2.0, -1.0, 1.0);
      return 2.0 * std::acos(c);
    }
    case GroupName::GL:
      return log_grp(g).matrix.norm();
  }
  return 0.0;
}

GroupElement rot2(double theta, const GroupSpec& g) {
  Mat m(2, 2);
  const double c = std::cos(theta), s = std::sin(theta);
  m << c, -s, s, c;
  return {g, m};
}

AlgebraElement so2_generator(const GroupSpec& g) {
  Mat m(2, 2);
  m << 0, -1, 1, 0;
  return {g, m};
}

}  // namespace holo::lie
