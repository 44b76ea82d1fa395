#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "holo/errors.hpp"

// Dense matrix exponential and principal logarithm for the small (n <= 12)
// matrices this engine works with.  exp is scaling-and-squaring with a
// diagonal Pade(6) approximant; log is inverse scaling-and-squaring: repeated
// principal square roots (product-form Denman-Beavers) until close to the
// identity, then a Gauss-Legendre partial-fraction approximant of log(I + Y).

namespace holo::detail {

template <typename Mat>
Mat pade_exp(const Mat& m) {
  using Real = typename Mat::RealScalar;
  const auto d = m.rows();
  const Real norm = m.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  int squarings = 0;
  if (norm > Real(0.25)) squarings = static_cast<int>(std::ceil(std::log2(norm / Real(0.25))));
  const Mat a = m / std::ldexp(1.0, squarings);

  // diagonal Pade(6,6) of exp: c_j = (12-j)! 6! / (12! j! (6-j)!)
  static const double c[] = {1.0,       1.0 / 2.0,    5.0 / 44.0,    1.0 / 66.0,
                             1.0 / 792, 1.0 / 15840.0, 1.0 / 665280.0};
  const Mat id = Mat::Identity(d, d);
  const Mat a2 = a * a;
  const Mat a4 = a2 * a2;
  const Mat a6 = a4 * a2;
  Mat even = c[0] * id + c[2] * a2 + c[4] * a4 + c[6] * a6;
  Mat odd = a * (c[1] * id + c[3] * a2 + c[5] * a4);
  Mat r = (even - odd).partialPivLu().solve(even + odd);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

/// Principal square root by the product form of the Denman-Beavers iteration.
template <typename Mat>
Mat principal_sqrt(const Mat& a) {
  const auto d = a.rows();
  const Mat id = Mat::Identity(d, d);
  Mat x = a;
  Mat m = a;
  for (int it = 0; it < 60; ++it) {
    if ((m - id).cwiseAbs().maxCoeff() < 1e-15) break;
    const Mat minv = m.partialPivLu().solve(id);
    x = 0.5 * x * (id + minv);
    m = 0.25 * (m + minv + 2.0 * id);
  }
  if ((x * x - a).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + a.cwiseAbs().maxCoeff()))
    throw CutLocus("matrix square root did not converge (eigenvalue near the negative axis?)");
  return x;
}

template <typename Mat>
Mat pade_log(const Mat& m) {
  using Real = typename Mat::RealScalar;
  const auto d = m.rows();
  const Mat id = Mat::Identity(d, d);

  Mat a = m;
  int sqrts = 0;
  while ((a - id).cwiseAbs().rowwise().sum().maxCoeff() > Real(0.25)) {
    a = principal_sqrt(a);
    if (++sqrts > 40)
      throw CutLocus("matrix log did not converge (argument near the cut locus)");
  }

  // log(I + Y) via the 8-node Gauss-Legendre partial fraction
  //   log(I + Y) = sum_j w_j Y (I + x_j Y)^{-1},  nodes on [0, 1].
  static const double nodes[] = {0.0198550717512319, 0.1016667612931866, 0.2372337950418355,
                                 0.4082826787521751, 0.5917173212478249, 0.7627662049581645,
                                 0.8983332387068134, 0.9801449282487681};
  static const double weights[] = {0.0506142681451881, 0.1111905172266872, 0.1568533229389436,
                                   0.1813418916891810, 0.1813418916891810, 0.1568533229389436,
                                   0.1111905172266872, 0.0506142681451881};
  const Mat y = a - id;
  Mat acc = Mat::Zero(d, d);
  for (int j = 0; j < 8; ++j) {
    const Mat den = id + nodes[j] * y;
    acc += weights[j] * den.partialPivLu().solve(y).eval();
  }
  return std::ldexp(1.0, sqrts) * acc;
}

}  // namespace holo::detail
