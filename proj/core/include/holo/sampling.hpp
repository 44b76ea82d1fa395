#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace holo {

/// Axis-aligned box in R^d, stored as per-axis [lo, hi] intervals.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Eigen::VectorXd& x, double slack = 0.0) const {
    if (x.size() != lo.size()) return false;
    for (int i = 0; i < x.size(); ++i)
      if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    return true;
  }

  /// True when `inner` lies inside this box (used for overlap declarations).
  bool contains_box(const Box& inner, double slack = 0.0) const {
    return contains(inner.lo, slack) && contains(inner.hi, slack);
  }
};

/// Radical-inverse Halton point, base b, index i (1-based to avoid the origin).
inline double halton(std::uint64_t i, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

/// Deterministic low-discrepancy samples inside a box.  Same box, same count,
/// same points, regardless of platform.
inline std::vector<Eigen::VectorXd> halton_in_box(const Box& box, int count) {
  static const std::uint64_t primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(static_cast<std::size_t>(count));
  const int d = box.dim();
  for (int k = 1; k <= count; ++k) {
    Eigen::VectorXd p(d);
    for (int j = 0; j < d; ++j) {
      const double u = halton(static_cast<std::uint64_t>(k), primes[j % 8]);
      p[j] = box.lo[j] + u * (box.hi[j] - box.lo[j]);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace holo
