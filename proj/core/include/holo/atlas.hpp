#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "holo/expr.hpp"
#include "holo/sampling.hpp"

// Chart-presented base manifolds: a finite list of named box domains in R^dim
// together with transition maps on declared overlap regions.  Overlap regions
// are boxes in the source chart's coordinates; one chart pair may declare
// several overlap components, each with its own box and transition map.

namespace holo {

struct Chart {
  std::string name;
  Box box;
};

struct Overlap {
  std::string from;
  std::string to;
  Box box;          // in `from` coordinates, contained in `from`'s domain box
  dsl::ExprFn map;  // from-coordinates -> to-coordinates
};

class Atlas {
 public:
  Atlas(int dim, std::vector<Chart> charts, std::vector<Overlap> overlaps);

  int dim() const { return dim_; }
  const std::vector<Chart>& charts() const { return charts_; }
  const std::vector<Overlap>& overlaps() const { return overlaps_; }

  bool has_chart(const std::string& name) const;
  const Chart& chart(const std::string& name) const;

  /// Index into overlaps() of the first entry from->to whose box contains x.
  std::optional<int> find_overlap(const std::string& from, const std::string& to,
                                  const Eigen::VectorXd& x) const;

  /// Coordinates of x (given in chart `from`) in chart `to`; throws OutOfChart
  /// when no declared overlap covers x.
  Eigen::VectorXd transition(const std::string& from, const std::string& to,
                             const Eigen::VectorXd& x) const;

  /// Jacobian of the transition map at x.
  Eigen::MatrixXd transition_jacobian(int overlap_index, const Eigen::VectorXd& x) const;

  struct InverseReport {
    double worst_residual = 0.0;
    std::string where;
  };

  /// Checks that declared transitions are mutually inverse on sampled points.
  InverseReport validate_inverses(int samples_per_overlap = 64) const;

 private:
  int dim_;
  std::vector<Chart> charts_;
  std::vector<Overlap> overlaps_;
  std::vector<std::vector<dsl::ExprFn>> jacobians_;  // per overlap, per input
};

}  // namespace holo
