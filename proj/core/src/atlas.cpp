#include "holo/atlas.hpp"

#include "holo/errors.hpp"

namespace holo {

Atlas::Atlas(int dim, std::vector<Chart> charts, std::vector<Overlap> overlaps)
    : dim_(dim), charts_(std::move(charts)), overlaps_(std::move(overlaps)) {
  if (dim_ < 1) throw Error("atlas dimension must be positive");
  if (charts_.empty()) throw Error("atlas needs at least one chart");
  for (const auto& c : charts_) {
    if (c.box.dim() != dim_)
      throw Error("chart '" + c.name + "' has a box of dimension " +
                  std::to_string(c.box.dim()) + ", atlas has " + std::to_string(dim_));
    int count = 0;
    for (const auto& other : charts_)
      if (other.name == c.name) ++count;
    if (count != 1) throw Error("duplicate chart name '" + c.name + "'");
  }
  for (const auto& o : overlaps_) {
    const Chart& src = chart(o.from);
    chart(o.to);
    if (!src.box.contains_box(o.box, 1e-12))
      throw Error("overlap box " + o.from + "->" + o.to +
                  " is not inside the source chart's domain box");
    if (o.map.arity != dim_ || !(o.map.shape == dsl::Shape::vector(dim_)))
      throw Error("transition map " + o.from + "->" + o.to + " must be R^" +
                  std::to_string(dim_) + " -> R^" + std::to_string(dim_));
  }
  jacobians_.reserve(overlaps_.size());
  for (const auto& o : overlaps_) {
    std::vector<dsl::ExprFn> cols;
    cols.reserve(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) cols.push_back(dsl::diff(o.map, i));
    jacobians_.push_back(std::move(cols));
  }
}

bool Atlas::has_chart(const std::string& name) const {
  for (const auto& c : charts_)
    if (c.name == name) return true;
  return false;
}

const Chart& Atlas::chart(const std::string& name) const {
  for (const auto& c : charts_)
    if (c.name == name) return c;
  throw OutOfChart("no chart named '" + name + "'");
}

std::optional<int> Atlas::find_overlap(const std::string& from, const std::string& to,
                                       const Eigen::VectorXd& x) const {
  for (std::size_t i = 0; i < overlaps_.size(); ++i) {
    const Overlap& o = overlaps_[i];
    if (o.from == from && o.to == to && o.box.contains(x, 1e-12))
      return static_cast<int>(i);
  }
  return std::nullopt;
}

Eigen::VectorXd Atlas::transition(const std::string& from, const std::string& to,
                                  const Eigen::VectorXd& x) const {
  if (from == to) return x;
  const auto idx = find_overlap(from, to, x);
  if (!idx)
    throw OutOfChart("no declared overlap " + from + "->" + to + " covers the point");
  return dsl::eval(overlaps_[static_cast<std::size_t>(*idx)].map, x).data;
}

Eigen::MatrixXd Atlas::transition_jacobian(int overlap_index, const Eigen::VectorXd& x) const {
  Eigen::MatrixXd j(dim_, dim_);
  const auto& cols = jacobians_[static_cast<std::size_t>(overlap_index)];
  for (int i = 0; i < dim_; ++i) j.col(i) = dsl::eval(cols[static_cast<std::size_t>(i)], x).data;
  return j;
}

Atlas::InverseReport Atlas::validate_inverses(int samples_per_overlap) const {
  InverseReport rep;
  for (std::size_t i = 0; i < overlaps_.size(); ++i) {
    const Overlap& o = overlaps_[i];
    for (const auto& x : halton_in_box(o.box, samples_per_overlap)) {
      const Eigen::VectorXd y = dsl::eval(o.map, x).data;
      const auto back = find_overlap(o.to, o.from, y);
      if (!back) continue;  // inverse component not declared at y; nothing to check
      const Eigen::VectorXd xr = dsl::eval(overlaps_[static_cast<std::size_t>(*back)].map, y).data;
      const double r = (xr - x).norm();
      if (r > rep.worst_residual) {
        rep.worst_residual = r;
        rep.where = o.from + "->" + o.to;
      }
    }
  }
  return rep;
}

}  // namespace holo
