#include "holo/connection.hpp"

#include "holo/errors.hpp"

namespace holo {

using lie::AlgebraElement;
using lie::GroupElement;

ConnectionData::ConnectionData(Atlas atlas, lie::GroupSpec group,
                               std::map<std::string, std::vector<dsl::ExprFn>> local_forms,
                               std::vector<dsl::ExprFn> transitions)
    : atlas_(std::move(atlas)),
      group_(group),
      local_forms_(std::move(local_forms)),
      transitions_(std::move(transitions)) {
  const int d = atlas_.dim();
  const int n = group_.dim_matrix();
  const dsl::Shape mat = dsl::Shape::matrix(n, n);

  for (const auto& [chart, forms] : local_forms_) {
    atlas_.chart(chart);
    if (static_cast<int>(forms.size()) != d)
      throw Error("connection on chart '" + chart + "' needs " + std::to_string(d) +
                  " coefficient functions, got " + std::to_string(forms.size()));
    for (const auto& f : forms)
      if (f.arity != d || !(f.shape == mat))
        throw Error("coefficient on chart '" + chart + "' must map R^" + std::to_string(d) +
                    " to " + mat.str());
  }
  if (has_local_forms())
    for (const auto& c : atlas_.charts())
      if (!local_forms_.count(c.name))
        throw Error("connection is missing local forms for chart '" + c.name + "'");

  if (transitions_.size() != atlas_.overlaps().size())
    throw Error("connection needs one transition per atlas overlap (" +
                std::to_string(atlas_.overlaps().size()) + "), got " +
                std::to_string(transitions_.size()));
  for (const auto& t : transitions_)
    if (t.arity != d || !(t.shape == mat))
      throw Error("transition functions must map R^" + std::to_string(d) + " to " + mat.str());

  for (const auto& [chart, forms] : local_forms_) {
    std::vector<std::vector<dsl::ExprFn>> derivs;
    derivs.reserve(forms.size());
    for (const auto& f : forms) {
      std::vector<dsl::ExprFn> by_input;
      by_input.reserve(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) by_input.push_back(dsl::diff(f, i));
      derivs.push_back(std::move(by_input));
    }
    form_derivs_[chart] = std::move(derivs);
  }
  transition_derivs_.reserve(transitions_.size());
  for (const auto& t : transitions_) {
    std::vector<dsl::ExprFn> by_input;
    by_input.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) by_input.push_back(dsl::diff(t, i));
    transition_derivs_.push_back(std::move(by_input));
  }
}

AlgebraElement ConnectionData::coefficient(const std::string& chart, int i,
                                           const Eigen::VectorXd& point) const {
  const auto it = local_forms_.find(chart);
  if (it == local_forms_.end())
    throw OutOfChart("connection has no local form on chart '" + chart + "'");
  const Eigen::MatrixXd m = dsl::eval(it->second[static_cast<std::size_t>(i)], point).data;
  return {group_, m.cast<std::complex<double>>()};
}

AlgebraElement ConnectionData::form(const std::string& chart, const Eigen::VectorXd& point,
                                    const Eigen::VectorXd& direction) const {
  const auto it = local_forms_.find(chart);
  if (it == local_forms_.end())
    throw OutOfChart("connection has no local form on chart '" + chart + "'");
  const int n = group_.dim_matrix();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < atlas_.dim(); ++i) {
    if (direction[i] == 0.0) continue;
    acc += direction[i] * dsl::eval(it->second[static_cast<std::size_t>(i)], point).data;
  }
  return {group_, acc.cast<std::complex<double>>()};
}

AlgebraElement ConnectionData::derivative_of_coefficient(const std::string& chart, int j, int i,
                                                         const Eigen::VectorXd& point) const {
  const auto it = form_derivs_.find(chart);
  if (it == form_derivs_.end())
    throw OutOfChart("connection has no local form on chart '" + chart + "'");
  const Eigen::MatrixXd m =
      dsl::eval(it->second[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)], point).data;
  return {group_, m.cast<std::complex<double>>()};
}

GroupElement ConnectionData::transition_at(int overlap_index, const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd m =
      dsl::eval(transitions_[static_cast<std::size_t>(overlap_index)], x).data;
  lie::Mat c = m.cast<std::complex<double>>();
  if (lie::membership_residual(group_, c) > 1e-12) c = lie::project(group_, c);
  return {group_, c};
}

GroupElement ConnectionData::transition_between(const std::string& from, const std::string& to,
                                                const Eigen::VectorXd& x) const {
  if (from == to) return lie::identity(group_);
  const auto idx = atlas_.find_overlap(from, to, x);
  if (!idx) throw OutOfChart("no overlap " + from + "->" + to + " covers the point");
  return transition_at(*idx, x);
}

Eigen::MatrixXd ConnectionData::transition_derivative(int overlap_index, int i,
                                                      const Eigen::VectorXd& x) const {
  return dsl::eval(
             transition_derivs_[static_cast<std::size_t>(overlap_index)][static_cast<std::size_t>(i)],
             x)
      .data;
}

const Eigen::MatrixXcd CurvatureSample::component(int i, int j) const {
  if (i == j) return Eigen::MatrixXcd::Zero(upper[0].matrix.rows(), upper[0].matrix.cols());
  const bool flip = i > j;
  if (flip) std::swap(i, j);
  // index of (i,j), i<j, in lexicographic upper-triangle order
  int idx = 0;
  for (int a = 0; a < i; ++a) idx += dim - a - 1;
  idx += j - i - 1;
  const Eigen::MatrixXcd& m = upper[static_cast<std::size_t>(idx)].matrix;
  return flip ? (-m).eval() : m;
}

double CurvatureSample::max_norm() const {
  double w = 0.0;
  for (const auto& u : upper) w = std::max(w, u.matrix.norm());
  return w;
}

CurvatureSample curvature_at(const ConnectionData& conn, const std::string& chart,
                             const Eigen::VectorXd& point) {
  const Atlas& atlas = conn.atlas();
  if (!atlas.chart(chart).box.contains(point, 1e-9))
    throw OutOfChart("curvature point is outside chart '" + chart + "'");
  const int d = atlas.dim();

  std::vector<AlgebraElement> coeffs;
  coeffs.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) coeffs.push_back(conn.coefficient(chart, i, point));

  // symbolic derivatives were precomputed per chart at construction
  CurvatureSample out;
  out.chart = chart;
  out.point = point;
  out.dim = d;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const AlgebraElement di_aj = conn.derivative_of_coefficient(chart, j, i, point);
      const AlgebraElement dj_ai = conn.derivative_of_coefficient(chart, i, j, point);
      lie::Mat f = di_aj.matrix - dj_ai.matrix +
                   (coeffs[static_cast<std::size_t>(i)].matrix * coeffs[static_cast<std::size_t>(j)].matrix -
                    coeffs[static_cast<std::size_t>(j)].matrix * coeffs[static_cast<std::size_t>(i)].matrix);
      out.upper.push_back({conn.group(), std::move(f)});
    }
  return out;
}

FlatnessReport is_flat(const ConnectionData& conn, int samples, double tol) {
  FlatnessReport rep;
  for (const auto& c : conn.atlas().charts()) {
    for (const auto& p : halton_in_box(c.box, samples)) {
      const CurvatureSample f = curvature_at(conn, c.name, p);
      const double w = f.max_norm();
      if (w > rep.worst_residual) {
        rep.worst_residual = w;
        rep.chart = c.name;
        rep.point = p;
      }
    }
  }
  rep.flat = rep.worst_residual <= tol;
  return rep;
}

DescentReport validate_descent(const ConnectionData& conn, int samples) {
  DescentReport rep;
  const Atlas& atlas = conn.atlas();
  const lie::GroupSpec& g = conn.group();
  const int d = atlas.dim();

  const Atlas::InverseReport inv = atlas.validate_inverses(samples);
  rep.worst_inverse = inv.worst_residual;
  rep.inverse_where = inv.where;

  // membership of local-form values and transition values
  if (conn.has_local_forms()) {
    for (const auto& c : atlas.charts()) {
      for (const auto& p : halton_in_box(c.box, samples)) {
        for (int i = 0; i < d; ++i) {
          const double r = lie::algebra_residual(g, conn.coefficient(c.name, i, p).matrix);
          if (r > rep.worst_membership) {
            rep.worst_membership = r;
            rep.membership_where = "A_" + std::to_string(i) + " on " + c.name;
          }
        }
      }
    }
  }
  const auto& overlaps = atlas.overlaps();
  for (std::size_t k = 0; k < overlaps.size(); ++k) {
    for (const auto& x : halton_in_box(overlaps[k].box, samples)) {
      const Eigen::MatrixXd m = dsl::eval(conn.transitions()[k], x).data;
      const double r = lie::membership_residual(g, m.cast<std::complex<double>>());
      if (r > rep.worst_membership) {
        rep.worst_membership = r;
        rep.membership_where = "g on " + overlaps[k].from + "->" + overlaps[k].to;
      }
    }
  }

  // cocycle law g_ab(x) g_bc(tau_ab x) = g_ac(x) wherever three charts meet;
  // with c == a the product must be the identity
  for (std::size_t k1 = 0; k1 < overlaps.size(); ++k1) {
    for (std::size_t k2 = 0; k2 < overlaps.size(); ++k2) {
      if (overlaps[k1].to != overlaps[k2].from) continue;
      for (const auto& x : halton_in_box(overlaps[k1].box, samples)) {
        const Eigen::VectorXd y = dsl::eval(overlaps[k1].map, x).data;
        if (!overlaps[k2].box.contains(y, 1e-12)) continue;
        const lie::Mat prod =
            conn.transition_at(static_cast<int>(k1), x).matrix *
            conn.transition_at(static_cast<int>(k2), y).matrix;
        lie::Mat target;
        const std::string& a = overlaps[k1].from;
        const std::string& c = overlaps[k2].to;
        if (c == a) {
          target = lie::Mat::Identity(g.dim_matrix(), g.dim_matrix());
        } else {
          const auto k3 = atlas.find_overlap(a, c, x);
          if (!k3) continue;
          target = conn.transition_at(*k3, x).matrix;
          rep.cocycle_vacuous = false;
        }
        const double r = (prod - target).norm();
        if (r > rep.worst_cocycle) {
          rep.worst_cocycle = r;
          rep.cocycle_where = a + "->" + overlaps[k1].to + "->" + c;
        }
      }
    }
  }

  // compatibility: pullback of A_b through tau equals Ad(g^-1) A_a + g^-1 dg
  if (conn.has_local_forms()) {
    for (std::size_t k = 0; k < overlaps.size(); ++k) {
      const Overlap& o = overlaps[k];
      for (const auto& x : halton_in_box(o.box, samples)) {
        const Eigen::VectorXd y = dsl::eval(o.map, x).data;
        const Eigen::MatrixXd jac = atlas.transition_jacobian(static_cast<int>(k), x);
        const GroupElement gx = conn.transition_at(static_cast<int>(k), x);
        const lie::Mat gi = lie::inverse(gx).matrix;
        for (int i = 0; i < d; ++i) {
          const lie::Mat lhs = conn.form(o.to, y, jac.col(i)).matrix;
          const lie::Mat dg =
              conn.transition_derivative(static_cast<int>(k), i, x).cast<std::complex<double>>();
          const lie::Mat rhs =
              gi * conn.form(o.from, x, Eigen::VectorXd::Unit(d, i)).matrix * gx.matrix + gi * dg;
          const double r = (lhs - rhs).norm();
          if (r > rep.worst_compatibility) {
            rep.worst_compatibility = r;
            rep.compatibility_where = o.from + "->" + o.to + " dx" + std::to_string(i);
          }
        }
      }
    }
  }
  return rep;
}

ConnectionData gauge_transform(const ConnectionData& conn,
                               const std::map<std::string, GaugeFunction>& h) {
  const Atlas& atlas = conn.atlas();
  const int d = atlas.dim();
  const int n = conn.group().dim_matrix();
  const dsl::Shape mat = dsl::Shape::matrix(n, n);

  for (const auto& c : atlas.charts()) {
    const auto it = h.find(c.name);
    if (it == h.end()) throw Error("gauge_transform: no gauge function for chart " + c.name);
    const GaugeFunction& gf = it->second;
    if (gf.h.arity != d || !(gf.h.shape == mat) || gf.h_inv.arity != d ||
        !(gf.h_inv.shape == mat))
      throw Error("gauge functions must map R^" + std::to_string(d) + " to " + mat.str());
    for (const auto& p : halton_in_box(c.box, 16)) {
      const Eigen::MatrixXd prod = dsl::eval(gf.h, p).data * dsl::eval(gf.h_inv, p).data;
      if ((prod - Eigen::MatrixXd::Identity(n, n)).norm() > 1e-9)
        throw Error("gauge_transform: h*h_inv differs from I on chart " + c.name);
    }
  }

  std::map<std::string, std::vector<dsl::ExprFn>> forms;
  for (const auto& [chart, fs] : conn.local_forms()) {
    const GaugeFunction& gf = h.at(chart);
    std::vector<dsl::ExprFn> out;
    out.reserve(fs.size());
    for (int i = 0; i < d; ++i) {
      const dsl::ExprFn conj = dsl::fn_mul(dsl::fn_mul(gf.h_inv, fs[static_cast<std::size_t>(i)]), gf.h);
      out.push_back(dsl::fn_add(conj, dsl::fn_mul(gf.h_inv, dsl::diff(gf.h, i))));
    }
    forms[chart] = std::move(out);
  }

  std::vector<dsl::ExprFn> transitions;
  const auto& overlaps = atlas.overlaps();
  for (std::size_t k = 0; k < overlaps.size(); ++k) {
    const Overlap& o = overlaps[k];
    const GaugeFunction& ha = h.at(o.from);
    const GaugeFunction& hb = h.at(o.to);
    // h_b evaluated after the transition map: substitute tau's components
    std::vector<dsl::ExprFn> comps;
    comps.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) comps.push_back(dsl::component(o.map, i));
    const dsl::ExprFn hb_tau = dsl::subst(hb.h, comps, d);
    transitions.push_back(dsl::fn_mul(dsl::fn_mul(ha.h_inv, conn.transitions()[k]), hb_tau));
  }

  return ConnectionData(atlas, conn.group(), std::move(forms), std::move(transitions));
}

}  // namespace holo
