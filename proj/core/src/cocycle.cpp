#include "holo/cocycle.hpp"

#include <cmath>
#include <random>

namespace holo {

CoverGroupoidReport check_cover_groupoid(const Atlas& atlas, int samples) {
  CoverGroupoidReport rep;
  const auto& overlaps = atlas.overlaps();
  for (std::size_t k1 = 0; k1 < overlaps.size(); ++k1) {
    for (std::size_t k2 = 0; k2 < overlaps.size(); ++k2) {
      if (overlaps[k1].to != overlaps[k2].from) continue;
      for (const auto& x : halton_in_box(overlaps[k1].box, samples)) {
        const Eigen::VectorXd y = dsl::eval(overlaps[k1].map, x).data;
        if (!overlaps[k2].box.contains(y, 1e-12)) continue;
        const Eigen::VectorXd z = dsl::eval(overlaps[k2].map, y).data;
        Eigen::VectorXd direct;
        if (overlaps[k2].to == overlaps[k1].from) {
          direct = x;  // d1 is a unit arrow
        } else {
          const auto k3 = atlas.find_overlap(overlaps[k1].from, overlaps[k2].to, x);
          if (!k3) continue;
          direct = dsl::eval(overlaps[static_cast<std::size_t>(*k3)].map, x).data;
        }
        ++rep.composable_samples;
        const double r = (z - direct).norm();
        if (r > rep.worst_simplicial) {
          rep.worst_simplicial = r;
          rep.where = overlaps[k1].from + "->" + overlaps[k1].to + "->" + overlaps[k2].to;
        }
      }
    }
  }
  return rep;
}

CocycleCheckReport check_cocycle(const TransCocycleObject& obj, int samples) {
  CocycleCheckReport rep;
  const Atlas& atlas = *obj.atlas;
  const auto& overlaps = atlas.overlaps();
  const int n = obj.group.dim_matrix();

  for (std::size_t k1 = 0; k1 < overlaps.size(); ++k1) {
    for (std::size_t k2 = 0; k2 < overlaps.size(); ++k2) {
      if (overlaps[k1].to != overlaps[k2].from) continue;
      for (const auto& x : halton_in_box(overlaps[k1].box, samples)) {
        const Eigen::VectorXd y = dsl::eval(overlaps[k1].map, x).data;
        if (!overlaps[k2].box.contains(y, 1e-12)) continue;
        const lie::Mat prod = obj.phi[k1].at(x).matrix * obj.phi[k2].at(y).matrix;
        lie::Mat target;
        if (overlaps[k2].to == overlaps[k1].from) {
          target = lie::Mat::Identity(n, n);
        } else {
          const auto k3 = atlas.find_overlap(overlaps[k1].from, overlaps[k2].to, x);
          if (!k3) continue;
          target = obj.phi[static_cast<std::size_t>(*k3)].at(x).matrix;
          rep.cocycle_vacuous = false;
        }
        const double r = (prod - target).norm();
        if (r > rep.worst_cocycle) {
          rep.worst_cocycle = r;
          rep.cocycle_where =
              overlaps[k1].from + "->" + overlaps[k1].to + "->" + overlaps[k2].to;
        }
      }
    }
  }

  if (obj.oracles.empty()) return rep;

  // naturality of phi: phi(end) . O_to(tau o sigma) = O_from(sigma) . phi(start)
  for (std::size_t k = 0; k < overlaps.size(); ++k) {
    const Overlap& o = overlaps[k];
    const TransportOracle& from = obj.oracles.at(o.from);
    const TransportOracle& to = obj.oracles.at(o.to);
    const auto pts = halton_in_box(o.box, 2 * std::max(samples / 8, 2));
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      const Eigen::VectorXd& x = pts[i];
      const Eigen::VectorXd& y = pts[i + 1];
      const Path sigma = straight_line(from.atlas, o.from, x, y);
      const Eigen::VectorXd xb = dsl::eval(o.map, x).data;
      const Eigen::VectorXd yb = dsl::eval(o.map, y).data;
      // the image path of sigma under tau, built symbolically
      std::vector<dsl::ExprFn> comps;
      for (int c = 0; c < atlas.dim(); ++c)
        comps.push_back(dsl::component(sigma.segments()[0].map, c));
      const dsl::ExprFn mapped = dsl::subst(o.map, comps, 1);
      const Path sigma_b(to.atlas, {{o.to, mapped, 0.0, 1.0}});

      const lie::GroupElement lhs = lie::mul(obj.phi[k].at(y), to.query(sigma_b));
      const lie::GroupElement rhs = lie::mul(from.query(sigma), obj.phi[k].at(x));
      const double r = lie::dist(lhs, rhs);
      if (r > rep.worst_naturality) {
        rep.worst_naturality = r;
        rep.naturality_where = o.from + "->" + o.to;
      }
      (void)xb;
      (void)yb;
    }
  }
  return rep;
}

TransCocycleObject hol_gamma(const ConnectionData& conn, int steps) {
  if (!conn.has_local_forms()) throw Error("hol_gamma needs local connection forms");
  TransCocycleObject out;
  out.atlas = std::make_shared<Atlas>(conn.atlas());
  out.group = conn.group();

  for (const auto& chart : conn.atlas().charts()) {
    // the chart-local connection: one chart, no overlaps
    Atlas local(conn.atlas().dim(), {chart}, {});
    ConnectionData piece(local, conn.group(), {{chart.name, conn.local_forms().at(chart.name)}},
                         {});
    out.oracles.emplace(chart.name, tp(piece, steps));
  }

  auto data = std::make_shared<ConnectionData>(conn);
  for (std::size_t k = 0; k < conn.atlas().overlaps().size(); ++k) {
    out.phi.push_back({[data, k](const Eigen::VectorXd& x) {
      return data->transition_at(static_cast<int>(k), x);
    }});
  }
  return out;
}

GroupHom identity_hom(const lie::GroupSpec& g) {
  return {g, g, [](const lie::GroupElement& e) { return e; }};
}

GroupHom so2_to_so3_z() {
  return {lie::GroupSpec::so2(), lie::GroupSpec::so3(), [](const lie::GroupElement& e) {
            lie::Mat m = lie::Mat::Identity(3, 3);
            m.block(0, 0, 2, 2) = e.matrix;
            return lie::GroupElement{lie::GroupSpec::so3(), m};
          }};
}

GroupHom det_hom(int n) {
  return {lie::GroupSpec::gl(n), lie::GroupSpec::gl(1), [](const lie::GroupElement& e) {
            lie::Mat m(1, 1);
            m(0, 0) = e.matrix.determinant();
            return lie::GroupElement{lie::GroupSpec::gl(1), m};
          }};
}

namespace {

lie::GroupElement random_element(const lie::GroupSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  switch (g.name) {
    case lie::GroupName::U1:
    case lie::GroupName::SO2:
      return lie::rot2(M_PI * u(rng), g);
    case lie::GroupName::SO3: {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
      const double a = u(rng), b = u(rng), c = u(rng);
      m << 0, -a, b, a, 0, -c, -b, c, 0;
      return lie::exp_alg(lie::algebra_from_real(g, m));
    }
    case lie::GroupName::SU2: {
      using namespace std::complex_literals;
      lie::Mat m(2, 2);
      const double a = u(rng), b = u(rng), c = u(rng);
      m << a * 1i, b + c * 1i, -b + c * 1i, -a * 1i;
      return lie::exp_alg(lie::algebra(g, m));
    }
    case lie::GroupName::GL: {
      Eigen::MatrixXd m(g.n, g.n);
      for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) m(i, j) = u(rng) + (i == j ? 1.5 : 0.0);
      return lie::element_from_real(g, m);
    }
  }
  throw Error("unknown group");
}

}  // namespace

double homomorphism_residual(const GroupHom& hom, int trials, unsigned seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    const lie::GroupElement a = random_element(hom.source, rng);
    const lie::GroupElement b = random_element(hom.source, rng);
    const lie::GroupElement lhs = hom.map(lie::mul(a, b));
    const lie::GroupElement rhs = lie::mul(hom.map(a), hom.map(b));
    worst = std::max(worst, (lhs.matrix - rhs.matrix).norm());
  }
  return worst;
}

TransCocycleObject induced_functor(const GroupHom& hom, const TransCocycleObject& obj,
                                   int trials) {
  if (!(hom.source == obj.group))
    throw NotAHomomorphism("homomorphism source " + hom.source.str() +
                           " does not match the object's group " + obj.group.str());
  const double res = homomorphism_residual(hom, trials);
  if (res > 1e-9)
    throw NotAHomomorphism("map fails the homomorphism law (residual " + std::to_string(res) +
                           ")");

  TransCocycleObject out;
  out.atlas = obj.atlas;
  out.group = hom.target;
  for (const auto& [chart, oracle] : obj.oracles) {
    TransportOracle mapped = oracle;
    mapped.group = hom.target;
    mapped.query = [hom, q = oracle.query](const Path& p) { return hom.map(q(p)); };
    out.oracles.emplace(chart, std::move(mapped));
  }
  for (const auto& p : obj.phi)
    out.phi.push_back({[hom, at = p.at](const Eigen::VectorXd& x) { return hom.map(at(x)); }});
  return out;
}

EquivalenceReport equivalent_objects(const TransCocycleObject& a, const TransCocycleObject& b,
                                     const CocycleMorphism& candidate, int samples) {
  if (!(a.group == b.group)) throw ShapeError("cocycle objects live over different groups");
  EquivalenceReport rep;
  const Atlas& atlas = *a.atlas;
  const int n = a.group.dim_matrix();
  const dsl::Shape mat = dsl::Shape::matrix(n, n);

  auto alpha_at = [&](const std::string& chart, const Eigen::VectorXd& x) {
    const auto it = candidate.alpha.find(chart);
    if (it == candidate.alpha.end())
      throw ShapeError("candidate morphism has no component on chart " + chart);
    if (!(it->second.shape == mat))
      throw ShapeError("candidate component on " + chart + " has shape " +
                       it->second.shape.str());
    lie::Mat m = dsl::eval(it->second, x).data.cast<std::complex<double>>();
    if (lie::membership_residual(a.group, m) > 1e-12) m = lie::project(a.group, m);
    return lie::GroupElement{a.group, m};
  };

  // commuting square over every overlap component
  const auto& overlaps = atlas.overlaps();
  for (std::size_t k = 0; k < overlaps.size(); ++k) {
    const Overlap& o = overlaps[k];
    for (const auto& x : halton_in_box(o.box, samples)) {
      const Eigen::VectorXd y = dsl::eval(o.map, x).data;
      const lie::GroupElement lhs = lie::mul(alpha_at(o.from, x), b.phi[k].at(x));
      const lie::GroupElement rhs = lie::mul(a.phi[k].at(x), alpha_at(o.to, y));
      rep.worst_square = std::max(rep.worst_square, lie::dist(lhs, rhs));
    }
  }

  // naturality against the chart transports on sampled straight paths
  if (!a.oracles.empty() && !b.oracles.empty()) {
    for (const auto& chart : atlas.charts()) {
      const TransportOracle& oa = a.oracles.at(chart.name);
      const TransportOracle& ob = b.oracles.at(chart.name);
      Box inner = chart.box;
      const Eigen::VectorXd margin = 0.05 * (inner.hi - inner.lo);
      inner.lo += margin;
      inner.hi -= margin;
      const auto pts = halton_in_box(inner, 2 * std::max(samples / 8, 2));
      for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
        const Path sigma = straight_line(oa.atlas, chart.name, pts[i], pts[i + 1]);
        const lie::GroupElement lhs = lie::mul(alpha_at(chart.name, pts[i + 1]), ob.query(sigma));
        const lie::GroupElement rhs = lie::mul(oa.query(sigma), alpha_at(chart.name, pts[i]));
        rep.worst_naturality = std::max(rep.worst_naturality, lie::dist(lhs, rhs));
      }
    }
  }

  rep.equivalent = rep.worst_square <= 1e-6 && rep.worst_naturality <= 1e-6;
  return rep;
}

}  // namespace holo
