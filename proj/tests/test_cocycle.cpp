#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "holo/cocycle.hpp"

using namespace holo;

namespace {

Eigen::Vector2d v2(double a, double b) { return {a, b}; }

/// Two-chart cover of the plane strip with translated coordinates and the
/// constant-flux connection presented on both charts.
ConnectionData two_chart_flux(double a) {
  const auto fwd = dsl::parse_expr("[x0 - 1, x1]", 2);
  const auto bwd = dsl::parse_expr("[x0 + 1, x1]", 2);
  Atlas atlas(2, {{"a", fx::box2(0, 2, 0, 1)}, {"b", fx::box2(-1, 1, 0, 1)}},
              {{"a", "b", fx::box2(0.9, 1.6, 0, 1), fwd},
               {"b", "a", fx::box2(-0.1, 0.6, 0, 1), bwd}});
  const auto z = dsl::parse_expr("[[0, 0],[0, 0]]", 2);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "[[0, %.17g],[%.17g, 0]]", -a, a);
  const auto a1 = dsl::parse_expr(buf, 2);
  const auto gid = dsl::parse_expr("[[1, 0],[0, 1]]", 2);
  return ConnectionData(atlas, lie::GroupSpec::u1(), {{"a", {z, a1}}, {"b", {z, a1}}},
                        {gid, gid});
}

}  // namespace

TEST_CASE("cover groupoid face data is simplicially consistent") {
  const AtlasPtr sphere = fx::sphere_atlas();
  const CoverGroupoidReport sr = check_cover_groupoid(*sphere, 16);
  CHECK(sr.worst_simplicial <= 1e-9);
  CHECK(sr.composable_samples > 0);

  const AtlasPtr torus = fx::torus_atlas();
  const CoverGroupoidReport tr = check_cover_groupoid(*torus, 8);
  CHECK(tr.worst_simplicial <= 1e-9);
  CHECK(tr.composable_samples > 0);
}

TEST_CASE("hol_gamma of the two-chart flux cover has a trivial cocycle") {
  const ConnectionData conn = two_chart_flux(0.5);
  const TransCocycleObject obj = hol_gamma(conn, 512);

  const CocycleCheckReport rep = check_cocycle(obj, 32);
  CHECK(rep.worst_cocycle <= 1e-12);  // phi is identically the identity
  CHECK(rep.cocycle_vacuous);         // two charts: no triple of distinct charts
  CHECK(rep.worst_naturality <= 1e-8);
}

TEST_CASE("hol_gamma of the sphere passes the cocycle and naturality checks") {
  const ConnectionData conn = fx::sphere_lc_conn();
  const TransCocycleObject obj = hol_gamma(conn, 512);
  const CocycleCheckReport rep = check_cocycle(obj, 16);
  CHECK(rep.worst_cocycle <= 1e-9);
  CHECK(rep.cocycle_vacuous);
  CHECK(rep.worst_naturality <= 1e-6);
}

TEST_CASE("torus cocycle holds and perturbations are caught") {
  const ConnectionData conn = fx::torus_flux_conn();
  const TransCocycleObject obj = hol_gamma(conn, 256);
  const CocycleCheckReport rep = check_cocycle(obj, 6);
  CHECK(rep.worst_cocycle <= 1e-9);
  CHECK_FALSE(rep.cocycle_vacuous);
  CHECK(rep.worst_naturality <= 1e-7);

  // perturb one overlap component by exp(0.01 e)
  TransCocycleObject bad = obj;
  bad.phi[0] = {[inner = obj.phi[0].at, g = obj.group](const Eigen::VectorXd& x) {
    return lie::mul(lie::rot2(0.01, g), inner(x));
  }};
  const CocycleCheckReport brep = check_cocycle(bad, 6);
  CHECK(brep.worst_cocycle >= 5e-3);
}

TEST_CASE("induced functor: identity leaves the object alone") {
  const ConnectionData conn = two_chart_flux(0.3);
  const TransCocycleObject obj = hol_gamma(conn, 256);
  const TransCocycleObject same = induced_functor(identity_hom(obj.group), obj);
  for (std::size_t k = 0; k < obj.phi.size(); ++k) {
    const Eigen::VectorXd x = conn.atlas().overlaps()[k].box.lo;
    CHECK(lie::dist(same.phi[k].at(x), obj.phi[k].at(x)) == 0.0);
  }
}

TEST_CASE("induced functor: SO2 -> SO3 axis embedding preserves the law") {
  CHECK(homomorphism_residual(so2_to_so3_z(), 64) <= 1e-12);

  const ConnectionData conn = fx::sphere_lc_conn();
  const TransCocycleObject obj = hol_gamma(conn, 256);
  const TransCocycleObject out = induced_functor(so2_to_so3_z(), obj);
  CHECK(out.group == lie::GroupSpec::so3());
  const CocycleCheckReport rep = check_cocycle(out, 16);
  CHECK(rep.worst_cocycle <= 1e-7);
  CHECK(rep.worst_naturality <= 1e-6);
}

TEST_CASE("induced functor: determinant maps a GL2 cocycle to GL1") {
  CHECK(homomorphism_residual(det_hom(2), 64) <= 1e-10);

  // GL2 cocycle data on the two-chart cover (no oracles): phi_ab is a
  // varying invertible matrix, phi_ba its inverse at the matched point
  const ConnectionData base = two_chart_flux(0.0);
  TransCocycleObject obj;
  obj.atlas = std::make_shared<Atlas>(base.atlas());
  obj.group = lie::GroupSpec::gl(2);
  const auto phi_ab = dsl::parse_expr("[[1 + 0.3*sin(x0), 0.2],[0.1*x1, 2 + cos(x0)]]", 2);
  obj.phi.push_back({[phi_ab, g = obj.group](const Eigen::VectorXd& x) {
    return lie::element_from_real(g, dsl::eval(phi_ab, x).data);
  }});
  const auto& atlas = *obj.atlas;
  obj.phi.push_back({[phi_ab, g = obj.group, &atlas](const Eigen::VectorXd& y) {
    const Eigen::VectorXd x = atlas.transition("b", "a", y);
    const Eigen::MatrixXd m = dsl::eval(phi_ab, x).data;
    return lie::element_from_real(g, m.inverse());
  }});

  const CocycleCheckReport before = check_cocycle(obj, 32);
  CHECK(before.worst_cocycle <= 1e-12);

  const TransCocycleObject mapped = induced_functor(det_hom(2), obj);
  CHECK(mapped.group == lie::GroupSpec::gl(1));
  const CocycleCheckReport after = check_cocycle(mapped, 32);
  CHECK(after.worst_cocycle <= 1e-9);
}

TEST_CASE("broken homomorphisms are rejected") {
  GroupHom broken{lie::GroupSpec::so2(), lie::GroupSpec::so2(), [](const lie::GroupElement& e) {
                    return lie::mul(e, lie::rot2(0.1));
                  }};
  CHECK(homomorphism_residual(broken, 16) >= 1e-3);
  const ConnectionData conn = two_chart_flux(0.1);
  const TransCocycleObject obj = hol_gamma(conn, 256);
  CHECK_THROWS_AS(induced_functor(broken, obj), NotAHomomorphism);
}

TEST_CASE("equivalent objects: identity and gauge candidates") {
  const ConnectionData conn = two_chart_flux(0.4);
  const TransCocycleObject obj = hol_gamma(conn, 512);

  CocycleMorphism ident;
  ident.alpha.emplace("a", dsl::parse_expr("[[1, 0],[0, 1]]", 2));
  ident.alpha.emplace("b", dsl::parse_expr("[[1, 0],[0, 1]]", 2));
  const EquivalenceReport self = equivalent_objects(obj, obj, ident, 16);
  CHECK(self.equivalent);
  CHECK(self.worst_square <= 1e-12);
  CHECK(self.worst_naturality <= 1e-9);

  // gauge-transform the connection; the gauge functions witness equivalence
  const auto h = dsl::parse_expr("[[cos(0.4*x1), -sin(0.4*x1)],[sin(0.4*x1), cos(0.4*x1)]]", 2);
  const auto hinv = dsl::parse_expr("[[cos(0.4*x1), sin(0.4*x1)],[-sin(0.4*x1), cos(0.4*x1)]]", 2);
  const ConnectionData conn2 = gauge_transform(conn, {{"a", {h, hinv}}, {"b", {h, hinv}}});
  const TransCocycleObject obj2 = hol_gamma(conn2, 512);

  CocycleMorphism gauge;
  gauge.alpha.emplace("a", h);
  gauge.alpha.emplace("b", h);
  const EquivalenceReport rep = equivalent_objects(obj, obj2, gauge, 16);
  CHECK(rep.worst_square <= 1e-7);
  CHECK(rep.worst_naturality <= 1e-7);
  CHECK(rep.equivalent);

  // an arbitrary candidate fails with a visible residual
  CocycleMorphism wrong;
  wrong.alpha.emplace("a", dsl::parse_expr("[[cos(0.5), -sin(0.5)],[sin(0.5), cos(0.5)]]", 2));
  wrong.alpha.emplace("b", dsl::parse_expr("[[1, 0],[0, 1]]", 2));
  const EquivalenceReport bad = equivalent_objects(obj, obj, wrong, 16);
  CHECK_FALSE(bad.equivalent);
  CHECK(std::max(bad.worst_square, bad.worst_naturality) >= 1e-2);
}
