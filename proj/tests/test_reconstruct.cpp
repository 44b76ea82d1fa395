#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "holo/reconstruct.hpp"
#include "oracle_fixtures.hpp"

using namespace holo;

namespace {

Eigen::Vector2d v2(double a, double b) { return {a, b}; }

/// Two-chart presentation of the trivial plane bundle (identity transitions).
ConnectionData two_chart_trivial() {
  const auto fwd = dsl::parse_expr("[x0 - 1, x1]", 2);
  const auto bwd = dsl::parse_expr("[x0 + 1, x1]", 2);
  Atlas atlas(2, {{"a", fx::box2(0, 2, 0, 1)}, {"b", fx::box2(-1, 1, 0, 1)}},
              {{"a", "b", fx::box2(0.9, 1.6, 0, 1), fwd},
               {"b", "a", fx::box2(-0.1, 0.6, 0, 1), bwd}});
  const auto z = dsl::parse_expr("[[0, 0],[0, 0]]", 2);
  const auto gid = dsl::parse_expr("[[1, 0],[0, 1]]", 2);
  return ConnectionData(atlas, lie::GroupSpec::u1(), {{"a", {z, z}}, {"b", {z, z}}}, {gid, gid});
}

AccessPaths two_chart_access(const AtlasPtr& atlas) {
  AccessPaths access;
  access.basepoint = {"a", v2(1.2, 0.5)};
  access.to_anchor.emplace("a", constant_path(atlas, "a", v2(1.2, 0.5)));
  // constant crossing path a -> b at the base point (inside the overlap)
  const auto ca = dsl::parse_expr("[1.2, 0.5]", 1);
  const auto cb = dsl::parse_expr("[0.2, 0.5]", 1);
  access.to_anchor.emplace("b", Path(atlas, {{"a", ca, 0.0, 0.5}, {"b", cb, 0.5, 1.0}}));
  return access;
}

}  // namespace

TEST_CASE("tp produces a functorial oracle") {
  auto atlas = fx::plane_atlas();
  const TransportOracle zero = tp(fx::flux_conn(0.0, atlas), 256);
  const Path any = straight_line(atlas, "c", v2(-1, -1), v2(1, 0.5));
  CHECK(lie::dist(zero.query(any), lie::identity(zero.group)) <= 1e-12);

  const TransportOracle flux = tp(fx::flux_conn(0.5, atlas), 512);
  const Path vertical = straight_line(atlas, "c", v2(0, 0), v2(0, 1));
  CHECK((flux.query(vertical).matrix.real() - oracle::flux_transport_closed_form(0.5)).norm() <=
        1e-10);

  const OracleSpotCheck check = spot_check_oracle(flux, 10);
  CHECK(check.worst_functoriality <= 1e-7);
  CHECK(check.worst_identity <= 1e-10);
}

TEST_CASE("section families transport the frame along straight lines") {
  auto atlas = fx::plane_atlas();
  const lie::GroupElement z = lie::rot2(0.7, lie::GroupSpec::u1());

  const TransportOracle zero = tp(fx::flux_conn(0.0, atlas), 256);
  for (const auto& y : {v2(0, 0), v2(1, 1), v2(-0.5, 0.3)}) {
    const lie::GroupElement f = section_family(zero, "c", z, v2(0, 0), y);
    CHECK(lie::dist(f, z) <= 1e-12);
  }

  const TransportOracle flux = tp(fx::flux_conn(0.5, atlas), 512);
  // vertical target: F = exp(-a y2 e) . z
  const lie::GroupElement f = section_family(flux, "c", z, v2(0, 0), v2(0, 0.8));
  const lie::GroupElement expected = lie::mul(lie::rot2(-0.5 * 0.8, z.group), z);
  CHECK(lie::dist(f, expected) <= 1e-8);

  // y = basepoint: the frame is untouched
  CHECK(lie::dist(section_family(flux, "c", z, v2(0.3, 0.4), v2(0.3, 0.4)), z) <= 1e-12);
}

TEST_CASE("reconstruction recovers the zero and constant-flux forms") {
  auto atlas = fx::plane_atlas();
  const TransportOracle zero = tp(fx::flux_conn(0.0, atlas), 256);
  const ReconstructedConnection rz = reconstruct_connection(zero, "c", 1e-3);
  CHECK(rz.sampler(v2(0.3, -0.8), v2(1, 0)).matrix.norm() <= 1e-9);
  CHECK(rz.sampler(v2(0.3, -0.8), v2(0, 1)).matrix.norm() <= 1e-9);

  const double a = 0.5;
  const TransportOracle flux = tp(fx::flux_conn(a, atlas), 512);
  const ReconstructedConnection rf = reconstruct_connection(flux, "c", 1e-3);
  Eigen::Matrix2d ae;
  ae << 0, -a, a, 0;
  CHECK((rf.sampler(v2(0.7, 0.2), v2(0, 1)).matrix.real() - ae).norm() <= 1e-7);
  CHECK(rf.sampler(v2(0.7, 0.2), v2(1, 0)).matrix.norm() <= 1e-7);

  CHECK_THROWS_AS(reconstruct_connection(flux, "c", 0.5), Error);
}

TEST_CASE("reconstructed samplers are linear in the direction") {
  auto atlas = fx::plane_atlas();
  const TransportOracle oracle = tp(fx::sine_flux_conn(atlas), 512);
  const ReconstructedConnection rec = reconstruct_connection(oracle, "c", 1e-3);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 10; ++k) {
    const Eigen::Vector2d p(u(rng), u(rng));
    const Eigen::Vector2d v(u(rng), u(rng)), w(u(rng), u(rng));
    const lie::Mat lhs = rec.sampler(p, v + w).matrix;
    const lie::Mat rhs = rec.sampler(p, v).matrix + rec.sampler(p, w).matrix;
    CHECK((lhs - rhs).norm() <= 1e-6);
  }
}

TEST_CASE("reconstruction matches the sphere's local forms pointwise") {
  const ConnectionData conn = fx::sphere_lc_conn();
  const TransportOracle oracle = tp(conn, 256);
  const ReconstructedConnection rec = reconstruct_connection(oracle, "n", 1e-3);

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2.0, 2.0), dir(-1, 1);
  for (int k = 0; k < 100; ++k) {
    const Eigen::Vector2d p(u(rng), u(rng));
    const Eigen::Vector2d v(dir(rng), dir(rng));
    const lie::Mat got = rec.sampler(p, v).matrix;
    const lie::Mat want = conn.form("n", p, v).matrix;
    CHECK((got - want).norm() <= 5e-4);
  }
}

TEST_CASE("roundtrip is exact for polynomial abelian data, O(h^2) otherwise") {
  auto atlas = fx::plane_atlas();

  // zero connection: error at the integrator noise floor
  const RoundtripReport rz = roundtrip_check(fx::flux_conn(0.0, atlas), 1e-2, 12, 256);
  CHECK(rz.worst_error_at_finest <= 1e-9);

  // constant flux: the central difference is exact, all rows at noise level
  const RoundtripReport rf = roundtrip_check(fx::flux_conn(0.5, atlas), 1e-2, 12, 512);
  for (const auto& row : rf.tables.at("c")) CHECK(row.max_error <= 1e-9);

  // non-polynomial abelian and non-abelian cases show genuine h^2 decay
  for (const ConnectionData& conn : {fx::sine_flux_conn(atlas), fx::pure_gauge_so3(atlas)}) {
    const RoundtripReport rep = roundtrip_check(conn, 1e-2, 12, 512);
    for (const double r : rep.ratios.at("c")) {
      CHECK(r >= 0.2);
      CHECK(r <= 0.3);
    }
  }
}

TEST_CASE("Richardson ratios hold on the sphere") {
  const ConnectionData conn = fx::sphere_lc_conn();
  const RoundtripReport rep = roundtrip_check(conn, 1e-2, 8, 256);
  for (const auto& [chart, ratios] : rep.ratios) {
    for (const double r : ratios) {
      CHECK(r >= 0.2);
      CHECK(r <= 0.3);
    }
  }
}

TEST_CASE("Barrett derivative of a shrinking loop family vanishes") {
  auto atlas = fx::plane_atlas();
  const double h = 1e-4;
  for (const ConnectionData& conn : {fx::gradient_flux_conn(atlas), fx::sine_flux_conn(atlas)}) {
    const TransportOracle oracle = tp(conn, 512);
    auto loop_at = [&](double s) {
      // p(s): loop of radius ~s at x0, deliberately not s-symmetric
      char buf[240];
      std::snprintf(buf, sizeof(buf),
                    "[%.17g*(cos(2*pi*beta(x0)) - 1) + %.17g*sin(pi*beta(x0))^2,"
                    " %.17g*sin(2*pi*beta(x0))]",
                    s, s * s, s);
      return Path(atlas, {{"c", dsl::parse_expr(buf, 1), 0.0, 1.0}});
    };
    const lie::Mat fwd = oracle.query(loop_at(h)).matrix;
    const lie::Mat bwd = oracle.query(loop_at(-h)).matrix;
    const double deriv = ((fwd - bwd) / (2 * h)).norm();
    CHECK(deriv <= 1e-5);
  }

  // same claim on the sphere fixture
  const ConnectionData sphere = fx::sphere_lc_conn();
  const TransportOracle oracle = tp(sphere, 512);
  auto loop_at = [&](double s) {
    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "[1.5 + %.17g*(cos(2*pi*beta(x0)) - 1), %.17g*sin(2*pi*beta(x0))]", s, s);
    return Path(fx::sphere_atlas(), {{"n", dsl::parse_expr(buf, 1), 0.0, 1.0}});
  };
  const lie::Mat fwd = oracle.query(loop_at(1e-4)).matrix;
  const lie::Mat bwd = oracle.query(loop_at(-1e-4)).matrix;
  CHECK(((fwd - bwd) / (2e-4)).norm() <= 1e-5);
}

TEST_CASE("upsilon and straight-line families share the transport derivative") {
  auto atlas = fx::plane_atlas();
  const ConnectionData conn = fx::sine_flux_conn(atlas);
  const TransportOracle oracle = tp(conn, 512);

  // germ through (0.4, 0.1) with curvature along its track
  PathGerm germ{atlas, "c", dsl::parse_expr("[0.4 + x0, 0.1 + x0 + 0.8*x0^2]", 1), -0.5, 0.5};
  const UpsilonFamily ups(germ);
  const Eigen::Vector2d start(0.4, 0.1);

  const double h = 1e-4;
  auto gamma_at = [&](double s) { return v2(0.4 + s, 0.1 + s + 0.8 * s * s); };
  const lie::Mat du =
      (oracle.query(ups.at(h)).matrix - oracle.query(ups.at(-h)).matrix) / (2 * h);
  const lie::Mat ds = (oracle.query(straight_line(atlas, "c", start, gamma_at(h))).matrix -
                       oracle.query(straight_line(atlas, "c", start, gamma_at(-h))).matrix) /
                      (2 * h);
  CHECK((du - ds).norm() <= 1e-5);
}

TEST_CASE("extraction returns the identity cocycle for the trivial bundle") {
  const ConnectionData conn = two_chart_trivial();
  const AtlasPtr atlas = std::make_shared<Atlas>(conn.atlas());
  const CocycleExtractor ex(tp(conn, 256), two_chart_access(atlas));

  const SampledCocycle sc = extract_cocycle(ex, 8);
  for (const auto& st : sc.transitions)
    for (const auto& g : st.values) CHECK(lie::dist(g, lie::identity(sc.group)) <= 1e-9);
  CHECK(extracted_cocycle_residual(ex, 6) <= 1e-9);
  CHECK(cohomology_residual(ex, conn, 6).worst <= 1e-9);
}

TEST_CASE("extraction is cohomologous to the shipped sphere transitions") {
  const ConnectionData conn = fx::sphere_lc_conn();
  const AtlasPtr atlas = std::make_shared<Atlas>(conn.atlas());

  AccessPaths access;
  access.basepoint = {"n", v2(1, 0)};
  access.to_anchor.emplace("n", constant_path(atlas, "n", v2(1, 0)));
  access.to_anchor.emplace("s", Path(atlas, {{"n", dsl::parse_expr("[1, 0]", 1), 0.0, 0.5},
                                             {"s", dsl::parse_expr("[1, 0]", 1), 0.5, 1.0}}));
  const CocycleExtractor ex(tp(conn, 256), access);

  CHECK(extracted_cocycle_residual(ex, 4) <= 1e-7);
  CHECK(cohomology_residual(ex, conn, 8).worst <= 1e-5);
}

TEST_CASE("extraction satisfies the cocycle law on the torus triple overlaps") {
  const ConnectionData conn = fx::torus_flux_conn();
  const AtlasPtr atlas = std::make_shared<Atlas>(conn.atlas());

  AccessPaths access;
  access.basepoint = {"c00", v2(0.5, 0.5)};
  auto crossing = [&](const std::string& to) {
    return Path(atlas, {{"c00", dsl::parse_expr("[0.5, 0.5]", 1), 0.0, 0.5},
                        {to, dsl::parse_expr("[0.5, 0.5]", 1), 0.5, 1.0}});
  };
  access.to_anchor.emplace("c00", constant_path(atlas, "c00", v2(0.5, 0.5)));
  access.to_anchor.emplace("c10", crossing("c10"));
  access.to_anchor.emplace("c01", crossing("c01"));
  access.to_anchor.emplace("c11", crossing("c11"));
  const CocycleExtractor ex(tp(conn, 256), access);

  CHECK(extracted_cocycle_residual(ex, 2) <= 1e-7);
  CHECK(cohomology_residual(ex, conn, 2).worst <= 1e-6);
}

TEST_CASE("a non-functorial oracle is flagged and breaks the cocycle law") {
  const ConnectionData conn = two_chart_trivial();
  const AtlasPtr atlas = std::make_shared<Atlas>(conn.atlas());

  TransportOracle fake = tp(conn, 256);
  fake.query = [wrapped = fake.query, g = fake.group](const Path& p) {
    // constant multiplicative twist: breaks functoriality, keeps membership
    return lie::mul(lie::rot2(0.05, g), wrapped(p));
  };

  const OracleSpotCheck flag = spot_check_oracle(fake, 4);
  CHECK(flag.worst_functoriality >= 1e-3);

  const CocycleExtractor ex(fake, two_chart_access(atlas));
  CHECK(extracted_cocycle_residual(ex, 4) >= 1e-3);
}
