#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "holo/torsor.hpp"
#include "holo/transport.hpp"

using namespace holo;

namespace {

std::mt19937_64 rng(5150);

lie::GroupElement random_so3_element() {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  const double a = u(rng), b = u(rng), c = u(rng);
  m << 0, -a, b, a, 0, -c, -b, c, 0;
  return lie::exp_alg(lie::algebra_from_real(lie::GroupSpec::so3(), m));
}

}  // namespace

TEST_CASE("the difference map is the defining solution of x d = y") {
  const Torsor t{lie::GroupSpec::so3(), "P_x"};
  for (int i = 0; i < 20; ++i) {
    const TorsorElement x{t, random_so3_element()};
    const lie::GroupElement g = random_so3_element();
    const TorsorElement y = act(x, g);
    // d(x, x.g) = g and x . d(x,y) = y
    CHECK(lie::dist(d_map(x, y), g) <= 1e-13);
    CHECK(lie::dist(act(x, d_map(x, y)).value, y.value) <= 1e-13);
    CHECK(lie::dist(d_map(x, x), lie::identity(t.group)) <= 1e-14);
  }
  const Torsor other{lie::GroupSpec::so3(), "P_y"};
  const TorsorElement x{t, random_so3_element()};
  const TorsorElement z{other, random_so3_element()};
  CHECK_THROWS_AS(d_map(x, z), TorsorMismatch);
}

TEST_CASE("the difference map satisfies the cocycle identity") {
  const Torsor t{lie::GroupSpec::su2(), "X"};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    using namespace std::complex_literals;
    auto rnd = [&]() {
      Eigen::MatrixXcd m(2, 2);
      const double a = u(rng), b = u(rng), c = u(rng);
      m << a * 1i, b + c * 1i, -b + c * 1i, -a * 1i;
      return lie::exp_alg(lie::algebra(lie::GroupSpec::su2(), m));
    };
    const TorsorElement x{t, rnd()}, y{t, rnd()}, z{t, rnd()};
    const lie::GroupElement lhs = lie::mul(d_map(x, y), d_map(y, z));
    CHECK(lie::dist(lhs, d_map(x, z)) <= 1e-12);
  }
}

TEST_CASE("psi identifies automorphisms with group elements") {
  const Torsor t{lie::GroupSpec::so3(), "X"};
  const TorsorElement x{t, random_so3_element()};

  CHECK(lie::dist(psi(x, identity_morphism(t)), lie::identity(t.group)) <= 1e-14);

  for (int i = 0; i < 20; ++i) {
    const TorsorMorphism f{t, t, random_so3_element()};
    const TorsorMorphism h{t, t, random_so3_element()};
    // multiplicative in the composition order
    const lie::GroupElement lhs = psi(x, compose(f, h));
    const lie::GroupElement rhs = lie::mul(psi(x, f), psi(x, h));
    CHECK(lie::dist(lhs, rhs) <= 1e-12);

    // base change by b conjugates
    const lie::GroupElement b = random_so3_element();
    const TorsorElement xb = act(x, b);
    const lie::GroupElement conj =
        lie::mul(lie::inverse(b), lie::mul(psi(x, f), b));
    CHECK(lie::dist(psi(xb, f), conj) <= 1e-12);
  }
}

TEST_CASE("composition of torsor morphisms is associative") {
  const Torsor t1{lie::GroupSpec::so3(), "A"}, t2{lie::GroupSpec::so3(), "B"},
      t3{lie::GroupSpec::so3(), "C"}, t4{lie::GroupSpec::so3(), "D"};
  for (int i = 0; i < 20; ++i) {
    const TorsorMorphism f{t3, t4, random_so3_element()};
    const TorsorMorphism g{t2, t3, random_so3_element()};
    const TorsorMorphism h{t1, t2, random_so3_element()};
    const TorsorMorphism lhs = compose(compose(f, g), h);
    const TorsorMorphism rhs = compose(f, compose(g, h));
    CHECK(lie::dist(lhs.value, rhs.value) <= 1e-12);
    CHECK(lie::dist(compose(f, invert(f)).value, lie::identity(t3.group)) <= 1e-13);
    const TorsorMorphism idc = compose(identity_morphism(t4), f);
    CHECK(lie::dist(idc.value, f.value) <= 1e-14);
  }
}

TEST_CASE("transports embed as torsor morphisms and compose the same way") {
  auto atlas = fx::plane_atlas();
  const ConnectionData conn = fx::pure_gauge_so3(atlas);
  const Path tau = straight_line(atlas, "c", Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0.5));
  const Path gamma = straight_line(atlas, "c", Eigen::Vector2d(1, 0.5), Eigen::Vector2d(-0.5, 1));

  auto fiber = [&](const PathPoint& p) {
    return Torsor{conn.group(), p.chart + ":" + std::to_string(p.coords[0]) + "," +
                                    std::to_string(p.coords[1])};
  };
  const TransportResult t1 = transport(conn, tau, 1024);
  const TransportResult t2 = transport(conn, gamma, 1024);
  const TorsorMorphism m1{fiber(t1.source), fiber(t1.target), t1.element};
  const TorsorMorphism m2{fiber(t2.source), fiber(t2.target), t2.element};

  const TransportResult joined = transport(conn, concat(gamma, tau), 1024);
  const TorsorMorphism composed = compose(m2, m1);
  CHECK(lie::dist(composed.value, joined.element) <= 1e-7);
  CHECK(composed.source == fiber(joined.source));
  CHECK(composed.target == fiber(joined.target));
}
