#include <benchmark/benchmark.h>

#include <cmath>

#include "holo/connection.hpp"
#include "holo/detail/matfun.hpp"
#include "holo/path.hpp"
#include "holo/transport.hpp"

namespace {

using namespace holo;

AtlasPtr plane() {
  Box b;
  b.lo = Eigen::Vector2d(-4, -4);
  b.hi = Eigen::Vector2d(4, 4);
  return std::make_shared<Atlas>(2, std::vector<Chart>{{"c", b}}, std::vector<Overlap>{});
}

ConnectionData so3_conn(AtlasPtr atlas) {
  const char* X = "[[0, 0, 0],[0, 0, -1],[0, 1, 0]]";
  const std::string a0 = std::string("mexp([[0, 0, -x1],[0, 0, 0],[x1, 0, 0]])*") + X +
                         "*mexp([[0, 0, x1],[0, 0, 0],[-x1, 0, 0]])";
  return ConnectionData(Atlas(*atlas), lie::GroupSpec::so3(),
                        {{"c",
                          {dsl::parse_expr(a0, 2),
                           dsl::parse_expr("[[0, 0, 1],[0, 0, 0],[-1, 0, 0]]", 2)}}},
                        {});
}

void BM_PadeExp3x3(benchmark::State& state) {
  Eigen::MatrixXcd m(3, 3);
  m << 0, -0.7, 0.3, 0.7, 0, -0.2, -0.3, 0.2, 0;
  for (auto _ : state) benchmark::DoNotOptimize(detail::pade_exp(m));
}
BENCHMARK(BM_PadeExp3x3);

void BM_PadeLog3x3(benchmark::State& state) {
  Eigen::MatrixXcd x(3, 3);
  x << 0, -0.7, 0.3, 0.7, 0, -0.2, -0.3, 0.2, 0;
  const Eigen::MatrixXcd g = detail::pade_exp(x);
  for (auto _ : state) benchmark::DoNotOptimize(detail::pade_log(g));
}
BENCHMARK(BM_PadeLog3x3);

void BM_ExprEval(benchmark::State& state) {
  const dsl::ExprFn f =
      dsl::parse_expr("[[0, -2*x0/(1 + x0^2 + x1^2)],[2*x0/(1 + x0^2 + x1^2), 0]]", 2);
  const Eigen::Vector2d p(1.3, -0.4);
  for (auto _ : state) benchmark::DoNotOptimize(dsl::eval(f, p));
}
BENCHMARK(BM_ExprEval);

void BM_BetaEval(benchmark::State& state) {
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsl::beta(t));
    t += 1e-4;
    if (t > 0.9) t = 0.1;
  }
}
BENCHMARK(BM_BetaEval);

void BM_TransportSO3(benchmark::State& state) {
  auto atlas = plane();
  const ConnectionData conn = so3_conn(atlas);
  const Path gamma =
      Path(atlas, {{"c", dsl::parse_expr("[beta(x0), beta(x0)^2]", 1), 0.0, 1.0}});
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(transport(conn, gamma, steps));
}
BENCHMARK(BM_TransportSO3)->Arg(64)->Arg(256)->Arg(1024);

void BM_Curvature(benchmark::State& state) {
  auto atlas = plane();
  const ConnectionData conn = so3_conn(atlas);
  const Eigen::Vector2d p(0.8, -0.5);
  for (auto _ : state) benchmark::DoNotOptimize(curvature_at(conn, "c", p));
}
BENCHMARK(BM_Curvature);

void BM_ThinCertificate(benchmark::State& state) {
  auto atlas = plane();
  const Path gamma =
      Path(atlas, {{"c", dsl::parse_expr("[beta(x0), beta(x0)^2]", 1), 0.0, 1.0}});
  const Homotopy h = beta_reparam_homotopy(gamma);
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(certify_thin(h, grid));
}
BENCHMARK(BM_ThinCertificate)->Arg(17)->Arg(33);

}  // namespace

BENCHMARK_MAIN();
