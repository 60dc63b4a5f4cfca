#include <benchmark/benchmark.h>

#include <cmath>

#include "reebkit/asym_op.hpp"
#include "reebkit/curve_ledger.hpp"
#include "reebkit/reeb_flow.hpp"
#include "reebkit/scenario.hpp"
#include "reebkit/sp_paths.hpp"

using namespace reebkit;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void bm_evolve_linear_system(benchmark::State& state) {
  const int steps = int(state.range(0));
  sp::Mat2 m;
  m << 0.0, -2.0 * kPi, -kPi, 0.0;
  for (auto _ : state) {
    auto path = sp::evolve_linear_system([&m](double) { return m; }, steps);
    benchmark::DoNotOptimize(path.endpoint());
  }
}
BENCHMARK(bm_evolve_linear_system)->Arg(1024)->Arg(4096)->Arg(10000);

void bm_conley_zehnder(benchmark::State& state) {
  sp::Mat2 m;
  m << 0.0, -2.0 * kPi, -kPi, 0.0;
  const auto path =
      sp::evolve_linear_system([&m](double) { return m; }, int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sp::conley_zehnder(path));
}
BENCHMARK(bm_conley_zehnder)->Arg(1024)->Arg(10000);

void bm_reeb_integrate(benchmark::State& state) {
  const auto profile = contact::neck_profile(0.5);
  const contact::ChartPoint start{contact::ChartId::neck_polar, {0.15, 1.2, 0.3}};
  const double h = 1.0 / double(state.range(0));
  for (auto _ : state) {
    auto traj = flow::integrate(profile, start, 1.0, h, true);
    benchmark::DoNotOptimize(traj.points.back());
  }
}
BENCHMARK(bm_reeb_integrate)->Arg(1000)->Arg(10000);

void bm_spectrum(benchmark::State& state) {
  sp::Mat2 s;
  s << kPi, 0.3, 0.3, -0.5 * kPi;
  asym::TrivializedAsymptoticOperator op{[s](double) { return s; },
                                         int(state.range(0))};
  for (auto _ : state) {
    auto slices = asym::spectrum(op, -4.0 * kPi, 4.0 * kPi);
    benchmark::DoNotOptimize(slices.size());
  }
}
BENCHMARK(bm_spectrum)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void bm_gen_intersection(benchmark::State& state) {
  const ledger::OrbitSymbol e{"e", ledger::Rat(5), ledger::OrbitKind::elliptic,
                              ledger::Rat(3, 10), 0};
  ledger::CurveClass a, b;
  a.name = "a";
  b.name = "b";
  for (long long m = 1; m <= 3; ++m) {
    ledger::Puncture z{+1, e, m, ledger::floor_half_cz(e, m, +1)};
    a.punctures.push_back(z);
    b.punctures.push_back(z);
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(ledger::gen_intersection(a, b, 0));
}
BENCHMARK(bm_gen_intersection);

}  // namespace

BENCHMARK_MAIN();
