#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include <dualflow/flow.hpp>
#include <dualflow/functionals.hpp>
#include <dualflow/orlicz.hpp>

namespace {

using namespace dualflow;

ProblemSpec make_spec(std::size_t nodes) {
  auto grid = std::make_shared<SphericalGrid>(2, nodes);
  std::vector<double> f(grid->size(), 1.0);
  return ProblemSpec(std::move(grid), OrliczWeight::power_law(2.0), DualDensity::radial_power(2, 2.0), std::move(f));
}

void BM_FieldBuild(benchmark::State& state) {
  const ProblemSpec spec = make_spec(static_cast<std::size_t>(state.range(0)));
  const SupportField base = make_initial(Ellipse{1.0, 0.7}, spec.grid_ptr());
  std::vector<double> h(base.h().begin(), base.h().end());
  for (auto _ : state) {
    SupportField field(spec.grid_ptr(), h);
    benchmark::DoNotOptimize(field.det_b().data());
  }
}

void BM_Functionals(benchmark::State& state) {
  const ProblemSpec spec = make_spec(static_cast<std::size_t>(state.range(0)));
  const SupportField field = make_initial(Ellipse{1.0, 0.7}, spec.grid_ptr());
  for (auto _ : state) {
    FunctionalReport rep = evaluate_functionals(field, spec);
    benchmark::DoNotOptimize(rep.energy);
  }
}

void BM_Velocity(benchmark::State& state) {
  const ProblemSpec spec = make_spec(static_cast<std::size_t>(state.range(0)));
  const SupportField field = make_initial(Ellipse{1.0, 0.7}, spec.grid_ptr());
  for (auto _ : state) {
    std::vector<double> v = velocity(field, spec);
    benchmark::DoNotOptimize(v.data());
  }
}

void BM_Step(benchmark::State& state) {
  const ProblemSpec spec = make_spec(static_cast<std::size_t>(state.range(0)));
  FlowConfig config;
  config.dt_init = 1e-6;  // small enough to accept at every size measured here
  const FlowState initial = make_state(make_initial(Ellipse{1.0, 0.7}, spec.grid_ptr()), spec);
  for (auto _ : state) {
    FlowState next = step(initial, spec, config);
    benchmark::DoNotOptimize(next.t);
  }
}

BENCHMARK(BM_FieldBuild)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_Functionals)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_Velocity)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_Step)->Arg(128)->Arg(256)->Arg(512);

}  // namespace
