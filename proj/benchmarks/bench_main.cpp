#include <benchmark/benchmark.h>

#include "vrfb/nn/composite_net.hpp"
#include "vrfb/pinn/loss.hpp"
#include "vrfb/solver/reference_solver.hpp"

namespace {

using namespace vrfb;

nn::CompositeNet desk_net(const model::CellParameters& p) {
  nn::Architecture a;
  a.hidden_layers = 2;
  a.width = 32;
  return nn::init(nn::CompositeNet(a, model::Stage::Charging, p), 1);
}

void BM_LossEvaluation(benchmark::State& state) {
  const model::CellParameters p;
  const auto variant = static_cast<pinn::Variant>(state.range(0));
  const bool with_gradient = state.range(1) != 0;
  const auto net = desk_net(p);
  const auto plan = pinn::SamplingPlan::sample(pinn::SamplingConfig::desk_scale(), p, 2);
  const pinn::LossProblem prob(net, plan, variant);
  const auto w = pinn::SAWeights::ones(plan, variant);
  for (auto _ : state) benchmark::DoNotOptimize(prob.evaluate(net, w, with_gradient));
  state.SetLabel(std::string(pinn::to_string(variant)) + (with_gradient ? " +grad" : ""));
}
BENCHMARK(BM_LossEvaluation)
    ->Args({static_cast<int>(pinn::Variant::Pinn), 0})
    ->Args({static_cast<int>(pinn::Variant::Pinn), 1})
    ->Args({static_cast<int>(pinn::Variant::Epinn), 1})
    ->Unit(benchmark::kMillisecond);

void BM_ReferenceSolve(benchmark::State& state) {
  const model::CellParameters p;
  const solver::Grid g(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), p);
  for (auto _ : state) {
    auto [s, r] = solver::newton_solve(0.5, model::Stage::Charging, p, g, solver::SolverOptions{});
    if (!r.converged) state.SkipWithError("newton did not converge");
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_ReferenceSolve)->Args({20, 50})->Args({40, 100})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
