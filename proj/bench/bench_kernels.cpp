#include <benchmark/benchmark.h>

#include "wfr/dynamics.hpp"
#include "wfr/fields.hpp"

namespace {

wfr::FieldSet gaussian_pair() {
  return wfr::FieldSet(wfr::GaussianMixtureModel::gaussian({0.0}, 1.0),
                       wfr::GaussianMixtureModel::gaussian({2.0}, 1.0),
                       wfr::DiffusionSchedule::vp_linear(0.1, 20.0));
}

template <wfr::Execution Exec>
void BM_EmStep(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const wfr::FieldSet fields = gaussian_pair();
  const wfr::InterpolationSpec interp{wfr::InterpolationKind::fisher_rao, 0.5};
  wfr::Ensemble e = wfr::make_ensemble(k, 1, wfr::standard_normal_init(), 1, 1.0);
  std::uint64_t step = 0;
  for (auto _ : state) {
    e.set_time(0.5);
    wfr::weighted_em_step(e, fields, interp, 1e-3, 1, step++ % 1000, Exec);
    benchmark::DoNotOptimize(e.positions().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(k));
}

template <wfr::Execution Exec>
void BM_UlaStep(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const wfr::kernels::Potential well = wfr::DoubleWellTarget(1.0, 2.0);
  wfr::Ensemble e = wfr::make_ensemble(k, 1, wfr::standard_normal_init(), 1, 0.0);
  std::uint64_t step = 0;
  for (auto _ : state) {
    wfr::ula_step(e, well, 1e-3, 0.1, 1, step++ % 1000, Exec);
    benchmark::DoNotOptimize(e.positions().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(k));
}

}  // namespace

BENCHMARK(BM_EmStep<wfr::Execution::serial>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_EmStep<wfr::Execution::parallel>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_UlaStep<wfr::Execution::serial>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_UlaStep<wfr::Execution::parallel>)->Arg(1 << 12)->Arg(1 << 16);

BENCHMARK_MAIN();
