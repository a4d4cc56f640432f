#include "hdcast/arima.hpp"
#include "hdcast/indices.hpp"
#include "hdcast/ingest.hpp"
#include "hdcast/lasso.hpp"
#include "hdcast/synth.hpp"

#include <benchmark/benchmark.h>

using namespace hdcast;

namespace {

const synth::EventOutput &corpus() {
    static const synth::EventOutput out = [] {
        synth::SynthParams p;
        p.seed = 1;
        return synth::generate_events(p);
    }();
    return out;
}

void BM_aggregate_weekly(benchmark::State &state) {
    const auto &c = corpus();
    for (auto _ : state) benchmark::DoNotOptimize(ingest::aggregate_weekly(c.events, c.calendar));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(c.events.size()));
}
BENCHMARK(BM_aggregate_weekly)->Unit(benchmark::kMillisecond);

void BM_lar_path(benchmark::State &state) {
    const auto &c = corpus();
    const auto dm =
        tsa::build_design_matrix(indices::compute_indices(c.weekly), c.weekly, tsa::LagSpec::lasso35());
    for (auto _ : state) benchmark::DoNotOptimize(lasso::lar_path(dm));
}
BENCHMARK(BM_lar_path)->Unit(benchmark::kMicrosecond);

void BM_fit_regarima(benchmark::State &state) {
    const auto y = indices::compute_indices(corpus().weekly).hdi_sqrt();
    const auto spec = arima::ArimaSpec::parse(state.range(0) == 0 ? "1,1,1:0,1,0:52" : "3,1,1:0,1,0:52");
    for (auto _ : state) benchmark::DoNotOptimize(arima::fit_regarima(y, spec));
    state.SetLabel(spec.to_string());
}
BENCHMARK(BM_fit_regarima)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_arimax_fit(benchmark::State &state) {
    const auto &c = corpus();
    const auto idx = indices::compute_indices(c.weekly);
    const auto dm = tsa::build_design_matrix(idx, c.weekly, tsa::LagSpec::arimax());
    Series y(dm.target.data(), dm.target.data() + dm.target.size());
    const auto spec = arima::ArimaSpec::parse("0,1,3:0,1,0:52");
    for (auto _ : state) benchmark::DoNotOptimize(arima::fit_regarima(y, dm, spec));
}
BENCHMARK(BM_arimax_fit)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
