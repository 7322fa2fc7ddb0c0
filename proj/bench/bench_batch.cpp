#include <benchmark/benchmark.h>

#include "clocksync/batch.hpp"

using namespace clocksync;

namespace {

std::vector<ScenarioConfig> sweep(std::size_t n) {
    std::vector<ScenarioConfig> out;
    for (std::size_t i = 0; i < n; ++i) {
        ScenarioConfig c = parse_config_text(R"({"a_i": 1.1, "a_k": 0.75, "c": 0.2, "d": 0.5, "mu": 0.3571,
            "noise": {"delay_jitter": [0.49, 0.51], "rate_noise": {"std": 0.1, "bound": 0.3}},
            "horizon": {"j_max": 600}})");
        c.seed = stream_seed(11, i);
        out.push_back(c);
    }
    return out;
}

void BM_batch_serial(benchmark::State& st) {
    const auto cfgs = sweep(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(run_batch_serial(cfgs));
}

void BM_batch_parallel(benchmark::State& st) {
    const auto cfgs = sweep(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(run_batch(cfgs));
}

} // namespace

BENCHMARK(BM_batch_serial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_batch_parallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
