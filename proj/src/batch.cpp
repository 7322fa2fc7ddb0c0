#include "clocksync/batch.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace clocksync {

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 finalizer over a mixed key
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::vector<ScenarioResult> run_batch(const std::vector<ScenarioConfig>& configs) {
    return parallel_map<ScenarioResult>(configs.size(),
                                        [&](std::size_t i) { return run_scenario(configs[i]); });
}

std::vector<ScenarioResult> run_batch_serial(const std::vector<ScenarioConfig>& configs) {
    return serial_map<ScenarioResult>(configs.size(), [&](std::size_t i) { return run_scenario(configs[i]); });
}

} // namespace clocksync
