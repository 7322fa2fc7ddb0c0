#pragma once

#include <cstdint>
#include <exception>
#include <vector>

#include "clocksync/harness.hpp"

namespace clocksync {

// Independent RNG seed for item `index` of a run seeded with `base`.
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index);

int worker_count();

template <class T, class F>
std::vector<T> serial_map(std::size_t n, F f) {
    std::vector<T> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(f(i));
    return out;
}

/// OpenMP counterpart of serial_map. Results are stored by index, so output
/// does not depend on the thread count.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F f) {
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errs(n);
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
        } catch (...) {
            errs[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errs)
        if (e)
            std::rethrow_exception(e);
    return out;
}

std::vector<ScenarioResult> run_batch(const std::vector<ScenarioConfig>& configs);
std::vector<ScenarioResult> run_batch_serial(const std::vector<ScenarioConfig>& configs);

} // namespace clocksync
