#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace clocksync {

struct DelayJitter {
    double d1 = 0.0;
    double d2 = 0.0;
};

// Truncated Gaussian, redrawn until |x| < bound.
struct RateNoise {
    double std = 0.0;
    double bound = 0.0;
};

struct NoiseModel {
    std::optional<DelayJitter> delay_jitter;
    std::optional<RateNoise> rate_noise;

    bool nominal() const { return !delay_jitter && !rate_noise; }
};

class NoiseStream {
public:
    NoiseStream(const NoiseModel& model, std::uint64_t seed);

    // Propagation delay for a jump that starts a transit.
    double delay(double nominal_d);
    // Common rate offset held over one flow interval.
    double rate();

private:
    NoiseModel model_;
    std::mt19937_64 gen_;
};

} // namespace clocksync
