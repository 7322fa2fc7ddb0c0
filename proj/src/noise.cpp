#include "clocksync/noise.hpp"

namespace clocksync {

NoiseStream::NoiseStream(const NoiseModel& model, std::uint64_t seed) : model_(model), gen_(seed) {}

double NoiseStream::delay(double nominal_d) {
    if (!model_.delay_jitter)
        return nominal_d;
    std::uniform_real_distribution<double> u(model_.delay_jitter->d1, model_.delay_jitter->d2);
    return u(gen_);
}

double NoiseStream::rate() {
    if (!model_.rate_noise)
        return 0.0;
    const RateNoise& rn = *model_.rate_noise;
    if (rn.std == 0.0)
        return 0.0;
    std::normal_distribution<double> g(0.0, rn.std);
    for (;;) {
        const double x = g(gen_);
        if (x > -rn.bound && x < rn.bound)
            return x;
    }
}

} // namespace clocksync
