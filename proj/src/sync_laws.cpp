#include "clocksync/sync_laws.hpp"

#include <string>

#include "clocksync/errors.hpp"

namespace clocksync {

TimestampBuffer shift_in(double value, const TimestampBuffer& src) {
    return {value, src[0], src[1], src[2], src[3], src[4]};
}

double k_offset(const TimestampBuffer& m) { return 0.5 * (m[3] - m[4] - m[1] + m[2]); }

double k_rate(const TimestampBuffer& m, double tau_k, double mu) {
    if (!(mu > 0.0))
        throw Error(ErrorCode::InvalidGain, "mu must be positive, got " + std::to_string(mu));
    return mu * ((m[0] - m[4]) - (tau_k - m[3]));
}

CorrectionPair corrections(const TimestampBuffer& mem_i, double tau_k, double mu) {
    return {k_offset(mem_i), k_rate(mem_i, tau_k, mu)};
}

} // namespace clocksync
