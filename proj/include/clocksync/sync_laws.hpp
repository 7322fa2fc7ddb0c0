#pragma once

#include <array>

namespace clocksync {

// m1..m6 stored at indices 0..5; newest value in slot 1.
using TimestampBuffer = std::array<double, 6>;

// Shift old slots 1..5 into 2..6 and put value in slot 1.
TimestampBuffer shift_in(double value, const TimestampBuffer& src);

struct CorrectionPair {
    double k_offset = 0.0;
    double k_rate = 0.0;
};

double k_offset(const TimestampBuffer& mem_i);

/// Throws InvalidGain when mu <= 0.
double k_rate(const TimestampBuffer& mem_i, double tau_k, double mu);

CorrectionPair corrections(const TimestampBuffer& mem_i, double tau_k, double mu);

} // namespace clocksync
