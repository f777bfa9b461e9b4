#pragma once

// Phasor estimate of a locked operating point, used to place the Newton start
// of the converter cases on the synchronised branch of the PLL.

#include "ltp/types.hpp"

#include <algorithm>
#include <cmath>

namespace ltp::cases::detail {

struct LockEstimate {
    double delta = 0.0;       ///< PLL angle offset (rad)
    Complex u_poc_dq{};       ///< POC voltage in the PLL frame
};

/// Positive-sequence grid voltage `u_pos` behind reactance `x_g` (p.u.), carrying
/// the dq current `i_dq`; the PLL angle makes the q-axis POC voltage vanish.
inline LockEstimate lock_estimate(Complex u_pos, double x_g, Complex i_dq) {
    LockEstimate e;
    const double mag = std::abs(u_pos);
    if (mag <= 0.0) return e;
    const double s = std::clamp(x_g * i_dq.real() / mag, -1.0, 1.0);
    e.delta = std::arg(u_pos) + std::asin(s);
    e.u_poc_dq = u_pos * std::polar(1.0, -e.delta) + Complex(0.0, x_g) * i_dq;
    return e;
}

}  // namespace ltp::cases::detail
