// SPDX-License-Identifier: MIT
#pragma once

namespace nv0 {

// CODATA 2018. Both are exact by the SI redefinition.
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double k_boltzmann = 1.380649e-23;   // J / K

inline constexpr double two_pi = 6.28318530717958647692;

} // namespace nv0
