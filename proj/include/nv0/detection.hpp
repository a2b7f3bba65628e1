// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <vector>

// Photon-count measurement chain: time-binned Poisson counts from an
// excited-state population trajectory, dark-count subtraction, five-point
// smoothing, and the windowed peak-ratio normalization used to quantify
// orbital initialization and recovery.

namespace nv0 {

struct DetectorModel {
  double bin_width = 1.28e-9;         // s
  double collection_efficiency = 1.0; // photons detected per photon emitted
  // Aggregate dark rate of the summed histogram (counts per second of trace
  // time, all shots pooled).
  double dark_rate = 0.0;
  std::uint64_t shots = 1;
};

void validate(const DetectorModel& det);

struct CountTrace {
  std::vector<double> t;       // bin centers, s
  std::vector<double> counts;  // raw traces hold integers; processed ones reals
  std::vector<double> sigma;   // shot-noise standard errors
  double bin_width = 0.0;      // s, carried along for dark subtraction
};

struct TimeWindow {
  double t_lo = 0.0;
  double t_hi = 0.0;  // half-open [t_lo, t_hi)
};

struct Ratio {
  double value = 0.0;
  double sigma = 0.0;
};

// Poisson counts per bin with mean shots * efficiency * gamma * p2 * bin
// plus dark_rate * bin. `t` and `p2` give the excited-state population at
// the bin centers; `gamma` is the photon emission rate of |2> in 1/s.
// Deterministic for a given seed. sigma is sqrt(counts).
CountTrace synthesize_counts(const std::vector<double>& t,
                             const std::vector<double>& p2,
                             const DetectorModel& det, double gamma,
                             std::uint64_t seed);

// counts - dark_rate * bin_width, sigma carried over unchanged (it reflects
// the Poisson noise of the raw counts). Results may go negative.
CountTrace subtract_dark(const CountTrace& trace, double dark_rate);

// Centered five-point moving average; windows truncate at the edges. sigma
// is propagated for independent bins. Requires at least 5 points.
CountTrace moving_average_5(const CountTrace& trace);

// Ratio of the count maxima in window_b to window_a, with the shot-noise
// error propagated to first order. Apply subtract_dark and moving_average_5
// first; this operates on the trace exactly as given. Throws on an empty
// window or a non-positive A maximum.
Ratio normalize_b_over_a(const CountTrace& trace, const TimeWindow& window_a,
                         const TimeWindow& window_b);

// 1 - ratio / (2 * mixed_reference): the B/A ratio measured at zero pulse
// width, normalized against the completely mixed orbital state.
double initialization_fidelity(double ratio_zero_width, double mixed_reference);

} // namespace nv0
