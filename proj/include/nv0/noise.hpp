// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <vector>

// Stochastic models for the fluctuating 0-1 splitting: a Markovian
// dephasing rate handed to the master equation, a per-shot quasi-static
// Gaussian offset, an Ornstein-Uhlenbeck component for correlated noise,
// and rare large spectral hops. Everything is reproducible: a realization
// depends only on (seed, shot_index), never on evaluation order, so shot
// loops parallelize freely.

namespace nv0 {

struct NoiseModel {
  double markovian_dephasing_hz = 0;  // gamma_phi / 2pi, fed to SystemRates
  double quasi_static_sigma_hz = 0;   // per-shot Gaussian detuning std
  double ou_tau_c = 0;                // s, correlation time
  double ou_sigma_hz = 0;             // stationary std of the OU component
  double hop_magnitude_hz = 0;        // hops land uniformly in +-this bound
  double hop_interval_mean = 0;       // s, exponential waiting time
  // Per-shot Gaussian offset of the optical transition, modeling slow
  // spectral diffusion of the zero-phonon line relative to the laser.
  double optical_sigma_hz = 0;
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument on a negative magnitude or a hop component
// with only one of (magnitude, interval) set.
void validate(const NoiseModel& noise);

// Piecewise-constant detuning offset over one shot: value_hz[i] holds on
// [edges[i], edges[i+1]).
struct DetuningTrace {
  std::vector<double> edges;     // size n+1; edges.front()=0, edges.back()=duration
  std::vector<double> value_hz;  // size n
  double at(double t) const;
};

// Microwave-frequency offset process for the given shot. The quasi-static
// component is constant within the shot; the OU component is stepped on a
// tau_c/64 grid with the exact discrete-time update; hops start from the
// stationary uniform distribution and jump at exponential intervals.
DetuningTrace sample_detuning(const NoiseModel& noise, std::uint64_t shot_index,
                              double duration);

// Constant optical-frequency offset for the given shot.
double sample_optical_detuning(const NoiseModel& noise, std::uint64_t shot_index);

} // namespace nv0
