// SPDX-License-Identifier: MIT
#include "nv0/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nv0/rng.hpp"

namespace nv0 {

namespace {

// Channel assignment inside one shot's stream group. Keep these stable:
// changing them silently reshuffles every synthetic dataset.
enum Channel : std::uint64_t {
  kQuasiStatic = 0,
  kOrnsteinUhlenbeck = 1,
  kHops = 2,
  kOptical = 3,
  kChannels = 4,
};

CounterRng channel_rng(const NoiseModel& noise, std::uint64_t shot,
                       Channel channel) {
  return CounterRng(noise.seed, shot * kChannels + channel);
}

} // namespace

void validate(const NoiseModel& noise) {
  if (noise.markovian_dephasing_hz < 0 || noise.quasi_static_sigma_hz < 0 ||
      noise.ou_tau_c < 0 || noise.ou_sigma_hz < 0 ||
      noise.hop_magnitude_hz < 0 || noise.hop_interval_mean < 0 ||
      noise.optical_sigma_hz < 0)
    throw std::invalid_argument("noise magnitudes must be non-negative");
  if ((noise.hop_magnitude_hz > 0) != (noise.hop_interval_mean > 0))
    throw std::invalid_argument(
        "spectral hops need both hop_magnitude_hz and hop_interval_mean");
  if ((noise.ou_sigma_hz > 0) && !(noise.ou_tau_c > 0))
    throw std::invalid_argument("ou_sigma_hz requires a positive ou_tau_c");
}

double DetuningTrace::at(double t) const {
  if (value_hz.empty()) return 0.0;
  auto it = std::upper_bound(edges.begin(), edges.end(), t);
  std::ptrdiff_t idx = (it - edges.begin()) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0,
                                   static_cast<std::ptrdiff_t>(value_hz.size()) - 1);
  return value_hz[static_cast<std::size_t>(idx)];
}

DetuningTrace sample_detuning(const NoiseModel& noise, std::uint64_t shot_index,
                              double duration) {
  validate(noise);
  if (!(duration > 0))
    throw std::invalid_argument("shot duration must be positive");

  double qs = 0.0;
  if (noise.quasi_static_sigma_hz > 0) {
    CounterRng rng = channel_rng(noise, shot_index, kQuasiStatic);
    qs = noise.quasi_static_sigma_hz * rng.normal();
  }

  // Grid for the time-dependent components. The OU process is stepped with
  // the exact discrete update, so the grid only needs to resolve tau_c, not
  // the dynamics.
  std::vector<double> edges{0.0};
  std::vector<double> ou;
  if (noise.ou_sigma_hz > 0) {
    CounterRng rng = channel_rng(noise, shot_index, kOrnsteinUhlenbeck);
    const double dt = noise.ou_tau_c / 64.0;
    const double decay = std::exp(-dt / noise.ou_tau_c);
    const double kick = noise.ou_sigma_hz * std::sqrt(1.0 - decay * decay);
    double x = noise.ou_sigma_hz * rng.normal();  // stationary start
    ou.push_back(x);
    for (double t = dt; t < duration; t += dt) {
      edges.push_back(t);
      x = decay * x + kick * rng.normal();
      ou.push_back(x);
    }
  } else {
    ou.push_back(0.0);
  }
  edges.push_back(duration);

  DetuningTrace trace;
  trace.edges = std::move(edges);
  trace.value_hz.resize(trace.edges.size() - 1);
  for (std::size_t i = 0; i < trace.value_hz.size(); ++i)
    trace.value_hz[i] = qs + ou[std::min(i, ou.size() - 1)];

  if (noise.hop_magnitude_hz > 0) {
    CounterRng rng = channel_rng(noise, shot_index, kHops);
    auto draw_level = [&] {
      return noise.hop_magnitude_hz * (2.0 * rng.uniform() - 1.0);
    };
    auto draw_wait = [&] {
      return -noise.hop_interval_mean * std::log1p(-rng.uniform());
    };
    double level = draw_level();  // stationary distribution of the jump chain
    double t_next = draw_wait();
    DetuningTrace hopped;
    hopped.edges.push_back(0.0);
    for (std::size_t i = 0; i < trace.value_hz.size(); ++i) {
      double lo = trace.edges[i];
      double hi = trace.edges[i + 1];
      double t = lo;
      while (t_next < hi) {
        if (t_next > t) {
          hopped.edges.push_back(t_next);
          hopped.value_hz.push_back(trace.value_hz[i] + level);
          t = t_next;
        }
        level = draw_level();
        t_next += draw_wait();
      }
      hopped.edges.push_back(hi);
      hopped.value_hz.push_back(trace.value_hz[i] + level);
    }
    return hopped;
  }
  return trace;
}

double sample_optical_detuning(const NoiseModel& noise, std::uint64_t shot_index) {
  validate(noise);
  if (noise.optical_sigma_hz == 0) return 0.0;
  CounterRng rng = channel_rng(noise, shot_index, kOptical);
  return noise.optical_sigma_hz * rng.normal();
}

} // namespace nv0
