// SPDX-License-Identifier: MIT
#include "nv0/physics.hpp"

#include <cmath>
#include <stdexcept>

#include "nv0/constants.hpp"

namespace nv0 {

double ground_state_splitting(const GroundStateParams& p) {
  if (p.lambda_hz < 0 || p.eps_perp_hz < 0) {
    throw std::invalid_argument("ground_state_splitting: negative coupling");
  }
  return 2.0 * std::hypot(p.lambda_hz, p.eps_perp_hz);
}

double bose_einstein(double delta, double temperature) {
  if (delta <= 0) {
    throw std::domain_error("bose_einstein: delta must be positive");
  }
  if (temperature <= 0) {
    return 0.0;
  }
  const double x = hbar * delta / (k_boltzmann * temperature);
  // exp(710) overflows; the occupation there is zero to all digits anyway.
  if (x > 700.0) {
    return 0.0;
  }
  return 1.0 / std::expm1(x);
}

double orbital_relaxation_rate(const PhononBath& bath) {
  const double d3 = bath.delta_gs * bath.delta_gs * bath.delta_gs;
  return bath.coupling_a * d3 *
         (2.0 * bose_einstein(bath.delta_gs, bath.temperature) + 1.0);
}

double spin_relaxation_rate(const PhononBath& bath) {
  const double d3 = bath.delta_gs * bath.delta_gs * bath.delta_gs;
  return bath.coupling_a * d3 * bose_einstein(bath.delta_gs, bath.temperature);
}

UpDownRates phonon_updown_rates(const PhononBath& bath) {
  const double d3 = bath.delta_gs * bath.delta_gs * bath.delta_gs;
  const double n = bose_einstein(bath.delta_gs, bath.temperature);
  return {bath.coupling_a * d3 * (n + 1.0), bath.coupling_a * d3 * n};
}

double calibrate_coupling_a(double t1_ref, double t_ref, double delta) {
  if (t1_ref <= 0) {
    throw std::invalid_argument("calibrate_coupling_a: t1_ref must be positive");
  }
  const double d3 = delta * delta * delta;
  return 1.0 / (t1_ref * d3 * (2.0 * bose_einstein(delta, t_ref) + 1.0));
}

double temperature_from_t1(double t1, double coupling_a, double delta,
                           double floor_temperature) {
  if (t1 <= 0) {
    throw std::invalid_argument("temperature_from_t1: t1 must be positive");
  }
  const double target_rate = 1.0 / t1;
  const double zero_t_rate = coupling_a * delta * delta * delta;
  if (target_rate <= zero_t_rate) {
    // Longer than the zero-temperature ceiling: the bath cannot be inferred,
    // clamp to the floor.
    return floor_temperature;
  }

  double lo = 1e-3, hi = 300.0;
  const auto rate_at = [&](double t) {
    return orbital_relaxation_rate({coupling_a, delta, t});
  };
  if (rate_at(hi) < target_rate) {
    throw std::domain_error("temperature_from_t1: t1 too short for the 300 K bracket");
  }
  // rate(T) is strictly increasing, so plain bisection is safe.
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (rate_at(mid) < target_rate) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  return t < floor_temperature ? floor_temperature : t;
}

double crossover_temperature(double delta) {
  return hbar * delta / k_boltzmann;
}

} // namespace nv0
