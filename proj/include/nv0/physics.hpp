// SPDX-License-Identifier: MIT
#pragma once

// Ground-state energy structure of the NV0 orbital doublet and the
// single-phonon relaxation law that governs its thermalization.
//
// Unit convention used throughout the library: angular frequencies (rad/s)
// inside every formula; plain frequencies (Hz) only at configuration and I/O
// boundaries, converted with an explicit 2*pi.

namespace nv0 {

struct GroundStateParams {
  double lambda_hz = 0;    // spin-orbit coupling lambda/2pi
  double eps_perp_hz = 0;  // transverse strain eps_perp/2pi
};

struct PhononBath {
  double coupling_a = 0;   // single-phonon coefficient A, s^2 (rad/s)^-3
  double delta_gs = 0;     // ground-state splitting, rad/s
  double temperature = 0;  // K
};

// Orbital splitting 2*sqrt(lambda^2 + eps_perp^2). Hz in, Hz out.
double ground_state_splitting(const GroundStateParams& p);

// Thermal occupation 1/(exp(hbar*delta/kT) - 1); exactly 0 at T <= 0.
// Throws std::domain_error when delta <= 0.
double bose_einstein(double delta, double temperature);

// 1/T1_orb = A * delta^3 * (2 n_BE + 1): stimulated absorption + emission
// plus spontaneous emission of one phonon at the splitting frequency.
double orbital_relaxation_rate(const PhononBath& bath);

// Spin flavor of the same law, 1/T1_spin = A * delta^3 * n_BE (no
// spontaneous term; vanishes at T = 0).
double spin_relaxation_rate(const PhononBath& bath);

struct UpDownRates {
  double down = 0;  // |1> -> |0>, 1/s
  double up = 0;    // |0> -> |1>, 1/s
};

// Detailed-balance split of the orbital law: down = A d^3 (n+1),
// up = A d^3 n, so down + up equals orbital_relaxation_rate and
// up/down = exp(-hbar d / kT).
UpDownRates phonon_updown_rates(const PhononBath& bath);

// Fix A from a single (T1, T) anchor so the forward law reproduces 1/t1_ref
// at t_ref exactly.
double calibrate_coupling_a(double t1_ref, double t_ref, double delta);

// Thermometry: invert the orbital law for T by bisection on [1 mK, 300 K]
// to 1e-9 K. A t1 longer than the T = 0 ceiling 1/(A d^3), or an inferred
// temperature below the floor, returns floor_temperature (the sample never
// reads colder than the mixing chamber).
double temperature_from_t1(double t1, double coupling_a, double delta,
                           double floor_temperature = 0.012);

// Temperature at which stimulated phonon processes overtake spontaneous
// emission, hbar*delta/k_B; the relaxation rate turns linear in T above it.
double crossover_temperature(double delta);

} // namespace nv0
