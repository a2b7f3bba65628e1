// SPDX-License-Identifier: MIT
#pragma once

#include <string>

// Strong-coupling budget for the orbital transition coupled to the electric
// field of a high-impedance microwave resonator. Everything here is plain
// closed-form arithmetic; the point is keeping the unit chain honest.

namespace nv0 {

struct ResonatorSpec {
  double frequency_hz = 13.0e9;   // mode frequency (cycles)
  double impedance_ohm = 4000;
  double linewidth_hz = 100e3;    // kappa / 2pi; Q = frequency / linewidth
  double gap_m = 1e-6;            // electrode gap the emitter sits in
};

// Same resonator expressed through a quality factor.
ResonatorSpec resonator_from_q(double frequency_hz, double impedance_ohm,
                               double q, double gap_m);

double quality_factor(const ResonatorSpec& res);

void validate(const ResonatorSpec& res);

struct EmitterSpec {
  // Stark sensitivity of the orbital transition: 1 MHz per V/cm.
  double field_sensitivity_hz_per_v_m = 1e4;
  double t1_orbital = 4.7e-6;  // s, sets the emitter linewidth 1/(2 pi T1)
};

void validate(const EmitterSpec& emitter);

struct CouplingReport {
  double photon_voltage_v = 0;   // zero-point voltage of the mode
  double gap_field_v_m = 0;      // vacuum field across the gap
  double g_hz = 0;               // coupling strength, cycles
  double gamma_emitter_hz = 0;   // emitter linewidth, 1/(2 pi T1)
  double kappa_resonator_hz = 0; // resonator linewidth
  double cooperativity = 0;      // 4 g^2 / (gamma kappa)
  bool strong_coupling = false;  // g exceeds both linewidths
};

// Root-mean-square zero-point voltage 2*pi*f*sqrt(hbar Z / 2).
double single_photon_voltage(const ResonatorSpec& res);

// Field between the electrodes, 2 V / d: the emitter sits in the gap where
// the full differential voltage drops, hence the factor of two.
double gap_field(double voltage_v, double gap_m);

// g = sensitivity * field, in Hz.
double coupling_strength(double field_v_m, const EmitterSpec& emitter);

// 4 g^2 / (gamma kappa). Throws std::invalid_argument when either linewidth
// is not positive; the gamma -> 0 (infinite T1) limit diverges and callers
// must keep T1 finite.
double cooperativity(double g_hz, double gamma_hz, double kappa_hz);

// Full chain at unrounded precision.
CouplingReport assess(const ResonatorSpec& res, const EmitterSpec& emitter);

// Human-readable report of the chain.
std::string report_text(const ResonatorSpec& res, const EmitterSpec& emitter);

} // namespace nv0
