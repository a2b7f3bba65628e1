// SPDX-License-Identifier: MIT
#include "nv0/cqed.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "nv0/constants.hpp"

namespace nv0 {

ResonatorSpec resonator_from_q(double frequency_hz, double impedance_ohm,
                               double q, double gap_m) {
  if (!(q > 0)) throw std::invalid_argument("quality factor must be positive");
  ResonatorSpec res;
  res.frequency_hz = frequency_hz;
  res.impedance_ohm = impedance_ohm;
  res.linewidth_hz = frequency_hz / q;
  res.gap_m = gap_m;
  validate(res);
  return res;
}

double quality_factor(const ResonatorSpec& res) {
  validate(res);
  return res.frequency_hz / res.linewidth_hz;
}

void validate(const ResonatorSpec& res) {
  if (!(res.frequency_hz > 0))
    throw std::invalid_argument("resonator frequency must be positive");
  if (!(res.impedance_ohm > 0))
    throw std::invalid_argument("resonator impedance must be positive");
  if (!(res.linewidth_hz > 0))
    throw std::invalid_argument("resonator linewidth must be positive");
  if (!(res.gap_m > 0))
    throw std::invalid_argument("electrode gap must be positive");
}

void validate(const EmitterSpec& emitter) {
  if (!(emitter.field_sensitivity_hz_per_v_m > 0))
    throw std::invalid_argument("field sensitivity must be positive");
  if (!(emitter.t1_orbital > 0) || !std::isfinite(emitter.t1_orbital))
    throw std::invalid_argument("emitter T1 must be positive and finite");
}

double single_photon_voltage(const ResonatorSpec& res) {
  validate(res);
  return two_pi * res.frequency_hz * std::sqrt(0.5 * hbar * res.impedance_ohm);
}

double gap_field(double voltage_v, double gap_m) {
  if (!(gap_m > 0)) throw std::invalid_argument("gap must be positive");
  return 2.0 * voltage_v / gap_m;
}

double coupling_strength(double field_v_m, const EmitterSpec& emitter) {
  validate(emitter);
  return emitter.field_sensitivity_hz_per_v_m * field_v_m;
}

double cooperativity(double g_hz, double gamma_hz, double kappa_hz) {
  if (!(gamma_hz > 0) || !(kappa_hz > 0))
    throw std::invalid_argument("linewidths must be positive");
  return 4.0 * g_hz * g_hz / (gamma_hz * kappa_hz);
}

CouplingReport assess(const ResonatorSpec& res, const EmitterSpec& emitter) {
  validate(res);
  validate(emitter);
  CouplingReport rep;
  rep.photon_voltage_v = single_photon_voltage(res);
  rep.gap_field_v_m = gap_field(rep.photon_voltage_v, res.gap_m);
  rep.g_hz = coupling_strength(rep.gap_field_v_m, emitter);
  rep.gamma_emitter_hz = 1.0 / (two_pi * emitter.t1_orbital);
  rep.kappa_resonator_hz = res.linewidth_hz;
  rep.cooperativity =
      cooperativity(rep.g_hz, rep.gamma_emitter_hz, rep.kappa_resonator_hz);
  rep.strong_coupling =
      rep.g_hz > rep.gamma_emitter_hz && rep.g_hz > rep.kappa_resonator_hz;
  return rep;
}

std::string report_text(const ResonatorSpec& res, const EmitterSpec& emitter) {
  CouplingReport rep = assess(res, emitter);
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "resonator: f = %.6g GHz, Z = %.6g ohm, kappa/2pi = %.6g kHz "
                "(Q = %.4g), gap = %.6g um\n",
                res.frequency_hz / 1e9, res.impedance_ohm,
                res.linewidth_hz / 1e3, quality_factor(res), res.gap_m * 1e6);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "emitter:   sensitivity = %.6g MHz/(V/cm), T1 = %.6g us, "
                "gamma/2pi = %.6g kHz\n",
                emitter.field_sensitivity_hz_per_v_m / 1e4,
                emitter.t1_orbital * 1e6, rep.gamma_emitter_hz / 1e3);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "chain:     V0 = %.6g uV -> E = %.6g V/m -> g/2pi = %.6g kHz\n",
                rep.photon_voltage_v * 1e6, rep.gap_field_v_m, rep.g_hz / 1e3);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "result:    C = %.6g, strong coupling: %s\n", rep.cooperativity,
                rep.strong_coupling ? "yes" : "no");
  os << buf;
  return os.str();
}

} // namespace nv0
