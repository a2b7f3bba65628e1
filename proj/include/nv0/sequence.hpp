// SPDX-License-Identifier: MIT
#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "nv0/master_equation.hpp"

// Declarative pulse sequences. Frequencies at this layer are plain cycles
// (Hz); the conversion to angular units happens once, in expand_to_drives.

namespace nv0 {

struct OpticalPulse {
  double rabi_hz = 0;
  double detuning_hz = 0;
};

struct MicrowavePulse {
  double rabi_hz = 0;
  double detuning_hz = 0;
  double phase_rad = 0;  // 0 is an x rotation, pi/2 is y
};

struct Segment {
  double duration = 0;  // s, must be positive
  std::optional<OpticalPulse> optical;
  // A microwave entry with zero amplitude is legal and meaningful: it pins
  // the rotating frame (detuning) during an idle segment, which is how
  // Ramsey fringes accumulate phase between the two pi/2 pulses.
  std::optional<MicrowavePulse> microwave;
  bool readout = false;  // photons are collected during this segment
};

struct PulseSequence {
  std::string label;
  std::vector<Segment> segments;
};

// Throws std::invalid_argument naming the first violated invariant
// (non-positive segment duration, non-finite total).
void validate(const PulseSequence& seq);

double total_duration(const PulseSequence& seq);
bool has_readout(const PulseSequence& seq);

// Shared knobs for the experiment builders.
struct SequenceDefaults {
  double opt_rabi_hz = 8e6;     // optical Rabi frequency of init/readout pulses
  double init_width = 3e-6;     // s
  double ro_width = 1e-6;       // s
  double mw_rabi_hz = 14e6;     // sets pi and pi/2 widths, t = theta/Omega
  double line_center_hz = 13.042e9;  // 0-1 transition frequency
};

// Single resonant optical pulse with counts collected throughout,
// long enough to pump the population from |0> into |1>.
PulseSequence build_orbital_init(double width, double opt_rabi_hz = 8e6);

struct OderParams {
  double mw_freq_hz = 13.042e9;  // microwave carrier frequency
  double mw_width = 30e-9;       // s
  double init_width = 3e-6;      // s, first optical pulse (window A)
  double ro_width = 1e-6;        // s, second optical pulse (window B)
  double mw_rabi_hz = 14e6;
  double mw_ro_delay = 10e-9;    // gap between microwave pulse and readout
  double opt_rabi_hz = 8e6;
  double line_center_hz = 13.042e9;
};

// Optically detected orbital resonance: pump, drive the 0-1 transition at
// mw_freq, read the recovered population out optically.
PulseSequence build_oder(const OderParams& p);
PulseSequence build_oder(double mw_freq_hz, double mw_width, double init_width,
                         double ro_width);

// Pump, wait in the dark for each delay, probe. Delays must be
// non-negative and strictly increasing; a zero delay joins the pulses
// back to back.
std::vector<PulseSequence> build_t1_pump_probe(const std::vector<double>& delays,
                                               const SequenceDefaults& d = {});

// Resonant microwave pulse of swept width between init and readout. A zero
// width drops the microwave segment entirely.
std::vector<PulseSequence> build_rabi(const std::vector<double>& widths,
                                      double mw_rabi_hz,
                                      const SequenceDefaults& d = {});

// pi/2 - wait - pi/2 at the given drive detuning, both pulses along x.
std::vector<PulseSequence> build_ramsey(const std::vector<double>& delays,
                                        double detuning_hz,
                                        const SequenceDefaults& d = {});

// pi/2_x - [tau/2M - pi_y - tau/2M] x M - pi/2_x. total_times are the
// accumulated free-evolution time tau, excluding the pulses themselves, so
// the refocusing pulse centers sit exactly at tau(2k-1)/2M on the
// free-evolution axis.
std::vector<PulseSequence> build_cpmg(int m, const std::vector<double>& total_times,
                                      const SequenceDefaults& d = {});

// Identical to build_cpmg(1, ...) except the flip pulse is in phase (x)
// with the pi/2 pulses rather than in quadrature.
std::vector<PulseSequence> build_hahn_echo(const std::vector<double>& total_times,
                                           const SequenceDefaults& d = {});

// Piecewise-constant drive timeline in angular units. Segment boundaries
// carry over exactly: re-summing the entry durations reconstructs the
// sequence durations with no loss.
std::vector<TimelineEntry> expand_to_drives(const PulseSequence& seq);

nlohmann::json to_json(const PulseSequence& seq);
PulseSequence sequence_from_json(const nlohmann::json& j);

} // namespace nv0
