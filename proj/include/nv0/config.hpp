// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nv0/cqed.hpp"
#include "nv0/experiment.hpp"

// Run configuration: one JSON document (with // comments allowed) drives
// every subcommand. Dimensioned values accept unit suffixes ("4.9 GHz",
// "50 mK", "1 um"); bare numbers are read in base units (Hz, s, K, m).
// Unknown keys are rejected with the offending field path so a typo fails
// loudly instead of silently running defaults.

namespace nv0 {

struct ExperimentSpec {
  std::string kind = "t1";  // t1 | rabi | ramsey | hahn_echo | cpmg | oder
  // Sweep grid on the experiment's own axis (delays, widths, total times,
  // microwave frequencies). Explicit points win; otherwise `points` > 0
  // generates a linear or logarithmic grid; otherwise a canonical grid for
  // the kind is used.
  std::vector<double> grid;
  double start = 0;
  double stop = 0;
  std::size_t points = 0;
  bool log_spacing = false;
  int cpmg_m = 2;
  double ramsey_detuning_hz = 22e6;
  double mw_rabi_hz = 0;  // 0 falls back to the sequence defaults
  OderParams oder;        // shape of the resonance sweep; freq comes from grid
  std::string readout = "population";  // or "trace"
  bool ideal_pulses = false;
  std::uint64_t trajectories = 1;
  double counts_per_point = 30000;  // window-A count level; <= 0 disables
};

struct SweepAxisSpec {
  std::vector<double> values;  // temperatures in K, or powers in mW
  double power_ref_mw = 3.9;   // power at which mw_rabi is quoted
};

struct RunConfig {
  PhysicsConfig physics;
  NoiseModel noise;
  DetectorModel detector;
  SequenceDefaults sequence;
  ExperimentSpec experiment;
  SweepAxisSpec sweep;
  ResonatorSpec resonator;
  EmitterSpec emitter;
  std::uint64_t seed = 1;
  std::string output;  // CSV path; empty writes to stdout
};

// "7.2 MHz" -> 7.2e6, for Hz/kHz/MHz/GHz, s/ms/us/ns/ps, K/mK, m/mm/um/nm.
// A bare numeric string passes through unchanged. Throws
// std::invalid_argument on malformed numbers or unknown suffixes.
double parse_quantity(const std::string& text);

// Parse and validate a config document. `source` names the document in
// error messages. Throws std::invalid_argument on schema violations.
RunConfig parse_config(const std::string& json_text, const std::string& source);

// Reads and parses a file; throws std::runtime_error when unreadable.
RunConfig load_config_file(const std::string& path);

// Resolve the experiment sweep grid (see ExperimentSpec).
std::vector<double> experiment_grid(const ExperimentSpec& spec);

// Collapse the run configuration into the experiment engine's view.
ExperimentConfig to_experiment_config(const RunConfig& cfg);

} // namespace nv0
