// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nv0/detection.hpp"
#include "nv0/fit.hpp"
#include "nv0/master_equation.hpp"
#include "nv0/noise.hpp"
#include "nv0/physics.hpp"
#include "nv0/sequence.hpp"

// Experiment drivers: pulse sequence in, normalized observable out. Two
// readout models are provided. Population mode takes the |0> population at
// the final readout as a proxy for the photoluminescence peak (the pumping
// transient is linear in it) and attaches Poisson noise at a configured
// count level; it is what the sweep experiments use. Trace mode simulates
// the full photon record bin by bin and runs the count-analysis chain; it
// is slower and exists for the initialization-fidelity measurement and for
// anyone who wants raw traces.

namespace nv0 {

struct PhysicsConfig {
  double lambda_hz = 4.9e9;    // spin-orbit splitting parameter
  double eps_perp_hz = 4.3e9;  // transverse strain
  double gamma_hz = 7.2e6;     // optical decay / 2pi
  double opt_rabi_hz = 8e6;
  double temperature = 0.012;  // K
  double coupling_a = 0;       // phonon coupling; 0 calibrates from the anchor
  double t1_ref = 4.7e-6;      // s, anchor relaxation time
  double t_ref = 0.012;        // K, anchor temperature
  double t1_override = 0;      // s; > 0 bypasses the phonon model entirely
  // Ground-state populations at sequence start: p0 in [0,1] with
  // p1 = 1 - p0. Negative selects thermal equilibrium of the kappas.
  double initial_p0 = -1;
};

double splitting_hz(const PhysicsConfig& phys);

// Relaxation rates at the configured temperature: the up/down pair from the
// single-phonon model (or from t1_override split by detailed balance), the
// optical gamma, and the Markovian dephasing from the noise model.
SystemRates rates_at(const PhysicsConfig& phys, const NoiseModel& noise);

DensityMatrix initial_state(const PhysicsConfig& phys, const SystemRates& rates);

enum class ReadoutMode { Population, Trace };

struct ExperimentConfig {
  PhysicsConfig physics;
  NoiseModel noise;
  DetectorModel detector;
  SequenceDefaults sequence;
  ReadoutMode readout_mode = ReadoutMode::Population;
  bool ideal_pulses = false;       // instantaneous rotations, exact idle evolution
  std::uint64_t trajectories = 1;  // Monte-Carlo shots per sweep point
  double counts_per_point = 30000; // population-mode window-A count level
  std::uint64_t seed = 0;
};

struct SweepPoint {
  double x = 0;
  double value = 0;  // B/A normalized counts
  double sigma = 0;
};

struct SweepResult {
  std::string experiment;
  std::string x_label;  // delay_s, width_s, total_time_s, mw_freq_hz, ...
  std::vector<SweepPoint> points;
};

SweepResult run_t1(const ExperimentConfig& cfg, const std::vector<double>& delays);
SweepResult run_rabi(const ExperimentConfig& cfg, const std::vector<double>& widths,
                     double mw_rabi_hz);
SweepResult run_ramsey(const ExperimentConfig& cfg,
                       const std::vector<double>& delays, double detuning_hz);
SweepResult run_hahn_echo(const ExperimentConfig& cfg,
                          const std::vector<double>& total_times);
SweepResult run_cpmg(const ExperimentConfig& cfg, int m,
                     const std::vector<double>& total_times);
SweepResult run_oder(const ExperimentConfig& cfg,
                     const std::vector<double>& mw_freqs_hz,
                     const OderParams& base);

// Full binned photon record of one sequence, averaged over the Monte-Carlo
// ensemble and Poisson-sampled at the aggregate level.
CountTrace run_trace(const ExperimentConfig& cfg, const PulseSequence& seq);

// Count-analysis chain for one trace: dark subtraction, five-point
// smoothing, then the B/A peak ratio of the last readout-flagged pulse
// against the first. Throws when the sequence lacks two readout pulses.
Ratio trace_ratio(const CountTrace& raw, const PulseSequence& seq,
                  double dark_rate);

struct InitFidelityResult {
  Ratio b_over_a;        // after dark subtraction and smoothing
  double fidelity = 0;   // 1 - (B/A) / (2 * mixed reference)
  double fidelity_err = 0;
  CountTrace trace;      // the raw synthesized record
};

// Pump for init_width, wait 10 ns, probe for ro_width; B/A of the two
// pulses referenced to the completely mixed state.
InitFidelityResult run_init_fidelity(const ExperimentConfig& cfg,
                                     double init_width, double ro_width = 1e-6);

// CSV with a versioned header comment. Numbers are written with %.17g so
// byte-identical reruns are guaranteed for identical configs.
void write_sweep_csv(const SweepResult& sweep, std::ostream& os);
void write_trace_csv(const CountTrace& trace, std::ostream& os);

// Reads the three-column (x, value/counts, sigma) CSV written above,
// skipping # comments. Throws std::runtime_error naming the offending row.
FitData read_xy_csv(std::istream& is);

} // namespace nv0
