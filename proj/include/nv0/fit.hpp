// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

// Weighted damped least-squares engine and the model library used to pull
// relaxation and coherence parameters out of count traces. Frequencies are
// angular inside the parameter vectors; the extraction helpers convert to
// cycles at the boundary.

namespace nv0 {

enum class FitModelKind {
  ExpRecovery,          // Yinf - (Yinf - Y0) exp(-t/T1)
  DampedCosine,         // A cos(W t) exp(-t/T2) + B
  DetunedDampedCosine,  // C cos(D t + phi) exp(-t/T2s) + D0
  GaussianPeak,         // A exp(-(x-x0)^2 / 2w^2) + B
  EchoDecay,            // E exp(-(t/T2)^2 - t/T1) + F
};

struct FitModel {
  FitModelKind kind = FitModelKind::ExpRecovery;
  // EchoDecay: when positive, T1 is held at this value and dropped from the
  // parameter vector; when zero, T1 is co-fit.
  double fixed_t1 = 0;
};

std::size_t param_count(const FitModel& model);
std::vector<std::string> param_names(const FitModel& model);

double eval(const FitModel& model, const std::vector<double>& params, double t);

struct FitData {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> sigma;  // must be positive; leave empty for unweighted
};

struct Bounds {
  std::vector<double> lo;
  std::vector<double> hi;
};

// Box constraints: characteristic times in [0.1 ns, 1 s], angular
// frequencies in [0, pi / min x-spacing] (the sampling limit), peak centers
// within the padded data range, amplitudes unbounded.
Bounds default_bounds(const FitModel& model, const FitData& data);

struct FitResult {
  std::vector<double> params;
  std::vector<double> std_errors;
  Eigen::MatrixXd covariance;
  double chi2_reduced = 0;
  bool converged = false;
  int iterations = 0;
};

// Data-driven starting point: cosine frequency from a discrete spectrum
// peak, decay times from the log-envelope slope, peak center from the
// argmax, recovery asymptote from the tail mean. Falls back to bounds
// midpoints when a heuristic degenerates.
std::vector<double> initial_guess(const FitModel& model, const FitData& data);

// Damped least squares (normal equations with adaptive damping and a
// finite-difference Jacobian), sigma-weighted. Convergence when the
// relative chi^2 change drops below 1e-10 or the gradient norm below 1e-12;
// otherwise the best point found is returned with converged = false.
// Throws std::invalid_argument on malformed data and std::runtime_error on
// a Jacobian with no usable direction.
FitResult fit(const FitModel& model, const FitData& data,
              std::vector<double> init, const Bounds& bounds);
FitResult fit(const FitModel& model, const FitData& data);

// Plain-text report (model, parameters with errors, chi^2, convergence).
std::string fit_report(const FitModel& model, const FitResult& result);

// Extraction pipelines. Each returns the generic result plus the named
// physical quantities in experiment units.

struct T1Extraction {
  FitResult result;
  double t1 = 0, t1_err = 0;    // s
  double y0 = 0, yinf = 0;      // recovery endpoints
};
T1Extraction extract_t1(const std::vector<double>& delays,
                        const std::vector<double>& ratios,
                        const std::vector<double>& sigmas);

struct RabiExtraction {
  FitResult result;
  double rabi_hz = 0, rabi_err_hz = 0;
  double t2_rabi = 0, t2_rabi_err = 0;  // s
};
RabiExtraction extract_rabi(const FitData& data);

struct RamseyExtraction {
  FitResult result;
  double detuning_hz = 0, detuning_err_hz = 0;
  double t2_star = 0, t2_star_err = 0;  // s
  double phase = 0;
};
RamseyExtraction extract_ramsey(const FitData& data);

struct CpmgExtraction {
  FitResult result;
  double t2 = 0, t2_err = 0;  // s
  double t1_used = 0;         // fixed input, or the co-fit value
};
// fixed_t1 > 0 holds the longitudinal decay constant; 0 co-fits it.
CpmgExtraction extract_cpmg(const FitData& data, double fixed_t1);

struct OderExtraction {
  FitResult result;
  double center_hz = 0, center_err_hz = 0;
  double fwhm_hz = 0, fwhm_err_hz = 0;
};
// data.x is the swept microwave frequency in Hz.
OderExtraction extract_oder(const FitData& data);

} // namespace nv0
