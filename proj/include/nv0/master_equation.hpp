// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

// Density-matrix dynamics of the effective three-level system
// {|0>, |1>, |2>}: the two ground-state orbital branches and the optically
// excited state. |0><->|2| couples to the laser, |0><->|1| to the microwave
// field, and |2> decays radiatively at gamma split evenly between the ground
// states. All rates and frequencies here are angular (rad/s).

namespace nv0 {

using DensityMatrix = Eigen::Matrix3cd;

struct SystemRates {
  double gamma = 0;       // total decay of |2>, gamma/2 into each ground state
  double kappa_down = 0;  // |1> -> |0| orbital relaxation
  double kappa_up = 0;    // |0> -> |1| thermal excitation
  double gamma_phi = 0;   // pure dephasing acting on the 0-1 coherence
};

struct Drives {
  double opt_rabi = 0;      // Omega_opt on 0<->2
  double opt_detuning = 0;  // laser detuning from the 0-2 transition
  double mw_rabi = 0;       // Omega on 0<->1
  double mw_detuning = 0;   // microwave detuning Delta
  double mw_phase = 0;      // phase phi, selects the rotation axis (rad)
};

struct TimelineEntry {
  double duration = 0;  // s
  Drives drives;
  bool readout = false;  // photons are collected during this window
};

DensityMatrix diagonal_state(double p0, double p1, double p2 = 0.0);

// Invariant tolerances for a physical density matrix.
struct PhysicalTolerances {
  double hermiticity = 1e-12;
  double trace = 1e-9;
  double eigenvalue = 1e-9;  // eigenvalues may not dip below -eigenvalue
};

bool is_physical(const DensityMatrix& rho, const PhysicalTolerances& tol = {});

// Detect-and-fail: throws std::runtime_error naming the violated invariant.
// Nothing in this library ever renormalizes a state silently.
void require_physical(const DensityMatrix& rho, const PhysicalTolerances& tol = {});

// Right-hand side of the master equation in the rotating frame of both
// drives. Trace of the result is identically zero.
DensityMatrix rhs(const DensityMatrix& rho, const SystemRates& rates,
                  const Drives& drives);

// One classical RK4 step of size h. Building block for callers that run
// their own loops (noise-conditioned propagation in the experiment layer).
DensityMatrix step_rk4(const DensityMatrix& rho, const SystemRates& rates,
                       const Drives& drives, double h);

// Largest step the fixed-step integrator accepts: 1/(50 * fastest rate or
// drive amplitude). Infinity when the generator is trivial.
double stable_step_bound(const SystemRates& rates, const Drives& drives);

struct IntegrateOptions {
  // Fixed RK4 step. 0 selects the stability bound 1/(50 * max rate or drive
  // amplitude) per segment; an explicit value above that bound is rejected
  // with std::invalid_argument.
  double dt = 0;
  // Trajectory sampling interval; 0 records every internal step.
  double sample_dt = 0;
  // Check positivity (full eigenvalue test) at every recorded sample rather
  // than only at segment boundaries. Trace and Hermiticity are always
  // checked every step.
  bool paranoid_checks = false;
};

struct TrajectoryPoint {
  double t = 0;
  DensityMatrix rho;
};
using Trajectory = std::vector<TrajectoryPoint>;

// Classical fixed-step RK4 over a piecewise-constant drive timeline.
// Segments with no drive at all are advanced with the exact free-evolution
// propagator instead of stepping. Deterministic given inputs.
Trajectory integrate(const DensityMatrix& rho0, const SystemRates& rates,
                     const std::vector<TimelineEntry>& timeline,
                     const IntegrateOptions& opts = {});

// Streaming variant: invokes observe(t, rho, readout) at t = 0, at every
// sample point, and at each segment boundary, without storing the
// trajectory.
void integrate_observe(
    const DensityMatrix& rho0, const SystemRates& rates,
    const std::vector<TimelineEntry>& timeline, const IntegrateOptions& opts,
    const std::function<void(double, const DensityMatrix&, bool)>& observe);

// Exact propagator for free evolution (no optical or microwave drive):
// populations follow the closed-form rate-equation solution, coherences
// rotate at their detunings and decay at their linewidths.
DensityMatrix free_evolve(const DensityMatrix& rho, const SystemRates& rates,
                          double mw_detuning, double opt_detuning, double t);

// Long-time integration until the scaled residual ||rhs||_F / max_rate drops
// to 1e-10. Throws std::runtime_error if that never happens within the
// iteration budget.
DensityMatrix steady_state_numeric(const SystemRates& rates, const Drives& drives);

// Null-space solve of the Liouvillian, used as an independent cross-check on
// the integrated steady state.
DensityMatrix steady_state_nullspace(const SystemRates& rates, const Drives& drives);

// Closed-form steady populations (p0, p1, p2) of the optically driven system
// at resonance: p0 = (gamma^2/Omega^2 + 1) p2 and p1 = (gamma/2kappa) p2,
// normalized to unit sum. Inputs in any one consistent frequency unit.
// Throws std::invalid_argument when omega_opt or kappa is zero (the driven
// steady state degenerates).
std::array<double, 3> steady_state_analytic(double gamma, double kappa,
                                            double omega_opt);

// Instantaneous unitary rotation by `angle` about the equatorial axis at
// `axis_phase` on the 0-1 subspace; identity on |2>.
DensityMatrix apply_ideal_pulse(const DensityMatrix& rho, double axis_phase,
                                double angle);

} // namespace nv0
