// SPDX-License-Identifier: MIT
#include "nv0/master_equation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nv0 {

namespace {

using std::complex;
constexpr complex<double> I{0.0, 1.0};

// Largest rate or drive amplitude appearing in the generator. The RK4 step
// must resolve the fastest of these.
double max_scale(const SystemRates& r, const Drives& d) {
  return std::max({r.gamma, r.kappa_down, r.kappa_up, r.gamma_phi,
                   std::abs(d.opt_rabi), std::abs(d.mw_rabi),
                   std::abs(d.opt_detuning), std::abs(d.mw_detuning)});
}

bool has_drive(const Drives& d) { return d.opt_rabi != 0.0 || d.mw_rabi != 0.0; }

// (1 - exp(-a t)) / a, stable for a -> 0.
double decay_ramp(double a, double t) {
  if (a == 0.0) return t;
  return -std::expm1(-a * t) / a;
}

} // namespace

DensityMatrix step_rk4(const DensityMatrix& rho, const SystemRates& rates,
                       const Drives& d, double h) {
  DensityMatrix k1 = rhs(rho, rates, d);
  DensityMatrix k2 = rhs(rho + (0.5 * h) * k1, rates, d);
  DensityMatrix k3 = rhs(rho + (0.5 * h) * k2, rates, d);
  DensityMatrix k4 = rhs(rho + h * k3, rates, d);
  return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double stable_step_bound(const SystemRates& rates, const Drives& drives) {
  double scale = max_scale(rates, drives);
  if (scale <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (50.0 * scale);
}

DensityMatrix diagonal_state(double p0, double p1, double p2) {
  DensityMatrix rho = DensityMatrix::Zero();
  rho(0, 0) = p0;
  rho(1, 1) = p1;
  rho(2, 2) = p2;
  return rho;
}

bool is_physical(const DensityMatrix& rho, const PhysicalTolerances& tol) {
  if ((rho - rho.adjoint()).norm() > tol.hermiticity) return false;
  if (std::abs(rho.trace().real() - 1.0) > tol.trace ||
      std::abs(rho.trace().imag()) > tol.trace)
    return false;
  DensityMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DensityMatrix> es(herm);
  return es.eigenvalues().minCoeff() >= -tol.eigenvalue;
}

void require_physical(const DensityMatrix& rho, const PhysicalTolerances& tol) {
  double herm_err = (rho - rho.adjoint()).norm();
  if (herm_err > tol.hermiticity) {
    std::ostringstream msg;
    msg << "density matrix is not Hermitian: ||rho - rho^dag|| = " << herm_err;
    throw std::runtime_error(msg.str());
  }
  complex<double> tr = rho.trace();
  if (std::abs(tr.real() - 1.0) > tol.trace || std::abs(tr.imag()) > tol.trace) {
    std::ostringstream msg;
    msg << "density matrix trace drifted from 1: tr = (" << tr.real() << ", "
        << tr.imag() << ")";
    throw std::runtime_error(msg.str());
  }
  DensityMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DensityMatrix> es(herm);
  double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol.eigenvalue) {
    std::ostringstream msg;
    msg << "density matrix has a negative eigenvalue: " << min_eig;
    throw std::runtime_error(msg.str());
  }
}

DensityMatrix rhs(const DensityMatrix& rho, const SystemRates& rates,
                  const Drives& d) {
  // Rotating-frame Hamiltonian. The pure-dephasing channel
  // L = sqrt(gamma_phi/2) (|0><0| - |1><1|) damps rho01 at gamma_phi and the
  // optical coherences at gamma_phi/4, keeping the map completely positive.
  const complex<double> a{0.5 * d.opt_rabi, 0.0};
  const complex<double> m = 0.5 * d.mw_rabi * std::exp(I * d.mw_phase);

  DensityMatrix H = DensityMatrix::Zero();
  H(0, 1) = m;
  H(1, 0) = std::conj(m);
  H(0, 2) = a;
  H(2, 0) = a;
  H(1, 1) = d.mw_detuning;
  H(2, 2) = d.opt_detuning;

  DensityMatrix out = -I * (H * rho - rho * H);

  const double g = rates.gamma;
  const double kd = rates.kappa_down;
  const double ku = rates.kappa_up;
  const double gp = rates.gamma_phi;

  // Population flow: |2> decays at gamma split evenly between the ground
  // states; the ground-state pair exchanges at kappa_down / kappa_up.
  out(0, 0) += 0.5 * g * rho(2, 2) + kd * rho(1, 1) - ku * rho(0, 0);
  out(1, 1) += 0.5 * g * rho(2, 2) - kd * rho(1, 1) + ku * rho(0, 0);
  out(2, 2) += -g * rho(2, 2);

  const double G01 = 0.5 * (kd + ku) + gp;
  const double G02 = 0.5 * g + 0.5 * ku + 0.25 * gp;
  const double G12 = 0.5 * g + 0.5 * kd + 0.25 * gp;

  out(0, 1) -= G01 * rho(0, 1);
  out(1, 0) -= G01 * rho(1, 0);
  out(0, 2) -= G02 * rho(0, 2);
  out(2, 0) -= G02 * rho(2, 0);
  out(1, 2) -= G12 * rho(1, 2);
  out(2, 1) -= G12 * rho(2, 1);
  return out;
}

DensityMatrix free_evolve(const DensityMatrix& rho, const SystemRates& rates,
                          double mw_detuning, double opt_detuning, double t) {
  const double g = rates.gamma;
  const double kd = rates.kappa_down;
  const double ku = rates.kappa_up;
  const double K = kd + ku;

  const double p0 = rho(0, 0).real();
  const double p1 = rho(1, 1).real();
  const double p2 = rho(2, 2).real();
  const double total = p0 + p1 + p2;

  const double eg = std::exp(-g * t);
  const double p2_t = p2 * eg;
  // Ground-state pair total grows as |2> drains into it.
  const double s_t = (p0 + p1) + p2 * (1.0 - eg);

  // d p0/dt + K p0 = kappa_down * total + (gamma/2 - kappa_down) p2 e^{-g t}.
  // The particular + homogeneous solution, written with expm1 so the
  // near-degenerate case K ~ gamma stays accurate.
  const double eK = std::exp(-K * t);
  const double source = (0.5 * g - kd) * p2;
  // Convolution of e^{-g s} with the e^{-K (t-s)} kernel. The difference
  // form never overflows (both exponentials are <= 1); the series form
  // takes over when K ~ gamma would cancel catastrophically.
  const double d = K - g;
  double cross;
  if (std::abs(d) * t < 1e-6)
    cross = (d == 0.0) ? t * eg : eg * (-std::expm1(-d * t) / d);
  else
    cross = (eg - eK) / d;
  const double p0_t = p0 * eK + kd * total * decay_ramp(K, t) + source * cross;
  const double p1_t = s_t - p0_t;

  DensityMatrix out = DensityMatrix::Zero();
  out(0, 0) = p0_t;
  out(1, 1) = p1_t;
  out(2, 2) = p2_t;

  const double G01 = 0.5 * K + rates.gamma_phi;
  const double G02 = 0.5 * g + 0.5 * ku + 0.25 * rates.gamma_phi;
  const double G12 = 0.5 * g + 0.5 * kd + 0.25 * rates.gamma_phi;

  out(0, 1) = rho(0, 1) * std::exp(complex<double>(-G01 * t, mw_detuning * t));
  out(0, 2) = rho(0, 2) * std::exp(complex<double>(-G02 * t, opt_detuning * t));
  out(1, 2) = rho(1, 2) *
              std::exp(complex<double>(-G12 * t, (opt_detuning - mw_detuning) * t));
  out(1, 0) = std::conj(out(0, 1));
  out(2, 0) = std::conj(out(0, 2));
  out(2, 1) = std::conj(out(1, 2));
  return out;
}

void integrate_observe(
    const DensityMatrix& rho0, const SystemRates& rates,
    const std::vector<TimelineEntry>& timeline, const IntegrateOptions& opts,
    const std::function<void(double, const DensityMatrix&, bool)>& observe) {
  require_physical(rho0);

  DensityMatrix rho = rho0;
  double t = 0.0;
  observe(t, rho, false);

  for (const TimelineEntry& seg : timeline) {
    if (!(seg.duration > 0.0))
      throw std::invalid_argument("timeline entry duration must be positive");

    if (!has_drive(seg.drives)) {
      // Exact propagation; chop only to honor the sampling grid. Chops that
      // do not divide the duration leave a roundoff sliver behind, which is
      // absorbed into the final chop rather than emitted as a duplicate
      // boundary sample.
      double step = (opts.sample_dt > 0.0) ? opts.sample_dt : seg.duration;
      const double sliver = 1e-12 * seg.duration;
      double local = 0.0;
      while (seg.duration - local > sliver) {
        double h = std::min(step, seg.duration - local);
        if (seg.duration - local - h <= sliver) h = seg.duration - local;
        rho = free_evolve(rho, rates, seg.drives.mw_detuning,
                          seg.drives.opt_detuning, h);
        local += h;
        if (seg.duration - local > sliver) observe(t + local, rho, seg.readout);
      }
      t += seg.duration;
    } else {
      double bound = stable_step_bound(rates, seg.drives);
      double dt;
      if (opts.dt == 0.0) {
        dt = std::min(bound, seg.duration);
      } else if (opts.dt > bound) {
        std::ostringstream msg;
        msg << "step size " << opts.dt << " s exceeds the stability bound "
            << bound << " s for this segment";
        throw std::invalid_argument(msg.str());
      } else {
        dt = opts.dt;
      }
      long n = static_cast<long>(std::ceil(seg.duration / dt - 1e-12));
      if (n < 1) n = 1;
      double h = seg.duration / static_cast<double>(n);

      double next_sample = (opts.sample_dt > 0.0) ? opts.sample_dt : 0.0;
      double local = 0.0;
      for (long i = 0; i < n; ++i) {
        rho = step_rk4(rho, rates, seg.drives, h);
        rho = 0.5 * (rho + rho.adjoint().eval());  // scrub roundoff skew
        local = (i + 1) * h;
        bool last = (i + 1 == n);
        bool emit;
        if (opts.sample_dt > 0.0) {
          emit = !last && local + 0.5 * h >= next_sample;
          if (emit) next_sample += opts.sample_dt;
        } else {
          emit = !last;
        }
        if (emit) {
          if (opts.paranoid_checks) require_physical(rho);
          observe(t + local, rho, seg.readout);
        }
      }
      t += seg.duration;
    }
    require_physical(rho);
    observe(t, rho, seg.readout);
  }
}

Trajectory integrate(const DensityMatrix& rho0, const SystemRates& rates,
                     const std::vector<TimelineEntry>& timeline,
                     const IntegrateOptions& opts) {
  Trajectory traj;
  integrate_observe(rho0, rates, timeline, opts,
                    [&traj](double t, const DensityMatrix& rho, bool) {
                      traj.push_back({t, rho});
                    });
  return traj;
}

DensityMatrix steady_state_numeric(const SystemRates& rates, const Drives& drives) {
  const double scale = max_scale(rates, drives);
  DensityMatrix rho = diagonal_state(1.0, 0.0, 0.0);
  if (scale == 0.0) return rho;  // trivial generator, everything is steady

  const double dt = 1.0 / (50.0 * scale);
  const long chunk = 2000;
  const long max_steps = 200'000'000;
  for (long done = 0; done < max_steps; done += chunk) {
    for (long i = 0; i < chunk; ++i) rho = step_rk4(rho, rates, drives, dt);
    rho = 0.5 * (rho + rho.adjoint().eval());
    if (rhs(rho, rates, drives).norm() / scale <= 1e-10) return rho;
  }
  throw std::runtime_error("steady state did not converge within the step budget");
}

DensityMatrix steady_state_nullspace(const SystemRates& rates, const Drives& drives) {
  // Column j*3+k of L is the generator applied to the matrix unit |j><k|
  // (column-major vec convention).
  Eigen::Matrix<complex<double>, 9, 9> L;
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 3; ++j) {
      DensityMatrix unit = DensityMatrix::Zero();
      unit(j, k) = 1.0;
      DensityMatrix col = rhs(unit, rates, drives);
      L.col(k * 3 + j) = Eigen::Map<Eigen::Matrix<complex<double>, 9, 1>>(col.data());
    }
  }
  Eigen::JacobiSVD<Eigen::Matrix<complex<double>, 9, 9>> svd(
      L, Eigen::ComputeFullV);
  Eigen::Matrix<complex<double>, 9, 1> v = svd.matrixV().col(8);
  DensityMatrix M = Eigen::Map<DensityMatrix>(v.data());

  // The generator maps Hermitian to Hermitian, so the kernel contains the
  // Hermitian part of any null vector. Pick the combination carrying trace.
  DensityMatrix h1 = 0.5 * (M + M.adjoint().eval());
  DensityMatrix h2 = (M - M.adjoint().eval()) / complex<double>(0.0, 2.0);
  DensityMatrix herm =
      std::abs(h1.trace()) >= std::abs(h2.trace()) ? h1 : h2;
  double tr = herm.trace().real();
  if (std::abs(tr) < 1e-12)
    throw std::runtime_error("null-space solve produced a traceless fixed point");
  return herm / tr;
}

std::array<double, 3> steady_state_analytic(double gamma, double kappa,
                                            double omega_opt) {
  if (omega_opt == 0.0)
    throw std::invalid_argument(
        "steady_state_analytic requires a nonzero optical drive");
  if (kappa == 0.0)
    throw std::invalid_argument(
        "steady_state_analytic requires a nonzero orbital relaxation rate");
  double r0 = gamma * gamma / (omega_opt * omega_opt) + 1.0;
  double r1 = 0.5 * gamma / kappa;
  double norm = r0 + r1 + 1.0;
  return {r0 / norm, r1 / norm, 1.0 / norm};
}

DensityMatrix apply_ideal_pulse(const DensityMatrix& rho, double axis_phase,
                                double angle) {
  // exp(-i H t) for the resonant drive block, matching the sign and phase
  // conventions of rhs() so ideal and integrated pulses agree in the limit
  // of large drive amplitude.
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  DensityMatrix U = DensityMatrix::Identity();
  U(0, 0) = c;
  U(1, 1) = c;
  U(0, 1) = -I * std::exp(I * axis_phase) * s;
  U(1, 0) = -I * std::exp(-I * axis_phase) * s;
  return U * rho * U.adjoint();
}

} // namespace nv0
