// SPDX-License-Identifier: MIT
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "nv0/constants.hpp"
#include "nv0/master_equation.hpp"
#include "nv0/rng.hpp"

using namespace nv0;

namespace {

constexpr double kPi = two_pi / 2;

// Random density matrix through G G^dag / tr, which is positive by
// construction and exercises every coherence.
DensityMatrix random_state(CounterRng& rng) {
  Eigen::Matrix3cd g;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) g(r, c) = {rng.normal(), rng.normal()};
  DensityMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

// Reference operating rates (angular): gamma/2pi = 7.2 MHz, T1 = 4.7 us
// split 70/30 between down and up, mild pure dephasing.
SystemRates reference_rates() {
  SystemRates r;
  r.gamma = two_pi * 7.2e6;
  r.kappa_down = 0.7 / 4.7e-6;
  r.kappa_up = 0.3 / 4.7e-6;
  r.gamma_phi = 1.1e6;
  return r;
}

} // namespace

TEST_CASE("diagonal_state and the physicality checks") {
  DensityMatrix rho = diagonal_state(0.6, 0.3, 0.1);
  CHECK(rho(0, 0).real() == 0.6);
  CHECK(rho(1, 1).real() == 0.3);
  CHECK(rho(2, 2).real() == 0.1);
  CHECK(rho(0, 1) == std::complex<double>(0, 0));
  CHECK(is_physical(rho));

  SUBCASE("trace violation is caught") {
    DensityMatrix bad = rho * 1.1;
    CHECK(!is_physical(bad));
    CHECK_THROWS_AS(require_physical(bad), std::runtime_error);
  }
  SUBCASE("hermiticity violation is caught") {
    DensityMatrix bad = rho;
    bad(0, 1) = {0.1, 0.0};  // leaves (1,0) at zero
    CHECK(!is_physical(bad));
    CHECK_THROWS_AS(require_physical(bad), std::runtime_error);
  }
  SUBCASE("negative eigenvalue is caught") {
    DensityMatrix bad = diagonal_state(1.1, -0.1, 0.0);
    CHECK(!is_physical(bad));
    CHECK_THROWS_AS(require_physical(bad), std::runtime_error);
  }
}

TEST_CASE("rhs is traceless and reproduces plain radiative decay") {
  SystemRates rates = reference_rates();
  Drives drives;
  drives.opt_rabi = two_pi * 8e6;
  drives.mw_rabi = two_pi * 14e6;
  drives.mw_detuning = two_pi * 3e6;
  drives.opt_detuning = two_pi * -5e6;
  drives.mw_phase = 0.7;

  CounterRng rng(2024, 0);
  for (int trial = 0; trial < 50; ++trial) {
    DensityMatrix rho = random_state(rng);
    DensityMatrix d = rhs(rho, rates, drives);
    CHECK(std::abs(d.trace()) < 1e-8 * rates.gamma);
    // The derivative of a Hermitian state is Hermitian.
    CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() < 1e-8 * rates.gamma);
  }

  // Pure |2> with no drive: gamma/2 into each ground state.
  SystemRates decay_only;
  decay_only.gamma = two_pi * 7.2e6;
  DensityMatrix ex = diagonal_state(0.0, 0.0, 1.0);
  DensityMatrix d = rhs(ex, decay_only, Drives{});
  CHECK(d(0, 0).real() == doctest::Approx(decay_only.gamma / 2).epsilon(1e-12));
  CHECK(d(1, 1).real() == doctest::Approx(decay_only.gamma / 2).epsilon(1e-12));
  CHECK(d(2, 2).real() == doctest::Approx(-decay_only.gamma).epsilon(1e-12));
}

TEST_CASE("free evolution propagator against brute-force RK4") {
  SystemRates rates = reference_rates();
  const double mw_det = two_pi * 22e6;
  const double opt_det = two_pi * 5e6;
  const double t_final = 1e-7;

  CounterRng rng(31, 0);
  DensityMatrix rho0 = random_state(rng);
  DensityMatrix closed = free_evolve(rho0, rates, mw_det, opt_det, t_final);

  Drives idle;  // detunings only, no drive amplitude
  idle.mw_detuning = mw_det;
  idle.opt_detuning = opt_det;
  const int n = 4000;
  DensityMatrix stepped = rho0;
  for (int i = 0; i < n; ++i)
    stepped = step_rk4(stepped, rates, idle, t_final / n);

  CHECK((closed - stepped).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(closed.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("free evolution conserves trace and stays finite at long delay") {
  // Regression: with kappa_down + kappa_up well below gamma the population
  // cross term has the form (e^{-gamma t} - e^{-K t})/(K - gamma); the
  // naive e^{-gamma t} * expm1((gamma - K) t) route overflows past ~20 us.
  SystemRates rates;
  rates.gamma = two_pi * 7.2e6;
  rates.kappa_down = 1.0 / 4.7e-6;
  rates.kappa_up = 1e-3 / 4.7e-6;

  DensityMatrix rho = diagonal_state(0.1, 0.2, 0.7);
  for (double t : {1e-9, 1e-7, 5e-6, 2.35e-5, 1e-4}) {
    DensityMatrix out = free_evolve(rho, rates, 0.0, 0.0, t);
    CHECK(std::isfinite(out(0, 0).real()));
    CHECK(out.trace().real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(is_physical(out, {1e-10, 1e-8, 1e-8}));
  }
  // At 100 us everything has settled into the kappa-ratio ground manifold.
  DensityMatrix late = free_evolve(rho, rates, 0.0, 0.0, 1e-4);
  double k = rates.kappa_down + rates.kappa_up;
  CHECK(late(0, 0).real() == doctest::Approx(rates.kappa_down / k).epsilon(1e-8));
  CHECK(late(2, 2).real() < 1e-12);
}

TEST_CASE("free evolution matches the degenerate K = gamma branch") {
  // The K == gamma limit takes a dedicated series; approach it from both
  // sides and check continuity.
  DensityMatrix rho = diagonal_state(0.3, 0.2, 0.5);
  SystemRates eq;
  eq.gamma = 1e6;
  eq.kappa_down = 0.6e6;
  eq.kappa_up = 0.4e6;  // K = gamma exactly
  DensityMatrix at = free_evolve(rho, eq, 0.0, 0.0, 2e-6);

  SystemRates near = eq;
  near.kappa_up = 0.4e6 * (1 + 1e-9);
  DensityMatrix nearby = free_evolve(rho, near, 0.0, 0.0, 2e-6);
  CHECK((at - nearby).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("integrator step policy") {
  SystemRates rates = reference_rates();
  Drives drive;
  drive.opt_rabi = two_pi * 8e6;
  std::vector<TimelineEntry> timeline{{2e-7, drive, false}};
  DensityMatrix rho0 = diagonal_state(1.0, 0.0);

  double bound = stable_step_bound(rates, drive);
  CHECK(bound == doctest::Approx(1.0 / (50.0 * two_pi * 8e6)).epsilon(1e-12));

  IntegrateOptions too_coarse;
  too_coarse.dt = 2.0 * bound;
  CHECK_THROWS_AS(integrate(rho0, rates, timeline, too_coarse),
                  std::invalid_argument);

  // dt = 0 selects the bound automatically and runs clean.
  Trajectory traj = integrate(rho0, rates, timeline, {});
  CHECK(traj.front().t == 0.0);
  CHECK(traj.back().t == doctest::Approx(2e-7).epsilon(1e-12));
  CHECK(is_physical(traj.back().rho));

  // A trivial generator has no rate to bound the step.
  CHECK(stable_step_bound(SystemRates{}, Drives{}) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("ten thousand random RK4 steps stay physical") {
  // Property check over the whole parameter cube the experiments use:
  // rates up to 1e8 1/s, drives up to +-2pi * 30 MHz, detunings both signs.
  CounterRng rng(7777, 0);
  PhysicalTolerances tol;
  tol.eigenvalue = 1e-7;  // one unsymmetrized step may dip O(h^5) below zero
  int violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    SystemRates rates;
    rates.gamma = 1e8 * rng.uniform();
    rates.kappa_down = 1e6 * rng.uniform();
    rates.kappa_up = 1e6 * rng.uniform();
    rates.gamma_phi = 1e7 * rng.uniform();
    Drives d;
    d.opt_rabi = two_pi * 30e6 * rng.uniform();
    d.mw_rabi = two_pi * 30e6 * rng.uniform();
    d.opt_detuning = two_pi * 60e6 * (rng.uniform() - 0.5);
    d.mw_detuning = two_pi * 60e6 * (rng.uniform() - 0.5);
    d.mw_phase = two_pi * rng.uniform();

    DensityMatrix rho = random_state(rng);
    double h = stable_step_bound(rates, d) * (0.2 + 0.8 * rng.uniform());
    DensityMatrix out = step_rk4(rho, rates, d, h);
    out = 0.5 * (out + out.adjoint().eval());
    if (!is_physical(out, tol)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("driven steady state: analytic, integrated, nullspace") {
  const double gamma = two_pi * 7.2e6;
  const double kappa = 1.0 / 4.7e-6;
  const double omega = two_pi * 8e6;

  auto analytic = steady_state_analytic(gamma, kappa, omega);
  // Hand-evaluated from p0 = (g^2/W^2 + 1) p2, p1 = (g/2k) p2.
  CHECK(analytic[0] == doctest::Approx(0.016587016090707115).epsilon(1e-12));
  CHECK(analytic[1] == doctest::Approx(0.9742488866216094).epsilon(1e-12));
  CHECK(analytic[2] == doctest::Approx(0.00916409728768349).epsilon(1e-12));

  SystemRates rates;
  rates.gamma = gamma;
  rates.kappa_down = kappa;
  Drives drive;
  drive.opt_rabi = omega;

  DensityMatrix numeric = steady_state_numeric(rates, drive);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(numeric(i, i).real() - analytic[i]) < 1e-6);

  DensityMatrix null = steady_state_nullspace(rates, drive);
  CHECK((numeric - null).cwiseAbs().maxCoeff() < 1e-8);

  SUBCASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS(steady_state_analytic(gamma, kappa, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(steady_state_analytic(gamma, 0.0, omega),
                    std::invalid_argument);
  }
}

TEST_CASE("ideal pulses rotate the 0-1 subspace only") {
  DensityMatrix rho = diagonal_state(0.9, 0.0, 0.1);

  SUBCASE("pi pulse swaps the ground populations") {
    DensityMatrix out = apply_ideal_pulse(rho, 0.0, kPi);
    CHECK(out(0, 0).real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out(1, 1).real() == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(out(2, 2).real() == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("two pi/2 pulses compose to a pi pulse") {
    DensityMatrix two = apply_ideal_pulse(
        apply_ideal_pulse(rho, 0.3, kPi / 2), 0.3, kPi / 2);
    DensityMatrix one = apply_ideal_pulse(rho, 0.3, kPi);
    CHECK((two - one).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("rotation preserves physicality and trace") {
    CounterRng rng(5, 0);
    for (int i = 0; i < 20; ++i) {
      DensityMatrix r = random_state(rng);
      DensityMatrix out =
          apply_ideal_pulse(r, two_pi * rng.uniform(), two_pi * rng.uniform());
      CHECK(out.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(is_physical(out, {1e-9, 1e-9, 1e-7}));
    }
  }
  SUBCASE("pulse integrated with the master equation agrees when clean") {
    // A resonant 50 ns pi pulse at 10 MHz Rabi with no decay should match
    // the instantaneous rotation.
    SystemRates none;
    Drives d;
    d.mw_rabi = two_pi * 10e6;
    double width = 0.5 / 10e6;  // theta = Omega t = pi
    std::vector<TimelineEntry> timeline{{width, d, false}};
    Trajectory traj = integrate(rho, none, timeline, {});
    DensityMatrix ideal = apply_ideal_pulse(rho, 0.0, kPi);
    CHECK((traj.back().rho - ideal).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("integrate_observe hits boundaries and flags readout windows") {
  SystemRates rates = reference_rates();
  Drives pump;
  pump.opt_rabi = two_pi * 8e6;
  std::vector<TimelineEntry> timeline{
      {1e-7, pump, true},
      {0.5e-7, Drives{}, false},
  };
  DensityMatrix rho0 = diagonal_state(1.0, 0.0);

  std::vector<double> times;
  std::vector<bool> flags;
  IntegrateOptions opts;
  opts.sample_dt = 1e-8;
  integrate_observe(rho0, rates, timeline, opts,
                    [&](double t, const DensityMatrix& rho, bool readout) {
                      times.push_back(t);
                      flags.push_back(readout);
                      CHECK(rho.trace().real() ==
                            doctest::Approx(1.0).epsilon(1e-9));
                    });

  REQUIRE(!times.empty());
  CHECK(times.front() == 0.0);
  CHECK(times.back() == doctest::Approx(1.5e-7).epsilon(1e-12));
  for (std::size_t i = 1; i < times.size(); ++i) CHECK(times[i] > times[i - 1]);
  // Samples inside the pump window carry the readout flag; the tail does not.
  CHECK(flags[1] == true);
  CHECK(flags.back() == false);
}
