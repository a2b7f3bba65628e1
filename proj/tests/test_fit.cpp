// SPDX-License-Identifier: MIT
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "nv0/constants.hpp"
#include "nv0/fit.hpp"
#include "nv0/rng.hpp"

using namespace nv0;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / double(n - 1);
  return out;
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = a * std::pow(b / a, i / double(n - 1));
  return out;
}

// Model data plus reproducible gaussian noise of width sigma_n.
FitData make_data(const FitModel& model, const std::vector<double>& truth,
                  const std::vector<double>& x, double sigma_n,
                  std::uint64_t stream) {
  CounterRng rng(2025, stream);
  FitData d;
  d.x = x;
  for (double xi : x) {
    double y = eval(model, truth, xi);
    d.y.push_back(sigma_n > 0 ? y + sigma_n * rng.normal() : y);
    if (sigma_n > 0) d.sigma.push_back(sigma_n);
  }
  return d;
}

void check_round_trip(const FitModel& model, const std::vector<double>& truth,
                      const FitData& data, double rel_tol) {
  FitResult r = fit(model, data);
  CHECK(r.converged);
  REQUIRE(r.params.size() == truth.size());
  for (std::size_t j = 0; j < truth.size(); ++j) {
    INFO("parameter ", param_names(model)[j]);
    double scale = std::max(std::abs(truth[j]), 1e-30);
    bool close = std::abs(r.params[j] - truth[j]) / scale < rel_tol;
    bool covered = std::abs(r.params[j] - truth[j]) < 5.0 * r.std_errors[j];
    CHECK((close || covered));
  }
}

} // namespace

TEST_CASE("round trip: exponential recovery") {
  FitModel m{FitModelKind::ExpRecovery, 0.0};
  std::vector<double> truth{1.0, 0.0278, 4.7e-6};
  FitData d = make_data(m, truth, logspace(4.7e-7, 2.35e-5, 16), 0.01, 1);
  check_round_trip(m, truth, d, 0.05);
}

TEST_CASE("round trip: damped cosine") {
  FitModel m{FitModelKind::DampedCosine, 0.0};
  std::vector<double> truth{0.45, two_pi * 14e6, 6e-6, 0.5};
  FitData d = make_data(m, truth, linspace(2.5e-9, 1.5e-7, 60), 0.01, 2);
  check_round_trip(m, truth, d, 0.05);
}

TEST_CASE("round trip: detuned damped cosine") {
  FitModel m{FitModelKind::DetunedDampedCosine, 0.0};
  std::vector<double> truth{0.4, two_pi * 22e6, 0.3, 54e-9, 0.55};
  FitData d = make_data(m, truth, linspace(2e-9, 1.2e-7, 60), 0.008, 3);
  FitResult r = fit(m, d);
  CHECK(r.converged);
  // (A, phi) and (-A, phi + pi) describe the same fringe, and phi is only
  // defined modulo 2 pi; compare in canonical gauge.
  double amp = r.params[0], phase = r.params[2];
  if (amp < 0) {
    amp = -amp;
    phase += two_pi / 2;
  }
  double dphi = std::remainder(phase - truth[2], two_pi);
  CHECK(amp == doctest::Approx(truth[0]).epsilon(0.08));
  CHECK(std::abs(dphi) < 0.1);
  CHECK(r.params[1] == doctest::Approx(truth[1]).epsilon(0.02));
  CHECK(r.params[3] == doctest::Approx(truth[3]).epsilon(0.15));
  CHECK(r.params[4] == doctest::Approx(truth[4]).epsilon(0.05));
}

TEST_CASE("round trip: gaussian peak") {
  FitModel m{FitModelKind::GaussianPeak, 0.0};
  std::vector<double> truth{0.8, 13.042e9, 19e6 / 2.3548200450309493, 0.1};
  FitData d =
      make_data(m, truth, linspace(13.042e9 - 50e6, 13.042e9 + 50e6, 51),
                0.01, 4);
  check_round_trip(m, truth, d, 0.03);
}

TEST_CASE("round trip: echo decay, fixed and co-fit T1") {
  SUBCASE("held T1") {
    FitModel m{FitModelKind::EchoDecay, 1.5e-6};
    std::vector<double> truth{0.5, 1.8e-6, 0.3};
    FitData d = make_data(m, truth, linspace(2.5e-7, 4e-6, 16), 0.008, 5);
    check_round_trip(m, truth, d, 0.08);
  }
  SUBCASE("free T1") {
    FitModel m{FitModelKind::EchoDecay, 0.0};
    std::vector<double> truth{0.5, 1.8e-6, 1.5e-6, 0.3};
    FitData d = make_data(m, truth, linspace(1e-7, 6e-6, 32), 0.004, 6);
    // T1 and T2 trade against each other; accept looser recovery but
    // insist the errors cover the truth.
    check_round_trip(m, truth, d, 0.20);
  }
}

TEST_CASE("noiseless data is recovered essentially exactly") {
  FitModel m{FitModelKind::DampedCosine, 0.0};
  std::vector<double> truth{0.48, two_pi * 14e6, 5.5e-6, 0.515};
  FitData d = make_data(m, truth, linspace(2.5e-9, 1.5e-7, 60), 0.0, 0);
  FitResult r = fit(m, d);
  CHECK(r.converged);
  for (std::size_t j = 0; j < truth.size(); ++j)
    CHECK(r.params[j] ==
          doctest::Approx(truth[j]).epsilon(j == 2 ? 1e-3 : 1e-6));
}

TEST_CASE("frequencies between spectral bins do not strand the optimiser") {
  // Regression: on the 60-point Rabi grid the coarse spectrum estimate
  // rounds 19.335 MHz up to the 20.0 MHz bin, and a single-start fit used
  // to converge there with a collapsed T2. The multi-start wrapper must
  // recover the true frequency.
  FitModel m{FitModelKind::DampedCosine, 0.0};
  for (double f_mhz : {9.67, 13.68, 19.335, 23.68, 27.0}) {
    std::vector<double> truth{0.5, two_pi * f_mhz * 1e6, 6e-6, 0.5};
    FitData d = make_data(m, truth, linspace(2.5e-9, 1.5e-7, 60), 0.0, 0);
    FitResult r = fit(m, d);
    INFO("f = ", f_mhz, " MHz");
    CHECK(r.params[1] == doctest::Approx(truth[1]).epsilon(5e-3));
  }
}

TEST_CASE("empty sigma means an unweighted fit") {
  FitModel m{FitModelKind::ExpRecovery, 0.0};
  std::vector<double> truth{1.0, 0.1, 3e-6};
  FitData weighted = make_data(m, truth, logspace(3e-7, 1.5e-5, 20), 0.01, 7);
  FitData bare = weighted;
  bare.sigma.clear();

  FitResult rw = fit(m, weighted);
  FitResult rb = fit(m, bare);
  CHECK(rb.converged);
  // Same uniform weights either way, so the same minimum.
  for (std::size_t j = 0; j < truth.size(); ++j)
    CHECK(rb.params[j] == doctest::Approx(rw.params[j]).epsilon(1e-8));
}

TEST_CASE("fit rejects malformed inputs") {
  FitModel m{FitModelKind::ExpRecovery, 0.0};
  FitData d;
  d.x = {1, 2, 3, 4};
  d.y = {1, 2, 3};  // length mismatch
  CHECK_THROWS_AS(fit(m, d), std::invalid_argument);

  d.y = {1, 2, 3, 4};
  d.sigma = {1, 1, -1, 1};  // non-positive weight
  CHECK_THROWS_AS(fit(m, d), std::invalid_argument);

  d.sigma = {1, 1, 1, 1};
  CHECK_THROWS_AS(fit(m, d, {1.0, 2.0}, default_bounds(m, d)),
                  std::invalid_argument);  // wrong init arity

  CHECK_THROWS_AS(eval(m, {1.0, 0.5, -1e-6}, 1e-6), std::invalid_argument);
}

TEST_CASE("deterministic fits byte for byte") {
  FitModel m{FitModelKind::DetunedDampedCosine, 0.0};
  std::vector<double> truth{0.4, two_pi * 22e6, 0.1, 60e-9, 0.5};
  FitData d = make_data(m, truth, linspace(2e-9, 1.2e-7, 60), 0.01, 8);
  FitResult a = fit(m, d);
  FitResult b = fit(m, d);
  REQUIRE(a.params.size() == b.params.size());
  for (std::size_t j = 0; j < a.params.size(); ++j) {
    CHECK(a.params[j] == b.params[j]);
    CHECK(a.std_errors[j] == b.std_errors[j]);
  }
  CHECK(a.chi2_reduced == b.chi2_reduced);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("extraction wrappers map parameters to physics") {
  SUBCASE("t1 from recovery") {
    FitModel m{FitModelKind::ExpRecovery, 0.0};
    std::vector<double> truth{0.95, 0.05, 4.7e-6};
    FitData d = make_data(m, truth, logspace(4.7e-7, 2.35e-5, 16), 0.01, 9);
    T1Extraction t = extract_t1(d.x, d.y, d.sigma);
    CHECK(t.t1 == doctest::Approx(4.7e-6).epsilon(0.05));
    CHECK(t.t1_err > 0.0);
    CHECK(t.yinf == doctest::Approx(0.95).epsilon(0.05));
  }
  SUBCASE("rabi frequency in cycles") {
    FitModel m{FitModelKind::DampedCosine, 0.0};
    std::vector<double> truth{0.45, two_pi * 14e6, 6e-6, 0.5};
    FitData d = make_data(m, truth, linspace(2.5e-9, 1.5e-7, 60), 0.01, 10);
    RabiExtraction r = extract_rabi(d);
    CHECK(r.rabi_hz == doctest::Approx(14e6).epsilon(0.01));
    CHECK(r.t2_rabi == doctest::Approx(6e-6).epsilon(0.5));
  }
  SUBCASE("ramsey detuning and dephasing time") {
    FitModel m{FitModelKind::DetunedDampedCosine, 0.0};
    std::vector<double> truth{0.4, two_pi * 22e6, 0.2, 54e-9, 0.55};
    FitData d = make_data(m, truth, linspace(2e-9, 1.2e-7, 60), 0.008, 11);
    RamseyExtraction r = extract_ramsey(d);
    CHECK(r.detuning_hz == doctest::Approx(22e6).epsilon(0.02));
    CHECK(r.t2_star == doctest::Approx(54e-9).epsilon(0.15));
  }
  SUBCASE("cpmg coherence time with T1 held") {
    FitModel m{FitModelKind::EchoDecay, 1.5e-6};
    std::vector<double> truth{0.5, 1.8e-6, 0.3};
    FitData d = make_data(m, truth, linspace(2.5e-7, 4e-6, 16), 0.008, 12);
    CpmgExtraction c = extract_cpmg(d, 1.5e-6);
    CHECK(c.t2 == doctest::Approx(1.8e-6).epsilon(0.1));
    CHECK(c.t1_used == 1.5e-6);
  }
  SUBCASE("oder line center and width") {
    FitModel m{FitModelKind::GaussianPeak, 0.0};
    double w = 19e6 / 2.3548200450309493;
    std::vector<double> truth{0.8, 13.042e9, w, 0.1};
    FitData d =
        make_data(m, truth, linspace(13.042e9 - 50e6, 13.042e9 + 50e6, 51),
                  0.01, 13);
    OderExtraction o = extract_oder(d);
    // Center recovery is limited by the injected noise, not the grid:
    // expect a couple hundred kHz of scatter on a 13 GHz line.
    CHECK(std::abs(o.center_hz - 13.042e9) < 1e6);
    CHECK(std::abs(o.center_hz - 13.042e9) < 5.0 * o.center_err_hz);
    CHECK(o.fwhm_hz == doctest::Approx(19e6).epsilon(0.05));
  }
}

TEST_CASE("fit report names the model and convergence state") {
  FitModel m{FitModelKind::GaussianPeak, 0.0};
  std::vector<double> truth{1.0, 0.0, 1.0, 0.0};
  FitData d = make_data(m, truth, linspace(-4, 4, 41), 0.01, 14);
  FitResult r = fit(m, d);
  std::string report = fit_report(m, r);
  CHECK(report.find("GaussianPeak") != std::string::npos);
  CHECK(report.find("center") != std::string::npos);
  CHECK(report.find("converged") != std::string::npos);
  CHECK(report.find("chi2") != std::string::npos);
}
