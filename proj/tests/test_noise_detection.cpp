// SPDX-License-Identifier: MIT
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "nv0/detection.hpp"
#include "nv0/noise.hpp"

using namespace nv0;

namespace {

NoiseModel qs_only(double sigma_hz) {
  NoiseModel n;
  n.quasi_static_sigma_hz = sigma_hz;
  n.seed = 17;
  return n;
}

// Sample mean and variance of trace values at a fixed time across shots.
struct Stats {
  double mean = 0, var = 0;
};
Stats shot_stats(const NoiseModel& noise, double at_t, double duration,
                 int shots) {
  double s = 0, ss = 0;
  for (int i = 0; i < shots; ++i) {
    double v = sample_detuning(noise, i, duration).at(at_t);
    s += v;
    ss += v * v;
  }
  Stats out;
  out.mean = s / shots;
  out.var = ss / shots - out.mean * out.mean;
  return out;
}

} // namespace

TEST_CASE("noise model validation") {
  CHECK_NOTHROW(validate(NoiseModel{}));
  NoiseModel neg;
  neg.quasi_static_sigma_hz = -1.0;
  CHECK_THROWS_AS(validate(neg), std::invalid_argument);

  NoiseModel half_hop;
  half_hop.hop_magnitude_hz = 1e6;  // magnitude without an interval
  CHECK_THROWS_AS(validate(half_hop), std::invalid_argument);
  half_hop.hop_magnitude_hz = 0;
  half_hop.hop_interval_mean = 1e-5;  // interval without a magnitude
  CHECK_THROWS_AS(validate(half_hop), std::invalid_argument);
}

TEST_CASE("detuning realizations replay exactly per (seed, shot)") {
  NoiseModel n = qs_only(2e6);
  n.ou_tau_c = 1e-6;
  n.ou_sigma_hz = 0.5e6;

  DetuningTrace a = sample_detuning(n, 42, 3e-6);
  DetuningTrace b = sample_detuning(n, 42, 3e-6);
  REQUIRE(a.edges.size() == b.edges.size());
  for (std::size_t i = 0; i < a.edges.size(); ++i)
    CHECK(a.edges[i] == b.edges[i]);
  for (std::size_t i = 0; i < a.value_hz.size(); ++i)
    CHECK(a.value_hz[i] == b.value_hz[i]);

  DetuningTrace c = sample_detuning(n, 43, 3e-6);
  CHECK(a.value_hz[0] != c.value_hz[0]);

  // Trace bookkeeping invariants.
  CHECK(a.edges.front() == 0.0);
  CHECK(a.edges.back() == doctest::Approx(3e-6).epsilon(1e-12));
  CHECK(a.edges.size() == a.value_hz.size() + 1);
}

TEST_CASE("quasi-static component is one gaussian piece per shot") {
  NoiseModel n = qs_only(2e6);
  DetuningTrace tr = sample_detuning(n, 0, 5e-6);
  CHECK(tr.value_hz.size() == 1);
  CHECK(tr.at(0.0) == tr.at(4.9e-6));  // constant across the shot

  const int shots = 3000;
  Stats st = shot_stats(n, 1e-6, 5e-6, shots);
  // 5-sigma band on the mean, 10% on sigma (N = 3000 gives ~2.6%).
  CHECK(std::abs(st.mean) < 5.0 * 2e6 / std::sqrt(double(shots)));
  CHECK(std::sqrt(st.var) == doctest::Approx(2e6).epsilon(0.10));
}

TEST_CASE("ornstein-uhlenbeck statistics") {
  NoiseModel n;
  n.ou_tau_c = 1e-6;
  n.ou_sigma_hz = 1e6;
  n.seed = 5;

  const double duration = 2.5e-6;
  const int shots = 3000;

  SUBCASE("stationary variance at both ends of the shot") {
    for (double at : {0.0, 2e-6}) {
      Stats st = shot_stats(n, at, duration, shots);
      CHECK(std::sqrt(st.var) == doctest::Approx(1e6).epsilon(0.10));
      CHECK(std::abs(st.mean) < 5.0 * 1e6 / std::sqrt(double(shots)));
    }
  }
  SUBCASE("autocorrelation decays by 1/e over tau_c") {
    double s0 = 0, s1 = 0, s01 = 0, s00 = 0;
    for (int i = 0; i < shots; ++i) {
      DetuningTrace tr = sample_detuning(n, i, duration);
      double x0 = tr.at(0.0), x1 = tr.at(1e-6);
      s0 += x0;
      s1 += x1;
      s01 += x0 * x1;
      s00 += x0 * x0;
    }
    double cov = s01 / shots - (s0 / shots) * (s1 / shots);
    double var = s00 / shots - (s0 / shots) * (s0 / shots);
    CHECK(cov / var == doctest::Approx(std::exp(-1.0)).epsilon(0.12));
  }
  SUBCASE("update grid resolves tau_c") {
    DetuningTrace tr = sample_detuning(n, 0, duration);
    // Steps of tau_c/64 over 2.5 tau_c: expect on the order of 160 pieces.
    CHECK(tr.value_hz.size() > 100);
    double dt = tr.edges[1] - tr.edges[0];
    CHECK(dt == doctest::Approx(n.ou_tau_c / 64).epsilon(1e-9));
  }
}

TEST_CASE("spectral hops start stationary and stay bounded") {
  NoiseModel n;
  n.hop_magnitude_hz = 3e6;
  n.hop_interval_mean = 1e-6;
  n.seed = 9;

  const double duration = 5e-6;
  double lo = 0, hi = 0;
  std::size_t total_pieces = 0;
  for (int i = 0; i < 500; ++i) {
    DetuningTrace tr = sample_detuning(n, i, duration);
    total_pieces += tr.value_hz.size();
    for (double v : tr.value_hz) {
      CHECK(std::abs(v) <= 3e6);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  // The stationary distribution is uniform on [-mag, mag]; 500 shots with
  // ~5 pieces each should visit both outer deciles.
  CHECK(lo < -0.8 * 3e6);
  CHECK(hi > 0.8 * 3e6);
  // Mean piece count per shot is roughly duration / interval + 1.
  double mean_pieces = double(total_pieces) / 500.0;
  CHECK(mean_pieces > 3.0);
  CHECK(mean_pieces < 10.0);

  SUBCASE("rare hops usually leave a single piece") {
    NoiseModel rare = n;
    rare.hop_interval_mean = 1.0;  // seconds; hops essentially never fire
    int single = 0;
    for (int i = 0; i < 200; ++i)
      if (sample_detuning(rare, i, duration).value_hz.size() == 1) ++single;
    CHECK(single > 190);
  }
}

TEST_CASE("optical detuning offset") {
  NoiseModel n;
  n.optical_sigma_hz = 11.7e6;
  n.seed = 99;
  CHECK(sample_optical_detuning(n, 3) == sample_optical_detuning(n, 3));
  CHECK(sample_optical_detuning(n, 3) != sample_optical_detuning(n, 4));

  NoiseModel off;
  CHECK(sample_optical_detuning(off, 3) == 0.0);

  double s = 0, ss = 0;
  const int shots = 3000;
  for (int i = 0; i < shots; ++i) {
    double v = sample_optical_detuning(n, i);
    s += v;
    ss += v * v;
  }
  double mean = s / shots;
  CHECK(std::abs(mean) < 5.0 * 11.7e6 / std::sqrt(double(shots)));
  CHECK(std::sqrt(ss / shots - mean * mean) ==
        doctest::Approx(11.7e6).epsilon(0.10));
}

TEST_CASE("count synthesis mean, noise, and determinism") {
  DetectorModel det;
  det.bin_width = 2e-9;
  det.collection_efficiency = 0.8;
  det.dark_rate = 1e5;
  det.shots = 1000;

  const std::size_t nbins = 400;
  std::vector<double> t(nbins), p2(nbins, 0.3);
  for (std::size_t i = 0; i < nbins; ++i) t[i] = (i + 0.5) * det.bin_width;
  const double gamma = 4.5e7;  // 1/s

  CountTrace a = synthesize_counts(t, p2, det, gamma, 7);
  CountTrace b = synthesize_counts(t, p2, det, gamma, 7);
  REQUIRE(a.counts.size() == nbins);
  for (std::size_t i = 0; i < nbins; ++i) CHECK(a.counts[i] == b.counts[i]);
  CHECK(a.bin_width == det.bin_width);

  // Expected mean per bin: shots*eta*gamma*p2*bin + dark*bin.
  double mu = det.shots * det.collection_efficiency * gamma * 0.3 *
                  det.bin_width +
              det.dark_rate * det.bin_width;
  double total = 0;
  for (double c : a.counts) {
    total += c;
    CHECK(c == std::floor(c));  // raw traces are integer counts
  }
  CHECK(total == doctest::Approx(mu * nbins).epsilon(0.05));
  for (std::size_t i = 0; i < nbins; ++i)
    CHECK(a.sigma[i] == doctest::Approx(std::sqrt(a.counts[i])));

  SUBCASE("negative populations emit dark counts only") {
    std::vector<double> under(nbins, -0.2);
    DetectorModel clean = det;
    clean.dark_rate = 0.0;
    CountTrace z = synthesize_counts(t, under, clean, gamma, 7);
    for (double c : z.counts) CHECK(c == 0.0);
  }
}

TEST_CASE("dark subtraction and smoothing") {
  CountTrace tr;
  tr.bin_width = 1e-9;
  for (int i = 0; i < 6; ++i) {
    tr.t.push_back((i + 0.5) * 1e-9);
    tr.counts.push_back(10.0 + i);
    tr.sigma.push_back(std::sqrt(10.0 + i));
  }

  SUBCASE("subtract_dark shifts counts and keeps sigma") {
    CountTrace out = subtract_dark(tr, 2e9);  // 2 counts per bin
    for (int i = 0; i < 6; ++i) {
      CHECK(out.counts[i] == doctest::Approx(tr.counts[i] - 2.0));
      CHECK(out.sigma[i] == tr.sigma[i]);
    }
    // Over-subtraction may go negative by design.
    CountTrace deep = subtract_dark(tr, 2e10);
    CHECK(deep.counts[0] < 0.0);
  }
  SUBCASE("five-point average preserves a constant trace") {
    CountTrace flat = tr;
    for (auto& c : flat.counts) c = 7.0;
    CountTrace out = moving_average_5(flat);
    for (double c : out.counts) CHECK(c == doctest::Approx(7.0));
  }
  SUBCASE("edge windows truncate") {
    CountTrace out = moving_average_5(tr);
    // First point averages indices 0..2, interior point 2 averages 0..4.
    CHECK(out.counts[0] == doctest::Approx((10.0 + 11.0 + 12.0) / 3.0));
    CHECK(out.counts[2] ==
          doctest::Approx((10.0 + 11.0 + 12.0 + 13.0 + 14.0) / 5.0));
    // Independent-bin error propagation: sqrt(sum sigma^2) / n.
    double expect = std::sqrt(10.0 + 11.0 + 12.0) / 3.0;
    CHECK(out.sigma[0] == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("too few points throw") {
    CountTrace tiny;
    tiny.t = {1, 2, 3, 4};
    tiny.counts = {1, 1, 1, 1};
    tiny.sigma = {1, 1, 1, 1};
    CHECK_THROWS_AS(moving_average_5(tiny), std::invalid_argument);
  }
}

TEST_CASE("windowed peak ratio") {
  CountTrace tr;
  tr.bin_width = 1e-9;
  // Window A on [0, 5) ns peaks at 100; window B on [5, 10) ns peaks at 25.
  std::vector<double> counts{80, 100, 90, 70, 60, 20, 25, 22, 18, 15};
  for (int i = 0; i < 10; ++i) {
    tr.t.push_back((i + 0.5) * 1e-9);
    tr.counts.push_back(counts[i]);
    tr.sigma.push_back(std::sqrt(counts[i]));
  }
  TimeWindow wa{0.0, 5e-9}, wb{5e-9, 10e-9};

  Ratio r = normalize_b_over_a(tr, wa, wb);
  CHECK(r.value == doctest::Approx(0.25).epsilon(1e-12));
  double expected_sigma =
      0.25 * std::sqrt(25.0 / (25.0 * 25.0) + 100.0 / (100.0 * 100.0));
  CHECK(r.sigma == doctest::Approx(expected_sigma).epsilon(1e-9));

  SUBCASE("empty window throws") {
    TimeWindow nothing{20e-9, 30e-9};
    CHECK_THROWS_AS(normalize_b_over_a(tr, nothing, wb), std::invalid_argument);
  }
  SUBCASE("non-positive A maximum throws") {
    CountTrace zero = tr;
    for (int i = 0; i < 5; ++i) zero.counts[i] = 0.0;
    CHECK_THROWS_AS(normalize_b_over_a(zero, wa, wb), std::invalid_argument);
  }
}

TEST_CASE("initialization fidelity normalization") {
  // A ratio of 0.2 against a 0.8 mixed reference: 1 - 0.2/1.6.
  CHECK(initialization_fidelity(0.2, 0.8) == doctest::Approx(0.875));
  // Perfectly dark readout is unit fidelity.
  CHECK(initialization_fidelity(0.0, 0.5) == doctest::Approx(1.0));
  // The completely mixed state itself reads 0.5 by construction.
  CHECK(initialization_fidelity(0.5, 0.5) == doctest::Approx(0.5));
}
