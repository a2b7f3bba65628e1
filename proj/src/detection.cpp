// SPDX-License-Identifier: MIT
#include "nv0/detection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nv0/rng.hpp"

namespace nv0 {

void validate(const DetectorModel& det) {
  if (!(det.bin_width > 0))
    throw std::invalid_argument("bin_width must be positive");
  if (!(det.collection_efficiency > 0) || det.collection_efficiency > 1)
    throw std::invalid_argument("collection_efficiency must be in (0, 1]");
  if (det.dark_rate < 0)
    throw std::invalid_argument("dark_rate must be non-negative");
  if (det.shots < 1) throw std::invalid_argument("shots must be at least 1");
}

CountTrace synthesize_counts(const std::vector<double>& t,
                             const std::vector<double>& p2,
                             const DetectorModel& det, double gamma,
                             std::uint64_t seed) {
  validate(det);
  if (t.size() != p2.size())
    throw std::invalid_argument("time and population arrays differ in length");
  if (gamma < 0) throw std::invalid_argument("gamma must be non-negative");

  CountTrace trace;
  trace.t = t;
  trace.bin_width = det.bin_width;
  trace.counts.reserve(t.size());
  trace.sigma.reserve(t.size());
  // Stream picked well clear of the per-shot noise channels (shot*4 + ch),
  // so a shared top-level seed never correlates counts with detuning draws.
  CounterRng rng(seed, 1ull << 63);
  const double shots = static_cast<double>(det.shots);
  for (double pop : p2) {
    double mean = shots * det.collection_efficiency * gamma *
                      std::max(pop, 0.0) * det.bin_width +
                  det.dark_rate * det.bin_width;
    double n = static_cast<double>(rng.poisson(mean));
    trace.counts.push_back(n);
    trace.sigma.push_back(std::sqrt(n));
  }
  return trace;
}

CountTrace subtract_dark(const CountTrace& trace, double dark_rate) {
  CountTrace out = trace;
  const double pedestal = dark_rate * trace.bin_width;
  for (double& c : out.counts) c -= pedestal;
  return out;
}

CountTrace moving_average_5(const CountTrace& trace) {
  const std::size_t n = trace.counts.size();
  if (n < 5)
    throw std::invalid_argument("moving_average_5 needs at least 5 points");
  CountTrace out = trace;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i >= 2 ? i - 2 : 0;
    std::size_t hi = std::min(i + 2, n - 1);
    double sum = 0, var = 0;
    for (std::size_t j = lo; j <= hi; ++j) {
      sum += trace.counts[j];
      var += trace.sigma[j] * trace.sigma[j];
    }
    double w = static_cast<double>(hi - lo + 1);
    out.counts[i] = sum / w;
    out.sigma[i] = std::sqrt(var) / w;
  }
  return out;
}

namespace {

// Index of the maximum count within [t_lo, t_hi), or npos if empty.
std::size_t window_argmax(const CountTrace& trace, const TimeWindow& w) {
  std::size_t best = static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    if (trace.t[i] < w.t_lo || trace.t[i] >= w.t_hi) continue;
    if (best == static_cast<std::size_t>(-1) ||
        trace.counts[i] > trace.counts[best])
      best = i;
  }
  return best;
}

} // namespace

Ratio normalize_b_over_a(const CountTrace& trace, const TimeWindow& window_a,
                         const TimeWindow& window_b) {
  if (trace.t.size() != trace.counts.size() ||
      trace.t.size() != trace.sigma.size())
    throw std::invalid_argument("count trace arrays differ in length");
  std::size_t ia = window_argmax(trace, window_a);
  std::size_t ib = window_argmax(trace, window_b);
  if (ia == static_cast<std::size_t>(-1))
    throw std::invalid_argument("window A contains no samples");
  if (ib == static_cast<std::size_t>(-1))
    throw std::invalid_argument("window B contains no samples");

  double a = trace.counts[ia];
  double b = trace.counts[ib];
  double sa = trace.sigma[ia];
  double sb = trace.sigma[ib];
  if (!(a > 0))
    throw std::invalid_argument("window A maximum is not positive");

  Ratio r;
  r.value = b / a;
  // First-order propagation; guards the b = 0 corner where the relative
  // form degenerates.
  r.sigma = std::sqrt((sb * sb) / (a * a) +
                      (b * b) * (sa * sa) / (a * a * a * a));
  return r;
}

double initialization_fidelity(double ratio_zero_width, double mixed_reference) {
  if (!(mixed_reference > 0))
    throw std::invalid_argument("mixed_reference must be positive");
  return 1.0 - ratio_zero_width / (2.0 * mixed_reference);
}

} // namespace nv0
