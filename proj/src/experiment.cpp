// SPDX-License-Identifier: MIT
#include "nv0/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nv0/constants.hpp"
#include "nv0/rng.hpp"

namespace nv0 {

namespace {

// Counts-proxy RNG streams start here; per-shot noise channels use
// shot_index * 4 + channel and stay far below this.
constexpr std::uint64_t kCountsStreamBase = 1ull << 62;

bool has_stochastic_detuning(const NoiseModel& n) {
  return n.quasi_static_sigma_hz > 0.0 || n.ou_sigma_hz > 0.0 ||
         n.hop_magnitude_hz > 0.0;
}

double timeline_duration(const std::vector<TimelineEntry>& tl) {
  double total = 0.0;
  for (const TimelineEntry& e : tl) total += e.duration;
  return total;
}

// Receives (t_mid, weight, mean excited population) for every integration
// chunk; granularity caps the chunk length so free spans still resolve
// individual detector bins.
struct BinAccumulator {
  double granularity = 0.0;
  std::function<void(double, double, double)> add;
};

// Walk the piecewise-constant detuning offset over [a, b), calling
// fn(lo, hi, offset_hz) per constant piece. An empty trace is one piece at
// zero offset; slivers past the last edge extend the final value.
template <typename F>
void for_intervals(const DetuningTrace& tr, double a, double b, F&& fn) {
  if (b <= a) return;
  if (tr.value_hz.empty()) {
    fn(a, b, 0.0);
    return;
  }
  const std::size_t n = tr.value_hz.size();
  std::size_t i = static_cast<std::size_t>(
      std::upper_bound(tr.edges.begin(), tr.edges.end(), a) - tr.edges.begin());
  i = (i > 0) ? i - 1 : 0;
  if (i >= n) i = n - 1;
  double t = a;
  while (t < b) {
    double hi = (i + 1 < n) ? std::min(tr.edges[i + 1], b) : b;
    if (hi > t) fn(t, hi, tr.value_hz[i]);
    t = hi;
    if (i + 1 < n)
      ++i;
    else
      break;
  }
  if (t < b) fn(t, b, tr.value_hz[n - 1]);
}

// Drift-free segment: exact propagation, optionally chopped so the
// accumulator sees chunks no longer than its granularity. The mean excited
// population over a chunk is the exact integral of the exponential decay.
void advance_free(DensityMatrix& rho, const SystemRates& rates, const Drives& d,
                  double t_abs, double len, const BinAccumulator* acc) {
  if (len <= 0.0) return;
  if (acc && acc->add) {
    long pieces = 1;
    if (acc->granularity > 0.0)
      pieces = std::max<long>(
          1, static_cast<long>(std::ceil(len / acc->granularity - 1e-9)));
    double h = len / static_cast<double>(pieces);
    for (long k = 0; k < pieces; ++k) {
      double p2 = rho(2, 2).real();
      double mean = p2;
      if (rates.gamma > 0.0 && h > 0.0)
        mean = p2 * (-std::expm1(-rates.gamma * h)) / (rates.gamma * h);
      acc->add(t_abs + (k + 0.5) * h, h, mean);
      rho = free_evolve(rho, rates, d.mw_detuning, d.opt_detuning, h);
    }
  } else {
    rho = free_evolve(rho, rates, d.mw_detuning, d.opt_detuning, len);
  }
}

void advance_driven(DensityMatrix& rho, const SystemRates& rates,
                    const Drives& d, double t_abs, double len,
                    const BinAccumulator* acc) {
  if (len <= 0.0) return;
  double dt = std::min(stable_step_bound(rates, d), len);
  if (acc && acc->granularity > 0.0) dt = std::min(dt, acc->granularity);
  long n = std::max<long>(1, static_cast<long>(std::ceil(len / dt - 1e-12)));
  double h = len / static_cast<double>(n);
  for (long k = 0; k < n; ++k) {
    double p2a = rho(2, 2).real();
    rho = step_rk4(rho, rates, d, h);
    if (acc && acc->add)
      acc->add(t_abs + (k + 0.5) * h, h, 0.5 * (p2a + rho(2, 2).real()));
  }
  rho = 0.5 * (rho + rho.adjoint().eval());
}

// Propagate one shot across `entries`, with the shot's microwave detuning
// offsets (trace time zero = start of `entries`) and optical offset folded
// into the drives. With ideal_pulses, microwave segments become exact
// rotations followed by idle evolution of the same length, so the time
// axis and the relaxation during the pulse are preserved.
DensityMatrix propagate_shot(DensityMatrix rho, const SystemRates& rates,
                             const std::vector<TimelineEntry>& entries,
                             const DetuningTrace& mw_off, double opt_off_hz,
                             bool ideal_pulses, const BinAccumulator* acc) {
  double t = 0.0;
  for (const TimelineEntry& e : entries) {
    double t_end = t + e.duration;
    Drives base = e.drives;
    base.opt_detuning += two_pi * opt_off_hz;
    if (ideal_pulses && base.mw_rabi != 0.0) {
      rho = apply_ideal_pulse(rho, base.mw_phase, base.mw_rabi * e.duration);
      base.mw_rabi = 0.0;
    }
    for_intervals(mw_off, t, t_end, [&](double a, double b, double off_hz) {
      Drives d = base;
      d.mw_detuning += two_pi * off_hz;
      if (d.opt_rabi != 0.0 || d.mw_rabi != 0.0)
        advance_driven(rho, rates, d, a, b - a, acc);
      else
        advance_free(rho, rates, d, a, b - a, acc);
    });
    t = t_end;
  }
  return rho;
}

// B/A proxy with Poisson counting noise: A is the configured window-A count
// level, B is drawn with mean ratio * A. counts_per_point <= 0 turns the
// counting noise off and reports the ratio exactly with sigma 0.
SweepPoint make_point(double x, double ratio, const ExperimentConfig& cfg,
                      std::size_t point_index) {
  SweepPoint pt;
  pt.x = x;
  if (cfg.counts_per_point <= 0.0) {
    pt.value = ratio;
    pt.sigma = 0.0;
    return pt;
  }
  CounterRng rng(cfg.seed, kCountsStreamBase + point_index);
  double a = cfg.counts_per_point;
  double b = static_cast<double>(rng.poisson(std::max(ratio, 0.0) * a));
  pt.value = b / a;
  pt.sigma = std::max(std::sqrt(b), 1.0) / a;
  return pt;
}

// Shared population-mode sweep engine. All sequences of one sweep come from
// the same builder and share their first (init) segment, and the optical
// pumping never builds 0-1 coherence from a diagonal start, so microwave
// detuning noise cannot touch it: the post-init state is computed once.
// A per-shot optical offset would break that, so in that case the init is
// folded into the shot loop.
SweepResult run_sweep(const ExperimentConfig& cfg,
                      const std::vector<PulseSequence>& seqs, std::string name,
                      std::string x_label, const std::vector<double>& xs) {
  if (seqs.size() != xs.size())
    throw std::logic_error("sweep sequences and x values differ in length");
  validate(cfg.noise);
  for (const PulseSequence& s : seqs) validate(s);

  if (cfg.readout_mode == ReadoutMode::Trace) {
    // Full photon-record pipeline per point: synthesize the binned trace,
    // run the count-analysis chain, report the windowed B/A ratio.
    SweepResult out;
    out.experiment = std::move(name);
    out.x_label = std::move(x_label);
    out.points.reserve(seqs.size());
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      CountTrace raw = run_trace(cfg, seqs[i]);
      Ratio r = trace_ratio(raw, seqs[i], cfg.detector.dark_rate);
      out.points.push_back({xs[i], r.value, r.sigma});
    }
    return out;
  }

  SystemRates rates = rates_at(cfg.physics, cfg.noise);
  DensityMatrix rho0 = initial_state(cfg.physics, rates);
  double p0_ref = rho0(0, 0).real();
  if (p0_ref <= 0.0)
    throw std::runtime_error(
        "initial |0> population is zero; B/A normalization is undefined");

  bool stochastic = has_stochastic_detuning(cfg.noise) ||
                    cfg.noise.optical_sigma_hz > 0.0;
  std::uint64_t shots = stochastic ? std::max<std::uint64_t>(1, cfg.trajectories)
                                   : 1;
  bool share_init = cfg.noise.optical_sigma_hz == 0.0;

  DensityMatrix post_init = rho0;
  if (share_init && !seqs.empty()) {
    std::vector<TimelineEntry> tl0 = expand_to_drives(seqs.front());
    if (!tl0.empty())
      post_init = propagate_shot(rho0, rates, {tl0.front()}, DetuningTrace{},
                                 0.0, cfg.ideal_pulses, nullptr);
  }

  SweepResult out;
  out.experiment = std::move(name);
  out.x_label = std::move(x_label);
  out.points.reserve(seqs.size());

  for (std::size_t i = 0; i < seqs.size(); ++i) {
    std::vector<TimelineEntry> tl = expand_to_drives(seqs[i]);
    // The observable is the |0> population at the start of the final
    // readout pulse, which is what the count peak in window B measures.
    if (!tl.empty() && tl.back().readout) tl.pop_back();

    std::vector<TimelineEntry> shot_tl;
    DensityMatrix start;
    if (share_init && !tl.empty()) {
      shot_tl.assign(tl.begin() + 1, tl.end());
      start = post_init;
    } else {
      shot_tl = tl;
      start = rho0;
    }
    double dur = timeline_duration(shot_tl);

    double mean_p0 = 0.0;
    for (std::uint64_t s = 0; s < shots; ++s) {
      std::uint64_t shot_index = i * shots + s;
      DetuningTrace tr;
      double opt_off = 0.0;
      if (stochastic && dur > 0.0) {
        tr = sample_detuning(cfg.noise, shot_index, dur);
        opt_off = sample_optical_detuning(cfg.noise, shot_index);
      }
      DensityMatrix rho = propagate_shot(start, rates, shot_tl, tr, opt_off,
                                         cfg.ideal_pulses, nullptr);
      mean_p0 += rho(0, 0).real();
    }
    mean_p0 /= static_cast<double>(shots);
    out.points.push_back(make_point(xs[i], mean_p0 / p0_ref, cfg, i));
  }
  return out;
}

bool looks_like_header(const std::string& line) {
  for (char c : line) {
    if (std::isalpha(static_cast<unsigned char>(c)) && c != 'e' && c != 'E' &&
        c != 'n' && c != 'a' && c != 'i' && c != 'f')
      return true;
  }
  return false;
}

} // namespace

double splitting_hz(const PhysicsConfig& phys) {
  return ground_state_splitting({phys.lambda_hz, phys.eps_perp_hz});
}

SystemRates rates_at(const PhysicsConfig& phys, const NoiseModel& noise) {
  SystemRates rates;
  rates.gamma = two_pi * phys.gamma_hz;
  rates.gamma_phi = two_pi * noise.markovian_dephasing_hz;

  double delta = two_pi * splitting_hz(phys);
  if (phys.t1_override > 0.0) {
    // Total 0-1 relaxation pinned by hand, split by detailed balance at the
    // configured temperature.
    double ktot = 1.0 / phys.t1_override;
    double n = bose_einstein(delta, phys.temperature);
    rates.kappa_down = ktot * (n + 1.0) / (2.0 * n + 1.0);
    rates.kappa_up = ktot * n / (2.0 * n + 1.0);
  } else {
    double a = phys.coupling_a > 0.0
                   ? phys.coupling_a
                   : calibrate_coupling_a(phys.t1_ref, phys.t_ref, delta);
    UpDownRates ud = phonon_updown_rates({a, delta, phys.temperature});
    rates.kappa_down = ud.down;
    rates.kappa_up = ud.up;
  }
  return rates;
}

DensityMatrix initial_state(const PhysicsConfig& phys, const SystemRates& rates) {
  double p0;
  if (phys.initial_p0 >= 0.0) {
    if (phys.initial_p0 > 1.0)
      throw std::invalid_argument("initial_p0 must lie in [0, 1]");
    p0 = phys.initial_p0;
  } else {
    double k = rates.kappa_down + rates.kappa_up;
    p0 = (k > 0.0) ? rates.kappa_down / k : 1.0;
  }
  return diagonal_state(p0, 1.0 - p0, 0.0);
}

SweepResult run_t1(const ExperimentConfig& cfg, const std::vector<double>& delays) {
  return run_sweep(cfg, build_t1_pump_probe(delays, cfg.sequence), "t1",
                   "delay_s", delays);
}

SweepResult run_rabi(const ExperimentConfig& cfg, const std::vector<double>& widths,
                     double mw_rabi_hz) {
  return run_sweep(cfg, build_rabi(widths, mw_rabi_hz, cfg.sequence), "rabi",
                   "width_s", widths);
}

SweepResult run_ramsey(const ExperimentConfig& cfg,
                       const std::vector<double>& delays, double detuning_hz) {
  return run_sweep(cfg, build_ramsey(delays, detuning_hz, cfg.sequence),
                   "ramsey", "delay_s", delays);
}

SweepResult run_hahn_echo(const ExperimentConfig& cfg,
                          const std::vector<double>& total_times) {
  return run_sweep(cfg, build_hahn_echo(total_times, cfg.sequence), "hahn_echo",
                   "total_time_s", total_times);
}

SweepResult run_cpmg(const ExperimentConfig& cfg, int m,
                     const std::vector<double>& total_times) {
  return run_sweep(cfg, build_cpmg(m, total_times, cfg.sequence),
                   "cpmg" + std::to_string(m), "total_time_s", total_times);
}

SweepResult run_oder(const ExperimentConfig& cfg,
                     const std::vector<double>& mw_freqs_hz,
                     const OderParams& base) {
  std::vector<PulseSequence> seqs;
  seqs.reserve(mw_freqs_hz.size());
  for (double f : mw_freqs_hz) {
    OderParams p = base;
    p.mw_freq_hz = f;
    seqs.push_back(build_oder(p));
  }
  return run_sweep(cfg, seqs, "oder", "mw_freq_hz", mw_freqs_hz);
}

CountTrace run_trace(const ExperimentConfig& cfg, const PulseSequence& seq) {
  validate(seq);
  validate(cfg.noise);
  validate(cfg.detector);

  SystemRates rates = rates_at(cfg.physics, cfg.noise);
  DensityMatrix rho0 = initial_state(cfg.physics, rates);
  std::vector<TimelineEntry> tl = expand_to_drives(seq);
  double total = timeline_duration(tl);
  double bw = cfg.detector.bin_width;
  std::size_t nbins = static_cast<std::size_t>(std::floor(total / bw + 1e-9));
  if (nbins == 0)
    throw std::invalid_argument("sequence is shorter than one detector bin");

  std::vector<double> wp2(nbins, 0.0);  // time-weighted population sums
  std::vector<double> w(nbins, 0.0);    // accumulated weights

  BinAccumulator acc;
  acc.granularity = bw;
  acc.add = [&](double t_mid, double weight, double p2) {
    // Spread the chunk over the bins it overlaps.
    double lo = t_mid - 0.5 * weight;
    double hi = t_mid + 0.5 * weight;
    long k0 = std::max(0L, static_cast<long>(std::floor(lo / bw)));
    long k1 = std::min(static_cast<long>(nbins) - 1,
                       static_cast<long>(std::floor(hi / bw)));
    for (long k = k0; k <= k1; ++k) {
      double ov = std::min(hi, (k + 1) * bw) - std::max(lo, k * bw);
      if (ov <= 0.0) continue;
      wp2[k] += ov * p2;
      w[k] += ov;
    }
  };

  bool stochastic = has_stochastic_detuning(cfg.noise) ||
                    cfg.noise.optical_sigma_hz > 0.0;
  std::uint64_t mc = stochastic ? std::max<std::uint64_t>(1, cfg.trajectories)
                                : 1;
  for (std::uint64_t s = 0; s < mc; ++s) {
    DetuningTrace tr;
    double opt_off = 0.0;
    if (stochastic) {
      tr = sample_detuning(cfg.noise, s, total);
      opt_off = sample_optical_detuning(cfg.noise, s);
    }
    propagate_shot(rho0, rates, tl, tr, opt_off, cfg.ideal_pulses, &acc);
  }

  std::vector<double> centers(nbins), p2m(nbins);
  for (std::size_t k = 0; k < nbins; ++k) {
    centers[k] = (static_cast<double>(k) + 0.5) * bw;
    p2m[k] = (w[k] > 0.0) ? wp2[k] / w[k] : 0.0;
  }
  DetectorModel det = cfg.detector;
  det.shots = std::max<std::uint64_t>(1, cfg.trajectories);
  return synthesize_counts(centers, p2m, det, rates.gamma, cfg.seed);
}

Ratio trace_ratio(const CountTrace& raw, const PulseSequence& seq,
                  double dark_rate) {
  CountTrace chain = moving_average_5(subtract_dark(raw, dark_rate));
  // Window A is the first readout-flagged segment, window B the last.
  double t0 = 0.0, a_lo = -1.0, a_hi = 0.0, b_lo = -1.0, b_hi = 0.0;
  for (const Segment& s : seq.segments) {
    if (s.readout) {
      if (a_lo < 0.0) {
        a_lo = t0;
        a_hi = t0 + s.duration;
      }
      b_lo = t0;
      b_hi = t0 + s.duration;
    }
    t0 += s.duration;
  }
  if (a_lo < 0.0 || b_lo <= a_lo)
    throw std::invalid_argument(
        "B/A normalization needs two readout-flagged pulses");
  return normalize_b_over_a(chain, {a_lo, a_hi}, {b_lo, b_hi});
}

InitFidelityResult run_init_fidelity(const ExperimentConfig& cfg,
                                     double init_width, double ro_width) {
  SequenceDefaults defs = cfg.sequence;
  defs.init_width = init_width;
  defs.ro_width = ro_width;
  const double gap = 1e-8;
  PulseSequence seq = build_t1_pump_probe({gap}, defs).front();

  InitFidelityResult res;
  res.trace = run_trace(cfg, seq);
  res.b_over_a = trace_ratio(res.trace, seq, cfg.detector.dark_rate);

  SystemRates rates = rates_at(cfg.physics, cfg.noise);
  double p0_ref = initial_state(cfg.physics, rates)(0, 0).real();
  if (p0_ref <= 0.0)
    throw std::runtime_error(
        "initial |0> population is zero; the mixed-state reference is undefined");
  // B/A the completely mixed state would give, fixing the fidelity scale.
  double mixed_ref = 0.5 / p0_ref;
  res.fidelity = initialization_fidelity(res.b_over_a.value, mixed_ref);
  res.fidelity_err = res.b_over_a.sigma / (2.0 * mixed_ref);
  return res;
}

void write_sweep_csv(const SweepResult& sweep, std::ostream& os) {
  os << "# nv0sim csv v1 sweep experiment=" << sweep.experiment
     << " x=" << sweep.x_label << "\n";
  os << "x,value,sigma\n";
  char buf[96];
  for (const SweepPoint& p : sweep.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.x, p.value, p.sigma);
    os << buf;
  }
}

void write_trace_csv(const CountTrace& trace, std::ostream& os) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g", trace.bin_width);
  os << "# nv0sim csv v1 trace bin_width=" << buf << "\n";
  os << "t_s,counts,sigma\n";
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", trace.t[i],
                  trace.counts[i], trace.sigma[i]);
    os << buf;
  }
}

FitData read_xy_csv(std::istream& is) {
  FitData data;
  std::string line;
  std::size_t lineno = 0;
  bool saw_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    std::string body = line.substr(first);
    if (!saw_header && data.x.empty() && looks_like_header(body)) {
      // One column-name header row is allowed right before the data.
      saw_header = true;
      continue;
    }
    std::replace(body.begin(), body.end(), ',', ' ');
    std::istringstream ss(body);
    double x = 0.0, y = 0.0, sg = 0.0;
    if (!(ss >> x >> y)) {
      std::ostringstream msg;
      msg << "csv line " << lineno << ": expected numeric x,value[,sigma]";
      throw std::runtime_error(msg.str());
    }
    bool has_sigma = static_cast<bool>(ss >> sg);
    std::string junk;
    if (ss >> junk) {
      std::ostringstream msg;
      msg << "csv line " << lineno << ": trailing content '" << junk << "'";
      throw std::runtime_error(msg.str());
    }
    if (!data.x.empty() && has_sigma != !data.sigma.empty()) {
      std::ostringstream msg;
      msg << "csv line " << lineno << ": inconsistent column count";
      throw std::runtime_error(msg.str());
    }
    data.x.push_back(x);
    data.y.push_back(y);
    if (has_sigma) data.sigma.push_back(sg);
  }
  return data;
}

} // namespace nv0
