// SPDX-License-Identifier: MIT
#include "nv0/sequence.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "nv0/constants.hpp"

namespace nv0 {

namespace {

std::string fmt_time(double seconds) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", seconds * 1e9);
  return std::string(buf) + "ns";
}

Segment optical_segment(double width, double opt_rabi_hz, bool readout) {
  Segment s;
  s.duration = width;
  s.optical = OpticalPulse{opt_rabi_hz, 0.0};
  s.readout = readout;
  return s;
}

Segment mw_segment(double width, double rabi_hz, double detuning_hz,
                   double phase_rad) {
  Segment s;
  s.duration = width;
  s.microwave = MicrowavePulse{rabi_hz, detuning_hz, phase_rad};
  return s;
}

// Idle segment that keeps the microwave rotating frame, so coherence phase
// accumulates at the drive detuning across the gap.
Segment framed_wait(double width, double detuning_hz) {
  return mw_segment(width, 0.0, detuning_hz, 0.0);
}

Segment dark_wait(double width) {
  Segment s;
  s.duration = width;
  return s;
}

void require_increasing(const std::vector<double>& xs, const char* what) {
  for (size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < 0)
      throw std::invalid_argument(std::string(what) + " must be non-negative");
    if (i > 0 && xs[i] <= xs[i - 1])
      throw std::invalid_argument(std::string(what) +
                                  " must be strictly increasing");
  }
}

} // namespace

void validate(const PulseSequence& seq) {
  double total = 0;
  for (size_t i = 0; i < seq.segments.size(); ++i) {
    const Segment& s = seq.segments[i];
    if (!(s.duration > 0))
      throw std::invalid_argument("segment " + std::to_string(i) +
                                  " of '" + seq.label +
                                  "' has non-positive duration");
    total += s.duration;
  }
  if (!std::isfinite(total))
    throw std::invalid_argument("sequence '" + seq.label +
                                "' has non-finite total duration");
}

double total_duration(const PulseSequence& seq) {
  double total = 0;
  for (const Segment& s : seq.segments) total += s.duration;
  return total;
}

bool has_readout(const PulseSequence& seq) {
  for (const Segment& s : seq.segments)
    if (s.readout) return true;
  return false;
}

PulseSequence build_orbital_init(double width, double opt_rabi_hz) {
  if (!(width > 0))
    throw std::invalid_argument("initialization pulse width must be positive");
  PulseSequence seq;
  seq.label = "orbital_init_" + fmt_time(width);
  seq.segments.push_back(optical_segment(width, opt_rabi_hz, true));
  validate(seq);
  return seq;
}

PulseSequence build_oder(const OderParams& p) {
  if (!(p.mw_width > 0) || !(p.init_width > 0) || !(p.ro_width > 0))
    throw std::invalid_argument("pulse widths must be positive");
  PulseSequence seq;
  seq.label = "oder_" + fmt_time(p.mw_width);

  seq.segments.push_back(optical_segment(p.init_width, p.opt_rabi_hz, true));
  double detuning_hz = p.mw_freq_hz - p.line_center_hz;
  if (p.mw_rabi_hz != 0.0) {
    seq.segments.push_back(
        mw_segment(p.mw_width, p.mw_rabi_hz, detuning_hz, 0.0));
  } else {
    // No drive at all: the sequence is just a pump-probe at fixed delay.
    seq.segments.push_back(dark_wait(p.mw_width));
  }
  if (p.mw_ro_delay > 0) seq.segments.push_back(dark_wait(p.mw_ro_delay));
  seq.segments.push_back(optical_segment(p.ro_width, p.opt_rabi_hz, true));
  validate(seq);
  return seq;
}

PulseSequence build_oder(double mw_freq_hz, double mw_width, double init_width,
                         double ro_width) {
  OderParams p;
  p.mw_freq_hz = mw_freq_hz;
  p.mw_width = mw_width;
  p.init_width = init_width;
  p.ro_width = ro_width;
  return build_oder(p);
}

std::vector<PulseSequence> build_t1_pump_probe(const std::vector<double>& delays,
                                               const SequenceDefaults& d) {
  require_increasing(delays, "delays");
  std::vector<PulseSequence> out;
  out.reserve(delays.size());
  for (double delay : delays) {
    PulseSequence seq;
    seq.label = "t1_delay_" + fmt_time(delay);
    seq.segments.push_back(optical_segment(d.init_width, d.opt_rabi_hz, true));
    if (delay > 0) seq.segments.push_back(dark_wait(delay));
    seq.segments.push_back(optical_segment(d.ro_width, d.opt_rabi_hz, true));
    validate(seq);
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<PulseSequence> build_rabi(const std::vector<double>& widths,
                                      double mw_rabi_hz,
                                      const SequenceDefaults& d) {
  for (double w : widths)
    if (w < 0)
      throw std::invalid_argument("pulse widths must be non-negative");
  std::vector<PulseSequence> out;
  out.reserve(widths.size());
  for (double w : widths) {
    PulseSequence seq;
    seq.label = "rabi_" + fmt_time(w);
    seq.segments.push_back(optical_segment(d.init_width, d.opt_rabi_hz, true));
    if (w > 0) seq.segments.push_back(mw_segment(w, mw_rabi_hz, 0.0, 0.0));
    seq.segments.push_back(optical_segment(d.ro_width, d.opt_rabi_hz, true));
    validate(seq);
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<PulseSequence> build_ramsey(const std::vector<double>& delays,
                                        double detuning_hz,
                                        const SequenceDefaults& d) {
  for (double t : delays)
    if (t < 0) throw std::invalid_argument("delays must be non-negative");
  // t = theta / Omega with theta = pi/2.
  const double t_half_pi = 0.25 / d.mw_rabi_hz;
  std::vector<PulseSequence> out;
  out.reserve(delays.size());
  for (double delay : delays) {
    PulseSequence seq;
    seq.label = "ramsey_" + fmt_time(delay);
    seq.segments.push_back(optical_segment(d.init_width, d.opt_rabi_hz, true));
    seq.segments.push_back(
        mw_segment(t_half_pi, d.mw_rabi_hz, detuning_hz, 0.0));
    if (delay > 0) seq.segments.push_back(framed_wait(delay, detuning_hz));
    seq.segments.push_back(
        mw_segment(t_half_pi, d.mw_rabi_hz, detuning_hz, 0.0));
    seq.segments.push_back(optical_segment(d.ro_width, d.opt_rabi_hz, true));
    validate(seq);
    out.push_back(std::move(seq));
  }
  return out;
}

namespace {

std::vector<PulseSequence> build_decoupling(int m,
                                            const std::vector<double>& total_times,
                                            double flip_phase,
                                            const char* label_stem,
                                            const SequenceDefaults& d) {
  if (m < 1) throw std::invalid_argument("pulse count must be at least 1");
  for (double t : total_times)
    if (!(t > 0))
      throw std::invalid_argument("total evolution times must be positive");

  const double t_half_pi = 0.25 / d.mw_rabi_hz;
  const double t_pi = 0.5 / d.mw_rabi_hz;

  std::vector<PulseSequence> out;
  out.reserve(total_times.size());
  for (double tau : total_times) {
    PulseSequence seq;
    seq.label = std::string(label_stem) + "_" + fmt_time(tau);
    seq.segments.push_back(optical_segment(d.init_width, d.opt_rabi_hz, true));
    seq.segments.push_back(mw_segment(t_half_pi, d.mw_rabi_hz, 0.0, 0.0));

    // tau counts free evolution only, so the k-th flip lands at free time
    // tau(2k-1)/2m by construction.
    const double edge = tau / (2.0 * m);
    for (int k = 0; k < m; ++k) {
      seq.segments.push_back(framed_wait(k == 0 ? edge : 2.0 * edge, 0.0));
      seq.segments.push_back(mw_segment(t_pi, d.mw_rabi_hz, 0.0, flip_phase));
    }
    seq.segments.push_back(framed_wait(edge, 0.0));
    seq.segments.push_back(mw_segment(t_half_pi, d.mw_rabi_hz, 0.0, 0.0));
    seq.segments.push_back(optical_segment(d.ro_width, d.opt_rabi_hz, true));
    validate(seq);
    out.push_back(std::move(seq));
  }
  return out;
}

} // namespace

std::vector<PulseSequence> build_cpmg(int m, const std::vector<double>& total_times,
                                      const SequenceDefaults& d) {
  char stem[32];
  std::snprintf(stem, sizeof stem, "cpmg%d", m);
  return build_decoupling(m, total_times, 0.5 * 3.14159265358979323846,
                          stem, d);
}

std::vector<PulseSequence> build_hahn_echo(const std::vector<double>& total_times,
                                           const SequenceDefaults& d) {
  return build_decoupling(1, total_times, 0.0, "hahn_echo", d);
}

std::vector<TimelineEntry> expand_to_drives(const PulseSequence& seq) {
  validate(seq);
  std::vector<TimelineEntry> timeline;
  timeline.reserve(seq.segments.size());
  for (const Segment& s : seq.segments) {
    TimelineEntry e;
    e.duration = s.duration;
    e.readout = s.readout;
    if (s.optical) {
      e.drives.opt_rabi = two_pi * s.optical->rabi_hz;
      e.drives.opt_detuning = two_pi * s.optical->detuning_hz;
    }
    if (s.microwave) {
      e.drives.mw_rabi = two_pi * s.microwave->rabi_hz;
      e.drives.mw_detuning = two_pi * s.microwave->detuning_hz;
      e.drives.mw_phase = s.microwave->phase_rad;
    }
    timeline.push_back(e);
  }
  return timeline;
}

nlohmann::json to_json(const PulseSequence& seq) {
  nlohmann::json segs = nlohmann::json::array();
  for (const Segment& s : seq.segments) {
    nlohmann::json j;
    j["duration"] = s.duration;
    if (s.optical) {
      j["optical"] = {{"rabi_hz", s.optical->rabi_hz},
                      {"detuning_hz", s.optical->detuning_hz}};
    }
    if (s.microwave) {
      j["microwave"] = {{"rabi_hz", s.microwave->rabi_hz},
                        {"detuning_hz", s.microwave->detuning_hz},
                        {"phase_rad", s.microwave->phase_rad}};
    }
    j["readout"] = s.readout;
    segs.push_back(std::move(j));
  }
  return nlohmann::json{{"label", seq.label}, {"segments", std::move(segs)}};
}

PulseSequence sequence_from_json(const nlohmann::json& j) {
  PulseSequence seq;
  seq.label = j.at("label").get<std::string>();
  for (const nlohmann::json& js : j.at("segments")) {
    Segment s;
    s.duration = js.at("duration").get<double>();
    if (js.contains("optical")) {
      const nlohmann::json& o = js.at("optical");
      s.optical = OpticalPulse{o.at("rabi_hz").get<double>(),
                               o.value("detuning_hz", 0.0)};
    }
    if (js.contains("microwave")) {
      const nlohmann::json& m = js.at("microwave");
      s.microwave = MicrowavePulse{m.at("rabi_hz").get<double>(),
                                   m.value("detuning_hz", 0.0),
                                   m.value("phase_rad", 0.0)};
    }
    s.readout = js.value("readout", false);
    seq.segments.push_back(std::move(s));
  }
  validate(seq);
  return seq;
}

} // namespace nv0
