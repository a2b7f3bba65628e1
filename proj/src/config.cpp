// SPDX-License-Identifier: MIT
#include "nv0/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace nv0 {

namespace {

using nlohmann::json;

double suffix_scale(const std::string& unit, const std::string& context) {
  // Frequencies to Hz, times to s, temperatures to K, lengths to m.
  if (unit == "Hz") return 1.0;
  if (unit == "kHz") return 1e3;
  if (unit == "MHz") return 1e6;
  if (unit == "GHz") return 1e9;
  if (unit == "s") return 1.0;
  if (unit == "ms") return 1e-3;
  if (unit == "us") return 1e-6;
  if (unit == "ns") return 1e-9;
  if (unit == "ps") return 1e-12;
  if (unit == "K") return 1.0;
  if (unit == "mK") return 1e-3;
  if (unit == "m") return 1.0;
  if (unit == "mm") return 1e-3;
  if (unit == "um") return 1e-6;
  if (unit == "nm") return 1e-9;
  throw std::invalid_argument("unknown unit suffix '" + unit + "' in \"" +
                              context + "\"");
}

// One object section of the document. Accessors record the keys they
// consume; finish() flags everything left over, with its full path.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw std::invalid_argument("config: " + label() + " must be an object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  double quantity(const char* key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      try {
        return parse_quantity(v.get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("config: " + field(key) + ": " + e.what());
      }
    }
    throw std::invalid_argument("config: " + field(key) +
                                " must be a number or a quantity string");
  }

  double number(const char* key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number())
      throw std::invalid_argument("config: " + field(key) + " must be a number");
    return v.get<double>();
  }

  std::uint64_t uinteger(const char* key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
      throw std::invalid_argument("config: " + field(key) +
                                  " must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  int integer(const char* key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer())
      throw std::invalid_argument("config: " + field(key) +
                                  " must be an integer");
    return v.get<int>();
  }

  bool boolean(const char* key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean())
      throw std::invalid_argument("config: " + field(key) + " must be a bool");
    return v.get<bool>();
  }

  std::string text(const char* key, std::string fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string())
      throw std::invalid_argument("config: " + field(key) + " must be a string");
    return v.get<std::string>();
  }

  std::vector<double> quantity_list(const char* key) {
    std::vector<double> out;
    if (!has(key)) return out;
    const json& v = j_.at(key);
    if (!v.is_array())
      throw std::invalid_argument("config: " + field(key) + " must be an array");
    out.reserve(v.size());
    for (const json& e : v) {
      if (e.is_number()) {
        out.push_back(e.get<double>());
      } else if (e.is_string()) {
        try {
          out.push_back(parse_quantity(e.get<std::string>()));
        } catch (const std::invalid_argument& ex) {
          throw std::invalid_argument("config: " + field(key) + ": " +
                                      ex.what());
        }
      } else {
        throw std::invalid_argument("config: " + field(key) +
                                    " entries must be numbers or quantities");
      }
    }
    return out;
  }

  const json* child(const char* key) {
    if (!has(key)) return nullptr;
    return &j_.at(key);
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key()))
        throw std::invalid_argument("config: unknown key '" + path_ +
                                    item.key() + "'");
    }
  }

 private:
  std::string field(const char* key) const { return path_ + key; }
  std::string label() const {
    return path_.empty() ? std::string("document root")
                         : path_.substr(0, path_.size() - 1);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_physics(const json& j, PhysicsConfig& p) {
  Section s(j, "physics.");
  p.lambda_hz = s.quantity("lambda", p.lambda_hz);
  p.eps_perp_hz = s.quantity("eps_perp", p.eps_perp_hz);
  p.gamma_hz = s.quantity("gamma", p.gamma_hz);
  p.opt_rabi_hz = s.quantity("opt_rabi", p.opt_rabi_hz);
  p.coupling_a = s.number("coupling_a", p.coupling_a);
  p.t1_ref = s.quantity("t1_ref", p.t1_ref);
  p.t_ref = s.quantity("t_ref", p.t_ref);
  p.t1_override = s.quantity("t1_override", p.t1_override);
  p.initial_p0 = s.number("initial_p0", p.initial_p0);
  s.finish();
}

void read_noise(const json& j, NoiseModel& n) {
  Section s(j, "noise.");
  n.markovian_dephasing_hz =
      s.quantity("markovian_dephasing", n.markovian_dephasing_hz);
  n.quasi_static_sigma_hz =
      s.quantity("quasi_static_sigma", n.quasi_static_sigma_hz);
  n.ou_tau_c = s.quantity("ou_tau_c", n.ou_tau_c);
  n.ou_sigma_hz = s.quantity("ou_sigma", n.ou_sigma_hz);
  n.hop_magnitude_hz = s.quantity("hop_magnitude", n.hop_magnitude_hz);
  n.hop_interval_mean = s.quantity("hop_interval_mean", n.hop_interval_mean);
  n.optical_sigma_hz = s.quantity("optical_sigma", n.optical_sigma_hz);
  s.finish();
}

void read_detector(const json& j, DetectorModel& d) {
  Section s(j, "detector.");
  d.bin_width = s.quantity("bin_width", d.bin_width);
  d.collection_efficiency =
      s.number("collection_efficiency", d.collection_efficiency);
  d.dark_rate = s.quantity("dark_rate", d.dark_rate);
  d.shots = s.uinteger("shots", d.shots);
  s.finish();
}

void read_sequence(const json& j, SequenceDefaults& q) {
  Section s(j, "sequence.");
  q.opt_rabi_hz = s.quantity("opt_rabi", q.opt_rabi_hz);
  q.init_width = s.quantity("init_width", q.init_width);
  q.ro_width = s.quantity("ro_width", q.ro_width);
  q.mw_rabi_hz = s.quantity("mw_rabi", q.mw_rabi_hz);
  q.line_center_hz = s.quantity("line_center", q.line_center_hz);
  s.finish();
}

void read_oder(const json& j, OderParams& o) {
  Section s(j, "experiment.oder.");
  o.mw_width = s.quantity("mw_width", o.mw_width);
  o.init_width = s.quantity("init_width", o.init_width);
  o.ro_width = s.quantity("ro_width", o.ro_width);
  o.mw_rabi_hz = s.quantity("mw_rabi", o.mw_rabi_hz);
  o.mw_ro_delay = s.quantity("mw_ro_delay", o.mw_ro_delay);
  o.opt_rabi_hz = s.quantity("opt_rabi", o.opt_rabi_hz);
  o.line_center_hz = s.quantity("line_center", o.line_center_hz);
  s.finish();
}

void read_experiment(const json& j, ExperimentSpec& e) {
  Section s(j, "experiment.");
  e.kind = s.text("kind", e.kind);
  static const std::set<std::string> kinds{"t1",   "rabi", "ramsey",
                                           "hahn_echo", "cpmg", "oder"};
  if (!kinds.count(e.kind))
    throw std::invalid_argument("config: experiment.kind '" + e.kind +
                                "' is not one of t1, rabi, ramsey, hahn_echo, "
                                "cpmg, oder");
  e.grid = s.quantity_list("grid");
  e.start = s.quantity("start", e.start);
  e.stop = s.quantity("stop", e.stop);
  e.points = s.uinteger("points", e.points);
  e.log_spacing = s.boolean("log_spacing", e.log_spacing);
  e.cpmg_m = s.integer("cpmg_m", e.cpmg_m);
  e.ramsey_detuning_hz = s.quantity("detuning", e.ramsey_detuning_hz);
  e.mw_rabi_hz = s.quantity("mw_rabi", e.mw_rabi_hz);
  if (const json* o = s.child("oder")) read_oder(*o, e.oder);
  e.readout = s.text("readout", e.readout);
  if (e.readout != "population" && e.readout != "trace")
    throw std::invalid_argument(
        "config: experiment.readout must be 'population' or 'trace'");
  e.ideal_pulses = s.boolean("ideal_pulses", e.ideal_pulses);
  e.trajectories = s.uinteger("trajectories", e.trajectories);
  e.counts_per_point = s.number("counts_per_point", e.counts_per_point);
  s.finish();
}

void read_sweep(const json& j, SweepAxisSpec& w) {
  Section s(j, "sweep.");
  w.values = s.quantity_list("values");
  w.power_ref_mw = s.number("power_ref", w.power_ref_mw);
  s.finish();
}

void read_cqed(const json& j, ResonatorSpec& r, EmitterSpec& e) {
  Section s(j, "cqed.");
  r.frequency_hz = s.quantity("frequency", r.frequency_hz);
  r.impedance_ohm = s.number("impedance", r.impedance_ohm);
  r.linewidth_hz = s.quantity("linewidth", r.linewidth_hz);
  r.gap_m = s.quantity("gap", r.gap_m);
  e.field_sensitivity_hz_per_v_m =
      s.number("field_sensitivity", e.field_sensitivity_hz_per_v_m);
  e.t1_orbital = s.quantity("t1", e.t1_orbital);
  s.finish();
}

std::vector<double> generated_grid(double start, double stop, std::size_t n,
                                   bool log_spacing) {
  if (n < 2)
    throw std::invalid_argument("config: experiment.points must be >= 2");
  if (!(start > 0.0) && log_spacing)
    throw std::invalid_argument(
        "config: log-spaced grids need a positive start");
  if (!(stop > start))
    throw std::invalid_argument("config: experiment.stop must exceed start");
  std::vector<double> xs(n);
  if (log_spacing) {
    double la = std::log(start), lb = std::log(stop);
    for (std::size_t i = 0; i < n; ++i)
      xs[i] = std::exp(la + (lb - la) * static_cast<double>(i) /
                                static_cast<double>(n - 1));
  } else {
    for (std::size_t i = 0; i < n; ++i)
      xs[i] = start + (stop - start) * static_cast<double>(i) /
                          static_cast<double>(n - 1);
  }
  return xs;
}

} // namespace

double parse_quantity(const std::string& text) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a numeric quantity: \"" + text + "\"");
  }
  while (pos < text.size() &&
         (text[pos] == ' ' || text[pos] == '\t'))
    ++pos;
  std::string unit = text.substr(pos);
  if (unit.empty()) return value;
  return value * suffix_scale(unit, text);
}

RunConfig parse_config(const std::string& json_text, const std::string& source) {
  json j;
  try {
    j = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + source + ": " + e.what());
  }

  RunConfig cfg;
  Section root(j, "");
  if (const json* p = root.child("physics")) read_physics(*p, cfg.physics);
  // Temperature lives at the top level of the schema, next to seed.
  cfg.physics.temperature = root.quantity("temperature", cfg.physics.temperature);
  if (const json* n = root.child("noise")) read_noise(*n, cfg.noise);
  if (const json* d = root.child("detector")) read_detector(*d, cfg.detector);
  if (const json* q = root.child("sequence")) read_sequence(*q, cfg.sequence);
  if (const json* e = root.child("experiment"))
    read_experiment(*e, cfg.experiment);
  if (const json* w = root.child("sweep")) read_sweep(*w, cfg.sweep);
  if (const json* c = root.child("cqed"))
    read_cqed(*c, cfg.resonator, cfg.emitter);
  cfg.seed = root.uinteger("seed", cfg.seed);
  cfg.output = root.text("output", cfg.output);
  root.finish();

  validate(cfg.noise);
  validate(cfg.detector);
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::vector<double> experiment_grid(const ExperimentSpec& spec) {
  if (!spec.grid.empty()) return spec.grid;
  if (spec.points > 0)
    return generated_grid(spec.start, spec.stop, spec.points, spec.log_spacing);

  // Canonical grids sized to the hardware-scale defaults.
  if (spec.kind == "t1") return generated_grid(4.7e-7, 2.35e-5, 16, true);
  if (spec.kind == "rabi") return generated_grid(2.5e-9, 1.5e-7, 60, false);
  if (spec.kind == "ramsey") return generated_grid(2e-9, 1.2e-7, 60, false);
  if (spec.kind == "hahn_echo" || spec.kind == "cpmg")
    return generated_grid(2.5e-7, 4e-6, 16, false);
  // oder: +-50 MHz around the line center in 2 MHz steps
  std::vector<double> xs;
  for (int k = -25; k <= 25; ++k)
    xs.push_back(spec.oder.line_center_hz + 2e6 * k);
  return xs;
}

ExperimentConfig to_experiment_config(const RunConfig& cfg) {
  ExperimentConfig ec;
  ec.physics = cfg.physics;
  ec.noise = cfg.noise;
  ec.noise.seed = cfg.seed;
  ec.detector = cfg.detector;
  ec.sequence = cfg.sequence;
  ec.readout_mode = cfg.experiment.readout == "trace" ? ReadoutMode::Trace
                                                      : ReadoutMode::Population;
  ec.ideal_pulses = cfg.experiment.ideal_pulses;
  ec.trajectories = cfg.experiment.trajectories;
  ec.counts_per_point = cfg.experiment.counts_per_point;
  ec.seed = cfg.seed;
  return ec;
}

} // namespace nv0
