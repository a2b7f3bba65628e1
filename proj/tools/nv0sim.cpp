// SPDX-License-Identifier: MIT
//
// nv0sim: command-line front end for the NV0 orbital-qubit toolkit.
// Subcommands: simulate, fit, sweep, cqed, steady. Exit codes are a stable
// contract: 0 success, 2 configuration error, 3 fit non-convergence,
// 4 I/O error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <iostream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nv0/config.hpp"
#include "nv0/constants.hpp"

namespace {

using namespace nv0;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitFit = 3;
constexpr int kExitIo = 4;

// Flag values for dimensioned quantities arrive as strings ("50 mK",
// "27 MHz") and are converted here; an empty marker means "not passed",
// keeping the precedence flags > file > defaults.
struct QuantityFlag {
  std::string text;
  CLI::Option* opt = nullptr;
  bool given() const { return opt && opt->count() > 0; }
  double value() const { return parse_quantity(text); }
};

QuantityFlag* add_quantity(CLI::App* cmd, std::deque<QuantityFlag>& store,
                           const std::string& name, const std::string& desc) {
  store.emplace_back();
  QuantityFlag& f = store.back();
  f.opt = cmd->add_option(name, f.text, desc);
  return &f;
}

FitData to_fit_data(const SweepResult& sweep) {
  FitData data;
  bool weighted = !sweep.points.empty();
  for (const SweepPoint& p : sweep.points) {
    data.x.push_back(p.x);
    data.y.push_back(p.value);
    if (p.sigma <= 0.0) weighted = false;
  }
  if (weighted)
    for (const SweepPoint& p : sweep.points) data.sigma.push_back(p.sigma);
  return data;
}

int write_csv_output(const std::string& path,
                     const std::function<void(std::ostream&)>& writer) {
  if (path.empty()) {
    writer(std::cout);
    return kExitOk;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file: " << path << "\n";
    return kExitIo;
  }
  writer(out);
  out.flush();
  if (!out) {
    std::cerr << "error: write failed: " << path << "\n";
    return kExitIo;
  }
  return kExitOk;
}

std::vector<PulseSequence> build_experiment_sequences(
    const RunConfig& rc, const std::vector<double>& xs) {
  const ExperimentSpec& ex = rc.experiment;
  double mw = ex.mw_rabi_hz > 0.0 ? ex.mw_rabi_hz : rc.sequence.mw_rabi_hz;
  if (ex.kind == "t1") return build_t1_pump_probe(xs, rc.sequence);
  if (ex.kind == "rabi") return build_rabi(xs, mw, rc.sequence);
  if (ex.kind == "ramsey")
    return build_ramsey(xs, ex.ramsey_detuning_hz, rc.sequence);
  if (ex.kind == "hahn_echo") return build_hahn_echo(xs, rc.sequence);
  if (ex.kind == "cpmg") return build_cpmg(ex.cpmg_m, xs, rc.sequence);
  if (ex.kind == "oder") {
    std::vector<PulseSequence> seqs;
    seqs.reserve(xs.size());
    for (double f : xs) {
      OderParams p = rc.experiment.oder;
      p.mw_freq_hz = f;
      seqs.push_back(build_oder(p));
    }
    return seqs;
  }
  throw std::invalid_argument("unknown experiment kind: " + ex.kind);
}

const char* x_label_for(const std::string& kind) {
  if (kind == "t1" || kind == "ramsey") return "delay_s";
  if (kind == "rabi") return "width_s";
  if (kind == "oder") return "mw_freq_hz";
  return "total_time_s";
}

// Kind-specific parameter extraction, printed after the sweep table. A
// summary fit that fails to converge is reported but does not change the
// exit status; the simulated data has already been written.
void print_fit_summary(const RunConfig& rc, const SweepResult& sweep) {
  FitData data = to_fit_data(sweep);
  const std::string& kind = rc.experiment.kind;
  char line[160];
  try {
    if (kind == "t1") {
      std::vector<double> sig = data.sigma;
      T1Extraction t1 = extract_t1(data.x, data.y, sig);
      std::snprintf(line, sizeof line, "fitted T1 = %.6g s +- %.6g s%s",
                    t1.t1, t1.t1_err,
                    t1.result.converged ? "" : "  [not converged]");
    } else if (kind == "rabi") {
      RabiExtraction rb = extract_rabi(data);
      std::snprintf(line, sizeof line,
                    "fitted Rabi = %.6g Hz +- %.6g Hz, T2 = %.6g s +- %.6g s%s",
                    rb.rabi_hz, rb.rabi_err_hz, rb.t2_rabi, rb.t2_rabi_err,
                    rb.result.converged ? "" : "  [not converged]");
    } else if (kind == "ramsey") {
      RamseyExtraction rs = extract_ramsey(data);
      std::snprintf(
          line, sizeof line,
          "fitted detuning = %.6g Hz +- %.6g Hz, T2* = %.6g s +- %.6g s%s",
          rs.detuning_hz, rs.detuning_err_hz, rs.t2_star, rs.t2_star_err,
          rs.result.converged ? "" : "  [not converged]");
    } else if (kind == "hahn_echo" || kind == "cpmg") {
      SystemRates rates = rates_at(rc.physics, rc.noise);
      double t1 = 1.0 / (rates.kappa_down + rates.kappa_up);
      CpmgExtraction ce = extract_cpmg(data, t1);
      std::snprintf(line, sizeof line,
                    "fitted T2 = %.6g s +- %.6g s (T1 held at %.6g s)%s", ce.t2,
                    ce.t2_err, ce.t1_used,
                    ce.result.converged ? "" : "  [not converged]");
    } else {  // oder
      OderExtraction od = extract_oder(data);
      std::snprintf(
          line, sizeof line,
          "fitted center = %.6g Hz +- %.6g Hz, FWHM = %.6g Hz +- %.6g Hz%s",
          od.center_hz, od.center_err_hz, od.fwhm_hz, od.fwhm_err_hz,
          od.result.converged ? "" : "  [not converged]");
    }
    std::cout << line << "\n";
  } catch (const std::exception& e) {
    std::cout << "summary fit failed: " << e.what() << "\n";
  }
}

std::string trace_path_for_point(const std::string& output, std::size_t i) {
  std::string stem = output;
  std::size_t dot = stem.rfind('.');
  std::string ext = ".csv";
  if (dot != std::string::npos && dot > stem.rfind('/') + 1) {
    ext = stem.substr(dot);
    stem = stem.substr(0, dot);
  }
  char idx[32];
  std::snprintf(idx, sizeof idx, "_trace_%03zu", i);
  return stem + idx + ext;
}

int cmd_simulate(const RunConfig& rc) {
  ExperimentConfig ec = to_experiment_config(rc);
  std::vector<double> xs = experiment_grid(rc.experiment);

  SweepResult sweep;
  if (ec.readout_mode == ReadoutMode::Trace) {
    // Run traces here so per-point records can be written alongside the
    // summary instead of being discarded inside the sweep engine.
    std::vector<PulseSequence> seqs = build_experiment_sequences(rc, xs);
    sweep.experiment = rc.experiment.kind;
    sweep.x_label = x_label_for(rc.experiment.kind);
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      CountTrace trace = run_trace(ec, seqs[i]);
      if (!rc.output.empty()) {
        int rcode = write_csv_output(
            trace_path_for_point(rc.output, i),
            [&](std::ostream& os) { write_trace_csv(trace, os); });
        if (rcode != kExitOk) return rcode;
      }
      Ratio r = trace_ratio(trace, seqs[i], rc.detector.dark_rate);
      sweep.points.push_back({xs[i], r.value, r.sigma});
    }
  } else {
    const std::string& kind = rc.experiment.kind;
    double mw =
        rc.experiment.mw_rabi_hz > 0.0 ? rc.experiment.mw_rabi_hz
                                       : rc.sequence.mw_rabi_hz;
    if (kind == "t1") sweep = run_t1(ec, xs);
    else if (kind == "rabi") sweep = run_rabi(ec, xs, mw);
    else if (kind == "ramsey")
      sweep = run_ramsey(ec, xs, rc.experiment.ramsey_detuning_hz);
    else if (kind == "hahn_echo") sweep = run_hahn_echo(ec, xs);
    else if (kind == "cpmg") sweep = run_cpmg(ec, rc.experiment.cpmg_m, xs);
    else sweep = run_oder(ec, xs, rc.experiment.oder);
  }

  int rcode = write_csv_output(
      rc.output, [&](std::ostream& os) { write_sweep_csv(sweep, os); });
  if (rcode != kExitOk) return rcode;
  print_fit_summary(rc, sweep);
  return kExitOk;
}

int cmd_sweep(const RunConfig& rc, const std::string& axis) {
  if (rc.sweep.values.empty()) {
    std::cerr << "error: config: sweep.values is required for the sweep "
                 "command\n";
    return kExitConfig;
  }

  SweepResult table;
  if (axis == "temperature") {
    table.experiment = "t1_vs_temperature";
    table.x_label = "temperature_k";
    for (std::size_t i = 0; i < rc.sweep.values.size(); ++i) {
      RunConfig row = rc;
      row.physics.temperature = rc.sweep.values[i];
      row.seed = rc.seed + i;
      ExperimentConfig ec = to_experiment_config(row);

      std::vector<double> delays = rc.experiment.grid;
      if (delays.empty()) {
        // Track the expected relaxation time so every row resolves its
        // own decay instead of sampling a flat tail.
        SystemRates rates = rates_at(row.physics, row.noise);
        double expected = 1.0 / (rates.kappa_down + rates.kappa_up);
        ExperimentSpec gen;
        gen.start = 0.1 * expected;
        gen.stop = 5.0 * expected;
        gen.points = 16;
        gen.log_spacing = true;
        delays = experiment_grid(gen);
      }
      SweepResult sweep = run_t1(ec, delays);
      FitData data = to_fit_data(sweep);
      std::vector<double> sig = data.sigma;
      T1Extraction t1 = extract_t1(data.x, data.y, sig);
      table.points.push_back({row.physics.temperature, t1.t1, t1.t1_err});
    }
  } else if (axis == "power") {
    table.experiment = "rabi_vs_power";
    table.x_label = "power_mw";
    double base = rc.experiment.mw_rabi_hz > 0.0 ? rc.experiment.mw_rabi_hz
                                                 : rc.sequence.mw_rabi_hz;
    if (rc.sweep.power_ref_mw <= 0.0) {
      std::cerr << "error: config: sweep.power_ref must be positive\n";
      return kExitConfig;
    }
    std::vector<double> widths = rc.experiment.grid;
    if (widths.empty()) {
      ExperimentSpec gen;
      gen.kind = "rabi";
      widths = experiment_grid(gen);
    }
    for (std::size_t i = 0; i < rc.sweep.values.size(); ++i) {
      double power = rc.sweep.values[i];
      if (power <= 0.0) {
        std::cerr << "error: config: sweep power values must be positive\n";
        return kExitConfig;
      }
      RunConfig row = rc;
      row.seed = rc.seed + i;
      ExperimentConfig ec = to_experiment_config(row);
      double rabi = base * std::sqrt(power / rc.sweep.power_ref_mw);
      SweepResult sweep = run_rabi(ec, widths, rabi);
      RabiExtraction rb = extract_rabi(to_fit_data(sweep));
      table.points.push_back({power, rb.rabi_hz, rb.rabi_err_hz});
    }
  } else {
    std::cerr << "error: --axis must be 'temperature' or 'power'\n";
    return kExitConfig;
  }

  return write_csv_output(rc.output,
                          [&](std::ostream& os) { write_sweep_csv(table, os); });
}

int cmd_fit(const std::string& csv_path, const std::string& model_name,
            double fixed_t1) {
  std::ifstream in(csv_path);
  if (!in) {
    std::cerr << "error: cannot open " << csv_path << "\n";
    return kExitIo;
  }
  FitData data;
  try {
    data = read_xy_csv(in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  if (data.x.empty()) {
    std::cerr << "error: " << csv_path << " contains no data rows\n";
    return kExitIo;
  }

  FitModel model;
  if (model_name == "exp_recovery") model.kind = FitModelKind::ExpRecovery;
  else if (model_name == "damped_cosine") model.kind = FitModelKind::DampedCosine;
  else if (model_name == "detuned_cosine")
    model.kind = FitModelKind::DetunedDampedCosine;
  else if (model_name == "gaussian_peak") model.kind = FitModelKind::GaussianPeak;
  else if (model_name == "echo_decay") model.kind = FitModelKind::EchoDecay;
  else {
    std::cerr << "error: unknown model '" << model_name
              << "' (exp_recovery, damped_cosine, detuned_cosine, "
                 "gaussian_peak, echo_decay)\n";
    return kExitConfig;
  }
  model.fixed_t1 = fixed_t1;

  if (data.x.size() <= param_count(model)) {
    std::cerr << "error: model needs more data rows than its "
              << param_count(model) << " parameters\n";
    return kExitConfig;
  }

  FitResult result;
  try {
    result = fit(model, data);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: fit failed: " << e.what() << "\n";
    return kExitFit;
  }
  std::cout << fit_report(model, result);
  return result.converged ? kExitOk : kExitFit;
}

int cmd_cqed(const RunConfig& rc) {
  validate(rc.resonator);
  validate(rc.emitter);
  std::cout << report_text(rc.resonator, rc.emitter);
  return kExitOk;
}

int cmd_steady(const RunConfig& rc) {
  SystemRates rates = rates_at(rc.physics, rc.noise);
  double omega = two_pi * rc.physics.opt_rabi_hz;
  Drives drives;
  drives.opt_rabi = omega;

  DensityMatrix num = steady_state_numeric(rates, drives);
  char line[160];
  std::snprintf(line, sizeof line, "numeric:  p0 = %.6g  p1 = %.6g  p2 = %.6g",
                num(0, 0).real(), num(1, 1).real(), num(2, 2).real());
  std::cout << line << "\n";

  if (omega != 0.0 && rates.kappa_down != 0.0) {
    auto an = steady_state_analytic(rates.gamma, rates.kappa_down, omega);
    std::snprintf(line, sizeof line,
                  "analytic: p0 = %.6g  p1 = %.6g  p2 = %.6g", an[0], an[1],
                  an[2]);
    std::cout << line << "\n";
    double diff = 0.0;
    for (int i = 0; i < 3; ++i)
      diff = std::max(diff, std::abs(an[i] - num(i, i).real()));
    std::snprintf(line, sizeof line,
                  "agreement: max |analytic - numeric| = %.3g (%s 1e-6)", diff,
                  diff <= 1e-6 ? "within" : "EXCEEDS");
    std::cout << line << "\n";
  } else {
    std::cout << "analytic: skipped (needs a drive and orbital relaxation)\n";
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"nv0sim: three-level simulator and parameter-estimation "
               "toolkit for the NV0 orbital qubit"};
  app.require_subcommand(1);
  // Let "nv0sim simulate --config f.json" work as well as
  // "nv0sim --config f.json simulate".
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON run configuration (also via NV0SIM_CONFIG)")
      ->envname("NV0SIM_CONFIG");

  // simulate
  CLI::App* sim = app.add_subcommand("simulate",
                                     "run a pulse-sequence sweep and fit it");
  std::deque<QuantityFlag> sim_q;
  QuantityFlag* sim_temp =
      add_quantity(sim, sim_q, "--temperature", "sample temperature");
  QuantityFlag* sim_counts = add_quantity(
      sim, sim_q, "--counts", "window-A counts per sweep point (0 = exact)");
  std::string sim_kind, sim_readout, sim_output;
  std::uint64_t sim_seed = 0, sim_traj = 0;
  bool sim_ideal = false;
  CLI::Option* sim_kind_opt = sim->add_option(
      "--kind", sim_kind, "t1 | rabi | ramsey | hahn_echo | cpmg | oder");
  CLI::Option* sim_readout_opt =
      sim->add_option("--readout", sim_readout, "population | trace");
  CLI::Option* sim_seed_opt = sim->add_option("--seed", sim_seed, "RNG seed");
  CLI::Option* sim_traj_opt =
      sim->add_option("--trajectories", sim_traj, "Monte-Carlo shots per point");
  CLI::Option* sim_ideal_opt =
      sim->add_flag("--ideal-pulses", sim_ideal, "instantaneous rotations");
  CLI::Option* sim_output_opt =
      sim->add_option("--output", sim_output, "summary CSV path");

  // fit
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a model to a CSV file");
  std::string fit_csv, fit_model;
  std::deque<QuantityFlag> fit_q;
  fit_cmd->add_option("csv", fit_csv, "x,value[,sigma] CSV file")->required();
  fit_cmd->add_option("--model", fit_model,
                      "exp_recovery | damped_cosine | detuned_cosine | "
                      "gaussian_peak | echo_decay")
      ->required();
  QuantityFlag* fit_t1 = add_quantity(
      fit_cmd, fit_q, "--fixed-t1", "hold the echo-decay T1 at this value");

  // sweep
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "sweep temperature or power, fit each row");
  std::string sweep_axis;
  sweep_cmd->add_option("--axis", sweep_axis, "temperature | power")
      ->required();
  std::string sweep_output;
  std::uint64_t sweep_seed = 0;
  CLI::Option* sweep_seed_opt =
      sweep_cmd->add_option("--seed", sweep_seed, "RNG seed");
  CLI::Option* sweep_output_opt =
      sweep_cmd->add_option("--output", sweep_output, "summary CSV path");

  // cqed
  CLI::App* cqed_cmd =
      app.add_subcommand("cqed", "resonator coupling feasibility report");
  std::deque<QuantityFlag> cq;
  QuantityFlag* cq_freq =
      add_quantity(cqed_cmd, cq, "--frequency", "resonator mode frequency");
  QuantityFlag* cq_linewidth =
      add_quantity(cqed_cmd, cq, "--linewidth", "resonator linewidth kappa");
  QuantityFlag* cq_gap =
      add_quantity(cqed_cmd, cq, "--gap", "electrode gap the emitter sits in");
  QuantityFlag* cq_t1 =
      add_quantity(cqed_cmd, cq, "--t1", "orbital relaxation time");
  double cq_impedance = 0, cq_sens = 0;
  CLI::Option* cq_imp_opt = cqed_cmd->add_option(
      "--impedance", cq_impedance, "characteristic impedance, ohm");
  CLI::Option* cq_sens_opt = cqed_cmd->add_option(
      "--sensitivity", cq_sens, "Stark sensitivity, Hz per V/m");

  // steady
  CLI::App* steady_cmd = app.add_subcommand(
      "steady", "steady state under continuous optical drive");
  std::deque<QuantityFlag> st;
  QuantityFlag* st_temp =
      add_quantity(steady_cmd, st, "--temperature", "sample temperature");
  QuantityFlag* st_rabi =
      add_quantity(steady_cmd, st, "--opt-rabi", "optical Rabi frequency");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig rc;
    if (!config_path.empty()) rc = load_config_file(config_path);

    if (*sim) {
      if (sim_temp->given()) rc.physics.temperature = sim_temp->value();
      if (sim_counts->given()) rc.experiment.counts_per_point = sim_counts->value();
      if (sim_kind_opt->count()) {
        static const std::vector<std::string> kinds{
            "t1", "rabi", "ramsey", "hahn_echo", "cpmg", "oder"};
        if (std::find(kinds.begin(), kinds.end(), sim_kind) == kinds.end())
          throw std::invalid_argument("unknown experiment kind: " + sim_kind);
        rc.experiment.kind = sim_kind;
      }
      if (sim_readout_opt->count()) {
        if (sim_readout != "population" && sim_readout != "trace")
          throw std::invalid_argument(
              "--readout must be 'population' or 'trace'");
        rc.experiment.readout = sim_readout;
      }
      if (sim_seed_opt->count()) rc.seed = sim_seed;
      if (sim_traj_opt->count()) rc.experiment.trajectories = sim_traj;
      if (sim_ideal_opt->count()) rc.experiment.ideal_pulses = sim_ideal;
      if (sim_output_opt->count()) rc.output = sim_output;
      return cmd_simulate(rc);
    }
    if (*fit_cmd) {
      double t1 = fit_t1->given() ? fit_t1->value() : 0.0;
      return cmd_fit(fit_csv, fit_model, t1);
    }
    if (*sweep_cmd) {
      if (sweep_seed_opt->count()) rc.seed = sweep_seed;
      if (sweep_output_opt->count()) rc.output = sweep_output;
      return cmd_sweep(rc, sweep_axis);
    }
    if (*cqed_cmd) {
      if (cq_freq->given()) rc.resonator.frequency_hz = cq_freq->value();
      if (cq_linewidth->given()) rc.resonator.linewidth_hz = cq_linewidth->value();
      if (cq_gap->given()) rc.resonator.gap_m = cq_gap->value();
      if (cq_imp_opt->count()) rc.resonator.impedance_ohm = cq_impedance;
      if (cq_sens_opt->count())
        rc.emitter.field_sensitivity_hz_per_v_m = cq_sens;
      if (cq_t1->given()) rc.emitter.t1_orbital = cq_t1->value();
      return cmd_cqed(rc);
    }
    if (*steady_cmd) {
      if (st_temp->given()) rc.physics.temperature = st_temp->value();
      if (st_rabi->given()) rc.physics.opt_rabi_hz = st_rabi->value();
      return cmd_steady(rc);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
