// eprbudget: noise-budget prediction and data reduction for EPR beams from
// a below-threshold nondegenerate optical parametric amplifier.
//
// Subcommands: budget, correct, duan, synth, mcfilter, fit, sweep.
// All dB levels are relative to the quantum noise limit of the same
// optical power; nothing here is absolute dBm.
//
// Exit codes: 0 success, 2 input/parse error, 3 model/domain error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "epr/epr.hpp"

namespace {

using ojson = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

// Input-syntax problem in a flag value (not a model error).
struct flag_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

epr::Config load_or_default(const std::string& path) {
  return path.empty() ? epr::Config{} : epr::load_config(path);
}

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
  return buf;
}

ojson config_json(const epr::Config& cfg) {
  return ojson{{"t_out", cfg.t_out},
               {"l_intra", cfg.l_intra},
               {"length_m", cfg.length_m},
               {"standing_wave", cfg.standing_wave},
               {"pump_mw", cfg.pump_mw},
               {"threshold_mw", cfg.threshold_mw},
               {"analysis_hz", cfg.analysis_hz},
               {"eta_det", cfg.eta_det},
               {"eta_mode", cfg.eta_mode},
               {"theta_deg", cfg.theta_deg},
               {"elec_db", cfg.elec_db},
               {"mc_linewidth_hz", cfg.mc_linewidth_hz}};
}

ojson stage_json(const epr::BudgetStage& s) {
  return ojson{{"v", s.v},
               {"db", s.v_db},
               {"v_anti", s.v_anti},
               {"anti_db", s.v_anti_db}};
}

// ---------------------------------------------------------------- budget

void cmd_budget(const std::string& config_path, bool as_json) {
  const epr::Config cfg = load_or_default(config_path);
  const auto report =
      epr::predict(cfg.cavity(), cfg.operating_point(), cfg.detection());
  const double fin = epr::finesse(cfg.cavity());
  const double lw = epr::linewidth_hz(cfg.cavity());

  if (as_json) {
    ojson j{{"format_version", kFormatVersion},
            {"config", config_json(cfg)},
            {"derived",
             ojson{{"sigma", report.sigma},
                   {"omega_norm", report.omega_norm},
                   {"eta_esc", report.eta_esc},
                   {"eta_total", report.eta_total},
                   {"finesse", fin},
                   {"linewidth_hz", lw}}},
            {"stages",
             ojson{{"ideal", stage_json(report.ideal)},
                   {"after_efficiency", stage_json(report.after_efficiency)},
                   {"after_jitter", stage_json(report.after_jitter)},
                   {"measured", stage_json(report.measured)}}},
            {"duan",
             ojson{{"corrected",
                    ojson{{"sum", report.duan_corrected.sum},
                          {"entangled", report.duan_corrected.entangled}}},
                   {"measured",
                    ojson{{"sum", report.duan_measured.sum},
                          {"entangled", report.duan_measured.entangled}}}}}};
    std::cout << j.dump(2) << "\n";
    return;
  }

  std::cout << "format_version: " << kFormatVersion << "\n"
            << "sigma: " << fmt(report.sigma) << "\n"
            << "omega_norm: " << fmt(report.omega_norm) << "\n"
            << "eta_esc: " << fmt(report.eta_esc) << "\n"
            << "eta_total: " << fmt(report.eta_total) << "\n"
            << "finesse: " << fmt(fin) << "\n"
            << "linewidth_hz: " << fmt(lw) << "\n\n";
  std::printf("%-18s %12s %10s %14s %10s\n", "stage", "v_linear", "v_db",
              "anti_linear", "anti_db");
  const auto row = [](const char* name, const epr::BudgetStage& s) {
    std::printf("%-18s %12.6f %10.3f %14.6f %10.3f\n", name, s.v, s.v_db,
                s.v_anti, s.v_anti_db);
  };
  row("ideal", report.ideal);
  row("after_efficiency", report.after_efficiency);
  row("after_jitter", report.after_jitter);
  row("measured", report.measured);
  std::printf("\nduan_corrected: %.6f  entangled: %s\n",
              report.duan_corrected.sum,
              report.duan_corrected.entangled ? "true" : "false");
  std::printf("duan_measured: %.6f  entangled: %s\n", report.duan_measured.sum,
              report.duan_measured.entangled ? "true" : "false");
}

// ---------------------------------------------------------------- correct

void cmd_correct(double measured_db, double elec_db, bool as_json) {
  const double corrected = epr::subtract_electronic_noise(
      epr::linear_from_db(measured_db), epr::linear_from_db(elec_db));
  const double corrected_db = epr::db_from_linear(corrected);
  if (as_json) {
    ojson j{{"format_version", kFormatVersion},
            {"measured_db", measured_db},
            {"elec_db", elec_db},
            {"corrected_db", corrected_db}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("%.6f\n", corrected_db);
  }
}

// ---------------------------------------------------------------- duan

void cmd_duan(double vx_db, double vy_db, bool as_json) {
  const epr::CorrelationVariances v{epr::linear_from_db(vx_db),
                                    epr::linear_from_db(vy_db)};
  const auto result = epr::duan_sum(v);
  if (as_json) {
    ojson j{{"format_version", kFormatVersion},
            {"vx_db", vx_db},
            {"vy_db", vy_db},
            {"vx_linear", v.v_sum_x},
            {"vy_linear", v.v_diff_y},
            {"sum", result.sum},
            {"entangled", result.entangled}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("sum: %.6f\nentangled: %s\n", result.sum,
                result.entangled ? "true" : "false");
  }
}

// ---------------------------------------------------------------- synth

void write_trace_output(const epr::Trace& t, const std::string& out,
                        bool as_json) {
  if (as_json) {
    ojson samples = ojson::array();
    for (const auto& s : t.samples)
      samples.push_back(ojson::array({s.time_s, s.level_db}));
    ojson j{{"format_version", kFormatVersion},
            {"rbw_hz", t.rbw_hz},
            {"vbw_hz", t.vbw_hz},
            {"center_freq_hz", t.center_freq_hz},
            {"label", t.label},
            {"samples", samples}};
    if (out.empty() || out == "-") {
      std::cout << j.dump(2) << "\n";
    } else {
      std::ofstream f(out);
      if (!f) throw std::runtime_error("cannot open '" + out + "'");
      f << j.dump(2) << "\n";
    }
    return;
  }
  if (out.empty() || out == "-")
    epr::write_trace(t, std::cout);
  else
    epr::write_trace(t, out);
}

void cmd_synth(double mean_db, double rbw_hz, double vbw_hz, double duration_s,
               double sample_rate_hz, std::uint64_t seed, double center_hz,
               const std::string& label, const std::string& out,
               bool as_json) {
  if (sample_rate_hz <= 0.0) sample_rate_hz = 2.0 * vbw_hz;  // video Nyquist
  const auto t = epr::synth_trace(mean_db, rbw_hz, vbw_hz, duration_s,
                                  sample_rate_hz, seed, center_hz, label);
  write_trace_output(t, out, as_json);
}

// ---------------------------------------------------------------- mcfilter

// Excess-noise tables reuse the trace file format with the first column
// holding frequency in Hz and the level column the excess above QNL in dB.
void cmd_mcfilter(const std::string& in_path, const std::string& out,
                  double mc_linewidth_hz, double mc_finesse, bool as_json) {
  const epr::Trace table = epr::read_trace(in_path);
  const epr::ModeCleanerParams mc{mc_linewidth_hz, mc_finesse};

  epr::Trace filtered = table;
  ojson points = ojson::array();
  for (auto& s : filtered.samples) {
    const epr::ExcessNoisePoint p{s.time_s, s.level_db};
    const auto q = epr::filter_excess_noise(p, mc);
    if (as_json)
      points.push_back(ojson{{"freq_hz", p.freq_hz},
                             {"excess_in_db", p.excess_db},
                             {"excess_out_db", q.excess_db},
                             {"transfer", epr::lowpass_power_transfer(p.freq_hz, mc)}});
    s.level_db = q.excess_db;
  }

  if (as_json) {
    ojson j{{"format_version", kFormatVersion},
            {"mc_linewidth_hz", mc.linewidth_hz},
            {"mc_finesse", mc.finesse},
            {"points", points}};
    if (out.empty() || out == "-") {
      std::cout << j.dump(2) << "\n";
    } else {
      std::ofstream f(out);
      if (!f) throw std::runtime_error("cannot open '" + out + "'");
      f << j.dump(2) << "\n";
    }
    return;
  }
  if (out.empty() || out == "-")
    epr::write_trace(filtered, std::cout);
  else
    epr::write_trace(filtered, out);
}

// ---------------------------------------------------------------- fit

std::vector<epr::Measurement> parse_measurements(
    const std::vector<std::string>& specs) {
  std::vector<epr::Measurement> out;
  for (const auto& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw flag_error("--measure expects quantity=value_db, got '" + s + "'");
    epr::Measurement m;
    m.quantity = s.substr(0, eq);
    try {
      m.value_db = std::stod(s.substr(eq + 1));
    } catch (const std::exception&) {
      throw flag_error("--measure: cannot parse dB value in '" + s + "'");
    }
    out.push_back(m);
  }
  return out;
}

std::vector<epr::FreeParameter> parse_free_params(
    const std::vector<std::string>& specs) {
  std::vector<epr::FreeParameter> out;
  for (const auto& s : specs) {
    const auto eq = s.find('=');
    const auto colon = s.find(':', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || colon == std::string::npos)
      throw flag_error("--free expects name=lo:hi, got '" + s + "'");
    epr::FreeParameter p;
    p.name = s.substr(0, eq);
    try {
      p.lo = std::stod(s.substr(eq + 1, colon - eq - 1));
      p.hi = std::stod(s.substr(colon + 1));
    } catch (const std::exception&) {
      throw flag_error("--free: cannot parse bounds in '" + s + "'");
    }
    out.push_back(p);
  }
  return out;
}

void cmd_fit(const std::string& config_path,
             const std::vector<std::string>& measure_specs,
             const std::vector<std::string>& free_specs, int grid_points,
             bool as_json) {
  const epr::Config cfg = load_or_default(config_path);
  const auto measured = parse_measurements(measure_specs);
  const auto free_params = parse_free_params(free_specs);
  const auto result =
      epr::fit(measured, free_params, cfg.cavity(), cfg.operating_point(),
               cfg.detection(), grid_points);

  if (as_json) {
    ojson values, cells;
    for (const auto& [k, v] : result.values) values[k] = v;
    for (const auto& [k, v] : result.cell_width) cells[k] = v;
    ojson j{{"format_version", kFormatVersion},
            {"residual", result.residual},
            {"grid_points", result.grid_points},
            {"values", values},
            {"cell_width", cells}};
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::cout << "format_version: " << kFormatVersion << "\n"
            << "residual: " << fmt(result.residual) << "\n"
            << "grid_points: " << result.grid_points << "\n";
  for (const auto& [k, v] : result.values)
    std::cout << k << ": " << fmt(v, 9)
              << " (cell " << fmt(result.cell_width.at(k)) << ")\n";
}

// ---------------------------------------------------------------- sweep

void cmd_sweep(const epr::Config& cfg, double sigma_min, double sigma_max,
               int steps, bool as_json) {
  const auto result = epr::sweep_upgrade(cfg.cavity(), cfg.detection(),
                                         {sigma_min, sigma_max, steps},
                                         cfg.analysis_hz);
  if (as_json) {
    ojson j{{"format_version", kFormatVersion},
            {"best_sigma", result.best_sigma},
            {"best_corrected_db", result.best_corrected_db},
            {"capped", result.capped},
            {"eta_esc", result.eta_esc},
            {"eta_total", result.eta_total},
            {"linewidth_hz", result.linewidth_hz},
            {"omega_norm", result.omega_norm},
            {"sigma_min", sigma_min},
            {"sigma_max", sigma_max},
            {"steps", steps}};
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::cout << "format_version: " << kFormatVersion << "\n"
            << "best_sigma: " << fmt(result.best_sigma, 9) << "\n"
            << "best_corrected_db: " << fmt(result.best_corrected_db, 9) << "\n"
            << "capped: " << (result.capped ? "true" : "false") << "\n"
            << "eta_esc: " << fmt(result.eta_esc) << "\n"
            << "eta_total: " << fmt(result.eta_total) << "\n"
            << "linewidth_hz: " << fmt(result.linewidth_hz) << "\n"
            << "omega_norm: " << fmt(result.omega_norm) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "EPR entanglement noise budget: prediction, data reduction, trace "
      "tools.\nAll dB levels are relative to the quantum noise limit."};
  app.require_subcommand(1);

  // budget
  auto* budget = app.add_subcommand(
      "budget", "Full-chain noise budget from a config file");
  std::string budget_config;
  bool budget_json = false, budget_text = false;
  budget->add_option("config", budget_config, "key=value config file")
      ->check(CLI::ExistingFile);
  auto* bj = budget->add_flag("--json", budget_json, "machine-readable output");
  budget->add_flag("--text", budget_text, "human-readable output (default)")
      ->excludes(bj);
  budget->callback([&] { cmd_budget(budget_config, budget_json); });

  // correct
  auto* correct = app.add_subcommand(
      "correct", "Remove the electronic-noise floor from a measured level");
  double correct_measured = 0.0, correct_elec = 0.0;
  bool correct_json = false;
  correct->add_option("--measured-db", correct_measured,
                      "measured level, dB relative to QNL")->required();
  correct->add_option("--elec-db", correct_elec,
                      "electronic floor, dB relative to QNL")->required();
  correct->add_flag("--json", correct_json, "machine-readable output");
  correct->callback(
      [&] { cmd_correct(correct_measured, correct_elec, correct_json); });

  // duan
  auto* duan = app.add_subcommand(
      "duan", "Inseparability test on two QNL-relative dB levels");
  double duan_vx = 0.0, duan_vy = 0.0;
  bool duan_json = false;
  duan->add_option("--vx-db", duan_vx, "amplitude-sum level, dB")->required();
  duan->add_option("--vy-db", duan_vy, "phase-difference level, dB")->required();
  duan->add_flag("--json", duan_json, "machine-readable output");
  duan->callback([&] { cmd_duan(duan_vx, duan_vy, duan_json); });

  // synth
  auto* synth = app.add_subcommand(
      "synth", "Synthesize a zero-span trace (CSV to stdout or --out)");
  double synth_mean = 0.0, synth_rbw = 30.0e3, synth_vbw = 100.0;
  double synth_duration = 1.0, synth_rate = 0.0, synth_center = 2.0e6;
  std::uint64_t synth_seed = 1;
  std::string synth_label = "synth", synth_out = "-";
  bool synth_json = false;
  synth->add_option("--mean-db", synth_mean, "mean level, dB relative to QNL");
  synth->add_option("--rbw-hz", synth_rbw, "resolution bandwidth [30000]");
  synth->add_option("--vbw-hz", synth_vbw, "video bandwidth [100]");
  synth->add_option("--duration-s", synth_duration, "trace length [1.0]");
  synth->add_option("--sample-rate-hz", synth_rate,
                    "sample rate [2*vbw when omitted]");
  synth->add_option("--seed", synth_seed, "RNG seed [1]");
  synth->add_option("--center-hz", synth_center, "center frequency [2e6]");
  synth->add_option("--label", synth_label, "trace label [synth]");
  synth->add_option("--out", synth_out, "output path, '-' for stdout");
  synth->add_flag("--json", synth_json, "machine-readable output");
  synth->callback([&] {
    cmd_synth(synth_mean, synth_rbw, synth_vbw, synth_duration, synth_rate,
              synth_seed, synth_center, synth_label, synth_out, synth_json);
  });

  // mcfilter
  auto* mcfilter = app.add_subcommand(
      "mcfilter",
      "Low-pass an excess-noise table (freq_hz,excess_db rows) through a "
      "mode cleaner");
  std::string mc_in, mc_out = "-";
  double mc_lw = 600.0e3, mc_fin = 1000.0;
  bool mc_json = false;
  mcfilter->add_option("--in", mc_in, "input table (trace CSV format)")
      ->required()
      ->check(CLI::ExistingFile);
  mcfilter->add_option("--out", mc_out, "output path, '-' for stdout");
  mcfilter->add_option("--mc-linewidth-hz", mc_lw,
                       "mode cleaner FWHM linewidth [600e3]");
  mcfilter->add_option("--mc-finesse", mc_fin, "mode cleaner finesse [1000]");
  mcfilter->add_flag("--json", mc_json, "machine-readable output");
  mcfilter->callback(
      [&] { cmd_mcfilter(mc_in, mc_out, mc_lw, mc_fin, mc_json); });

  // fit
  auto* fit = app.add_subcommand(
      "fit", "Deterministic least-squares parameter fit against dB levels");
  std::string fit_config;
  std::vector<std::string> fit_measures, fit_frees;
  int fit_grid = 101;
  bool fit_json = false;
  fit->add_option("config", fit_config, "key=value config file (fixed params)")
      ->check(CLI::ExistingFile);
  fit->add_option("--measure", fit_measures,
                  "target as quantity=value_db (measured|corrected), repeatable")
      ->required();
  fit->add_option("--free", fit_frees,
                  "free parameter as name=lo:hi, repeatable (max 3)")
      ->required();
  fit->add_option("--grid", fit_grid, "grid points per free parameter [101]");
  fit->add_flag("--json", fit_json, "machine-readable output");
  fit->callback(
      [&] { cmd_fit(fit_config, fit_measures, fit_frees, fit_grid, fit_json); });

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "Scan pump ratio for the deepest corrected level");
  std::string sweep_config;
  double sweep_tout = 0.0, sweep_lintra = 0.0, sweep_eta_det = 0.0;
  double sweep_eta_mode = 0.0, sweep_theta = 0.0, sweep_f = 0.0, sweep_len = 0.0;
  double sweep_smin = 0.0, sweep_smax = 0.99;
  int sweep_steps = 1001;
  bool sweep_json = false;
  sweep->add_option("config", sweep_config, "key=value config file (base)")
      ->check(CLI::ExistingFile);
  auto* o_tout = sweep->add_option("--t-out", sweep_tout, "override t_out");
  auto* o_lintra = sweep->add_option("--l-intra", sweep_lintra, "override l_intra");
  auto* o_len = sweep->add_option("--length-m", sweep_len, "override length_m");
  auto* o_edet = sweep->add_option("--eta-det", sweep_eta_det, "override eta_det");
  auto* o_emode = sweep->add_option("--eta-mode", sweep_eta_mode, "override eta_mode");
  auto* o_theta = sweep->add_option("--theta-deg", sweep_theta, "override theta_deg");
  auto* o_f = sweep->add_option("--analysis-hz", sweep_f, "override analysis_hz");
  sweep->add_option("--sigma-min", sweep_smin, "pump ratio scan start [0]");
  sweep->add_option("--sigma-max", sweep_smax, "pump ratio scan end [0.99]");
  sweep->add_option("--steps", sweep_steps, "scan points [1001]");
  sweep->add_flag("--json", sweep_json, "machine-readable output");
  sweep->callback([&] {
    epr::Config cfg = load_or_default(sweep_config);
    if (o_tout->count()) cfg.t_out = sweep_tout;
    if (o_lintra->count()) cfg.l_intra = sweep_lintra;
    if (o_len->count()) cfg.length_m = sweep_len;
    if (o_edet->count()) cfg.eta_det = sweep_eta_det;
    if (o_emode->count()) cfg.eta_mode = sweep_eta_mode;
    if (o_theta->count()) cfg.theta_deg = sweep_theta;
    if (o_f->count()) cfg.analysis_hz = sweep_f;
    cmd_sweep(cfg, sweep_smin, sweep_smax, sweep_steps, sweep_json);
  });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const epr::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const flag_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
