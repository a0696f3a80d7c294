#pragma once

// Flat key=value run configuration. Unknown keys are rejected; missing keys
// fall back to the as-built system defaults (the values in data/paper.cfg).
// '#' starts a comment line; values may use any double syntax accepted by
// std::from_chars.

#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "epr/cavity.hpp"
#include "epr/detection.hpp"
#include "epr/errors.hpp"
#include "epr/gaussian.hpp"
#include "epr/mode_cleaner.hpp"

namespace epr {

struct Config {
  // NOPA cavity
  double t_out = 0.052;
  double l_intra = 0.0017;
  double length_m = 0.054;
  bool standing_wave = true;
  // operating point
  double pump_mw = 170.0;
  double threshold_mw = 230.0;
  double analysis_hz = 2.0e6;
  // detection chain
  double eta_det = 0.90;
  double eta_mode = 0.999;
  double theta_deg = 1.8;
  double elec_db = -11.3;
  // pump mode cleaner
  double mc_linewidth_hz = 600.0e3;

  CavityParams cavity() const {
    return {t_out, l_intra, length_m, standing_wave};
  }
  OperatingPoint operating_point() const {
    return {pump_mw, threshold_mw, analysis_hz};
  }
  DetectionParams detection() const {
    return {eta_det, eta_mode, theta_deg, linear_from_db(elec_db)};
  }
  ModeCleanerParams mode_cleaner() const { return {mc_linewidth_hz, 1000.0}; }
};

namespace detail {

inline double config_double(std::string_view value, const std::string& source,
                            std::size_t line, std::string_view key) {
  double v = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
    throw parse_error(source, line,
                      "key '" + std::string(key) + "': cannot parse number '" +
                          std::string(value) + "'");
  return v;
}

inline bool config_bool(std::string_view value, const std::string& source,
                        std::size_t line, std::string_view key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw parse_error(source, line,
                    "key '" + std::string(key) +
                        "': expected true/false/1/0, got '" +
                        std::string(value) + "'");
}

inline std::string_view config_trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline Config parse_config(std::istream& in, const std::string& source) {
  Config cfg;
  std::set<std::string> seen;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = detail::config_trim(raw);
    if (line.empty() || line.front() == '#') continue;
    // strip a trailing comment
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = detail::config_trim(line.substr(0, hash));
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw parse_error(source, lineno, "expected 'key = value'");
    const std::string key{detail::config_trim(line.substr(0, eq))};
    const std::string_view value = detail::config_trim(line.substr(eq + 1));
    if (!seen.insert(key).second)
      throw parse_error(source, lineno, "duplicate key '" + key + "'");

    if (key == "t_out")
      cfg.t_out = detail::config_double(value, source, lineno, key);
    else if (key == "l_intra")
      cfg.l_intra = detail::config_double(value, source, lineno, key);
    else if (key == "length_m")
      cfg.length_m = detail::config_double(value, source, lineno, key);
    else if (key == "standing_wave")
      cfg.standing_wave = detail::config_bool(value, source, lineno, key);
    else if (key == "pump_mw")
      cfg.pump_mw = detail::config_double(value, source, lineno, key);
    else if (key == "threshold_mw")
      cfg.threshold_mw = detail::config_double(value, source, lineno, key);
    else if (key == "analysis_hz")
      cfg.analysis_hz = detail::config_double(value, source, lineno, key);
    else if (key == "eta_det")
      cfg.eta_det = detail::config_double(value, source, lineno, key);
    else if (key == "eta_mode")
      cfg.eta_mode = detail::config_double(value, source, lineno, key);
    else if (key == "theta_deg")
      cfg.theta_deg = detail::config_double(value, source, lineno, key);
    else if (key == "elec_db")
      cfg.elec_db = detail::config_double(value, source, lineno, key);
    else if (key == "mc_linewidth_hz")
      cfg.mc_linewidth_hz = detail::config_double(value, source, lineno, key);
    else
      throw parse_error(source, lineno, "unknown key '" + key + "'");
  }
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("load_config: cannot open '" + path + "'");
  return parse_config(in, path);
}

}  // namespace epr
