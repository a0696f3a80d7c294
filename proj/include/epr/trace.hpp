#pragma once

// Zero-span spectrum-analyzer traces: synthesis, statistics, QNL
// calibration, and file I/O.
//
// File format (one trace per file, UTF-8, '\n' separated):
//
//   # rbw_hz=30000
//   # vbw_hz=100
//   # center_freq_hz=2e+06
//   # label=QNL
//   time_s,level_db
//   0,0.0312
//   0.005,-0.0127
//   ...
//
// Header lines start with '#' and hold one key=value pair each; all four
// keys are required. Numbers are written with shortest-round-trip
// precision, so write/read is lossless.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "epr/errors.hpp"
#include "epr/gaussian.hpp"

namespace epr {

struct TraceSample {
  double time_s = 0.0;
  double level_db = 0.0;
};

struct Trace {
  std::vector<TraceSample> samples;
  double rbw_hz = 0.0;
  double vbw_hz = 0.0;
  double center_freq_hz = 0.0;
  std::string label;
};

inline void validate(const Trace& t) {
  if (!(t.rbw_hz > 0.0))
    throw std::domain_error("Trace: rbw_hz must be > 0");
  if (!(t.vbw_hz > 0.0))
    throw std::domain_error("Trace: vbw_hz must be > 0");
  if (!(t.vbw_hz <= t.rbw_hz))
    throw std::domain_error("Trace: vbw_hz must be <= rbw_hz");
  for (std::size_t i = 1; i < t.samples.size(); ++i)
    if (!(t.samples[i].time_s > t.samples[i - 1].time_s))
      throw std::domain_error("Trace: times must be strictly increasing");
}

struct TraceStats {
  double mean_db = 0.0;
  // dB width of the +1 sigma excursion, 10*log10(1 + std/mean) of the
  // linear powers; 0 for a flat trace.
  double std_db = 0.0;
  std::size_t n_samples = 0;
};

// Relative linear-power standard deviation encoded in std_db.
inline double relative_power_std(const TraceStats& s) {
  return linear_from_db(s.std_db) - 1.0;
}

// Mean and spread of a trace, computed in linear power (never by averaging
// dB values) and reported in dB.
inline TraceStats trace_stats(const Trace& t) {
  validate(t);
  if (t.samples.size() < 2)
    throw std::domain_error("trace_stats: need at least 2 samples");
  const std::size_t n = t.samples.size();
  double sum = 0.0;
  for (const auto& s : t.samples) sum += linear_from_db(s.level_db);
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& s : t.samples) {
    const double d = linear_from_db(s.level_db) - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return {db_from_linear(mean), db_from_linear(1.0 + sd / mean), n};
}

// Synthesize a stationary zero-span trace. The displayed level of band
// noise in an RBW-wide band, video-averaged over ~1/(2 vbw), is gamma
// distributed with shape rbw/(2 vbw), giving a relative power standard
// deviation of sqrt(2 vbw / rbw). Ensemble mean is 10^(mean_db/10).
// Deterministic for a given seed.
inline Trace synth_trace(double mean_db, double rbw_hz, double vbw_hz,
                         double duration_s, double sample_rate_hz,
                         std::uint64_t seed, double center_freq_hz = 2.0e6,
                         const std::string& label = "synth") {
  if (!std::isfinite(mean_db))
    throw std::domain_error("synth_trace: mean_db must be finite");
  if (!(rbw_hz > 0.0) || !(vbw_hz > 0.0) || !(vbw_hz <= rbw_hz))
    throw std::domain_error("synth_trace: need 0 < vbw_hz <= rbw_hz");
  if (!(duration_s > 0.0) || !(sample_rate_hz > 0.0))
    throw std::domain_error("synth_trace: duration and sample rate must be > 0");

  const double alpha = rbw_hz / (2.0 * vbw_hz);
  const double mean_lin = linear_from_db(mean_db);
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> noise(alpha, mean_lin / alpha);

  const auto n = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz)));
  Trace t;
  t.rbw_hz = rbw_hz;
  t.vbw_hz = vbw_hz;
  t.center_freq_hz = center_freq_hz;
  t.label = label;
  t.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::max(noise(rng), 1e-300);
    t.samples.push_back({static_cast<double>(i) / sample_rate_hz,
                         db_from_linear(v)});
  }
  return t;
}

// QNL calibration: the reference trace is taken with the pump blocked and
// the seed power matched to the signal beam. Checks the power match and the
// analyzer settings, then returns the signal level relative to the QNL.
inline double qnl_calibrate(const Trace& qnl, const Trace& signal,
                            double power_qnl_uw, double power_signal_uw,
                            double tol_fraction) {
  validate(qnl);
  validate(signal);
  if (!(power_qnl_uw > 0.0) || !(power_signal_uw > 0.0))
    throw std::domain_error("qnl_calibrate: powers must be > 0");
  if (!(tol_fraction >= 0.0))
    throw std::domain_error("qnl_calibrate: tolerance must be >= 0");
  if (qnl.rbw_hz != signal.rbw_hz)
    throw std::domain_error("qnl_calibrate: rbw_hz mismatch between traces");
  if (qnl.vbw_hz != signal.vbw_hz)
    throw std::domain_error("qnl_calibrate: vbw_hz mismatch between traces");
  if (qnl.center_freq_hz != signal.center_freq_hz)
    throw std::domain_error("qnl_calibrate: center frequency mismatch between traces");
  const double mismatch =
      std::abs(power_signal_uw - power_qnl_uw) / power_qnl_uw;
  if (mismatch > tol_fraction)
    throw std::domain_error(
        "qnl_calibrate: optical power mismatch exceeds tolerance, QNL invalid");
  return trace_stats(signal).mean_db - trace_stats(qnl).mean_db;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& source,
                           std::size_t line, const char* what) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw parse_error(source, line,
                      std::string("cannot parse ") + what + " from '" +
                          std::string(s) + "'");
  return v;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline void write_trace(const Trace& t, std::ostream& out) {
  validate(t);
  out << "# rbw_hz=" << detail::format_double(t.rbw_hz) << '\n'
      << "# vbw_hz=" << detail::format_double(t.vbw_hz) << '\n'
      << "# center_freq_hz=" << detail::format_double(t.center_freq_hz) << '\n'
      << "# label=" << t.label << '\n'
      << "time_s,level_db\n";
  for (const auto& s : t.samples)
    out << detail::format_double(s.time_s) << ','
        << detail::format_double(s.level_db) << '\n';
}

inline void write_trace(const Trace& t, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_trace: cannot open '" + path + "'");
  write_trace(t, out);
  if (!out)
    throw std::runtime_error("write_trace: write failed for '" + path + "'");
}

inline Trace read_trace(std::istream& in, const std::string& source) {
  Trace t;
  bool have_rbw = false, have_vbw = false, have_center = false, have_label = false;
  bool header_row_seen = false;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (header_row_seen)
        throw parse_error(source, lineno, "header key after data header row");
      line.remove_prefix(1);
      line = detail::trim(line);
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw parse_error(source, lineno, "expected '# key=value'");
      const std::string_view key = detail::trim(line.substr(0, eq));
      const std::string_view value = detail::trim(line.substr(eq + 1));
      if (key == "rbw_hz") {
        t.rbw_hz = detail::parse_double(value, source, lineno, "rbw_hz");
        have_rbw = true;
      } else if (key == "vbw_hz") {
        t.vbw_hz = detail::parse_double(value, source, lineno, "vbw_hz");
        have_vbw = true;
      } else if (key == "center_freq_hz") {
        t.center_freq_hz =
            detail::parse_double(value, source, lineno, "center_freq_hz");
        have_center = true;
      } else if (key == "label") {
        t.label = std::string(value);
        have_label = true;
      } else {
        throw parse_error(source, lineno,
                          "unknown header key '" + std::string(key) + "'");
      }
      continue;
    }
    if (!header_row_seen) {
      if (line != "time_s,level_db")
        throw parse_error(source, lineno,
                          "expected column header 'time_s,level_db'");
      header_row_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos)
      throw parse_error(source, lineno, "expected 'time,level' data row");
    const double time =
        detail::parse_double(detail::trim(line.substr(0, comma)), source,
                             lineno, "time_s");
    const double level =
        detail::parse_double(detail::trim(line.substr(comma + 1)), source,
                             lineno, "level_db");
    t.samples.push_back({time, level});
  }
  if (!have_rbw) throw parse_error(source, lineno, "missing header key 'rbw_hz'");
  if (!have_vbw) throw parse_error(source, lineno, "missing header key 'vbw_hz'");
  if (!have_center)
    throw parse_error(source, lineno, "missing header key 'center_freq_hz'");
  if (!have_label) throw parse_error(source, lineno, "missing header key 'label'");
  if (!header_row_seen)
    throw parse_error(source, lineno, "missing column header 'time_s,level_db'");
  try {
    validate(t);
  } catch (const std::domain_error& e) {
    throw parse_error(source, lineno, e.what());
  }
  return t;
}

inline Trace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("read_trace: cannot open '" + path + "'");
  return read_trace(in, path);
}

}  // namespace epr
