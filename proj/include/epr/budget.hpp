#pragma once

// End-to-end noise budget: cavity spectrum -> detection efficiency ->
// phase jitter -> electronic noise, plus deterministic least-squares
// parameter fitting and the escape/detection upgrade sweep.

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "epr/cavity.hpp"
#include "epr/detection.hpp"
#include "epr/gaussian.hpp"

namespace epr {

// Both QNL-normalized correlation variances at one stage of the chain. The
// model is symmetric in the amplitude sum and the phase difference, so v
// stands for each of the two (squeezed) correlation variances and v_anti
// for their conjugate combinations.
struct BudgetStage {
  double v = 1.0;
  double v_db = 0.0;
  double v_anti = 1.0;
  double v_anti_db = 0.0;
};

struct BudgetReport {
  CavityParams cavity;
  OperatingPoint op;
  DetectionParams det;

  double sigma = 0.0;
  double omega_norm = 0.0;
  double eta_esc = 1.0;
  double eta_total = 1.0;

  BudgetStage ideal;             // cavity output, lossless detection
  BudgetStage after_efficiency;  // after escape * photodiode * mode matching
  BudgetStage after_jitter;      // electronic-noise-free ("corrected") level
  BudgetStage measured;          // what the spectrum analyzer displays

  DuanResult duan_corrected;  // on the after_jitter pair
  DuanResult duan_measured;   // on the measured pair
};

namespace detail {

inline BudgetStage make_stage(double v, double v_anti) {
  return {v, db_from_linear(v), v_anti, db_from_linear(v_anti)};
}

}  // namespace detail

// Full-chain prediction. Each successive stage can only degrade the
// squeezed correlation variance.
inline BudgetReport predict(const CavityParams& c, const OperatingPoint& op,
                            const DetectionParams& d) {
  BudgetReport r;
  r.cavity = c;
  r.op = op;
  r.det = d;
  r.sigma = pump_ratio_sigma(op);
  r.omega_norm = normalized_frequency(c, op.analysis_freq_hz);
  r.eta_esc = escape_efficiency(c);
  r.eta_total = total_efficiency(r.eta_esc, d);

  const auto ideal = squeezing_spectrum(r.sigma, r.omega_norm, 1.0);
  const auto eff = squeezing_spectrum(r.sigma, r.omega_norm, r.eta_total);
  const double v_jit = apply_phase_jitter(eff, d.theta_rms_deg);
  const double v_jit_anti =
      apply_phase_jitter({eff.v_antisqueezed, eff.v_squeezed}, d.theta_rms_deg);
  const double v_meas = add_electronic_noise(v_jit, d.elec_rel);
  const double v_meas_anti = add_electronic_noise(v_jit_anti, d.elec_rel);

  r.ideal = detail::make_stage(ideal.v_squeezed, ideal.v_antisqueezed);
  r.after_efficiency = detail::make_stage(eff.v_squeezed, eff.v_antisqueezed);
  r.after_jitter = detail::make_stage(v_jit, v_jit_anti);
  r.measured = detail::make_stage(v_meas, v_meas_anti);
  r.duan_corrected = duan_sum({v_jit, v_jit});
  r.duan_measured = duan_sum({v_meas, v_meas});
  return r;
}

// One target level for the fit. quantity is "measured" (displayed level) or
// "corrected" (electronic-noise-free level); values are dB relative to QNL.
struct Measurement {
  std::string quantity;
  double value_db = 0.0;
};

// A fitted parameter with its search bounds. Supported names: sigma,
// eta_det, eta_mode, theta_deg, elec_rel, t_out, l_intra.
struct FreeParameter {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
};

struct FitResult {
  std::map<std::string, double> values;
  double residual = 0.0;  // sum of squared dB errors at the optimum
  int grid_points = 0;    // per free parameter
  std::map<std::string, double> cell_width;
};

namespace detail {

inline void apply_fit_parameter(const std::string& name, double value,
                                CavityParams& c, OperatingPoint& op,
                                DetectionParams& d) {
  if (name == "sigma")
    op.pump_power_mw = value * value * op.threshold_power_mw;
  else if (name == "eta_det")
    d.eta_det = value;
  else if (name == "eta_mode")
    d.eta_mode = value;
  else if (name == "theta_deg")
    d.theta_rms_deg = value;
  else if (name == "elec_rel")
    d.elec_rel = value;
  else if (name == "t_out")
    c.t_out = value;
  else if (name == "l_intra")
    c.l_intra = value;
  else
    throw std::invalid_argument("fit: unknown free parameter '" + name + "'");
}

inline double report_quantity_db(const BudgetReport& r,
                                 const std::string& quantity) {
  if (quantity == "measured") return r.measured.v_db;
  if (quantity == "corrected") return r.after_jitter.v_db;
  throw std::invalid_argument("fit: unknown quantity '" + quantity +
                              "' (expected 'measured' or 'corrected')");
}

inline constexpr double kInvalidObjective = std::numeric_limits<double>::infinity();

// Sum of squared dB residuals; infinite when the parameter point is
// outside the model's domain.
inline double fit_objective(const std::vector<double>& x,
                            const std::vector<FreeParameter>& free_params,
                            const std::vector<Measurement>& measured,
                            CavityParams c, OperatingPoint op,
                            DetectionParams d) {
  for (std::size_t i = 0; i < free_params.size(); ++i)
    apply_fit_parameter(free_params[i].name, x[i], c, op, d);
  BudgetReport r;
  try {
    r = predict(c, op, d);
  } catch (const std::domain_error&) {
    return kInvalidObjective;
  }
  double ss = 0.0;
  for (const auto& m : measured) {
    const double res = report_quantity_db(r, m.quantity) - m.value_db;
    ss += res * res;
  }
  return ss;
}

// Golden-section line minimization on [a, b]. Unimodality is not assumed
// globally; this only polishes within one grid cell of the best scan point.
template <typename F>
inline double golden_section_min(F f, double a, double b) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(a) + std::abs(b));
       ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace detail

// Deterministic least-squares fit of up to 3 named parameters against
// measured dB levels: dense grid scan (grid_points per parameter, lowest
// index wins ties) followed by coordinate-wise golden-section refinement
// within the winning cell. No randomness anywhere, so results are
// reproducible bit for bit.
inline FitResult fit(const std::vector<Measurement>& measured,
                     const std::vector<FreeParameter>& free_params,
                     const CavityParams& c, const OperatingPoint& op,
                     const DetectionParams& d, int grid_points = 101) {
  if (measured.empty())
    throw std::invalid_argument("fit: need at least one measurement");
  if (free_params.empty())
    throw std::invalid_argument("fit: need at least one free parameter");
  if (free_params.size() > 3)
    throw std::invalid_argument("fit: at most 3 free parameters supported");
  if (grid_points < 2)
    throw std::invalid_argument("fit: need at least 2 grid points");
  for (const auto& p : free_params) {
    if (!std::isfinite(p.lo) || !std::isfinite(p.hi))
      throw std::invalid_argument("fit: unbounded free parameter '" + p.name + "'");
    if (!(p.lo < p.hi))
      throw std::invalid_argument("fit: empty bounds for '" + p.name + "'");
  }
  for (const auto& m : measured) {
    if (m.quantity != "measured" && m.quantity != "corrected")
      throw std::invalid_argument("fit: unknown quantity '" + m.quantity + "'");
    if (!std::isfinite(m.value_db))
      throw std::invalid_argument("fit: measurement value must be finite");
  }

  const std::size_t dims = free_params.size();
  const auto grid_value = [&](std::size_t dim, int j) {
    const auto& p = free_params[dim];
    return p.lo + (p.hi - p.lo) * static_cast<double>(j) /
                      static_cast<double>(grid_points - 1);
  };
  const auto objective = [&](const std::vector<double>& x) {
    return detail::fit_objective(x, free_params, measured, c, op, d);
  };

  // Dense scan, row-major over parameter order.
  std::vector<int> idx(dims, 0), best_idx(dims, 0);
  std::vector<double> x(dims);
  double best = detail::kInvalidObjective;
  bool done = false;
  while (!done) {
    for (std::size_t k = 0; k < dims; ++k) x[k] = grid_value(k, idx[k]);
    const double s = objective(x);
    if (s < best) {
      best = s;
      best_idx = idx;
    }
    done = true;
    for (std::size_t k = dims; k-- > 0;) {
      if (++idx[k] < grid_points) {
        done = false;
        break;
      }
      idx[k] = 0;
    }
  }
  if (!std::isfinite(best))
    throw std::domain_error("fit: no feasible point inside the given bounds");

  std::vector<double> best_x(dims);
  for (std::size_t k = 0; k < dims; ++k) best_x[k] = grid_value(k, best_idx[k]);

  // Coordinate-wise polish within one grid cell of the scan winner.
  for (int pass = 0; pass < 3; ++pass) {
    for (std::size_t k = 0; k < dims; ++k) {
      const auto& p = free_params[k];
      const double cell = (p.hi - p.lo) / static_cast<double>(grid_points - 1);
      const double a = std::max(p.lo, best_x[k] - cell);
      const double b = std::min(p.hi, best_x[k] + cell);
      const double xk = detail::golden_section_min(
          [&](double v) {
            std::vector<double> probe = best_x;
            probe[k] = v;
            return objective(probe);
          },
          a, b);
      std::vector<double> probe = best_x;
      probe[k] = xk;
      const double s = objective(probe);
      if (s < best) {
        best = s;
        best_x = probe;
      }
    }
  }

  FitResult out;
  out.residual = best;
  out.grid_points = grid_points;
  for (std::size_t k = 0; k < dims; ++k) {
    out.values[free_params[k].name] = best_x[k];
    out.cell_width[free_params[k].name] =
        (free_params[k].hi - free_params[k].lo) /
        static_cast<double>(grid_points - 1);
  }
  return out;
}

struct SigmaRange {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 1;  // 1 evaluates lo only
};

struct UpgradeResult {
  double best_sigma = 0.0;
  double best_corrected_db = 0.0;
  bool capped = false;  // depth clipped at the -60 dB reporting floor
  double linewidth_hz = 0.0;
  double omega_norm = 0.0;
  double eta_esc = 1.0;
  double eta_total = 1.0;
};

// Reporting floor for entanglement depth; idealized parameter sets are
// otherwise unbounded below.
inline constexpr double depth_cap_db = -60.0;

// Scan the pump ratio for the deepest electronic-noise-free correlation
// level of an upgraded cavity/detector combination. The cavity linewidth
// (hence omega) is recomputed from the upgraded mirror set.
inline UpgradeResult sweep_upgrade(const CavityParams& c_upgraded,
                                   const DetectionParams& d_upgraded,
                                   const SigmaRange& range, double f_hz) {
  validate(c_upgraded);
  validate(d_upgraded);
  if (range.steps < 1)
    throw std::invalid_argument("sweep_upgrade: empty sigma range");
  if (!(range.lo >= 0.0 && range.lo <= range.hi && range.hi < 1.0))
    throw std::domain_error("sweep_upgrade: sigma range must lie in [0, 1)");
  if (!(f_hz > 0.0))
    throw std::domain_error("sweep_upgrade: analysis frequency must be > 0");

  UpgradeResult out;
  out.linewidth_hz = linewidth_hz(c_upgraded);
  out.omega_norm = normalized_frequency(c_upgraded, f_hz);
  out.eta_esc = escape_efficiency(c_upgraded);
  out.eta_total = total_efficiency(out.eta_esc, d_upgraded);

  const auto corrected = [&](double sigma) {
    return apply_phase_jitter(
        squeezing_spectrum(sigma, out.omega_norm, out.eta_total),
        d_upgraded.theta_rms_deg);
  };

  double best_sigma = range.lo;
  double best_v = corrected(range.lo);
  for (int j = 1; j < range.steps; ++j) {
    const double sigma = range.lo + (range.hi - range.lo) *
                                        static_cast<double>(j) /
                                        static_cast<double>(range.steps - 1);
    const double v = corrected(sigma);
    if (v < best_v) {
      best_v = v;
      best_sigma = sigma;
    }
  }
  if (range.steps > 1) {
    const double cell = (range.hi - range.lo) / static_cast<double>(range.steps - 1);
    const double a = std::max(range.lo, best_sigma - cell);
    const double b = std::min(range.hi, best_sigma + cell);
    const double refined = detail::golden_section_min(corrected, a, b);
    if (corrected(refined) < best_v) {
      best_sigma = refined;
      best_v = corrected(refined);
    }
  }

  out.best_sigma = best_sigma;
  const double db = db_from_linear(best_v);
  out.capped = db < depth_cap_db;
  out.best_corrected_db = out.capped ? depth_cap_db : db;
  return out;
}

}  // namespace epr
