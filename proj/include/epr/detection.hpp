#pragma once

// Detection-chain degradation of the cavity output: efficiencies, residual
// phase-lock jitter, and the electronic noise floor of the detector.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "epr/cavity.hpp"

namespace epr {

struct DetectionParams {
  double eta_det = 1.0;        // photodiode efficiency, fraction
  double eta_mode = 1.0;       // mode-matching efficiency (power), fraction
  double theta_rms_deg = 0.0;  // residual phase-lock jitter, RMS degrees
  double elec_rel = 0.0;       // electronic floor, linear power relative to QNL
};

inline void validate(const DetectionParams& d) {
  if (!(d.eta_det > 0.0 && d.eta_det <= 1.0))
    throw std::domain_error("DetectionParams: eta_det must be in (0, 1]");
  if (!(d.eta_mode > 0.0 && d.eta_mode <= 1.0))
    throw std::domain_error("DetectionParams: eta_mode must be in (0, 1]");
  if (!(d.theta_rms_deg >= 0.0 && d.theta_rms_deg < 90.0))
    throw std::domain_error("DetectionParams: theta_rms_deg must be in [0, 90)");
  if (!(d.elec_rel >= 0.0 && d.elec_rel < 1.0))
    throw std::domain_error("DetectionParams: elec_rel must be in [0, 1)");
}

// Overall detection efficiency seen by the squeezing spectrum:
// escape * photodiode * mode matching.
inline double total_efficiency(double eta_esc, const DetectionParams& d) {
  if (!(eta_esc > 0.0 && eta_esc <= 1.0))
    throw std::domain_error("total_efficiency: eta_esc must be in (0, 1]");
  validate(d);
  return eta_esc * d.eta_det * d.eta_mode;
}

// Residual phase error mixes the antisqueezed quadrature into the measured
// one: v = V- cos^2(theta) + V+ sin^2(theta). theta is the RMS jitter used
// as a deterministic offset (at ~2 degrees the difference from a Gaussian
// average is below 0.5% of the phase-noise term).
inline double apply_phase_jitter(const SqueezingSpectrumPoint& p,
                                 double theta_deg) {
  if (!(theta_deg >= 0.0 && theta_deg < 90.0))
    throw std::domain_error("apply_phase_jitter: theta must be in [0, 90) degrees");
  if (!(p.v_squeezed > 0.0) || !(p.v_antisqueezed > 0.0))
    throw std::domain_error("apply_phase_jitter: variances must be > 0");
  const double th = theta_deg * std::numbers::pi / 180.0;
  const double s = std::sin(th);
  const double c = std::cos(th);
  return p.v_squeezed * c * c + p.v_antisqueezed * s * s;
}

// Forward model of the displayed level. The same electronic floor sits
// under both the signal and the QNL trace, so after QNL normalization
//   v_measured = v_true * (1 - elec_rel) + elec_rel
// and the QNL (v_true = 1) stays a fixed point.
inline double add_electronic_noise(double v_true, double elec_rel) {
  if (!(v_true > 0.0))
    throw std::domain_error("add_electronic_noise: variance must be > 0");
  if (!(elec_rel >= 0.0 && elec_rel < 1.0))
    throw std::domain_error("add_electronic_noise: elec_rel must be in [0, 1)");
  return v_true * (1.0 - elec_rel) + elec_rel;
}

// Exact inverse of add_electronic_noise. A measurement at or below the
// floor carries no information about the optical variance and is rejected.
inline double subtract_electronic_noise(double v_measured, double elec_rel) {
  if (!(elec_rel >= 0.0 && elec_rel < 1.0))
    throw std::domain_error("subtract_electronic_noise: elec_rel must be in [0, 1)");
  if (!(v_measured > elec_rel))
    throw std::domain_error(
        "subtract_electronic_noise: measurement at or below the electronic floor");
  return (v_measured - elec_rel) / (1.0 - elec_rel);
}

// Electronic floor implied by a (measured, corrected) pair of sub-QNL
// levels: elec_rel = (v_measured - v_corrected) / (1 - v_corrected).
inline double infer_electronic_noise(double v_measured, double v_corrected) {
  if (!(v_corrected > 0.0 && v_measured < 1.0 && v_corrected <= v_measured))
    throw std::domain_error(
        "infer_electronic_noise: need 0 < v_corrected <= v_measured < 1");
  return (v_measured - v_corrected) / (1.0 - v_corrected);
}

}  // namespace epr
