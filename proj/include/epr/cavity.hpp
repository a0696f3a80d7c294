#pragma once

// NOPA cavity arithmetic (finesse, FSR, linewidth, escape efficiency,
// pump ratio) and the below-threshold squeezing/antisqueezing spectrum.
//
// Linewidths are FWHM everywhere; normalized analysis frequencies are in
// units of the cavity half width (HWHM).

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace epr {

inline constexpr double speed_of_light_mps = 299792458.0;

// Cavity described by its output-coupler power transmission, the remaining
// round-trip intracavity loss, and the geometric length. standing_wave
// selects a round-trip path of 2*length (one-way ring otherwise).
struct CavityParams {
  double t_out = 0.0;     // output coupler power transmission, fraction
  double l_intra = 0.0;   // round-trip intracavity loss, fraction
  double length_m = 0.0;  // geometric cavity length, m
  bool standing_wave = true;
};

inline void validate(const CavityParams& c) {
  if (!(c.t_out > 0.0 && c.t_out < 1.0))
    throw std::domain_error("CavityParams: t_out must be in (0, 1)");
  if (!(c.l_intra >= 0.0 && c.l_intra < 1.0))
    throw std::domain_error("CavityParams: l_intra must be in [0, 1)");
  if (!(c.t_out + c.l_intra < 1.0))
    throw std::domain_error("CavityParams: t_out + l_intra must be < 1");
  if (!(c.length_m > 0.0))
    throw std::domain_error("CavityParams: length_m must be > 0");
}

// Fraction of the intracavity field that leaves through the output coupler,
// T / (T + L).
inline double escape_efficiency(const CavityParams& c) {
  validate(c);
  return c.t_out / (c.t_out + c.l_intra);
}

// 2*pi / (T + L). T + L > 0 is guaranteed by the parameter invariants.
inline double finesse(const CavityParams& c) {
  validate(c);
  return 2.0 * std::numbers::pi / (c.t_out + c.l_intra);
}

inline double free_spectral_range_hz(const CavityParams& c) {
  validate(c);
  const double path = c.standing_wave ? 2.0 * c.length_m : c.length_m;
  return speed_of_light_mps / path;
}

// FWHM cavity linewidth, FSR / finesse.
inline double linewidth_hz(const CavityParams& c) {
  return free_spectral_range_hz(c) / finesse(c);
}

// Below-threshold operating point of the amplifier.
struct OperatingPoint {
  double pump_power_mw = 0.0;
  double threshold_power_mw = 0.0;
  double analysis_freq_hz = 0.0;
};

inline void validate(const OperatingPoint& op) {
  if (!(op.threshold_power_mw > 0.0))
    throw std::domain_error("OperatingPoint: threshold power must be > 0");
  if (!(op.pump_power_mw >= 0.0))
    throw std::domain_error("OperatingPoint: pump power must be >= 0");
  if (!(op.pump_power_mw < op.threshold_power_mw))
    throw std::domain_error(
        "OperatingPoint: pump at or above threshold (below-threshold model only)");
  if (!(op.analysis_freq_hz > 0.0))
    throw std::domain_error("OperatingPoint: analysis frequency must be > 0");
}

// Pump ratio sigma = sqrt(P / P_th), in [0, 1) below threshold.
inline double pump_ratio_sigma(const OperatingPoint& op) {
  validate(op);
  return std::sqrt(op.pump_power_mw / op.threshold_power_mw);
}

// Pump ratio from the maximum (de)amplification gain, g = 1/(1 - sigma)^2.
inline double sigma_from_gain(double g) {
  if (!(g > 1.0))
    throw std::domain_error("sigma_from_gain: gain must be > 1");
  return 1.0 - 1.0 / std::sqrt(g);
}

// Analysis frequency in cavity-HWHM units, f / (linewidth/2).
inline double normalized_frequency(const CavityParams& c, double f_hz) {
  if (!(f_hz >= 0.0))
    throw std::domain_error("normalized_frequency: frequency must be >= 0");
  return f_hz / (0.5 * linewidth_hz(c));
}

// One analysis-frequency point of the output spectrum, QNL-normalized.
// v_squeezed is each of the two correlation variances (amplitude sum /
// phase difference); v_antisqueezed is the conjugate combination.
struct SqueezingSpectrumPoint {
  double v_squeezed = 1.0;
  double v_antisqueezed = 1.0;
};

// Lorentzian spectrum of a below-threshold parametric amplifier at pump
// ratio sigma, normalized frequency omega_norm and total efficiency eta:
//
//   V- = 1 - eta * 4 sigma / ((1 + sigma)^2 + omega^2)
//   V+ = 1 + eta * 4 sigma / ((1 - sigma)^2 + omega^2)
//
// On resonance with eta = 1 this reduces to V- = ((1-sigma)/(1+sigma))^2,
// i.e. e^(-2r) with r = ln((1+sigma)/(1-sigma)), and V- * V+ = 1.
inline SqueezingSpectrumPoint squeezing_spectrum(double sigma,
                                                 double omega_norm,
                                                 double eta_total) {
  if (!(sigma >= 0.0 && sigma < 1.0))
    throw std::domain_error("squeezing_spectrum: sigma must be in [0, 1)");
  if (!(omega_norm >= 0.0))
    throw std::domain_error("squeezing_spectrum: omega_norm must be >= 0");
  if (!(eta_total > 0.0 && eta_total <= 1.0))
    throw std::domain_error("squeezing_spectrum: eta_total must be in (0, 1]");
  const double om2 = omega_norm * omega_norm;
  const double up2 = (1.0 + sigma) * (1.0 + sigma);
  const double dn2 = (1.0 - sigma) * (1.0 - sigma);
  // 1 - eta*4s/(up2 + om2) rewritten with (1+s)^2 - 4s = (1-s)^2 so that the
  // numerator is a sum of non-negative terms; the direct form loses the
  // exact on-resonance identities to cancellation as sigma -> 1.
  const double v_sq = (dn2 + om2 + 4.0 * sigma * (1.0 - eta_total)) / (up2 + om2);
  const double v_anti = (dn2 + om2 + 4.0 * sigma * eta_total) / (dn2 + om2);
  return {v_sq, v_anti};
}

}  // namespace epr
