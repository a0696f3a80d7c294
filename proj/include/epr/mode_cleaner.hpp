#pragma once

// Traveling-wave mode cleaner as a first-order low-pass filter on classical
// excess noise. A passive cavity cannot attenuate the vacuum floor, so only
// the excess (above-QNL) power is filtered; filtered traces sit at the QNL,
// never below it.

#include <cmath>
#include <stdexcept>

#include "epr/gaussian.hpp"

namespace epr {

struct ModeCleanerParams {
  double linewidth_hz = 0.0;  // FWHM
  double finesse = 1000.0;    // informational
};

inline void validate(const ModeCleanerParams& mc) {
  if (!(mc.linewidth_hz > 0.0))
    throw std::domain_error("ModeCleanerParams: linewidth must be > 0");
  if (!(mc.finesse > 1.0))
    throw std::domain_error("ModeCleanerParams: finesse must be > 1");
}

// The as-built cleaners: MC1 on the 1080 nm seed, MC2 on the 540 nm pump.
inline constexpr ModeCleanerParams mc1{1.0e6, 700.0};
inline constexpr ModeCleanerParams mc2{600.0e3, 1000.0};

struct ExcessNoisePoint {
  double freq_hz = 0.0;
  double excess_db = 0.0;  // noise above QNL, >= 0
};

inline void validate(const ExcessNoisePoint& p) {
  if (!(p.freq_hz > 0.0))
    throw std::domain_error("ExcessNoisePoint: frequency must be > 0");
  if (!(p.excess_db >= 0.0))
    throw std::domain_error("ExcessNoisePoint: excess must be >= 0 dB");
}

// First-order cavity pole, |H(f)|^2 = 1 / (1 + (f / HWHM)^2).
inline double lowpass_power_transfer(double f_hz, const ModeCleanerParams& mc) {
  validate(mc);
  if (!(f_hz >= 0.0))
    throw std::domain_error("lowpass_power_transfer: frequency must be >= 0");
  const double x = f_hz / (0.5 * mc.linewidth_hz);
  return 1.0 / (1.0 + x * x);
}

// Filter the excess power only; the QNL floor passes untouched:
// total_out = 1 + (10^(excess/10) - 1) * |H|^2.
inline ExcessNoisePoint filter_excess_noise(const ExcessNoisePoint& p,
                                            const ModeCleanerParams& mc) {
  validate(p);
  const double transfer = lowpass_power_transfer(p.freq_hz, mc);
  const double total = 1.0 + (linear_from_db(p.excess_db) - 1.0) * transfer;
  return {p.freq_hz, db_from_linear(total)};
}

}  // namespace epr
