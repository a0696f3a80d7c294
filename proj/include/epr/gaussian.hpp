#pragma once

// Two-mode squeezed-state quadrature algebra, dB conversions, and the
// Duan inseparability test.
//
// Normalization convention used throughout this library: every variance is
// stored relative to the quantum noise limit (QNL) of a coherent state of
// the same optical power. A coherent state therefore reads 1.0 (0 dB), the
// correlation variances of a two-mode squeezed state read e^(-2r) each, and
// the Duan bound on the sum of the two normalized correlation variances
// is 2. Measured dB levels quoted "below the QNL" convert directly via
// linear_from_db without further scaling.

#include <cmath>
#include <stdexcept>

namespace epr {

// 10*log10(v) for a linear power ratio v > 0.
inline double db_from_linear(double v) {
  if (!(v > 0.0))
    throw std::domain_error("db_from_linear: ratio must be > 0");
  return 10.0 * std::log10(v);
}

// 10^(x/10); inverse of db_from_linear.
inline double linear_from_db(double x) {
  if (!std::isfinite(x))
    throw std::domain_error("linear_from_db: dB value must be finite");
  return std::pow(10.0, x / 10.0);
}

// Two-mode squeezed state, parametrized by the correlation parameter r.
// r = 0: no correlation (coherent state), r -> inf: ideal correlation.
struct TwoModeState {
  double r = 0.0;
};

// QNL-normalized correlation variances of the amplitude sum and the phase
// difference of the two modes.
struct CorrelationVariances {
  double v_sum_x = 1.0;
  double v_diff_y = 1.0;
};

inline void validate(const CorrelationVariances& v) {
  if (!(v.v_sum_x > 0.0) || !(v.v_diff_y > 0.0))
    throw std::domain_error("CorrelationVariances: variances must be > 0");
}

// Both correlation variances of a two-mode squeezed state: e^(-2r).
inline CorrelationVariances variances_from_r(double r) {
  if (!(r >= 0.0))
    throw std::domain_error("variances_from_r: r must be >= 0");
  const double v = std::exp(-2.0 * r);
  return {v, v};
}

inline CorrelationVariances variances_from_r(const TwoModeState& s) {
  return variances_from_r(s.r);
}

struct DuanResult {
  double sum = 2.0;
  bool entangled = false;
};

// Duan inseparability test: the state is entangled iff the sum of the two
// normalized correlation variances falls below 2.
inline DuanResult duan_sum(const CorrelationVariances& v) {
  validate(v);
  const double s = v.v_sum_x + v.v_diff_y;
  return {s, s < 2.0};
}

}  // namespace epr
