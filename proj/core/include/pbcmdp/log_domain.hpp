#ifndef PBCMDP_LOG_DOMAIN_HPP
#define PBCMDP_LOG_DOMAIN_HPP

#include <cmath>
#include <limits>
#include <span>

namespace pbcmdp {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) with the usual max shift.
inline double log_add(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

/// log of the summed exponentials of `vals`; kLogZero for an empty span.
inline double log_sum_exp(std::span<const double> vals) {
  double hi = kLogZero;
  for (double v : vals)
    if (v > hi) hi = v;
  if (hi == kLogZero) return kLogZero;
  double sum = 0.0;
  for (double v : vals) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

}  // namespace pbcmdp

#endif
