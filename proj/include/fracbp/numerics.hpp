#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace fracbp {

/// log(exp(a) + exp(b)) without overflow.
inline double log_sum_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (std::isinf(a) && a < 0) return a; // both -inf
  return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp4(double a, double b, double c, double d) {
  const double m = std::max(std::max(a, b), std::max(c, d));
  if (std::isinf(m) && m < 0) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m) +
                      std::exp(d - m));
}

/// x*log(x) with the 0*log(0) := 0 convention.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// Kahan compensated accumulator for long sums that feed tight identities.
class KahanSum {
public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

} // namespace fracbp
