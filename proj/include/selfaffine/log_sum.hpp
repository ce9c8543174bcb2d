#pragma once

#include <limits>

namespace selfaffine {

// Sum of positive terms supplied as logarithms. Terms of moderate size are
// added directly with Neumaier compensation; the rest go through a
// log-domain accumulator. Merging is order-sensitive only through floating
// rounding, so callers merge in a fixed order.
class LogSumAccumulator {
 public:
  void add_log(double log_term) noexcept;
  void merge(const LogSumAccumulator& other) noexcept;
  double log() const noexcept;

 private:
  void add_plain(double term) noexcept;

  double sum_ = 0.0;
  double compensation_ = 0.0;
  double log_extra_ = -std::numeric_limits<double>::infinity();
};

double log_add_exp(double a, double b) noexcept;

}  // namespace selfaffine
