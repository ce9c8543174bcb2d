#include "selfaffine/log_sum.hpp"

#include <cmath>

namespace selfaffine {

namespace {
constexpr double kPlainRange = 600.0;
}

double log_add_exp(double a, double b) noexcept {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

void LogSumAccumulator::add_plain(double term) noexcept {
  const double t = sum_ + term;
  if (std::abs(sum_) >= std::abs(term))
    compensation_ += (sum_ - t) + term;
  else
    compensation_ += (term - t) + sum_;
  sum_ = t;
}

void LogSumAccumulator::add_log(double log_term) noexcept {
  if (log_term == -std::numeric_limits<double>::infinity()) return;
  if (std::abs(log_term) <= kPlainRange)
    add_plain(std::exp(log_term));
  else
    log_extra_ = log_add_exp(log_extra_, log_term);
}

void LogSumAccumulator::merge(const LogSumAccumulator& other) noexcept {
  add_plain(other.sum_);
  add_plain(other.compensation_);
  log_extra_ = log_add_exp(log_extra_, other.log_extra_);
}

double LogSumAccumulator::log() const noexcept {
  const double plain = sum_ + compensation_;
  const double log_plain =
      plain > 0.0 ? std::log(plain) : -std::numeric_limits<double>::infinity();
  return log_add_exp(log_plain, log_extra_);
}

}  // namespace selfaffine
