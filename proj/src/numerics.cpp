#include "pfmc/numerics.hpp"

#include <algorithm>
#include <limits>

namespace pfmc {

double log_sum_exp(std::span<const double> xs) noexcept {
  double max = -std::numeric_limits<double>::infinity();
  for (double x : xs) max = std::max(max, x);
  if (!std::isfinite(max)) return max;
  CompensatedSum s;
  for (double x : xs) s.add(std::exp(x - max));
  return max + std::log(s.value());
}

double log_mean_exp(std::span<const double> xs) noexcept {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  return log_sum_exp(xs) - std::log(static_cast<double>(xs.size()));
}

SignedLog SignedLog::from_value(double x) noexcept {
  if (x == 0.0) return {};
  return {x > 0.0 ? 1 : -1, std::log(std::fabs(x))};
}

SignedLog SignedLog::from_log(double log_abs, int sign) noexcept {
  if (sign == 0 || log_abs == -std::numeric_limits<double>::infinity()) return {};
  return {sign > 0 ? 1 : -1, log_abs};
}

SignedLog SignedLog::operator*(const SignedLog& o) const noexcept {
  if (sign == 0 || o.sign == 0) return {};
  return {sign * o.sign, log_abs + o.log_abs};
}

SignedLog signed_log_sum(std::span<const SignedLog> terms) noexcept {
  double max = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    if (t.sign != 0) max = std::max(max, t.log_abs);
  }
  if (max == -std::numeric_limits<double>::infinity()) return {};
  CompensatedSum s;
  for (const auto& t : terms) {
    if (t.sign != 0) s.add(t.sign * std::exp(t.log_abs - max));
  }
  const double scaled = s.value();
  if (scaled == 0.0) return {};
  return {scaled > 0.0 ? 1 : -1, max + std::log(std::fabs(scaled))};
}

void SignedLogAccumulator::add(SignedLog term) noexcept {
  if (term.sign == 0) return;
  if (term.log_abs > max_) {
    const double rescale = max_ == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(max_ - term.log_abs);
    CompensatedSum rescaled;
    rescaled.add(scaled_.value() * rescale);
    scaled_ = rescaled;
    max_ = term.log_abs;
  }
  scaled_.add(term.sign * std::exp(term.log_abs - max_));
}

SignedLog SignedLogAccumulator::total() const noexcept {
  const double scaled = scaled_.value();
  if (scaled == 0.0 || max_ == -std::numeric_limits<double>::infinity()) return {};
  return {scaled > 0.0 ? 1 : -1, max_ + std::log(std::fabs(scaled))};
}

}  // namespace pfmc
