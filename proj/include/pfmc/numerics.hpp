#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace pfmc {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// log(sum_i exp(x_i)); -inf for an empty range or all -inf entries.
double log_sum_exp(std::span<const double> xs) noexcept;

/// log(n^-1 sum_i exp(x_i)).
double log_mean_exp(std::span<const double> xs) noexcept;

/// A real number stored as sign and log-magnitude. Zero has sign 0 and log_abs = -inf.
struct SignedLog {
  int sign = 0;
  double log_abs = -INFINITY;

  static SignedLog from_value(double x) noexcept;
  static SignedLog from_log(double log_abs, int sign = 1) noexcept;

  double value() const noexcept { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
  bool is_zero() const noexcept { return sign == 0; }

  SignedLog operator*(const SignedLog& o) const noexcept;
};

/// Sum of signed log-domain terms, accumulated relative to the largest magnitude.
SignedLog signed_log_sum(std::span<const SignedLog> terms) noexcept;

/// Streaming sum of signed log-domain terms, rescaled whenever a larger magnitude arrives.
class SignedLogAccumulator {
 public:
  void add(SignedLog term) noexcept;
  SignedLog total() const noexcept;

 private:
  double max_ = -INFINITY;
  CompensatedSum scaled_;
};

/// n! in log form.
inline double log_factorial(std::uint64_t n) noexcept { return std::lgamma(static_cast<double>(n) + 1.0); }

}  // namespace pfmc
