#include "pfmc/taylor.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "pfmc/errors.hpp"
#include "pfmc/numerics.hpp"

namespace pfmc {

SopFunction taylor_sop_exp(std::size_t J, std::size_t K) {
  if (K == 0) throw InvalidArgument("taylor_sop_exp: need at least one block");
  std::vector<double> coeffs(J + 1);
  for (std::size_t j = 0; j <= J; ++j) coeffs[j] = std::exp(-log_factorial(j));
  ColumnEvaluator powers = [](BlockPoint x, std::span<double> out) {
    double p = 1.0;
    for (double& o : out) {
      o = p;
      p *= x[0];
    }
  };
  return SopFunction::from_columns(J + 1, std::vector<ColumnEvaluator>(K, powers), std::move(coeffs));
}

namespace {

double log_term(double log_z, std::size_t K, std::size_t j) {
  const auto jd = static_cast<double>(j);
  const double power = j == 0 ? 0.0 : jd * log_z;
  return power - log_factorial(j) - static_cast<double>(K) * std::log(jd + 1.0);
}

// log sum_{j >= start} z^j / (j! (j+1)^K).
double log_series_from(double z, std::size_t K, std::size_t start, double tol) {
  if (!(z > 0.0)) throw InvalidArgument("hypergeometric series: argument must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("hypergeometric series: tolerance must be positive");
  const double log_z = std::log(z);
  double log_sum = -std::numeric_limits<double>::infinity();
  for (std::size_t j = start;; ++j) {
    const double lt = log_term(log_z, K, j);
    log_sum = log_sum == -std::numeric_limits<double>::infinity()
                  ? lt
                  : std::max(log_sum, lt) + std::log1p(std::exp(-std::fabs(log_sum - lt)));
    const double log_ratio = log_term(log_z, K, j + 1) - lt;
    if (log_ratio < 0.0) {
      const double r = std::exp(log_ratio);
      // Terms decrease geometrically at least as fast as r from here on.
      const double log_tail = lt + std::log(r / (1.0 - r));
      if (log_tail < std::log(tol) + log_sum) break;
    }
    if (j > start + 100'000'000) throw NumericalError("hypergeometric series did not converge");
  }
  return log_sum;
}

}  // namespace

double hypergeometric_kk(double z, std::size_t K, double tol) { return std::exp(log_series_from(z, K, 0, tol)); }

double pfq_mean(double a, std::size_t K, double tol) {
  if (!(a > 0.0)) throw InvalidArgument("pfq_mean: a must be positive");
  return hypergeometric_kk(std::pow(a, static_cast<double>(K)), K, tol);
}

double standard_asymptotic_variance(double a, std::size_t K, double tol) {
  if (!(a > 0.0)) throw InvalidArgument("standard_asymptotic_variance: a must be positive");
  const double z = std::pow(a, static_cast<double>(K));
  const double m = hypergeometric_kk(z, K, tol);
  return hypergeometric_kk(2.0 * z, K, tol) - m * m;
}

double taylor_bias(double a, std::size_t K, std::size_t J, double tol) {
  if (!(a > 0.0)) throw InvalidArgument("taylor_bias: a must be positive");
  return std::exp(log_series_from(std::pow(a, static_cast<double>(K)), K, J + 1, tol));
}

double taylor_pf_asymptotic_variance(double a, std::size_t K, std::size_t J) {
  if (!(a > 0.0)) throw InvalidArgument("taylor_pf_asymptotic_variance: a must be positive");
  const double log_a = std::log(a);
  const auto kd = static_cast<double>(K);
  std::vector<double> logs;
  for (std::size_t i = 1; i <= J; ++i) {
    for (std::size_t j = 1; j <= J; ++j) {
      const auto id = static_cast<double>(i);
      const auto jd = static_cast<double>(j);
      logs.push_back(-log_factorial(i) - log_factorial(j) + std::log(id * jd / (id + jd + 1.0)) +
                     kd * ((id + jd) * log_a - std::log(id + 1.0) - std::log(jd + 1.0)));
    }
  }
  if (logs.empty()) return 0.0;
  return kd * std::exp(log_sum_exp(logs));
}

std::size_t default_taylor_order(double a, std::size_t K) {
  return static_cast<std::size_t>(std::ceil(1.2 * std::pow(a, static_cast<double>(K)))) + 2;
}

}  // namespace pfmc
