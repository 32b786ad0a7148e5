#include "pfmc/theory.hpp"

#include <cmath>

#include "pfmc/errors.hpp"

namespace pfmc {

namespace {

// log(exp(K log1p(c)) - 1) without overflow.
double log_expm1_power(double c, int K) {
  const double a = K * std::log1p(c);
  return a > 30.0 ? a + std::log1p(-std::exp(-a)) : std::log(std::expm1(a));
}

}  // namespace

double iid_product_ratio(double cv, int K) {
  if (!(cv > 0.0) || K < 1) throw InvalidArgument("iid_product_ratio: need cv > 0 and K >= 1");
  const double c = cv * cv;
  return std::exp(log_expm1_power(c, K) - std::log(c * K));
}

double tail_indicator_ratio(double alpha) {
  const double upper = 0.5 * std::erfc(alpha / std::sqrt(2.0));
  return (1.0 + upper) / (2.0 * upper);
}

FrontierResult efficiency_frontier(double sigma_sq, double sigma_sq_pf, int K, double target_sigma_sq, double c_r) {
  if (!(sigma_sq > 0.0) || !(sigma_sq_pf > 0.0) || !(target_sigma_sq > 0.0))
    throw InvalidArgument("efficiency_frontier: variances must be positive");
  if (K < 1) throw InvalidArgument("efficiency_frontier: K must be at least 1");
  if (!(c_r >= 0.0)) throw InvalidArgument("efficiency_frontier: C_r must be nonnegative");
  FrontierResult r;
  r.log_lhs = std::log(sigma_sq) - std::log(sigma_sq_pf);
  const double log_ratio = std::log(sigma_sq_pf) - std::log(target_sigma_sq);
  const double a = (K - 1) * log_ratio + (c_r > 0.0 ? std::log(c_r) : -INFINITY);
  const double m = std::max(a, 0.0);
  r.log_rhs = m + std::log(std::exp(a - m) + std::exp(-m)) - std::log1p(c_r);
  r.log_rhs_large_k = (K - 1) * log_ratio - std::log(2.0);
  r.large_k_satisfied = r.log_lhs >= r.log_rhs_large_k;
  if (!(sigma_sq_pf > target_sigma_sq)) {
    r.status = FrontierStatus::RegimeViolation;
    return r;
  }
  r.status = r.log_lhs >= r.log_rhs ? FrontierStatus::Satisfied : FrontierStatus::NotSatisfied;
  return r;
}

IidFrontier iid_frontier(double cv, int K, double eps) {
  if (!(cv > 0.0) || K < 1 || !(eps > 0.0)) throw InvalidArgument("iid_frontier: need cv > 0, K >= 1, eps > 0");
  const double c = cv * cv;
  IidFrontier f;
  const double log_num = log_expm1_power(c, K);
  f.log_lhs = log_num - std::log(c * K);
  f.log_rhs = (K - 1) * std::log(c * K / (eps * eps)) - std::log(2.0);
  f.log_lhs_alt = log_num - K * std::log(c);
  f.log_rhs_alt = 2.0 * std::log(eps) - std::log(2.0) + K * (std::log(static_cast<double>(K)) - 2.0 * std::log(eps));
  f.satisfied = f.log_lhs >= f.log_rhs;
  return f;
}

}  // namespace pfmc
