#pragma once

namespace pfmc {

/// Standard-to-product-form asymptotic variance ratio for phi = prod_k psi(x_k) with iid blocks:
/// ((1 + CV^2)^K - 1) / (CV^2 K). Throws InvalidArgument unless cv > 0 and K >= 1.
double iid_product_ratio(double cv, int K);

/// Ratio for the two-block tail indicator: (2 - Phi(alpha)) / (2 (1 - Phi(alpha))).
double tail_indicator_ratio(double alpha);

enum class FrontierStatus {
  Satisfied,
  NotSatisfied,
  /// sigma^2_x <= target: N_x = 1 and the cost comparison does not apply.
  RegimeViolation,
};

struct FrontierResult {
  FrontierStatus status = FrontierStatus::RegimeViolation;
  /// log(sigma^2 / sigma^2_x).
  double log_lhs = 0.0;
  /// log(((sigma^2_x / target)^(K-1) C_r + 1) / (C_r + 1)).
  double log_rhs = 0.0;
  /// log((sigma^2_x / target)^(K-1) / 2), the large-K reduction.
  double log_rhs_large_k = 0.0;
  bool large_k_satisfied = false;
};

/// Whether the product-form estimator is at least as cost-efficient as the standard one
/// at variance target `target_sigma_sq` with relative cost C_r. Computed in the log domain.
/// Throws InvalidArgument on non-positive variances, K < 1 or negative C_r.
FrontierResult efficiency_frontier(double sigma_sq, double sigma_sq_pf, int K, double target_sigma_sq, double c_r);

/// The iid-product form of the large-K frontier at relative tolerance eps, as two equivalent inequalities.
struct IidFrontier {
  /// log(((1 + CV^2)^K - 1) / (CV^2 K)) and log((CV^2 K eps^-2)^(K-1) / 2).
  double log_lhs = 0.0;
  double log_rhs = 0.0;
  /// log(((1 + CV^2)^K - 1) / CV^(2K)) and log(eps^2 / 2 (K / eps^2)^K).
  double log_lhs_alt = 0.0;
  double log_rhs_alt = 0.0;
  bool satisfied = false;
};

IidFrontier iid_frontier(double cv, int K, double eps);

}  // namespace pfmc
