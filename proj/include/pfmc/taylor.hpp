#pragma once

#include <cstddef>

#include "pfmc/test_function.hpp"

namespace pfmc {

/// Truncated Taylor expansion of exp(x_1 ... x_K) as a sum of products:
/// 1 + sum_{j=1}^J x_1^j ... x_K^j / j!. Term j has factors x -> x^j and coefficient 1/j!.
SopFunction taylor_sop_exp(std::size_t J, std::size_t K);

/// sum_{j>=0} z^j / (j! (j+1)^K), summed in the log domain.
///
/// Stops once the term ratio is below one and the geometric tail bound is
/// below tol times the partial sum.
double hypergeometric_kk(double z, std::size_t K, double tol = 1e-15);

/// Mean of exp(x_1 ... x_K) under independent Uniform[0, a] coordinates.
double pfq_mean(double a, std::size_t K, double tol = 1e-15);

/// Variance of exp(x_1 ... x_K) under the same target.
double standard_asymptotic_variance(double a, std::size_t K, double tol = 1e-15);

/// Truncation bias sum_{j>J} (1/j!) (a^j / (j+1))^K of the order-J expansion.
double taylor_bias(double a, std::size_t K, std::size_t J, double tol = 1e-15);

/// sigma^2_x of the order-J expansion:
/// K sum_{i,j<=J} (1/(i! j!)) (ij/(i+j+1)) (a^{i+j} / ((i+1)(j+1)))^K.
double taylor_pf_asymptotic_variance(double a, std::size_t K, std::size_t J);

/// Default expansion order ceil(1.2 a^K) + 2.
std::size_t default_taylor_order(double a, std::size_t K);

}  // namespace pfmc
