#pragma once

#include "pfmc/estimate.hpp"
#include "pfmc/samples.hpp"
#include "pfmc/test_function.hpp"

namespace pfmc {

/// Conventional Monte Carlo average N^-1 sum_n phi(X^n) over aligned tuples.
///
/// `samples` must be aligned (equal N_k); tuple n is (X_1^n, ..., X_K^n).
/// Throws NumericalError naming the sample index when phi is non-finite.
Estimate standard_estimate(const MarginalSamples& samples, const TestFunction& phi);

/// Product-form average (prod_k N_k)^-1 sum over all index tuples of phi(X^n).
///
/// BruteForce works for every representation and refuses more than
/// limits.brute_force_tuples tuples. SopFastPath requires a Sop phi and
/// Eliminate a FactorGraph phi; mismatches throw InvalidArgument. Unequal
/// N_k are supported by every strategy.
Estimate product_form_estimate(const MarginalSamples& marginals, const TestFunction& phi,
                               const Strategy& strategy = Strategy::brute_force(), const EvalLimits& limits = {});

/// Calls fn(idx) for every index tuple of the given counts, last block fastest.
template <class Fn>
void for_each_index_tuple(std::span<const std::size_t> counts, Fn&& fn) {
  std::vector<std::size_t> idx(counts.size(), 0);
  for (;;) {
    fn(std::span<const std::size_t>(idx));
    std::size_t k = counts.size();
    while (k > 0) {
      --k;
      if (++idx[k] < counts[k]) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (counts.empty()) return;
  }
}

}  // namespace pfmc
