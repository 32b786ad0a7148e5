#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pfmc/discrete_target.hpp"
#include "pfmc/importance.hpp"
#include "pfmc/mixtures.hpp"
#include "pfmc/samples.hpp"

namespace pfmc {

/// Exact moments of an estimator over every sample realization of a discrete instance.
struct OracleReport {
  double exact_mean = 0.0;
  double exact_variance = 0.0;
  std::uint64_t realizations = 0;
};

struct OracleLimits {
  std::uint64_t max_realizations = 10'000'000;
  /// Enumerate realizations in reverse lexicographic order.
  bool reverse = false;
};

/// Enumerates every index tuple over slots of the given sizes.
/// prob(idx) is the realization probability and value(idx) the estimator applied to it.
/// Two passes: the mean first, then the centered second moment.
/// Throws CapExceeded when the tuple count exceeds the limit.
OracleReport enumerate_oracle(std::span<const std::size_t> slot_sizes,
                              const std::function<double(std::span<const std::size_t>)>& prob,
                              const std::function<double(std::span<const std::size_t>)>& value,
                              const OracleLimits& limits = {});

using MarginalEstimator = std::function<double(const MarginalSamples&)>;
using ConditionalEstimator = std::function<double(const ConditionalSamples&)>;
using MixtureEstimator = std::function<double(const std::vector<MarginalSamples>&)>;

/// N_k independent draws from block k of the target.
OracleReport product_oracle(const DiscreteProductTarget& target, std::span<const std::size_t> counts,
                            const MarginalEstimator& estimator, const OracleLimits& limits = {});

/// M draws from theta_support, then N draws per block from kernels[i] given the i-th theta atom.
/// Kernels must share block count and per-block support sizes.
OracleReport conditional_oracle(const DiscreteBlock& theta_support, const std::vector<DiscreteProductTarget>& kernels,
                                std::size_t M, std::size_t N, const ConditionalEstimator& estimator,
                                const OracleLimits& limits = {});

/// allocation[i] draws of every partition block of component i, from the components' oracles.
OracleReport mixture_oracle(const MixtureOfProducts& mix, std::span<const std::size_t> allocation,
                            const MixtureEstimator& estimator, const OracleLimits& limits = {});

}  // namespace pfmc
