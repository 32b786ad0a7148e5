#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "pfmc/discrete_target.hpp"
#include "pfmc/test_function.hpp"

namespace pfmc {

/// Subset of blocks as a bit mask (bit k set when block k is a member).
using Subset = std::uint32_t;

/// Limits on exact moment computations over a discrete target.
struct ExactLimits {
  std::size_t max_blocks = 16;
  /// Cap on the joint support size enumerated.
  std::uint64_t max_support = 10'000'000;
};

struct VarianceReport {
  /// Var of the product-form estimator at the given per-block sample counts.
  double finite_sample = 0.0;
  /// sigma^2_x: sum over k of the variance of the single-block conditional mean.
  double asymptotic_pf = 0.0;
  /// sigma^2: variance of phi under the target.
  double asymptotic_std = 0.0;
  /// sigma^2_{A,B}(mu_{A^c}(phi)) keyed by (A, B), B a subset of A, A nonempty.
  std::map<std::pair<Subset, Subset>, double> terms;
};

/// mu(phi), by enumeration of the joint support.
double expectation(const DiscreteProductTarget& target, const TestFunction& phi, const ExactLimits& limits = {});

/// Exact variance of the product-form estimator with n_per_block[k] samples in block k.
///
/// Throws CapExceeded when K or the joint support exceed the limits,
/// InvalidArgument on block-count mismatches or zero sample counts.
VarianceReport exact_variance(const DiscreteProductTarget& target, const TestFunction& phi,
                              std::span<const std::size_t> n_per_block, const ExactLimits& limits = {});

struct AsymptoticVariances {
  double sigma_sq_pf = 0.0;
  double sigma_sq_std = 0.0;
};

AsymptoticVariances asymptotic_variances(const DiscreteProductTarget& target, const TestFunction& phi,
                                         const ExactLimits& limits = {});

/// Evaluator over the blocks listed in a subset, given in increasing block order.
using SubsetEvaluator = std::function<double(JointPoint)>;

/// x_B -> mu_{B^c}(phi)(x_B) for arbitrary points x_B (not only support points).
SubsetEvaluator conditional_mean(const DiscreteProductTarget& target, const TestFunction& phi, Subset blocks);

/// Hoeffding component psi_A(x_A) = sum_{B subset of A} (-1)^{|A|-|B|} mu_{B^c}(phi)(x_B).
/// Throws InvalidArgument for an empty A.
SubsetEvaluator hoeffding_projection(const DiscreteProductTarget& target, const TestFunction& phi, Subset blocks);

/// Block indices of a subset in increasing order.
std::vector<std::size_t> subset_members(Subset s);

/// Subset mask from block indices.
Subset make_subset(std::span<const std::size_t> blocks);

}  // namespace pfmc
