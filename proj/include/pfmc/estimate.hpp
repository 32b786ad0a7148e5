#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace pfmc {

enum class StrategyKind { Standard, BruteForce, SopFastPath, Eliminate };

std::string_view to_string(StrategyKind kind) noexcept;

/// Variable-elimination ordering over the blocks of a factor graph.
struct EliminationPlan {
  std::vector<std::size_t> order;
  /// Largest scope of any intermediate product.
  std::size_t width = 0;
  /// Sum over elimination steps of the product of sample counts in the step's scope.
  double predicted_cost = 0.0;
};

/// How a product-form average is evaluated.
struct Strategy {
  StrategyKind kind = StrategyKind::BruteForce;
  /// Used by Eliminate; a MinFill plan is computed when absent.
  std::optional<EliminationPlan> plan;

  static Strategy brute_force() { return {StrategyKind::BruteForce, std::nullopt}; }
  static Strategy sop_fast_path() { return {StrategyKind::SopFastPath, std::nullopt}; }
  static Strategy eliminate(std::optional<EliminationPlan> plan = std::nullopt) {
    return {StrategyKind::Eliminate, std::move(plan)};
  }
};

/// Size caps for the exponential-cost paths.
struct EvalLimits {
  /// Maximum number of index tuples summed by BruteForce.
  std::uint64_t brute_force_tuples = 100'000'000;
  /// Maximum number of entries of any elimination table.
  std::uint64_t table_entries = 1ull << 27;
};

struct Estimate {
  double value = 0.0;
  /// Evaluations of the full test function.
  std::uint64_t n_phi_evals = 0;
  /// Evaluations of univariate or scoped factors (fast paths).
  std::uint64_t n_factor_evals = 0;
  std::vector<std::size_t> n_samples_used;
  StrategyKind strategy = StrategyKind::BruteForce;
};

}  // namespace pfmc
