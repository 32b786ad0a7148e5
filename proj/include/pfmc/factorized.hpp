#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pfmc/estimate.hpp"
#include "pfmc/samples.hpp"
#include "pfmc/test_function.hpp"

namespace pfmc {

/// Product-form estimate of a sum of products in O(J sum_k N_k) factor evaluations:
/// sum_j c_j prod_k (N_k^-1 sum_n phi^j_k(X_k^n)).
///
/// Throws InvalidArgument when the function's block count differs from the
/// samples', NumericalError (with term, block and sample index) on a
/// non-finite factor value.
Estimate eval_sop(const MarginalSamples& marginals, const SopFunction& f);

/// Per-term, per-block sample means m[j][k] = N_k^-1 sum_n phi^j_k(X_k^n).
std::vector<std::vector<double>> sop_block_means(const MarginalSamples& marginals, const SopFunction& f);

enum class EliminationHeuristic { MinDegree, MinFill };

/// Greedy elimination ordering over the factor graph's interaction graph.
///
/// Blocks in `keep` are treated as outer (conditioned) blocks and are
/// eliminated last, in increasing index order. Blocks outside every scope
/// are not part of the plan. Ties go to the lowest block index.
/// `sample_counts` (one per block, may be empty for unit counts) feeds the
/// predicted cost.
EliminationPlan plan_elimination(const FactorGraphFunction& f,
                                 EliminationHeuristic heuristic = EliminationHeuristic::MinFill,
                                 std::span<const std::size_t> keep = {},
                                 std::span<const std::size_t> sample_counts = {});

/// Width and cost of a given order, for checking plans against alternatives.
EliminationPlan evaluate_order(const FactorGraphFunction& f, std::vector<std::size_t> order,
                               std::span<const std::size_t> sample_counts = {});

/// Product-form estimate of a factor graph by contracting dense sample-indexed
/// tables in plan order. Throws CapExceeded when a table would exceed
/// limits.table_entries, InvalidArgument when the plan misses a scoped block.
Estimate eval_eliminated(const MarginalSamples& marginals, const FactorGraphFunction& f, const EliminationPlan& plan,
                         const EvalLimits& limits = {});

}  // namespace pfmc
