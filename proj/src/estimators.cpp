#include "pfmc/estimators.hpp"

#include <cmath>
#include <string>

#include "pfmc/errors.hpp"
#include "pfmc/factorized.hpp"
#include "pfmc/numerics.hpp"

namespace pfmc {

std::string_view to_string(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::Standard:
      return "standard";
    case StrategyKind::BruteForce:
      return "brute_force";
    case StrategyKind::SopFastPath:
      return "sop_fast_path";
    case StrategyKind::Eliminate:
      return "eliminate";
  }
  return "unknown";
}

namespace {

void check_block_count(const MarginalSamples& m, const TestFunction& phi) {
  if (auto k = phi.blocks(); k && *k != m.num_blocks())
    throw InvalidArgument("test function has " + std::to_string(*k) + " blocks but samples have " +
                          std::to_string(m.num_blocks()));
}

Estimate brute_force(const MarginalSamples& m, const TestFunction& phi, const EvalLimits& limits) {
  const auto counts = m.counts();
  double tuples = 1.0;
  for (auto n : counts) tuples *= static_cast<double>(n);
  if (tuples > static_cast<double>(limits.brute_force_tuples))
    throw CapExceeded("brute-force product-form sum needs " + std::to_string(tuples) + " tuples, cap is " +
                      std::to_string(limits.brute_force_tuples));

  std::vector<BlockPoint> point(m.num_blocks());
  CompensatedSum sum;
  std::uint64_t evals = 0;
  for_each_index_tuple(counts, [&](std::span<const std::size_t> idx) {
    m.gather(idx, point);
    const double v = phi(point);
    if (!std::isfinite(v)) throw NumericalError("non-finite test function value at permuted tuple " + std::to_string(evals));
    sum.add(v);
    ++evals;
  });
  Estimate e;
  e.value = sum.value() / tuples;
  e.n_phi_evals = evals;
  e.n_samples_used = counts;
  e.strategy = StrategyKind::BruteForce;
  return e;
}

}  // namespace

Estimate standard_estimate(const MarginalSamples& samples, const TestFunction& phi) {
  if (!samples.aligned()) throw InvalidArgument("standard_estimate: samples must be aligned tuples");
  check_block_count(samples, phi);
  const std::size_t n = samples.count(0);
  std::vector<BlockPoint> point(samples.num_blocks());
  std::vector<std::size_t> idx(samples.num_blocks());
  CompensatedSum sum;
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(idx.begin(), idx.end(), i);
    samples.gather(idx, point);
    const double v = phi(point);
    if (!std::isfinite(v)) throw NumericalError("non-finite test function value at sample " + std::to_string(i));
    sum.add(v);
  }
  Estimate e;
  e.value = sum.value() / static_cast<double>(n);
  e.n_phi_evals = n;
  e.n_samples_used = samples.counts();
  e.strategy = StrategyKind::Standard;
  return e;
}

Estimate product_form_estimate(const MarginalSamples& marginals, const TestFunction& phi, const Strategy& strategy,
                               const EvalLimits& limits) {
  check_block_count(marginals, phi);
  switch (strategy.kind) {
    case StrategyKind::BruteForce:
      return brute_force(marginals, phi, limits);
    case StrategyKind::SopFastPath:
      if (const auto* sop = phi.sop()) return eval_sop(marginals, *sop);
      throw InvalidArgument("SopFastPath requires a sum-of-products test function");
    case StrategyKind::Eliminate: {
      const auto* fg = phi.factor_graph();
      if (!fg) throw InvalidArgument("Eliminate requires a factor-graph test function");
      if (strategy.plan) return eval_eliminated(marginals, *fg, *strategy.plan, limits);
      const auto counts = marginals.counts();
      return eval_eliminated(marginals, *fg, plan_elimination(*fg, EliminationHeuristic::MinFill, {}, counts), limits);
    }
    case StrategyKind::Standard:
      break;
  }
  throw InvalidArgument("product_form_estimate: Standard is not a product-form strategy");
}

}  // namespace pfmc
