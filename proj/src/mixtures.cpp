#include "pfmc/mixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pfmc/errors.hpp"
#include "pfmc/estimators.hpp"
#include "pfmc/numerics.hpp"
#include "pfmc/variance.hpp"

namespace pfmc {

MixtureOfProducts::MixtureOfProducts(std::size_t dim, std::vector<MixtureComponent> components)
    : dim_(dim), components_(std::move(components)) {
  if (dim_ == 0 || components_.empty()) throw InvalidArgument("MixtureOfProducts: need a dimension and a component");
  double total = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    const std::string where = "MixtureOfProducts component " + std::to_string(i) + ": ";
    if (!(c.weight > 0.0)) throw InvalidArgument(where + "weight must be positive");
    total += c.weight;
    std::vector<int> seen(dim_, 0);
    for (const auto& block : c.partition) {
      if (block.empty()) throw InvalidArgument(where + "empty partition block");
      for (std::size_t d : block) {
        if (d >= dim_) throw InvalidArgument(where + "coordinate out of range");
        ++seen[d];
      }
    }
    if (std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; }))
      throw InvalidArgument(where + "partition must cover every coordinate exactly once");
    if (c.samplers.size() != c.partition.size()) throw InvalidArgument(where + "need one sampler per block");
    if (c.oracle) {
      if (c.oracle->num_blocks() != c.partition.size()) throw InvalidArgument(where + "oracle blocks differ");
      for (std::size_t b = 0; b < c.partition.size(); ++b)
        if (c.oracle->block(b).width != c.partition[b].size())
          throw InvalidArgument(where + "oracle block width differs from partition block size");
    }
  }
  if (std::fabs(total - 1.0) > 1e-12) throw InvalidArgument("MixtureOfProducts: weights must sum to 1");
}

std::vector<double> MixtureOfProducts::weights() const {
  std::vector<double> w;
  for (const auto& c : components_) w.push_back(c.weight);
  return w;
}

MarginalSamples MixtureOfProducts::sample_component(std::size_t i, std::size_t N, Rng& rng) const {
  if (N == 0) throw InvalidArgument("sample_component: allocation must be positive");
  const auto& c = component(i);
  std::vector<SampleBlock> blocks;
  for (std::size_t b = 0; b < c.partition.size(); ++b) {
    std::vector<double> values;
    values.reserve(N * c.partition[b].size());
    for (std::size_t n = 0; n < N; ++n) {
      const auto draw = c.samplers[b](rng);
      if (draw.size() != c.partition[b].size()) throw InvalidArgument("block sampler returned the wrong width");
      values.insert(values.end(), draw.begin(), draw.end());
    }
    blocks.emplace_back(c.partition[b].size(), std::move(values));
  }
  return MarginalSamples(std::move(blocks));
}

TestFunction MixtureOfProducts::component_function(std::size_t i, FlatFunction phi) const {
  const auto partition = component(i).partition;
  return TestFunction(JointEvaluator([partition, phi = std::move(phi), dim = dim_](JointPoint x) {
    std::vector<double> flat(dim);
    for (std::size_t b = 0; b < partition.size(); ++b)
      for (std::size_t j = 0; j < partition[b].size(); ++j) flat[partition[b][j]] = x[b][j];
    return phi(flat);
  }));
}

namespace {

void check_allocation(const MixtureOfProducts& mix, std::span<const std::size_t> allocation) {
  if (allocation.size() != mix.size()) throw InvalidArgument("allocation needs one entry per component");
  for (std::size_t i = 0; i < allocation.size(); ++i)
    if (allocation[i] == 0)
      throw InvalidArgument("allocation for component " + std::to_string(i) + " is zero but its weight is positive");
}

std::vector<MarginalSamples> draw_all(const MixtureOfProducts& mix, std::span<const std::size_t> allocation,
                                      std::uint64_t seed) {
  std::vector<MarginalSamples> out;
  const Rng root = Rng(seed).split("component");
  for (std::size_t i = 0; i < mix.size(); ++i) {
    Rng rng = root.split(i);
    out.push_back(mix.sample_component(i, allocation[i], rng));
  }
  return out;
}

std::vector<std::size_t> round_allocation(const std::vector<double>& ideal, std::size_t N) {
  const std::size_t I = ideal.size();
  if (N < I) throw InvalidArgument("allocation: N = " + std::to_string(N) + " is below the component count");
  std::vector<std::size_t> alloc(I);
  std::size_t sum = 0;
  for (std::size_t i = 0; i < I; ++i) {
    alloc[i] = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(ideal[i])));
    sum += alloc[i];
  }
  std::vector<std::size_t> order(I);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ideal[a] - std::floor(ideal[a]) > ideal[b] - std::floor(ideal[b]);
  });
  for (std::size_t j = 0; sum < N; j = (j + 1) % I) {
    ++alloc[order[j]];
    ++sum;
  }
  while (sum > N) {
    std::size_t best = I;
    for (std::size_t i = 0; i < I; ++i)
      if (alloc[i] > 1 && (best == I || static_cast<double>(alloc[i]) - ideal[i] >
                                            static_cast<double>(alloc[best]) - ideal[best]))
        best = i;
    --alloc[best];
    --sum;
  }
  return alloc;
}

}  // namespace

double stratified_value(const MixtureOfProducts& mix, const FlatFunction& phi,
                        const std::vector<MarginalSamples>& samples) {
  CompensatedSum s;
  for (std::size_t i = 0; i < mix.size(); ++i)
    s.add(mix.component(i).weight * standard_estimate(samples.at(i), mix.component_function(i, phi)).value);
  return s.value();
}

double stratified_pf_value(const MixtureOfProducts& mix, const FlatFunction& phi,
                           const std::vector<MarginalSamples>& samples) {
  CompensatedSum s;
  for (std::size_t i = 0; i < mix.size(); ++i)
    s.add(mix.component(i).weight * product_form_estimate(samples.at(i), mix.component_function(i, phi)).value);
  return s.value();
}

Estimate stratified_estimate(const MixtureOfProducts& mix, const FlatFunction& phi,
                             std::span<const std::size_t> allocation, std::uint64_t seed) {
  check_allocation(mix, allocation);
  const auto samples = draw_all(mix, allocation, seed);
  Estimate e;
  e.value = stratified_value(mix, phi, samples);
  e.strategy = StrategyKind::Standard;
  for (auto n : allocation) e.n_phi_evals += n;
  e.n_samples_used.assign(allocation.begin(), allocation.end());
  return e;
}

Estimate stratified_pf_estimate(const MixtureOfProducts& mix, const FlatFunction& phi,
                                std::span<const std::size_t> allocation, std::uint64_t seed,
                                const Strategy& strategy, const std::vector<TestFunction>* per_component,
                                const EvalLimits& limits) {
  check_allocation(mix, allocation);
  if (per_component && per_component->size() != mix.size())
    throw InvalidArgument("stratified_pf_estimate: need one test function per component");
  const auto samples = draw_all(mix, allocation, seed);
  Estimate e;
  e.strategy = strategy.kind;
  CompensatedSum s;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    const auto f = per_component ? (*per_component)[i] : mix.component_function(i, phi);
    const auto ei = product_form_estimate(samples[i], f, strategy, limits);
    s.add(mix.component(i).weight * ei.value);
    e.n_phi_evals += ei.n_phi_evals;
    e.n_factor_evals += ei.n_factor_evals;
  }
  e.value = s.value();
  e.n_samples_used.assign(allocation.begin(), allocation.end());
  return e;
}

std::vector<std::size_t> proportional_allocation(std::span<const double> weights, std::size_t N) {
  const std::vector<double> ones(weights.size(), 1.0);
  return optimal_allocation(weights, ones, N);
}

std::vector<std::size_t> optimal_allocation(std::span<const double> weights, std::span<const double> sigmas,
                                            std::size_t N) {
  if (weights.size() != sigmas.size() || weights.empty())
    throw InvalidArgument("optimal_allocation: weights and sigmas must have the same nonzero length");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(sigmas[i] >= 0.0) || !(weights[i] > 0.0))
      throw InvalidArgument("optimal_allocation: weights must be positive and sigmas nonnegative");
    total += weights[i] * sigmas[i];
  }
  if (!(total > 0.0)) throw InvalidArgument("optimal_allocation: every sigma is zero");
  std::vector<double> ideal(weights.size());
  for (std::size_t i = 0; i < ideal.size(); ++i)
    ideal[i] = static_cast<double>(N) * weights[i] * sigmas[i] / total;
  return round_allocation(ideal, N);
}

double allocation_variance(std::span<const double> weights, std::span<const double> sigmas,
                           std::span<const std::size_t> allocation) {
  if (weights.size() != sigmas.size() || weights.size() != allocation.size())
    throw InvalidArgument("allocation_variance: length mismatch");
  double v = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    v += weights[i] * weights[i] * sigmas[i] * sigmas[i] / static_cast<double>(allocation[i]);
  return v;
}

MixtureVariances mixture_exact_variances(const MixtureOfProducts& mix, const FlatFunction& phi,
                                         std::span<const std::size_t> allocation) {
  check_allocation(mix, allocation);
  MixtureVariances r;
  std::vector<double> means(mix.size());
  std::vector<double> vars(mix.size());
  CompensatedSum mu;
  CompensatedSum strat;
  CompensatedSum strat_pf;
  std::size_t n_total = 0;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    const auto& c = mix.component(i);
    if (!c.oracle) throw InvalidArgument("mixture_exact_variances: component " + std::to_string(i) + " has no oracle");
    const auto f = mix.component_function(i, phi);
    means[i] = expectation(*c.oracle, f);
    const std::vector<std::size_t> counts(c.partition.size(), allocation[i]);
    const auto rep = exact_variance(*c.oracle, f, counts);
    vars[i] = rep.asymptotic_std;
    r.sigma_std.push_back(std::sqrt(rep.asymptotic_std));
    r.sigma_pf.push_back(std::sqrt(rep.asymptotic_pf));
    mu.add(c.weight * means[i]);
    strat.add(c.weight * c.weight * vars[i] / static_cast<double>(allocation[i]));
    strat_pf.add(c.weight * c.weight * rep.finite_sample);
    n_total += allocation[i];
  }
  r.mean = mu.value();
  CompensatedSum second;
  for (std::size_t i = 0; i < mix.size(); ++i)
    second.add(mix.component(i).weight * (vars[i] + (means[i] - r.mean) * (means[i] - r.mean)));
  r.plain = second.value() / static_cast<double>(n_total);
  r.stratified = strat.value();
  r.stratified_pf = strat_pf.value();
  return r;
}

}  // namespace pfmc
