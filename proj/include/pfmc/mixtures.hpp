#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pfmc/discrete_target.hpp"
#include "pfmc/estimate.hpp"
#include "pfmc/rng.hpp"
#include "pfmc/samples.hpp"
#include "pfmc/test_function.hpp"

namespace pfmc {

/// Draws one point of a partition block (one value per coordinate of the block).
using BlockSampler = std::function<std::vector<double>(Rng&)>;

/// One product-form component of a mixture over R^dim.
struct MixtureComponent {
  double weight = 0.0;
  /// Partition of the coordinates 0..dim-1 into blocks; coordinates within a block keep the listed order.
  std::vector<std::vector<std::size_t>> partition;
  /// One sampler per partition block.
  std::vector<BlockSampler> samplers;
  /// Finite-support version of the component, blocks aligned with the partition.
  std::optional<DiscreteProductTarget> oracle;
};

/// Test function over the flat coordinate vector.
using FlatFunction = std::function<double(std::span<const double>)>;

/// sum_i theta_i mu^i with each mu^i a product over its own partition.
class MixtureOfProducts {
 public:
  /// Throws InvalidArgument unless weights are positive and sum to 1 within 1e-12,
  /// each partition covers 0..dim-1 exactly once, and there is one sampler per block.
  MixtureOfProducts(std::size_t dim, std::vector<MixtureComponent> components);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return components_.size(); }
  const MixtureComponent& component(std::size_t i) const { return components_.at(i); }
  std::vector<double> weights() const;

  /// N independent draws of every partition block of component i.
  MarginalSamples sample_component(std::size_t i, std::size_t N, Rng& rng) const;

  /// phi viewed as a function of component i's partition blocks.
  TestFunction component_function(std::size_t i, FlatFunction phi) const;

 private:
  std::size_t dim_;
  std::vector<MixtureComponent> components_;
};

/// Stratified average sum_i theta_i N_i^-1 sum_n phi(X^{i,n}).
/// Component i draws from Rng(seed).split("component").split(i).
/// Throws InvalidArgument on a zero allocation.
Estimate stratified_estimate(const MixtureOfProducts& mix, const FlatFunction& phi,
                             std::span<const std::size_t> allocation, std::uint64_t seed);

/// sum_i theta_i mu_x^{i,N_i}(phi) with the product-form average over each component's own blocks.
/// per_component, when given, supplies phi in a representation suited to the strategy for each component.
Estimate stratified_pf_estimate(const MixtureOfProducts& mix, const FlatFunction& phi,
                                std::span<const std::size_t> allocation, std::uint64_t seed,
                                const Strategy& strategy = Strategy::brute_force(),
                                const std::vector<TestFunction>* per_component = nullptr,
                                const EvalLimits& limits = {});

/// Same estimators on given per-component samples (used by the oracle).
double stratified_value(const MixtureOfProducts& mix, const FlatFunction& phi,
                        const std::vector<MarginalSamples>& samples);
double stratified_pf_value(const MixtureOfProducts& mix, const FlatFunction& phi,
                           const std::vector<MarginalSamples>& samples);

/// N_i proportional to theta_i, with largest-remainder rounding and a floor of one.
std::vector<std::size_t> proportional_allocation(std::span<const double> weights, std::size_t N);

/// N_i proportional to theta_i sigma_i, with largest-remainder rounding and a floor of one.
/// Throws InvalidArgument when N is below the component count or every sigma is zero.
std::vector<std::size_t> optimal_allocation(std::span<const double> weights, std::span<const double> sigmas,
                                            std::size_t N);

/// sum_i theta_i^2 sigma_i^2 / N_i.
double allocation_variance(std::span<const double> weights, std::span<const double> sigmas,
                           std::span<const std::size_t> allocation);

struct MixtureVariances {
  double mean = 0.0;
  /// Standard estimator with sum_i N_i draws from the mixture itself.
  double plain = 0.0;
  double stratified = 0.0;
  double stratified_pf = 0.0;
  /// Per-component sigma_i (standard) and sigma_{x,i} (product-form asymptotic).
  std::vector<double> sigma_std;
  std::vector<double> sigma_pf;
};

/// Exact moments from the components' oracles; throws InvalidArgument when one is missing.
MixtureVariances mixture_exact_variances(const MixtureOfProducts& mix, const FlatFunction& phi,
                                         std::span<const std::size_t> allocation);

}  // namespace pfmc
