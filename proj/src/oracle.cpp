#include "pfmc/oracle.hpp"

#include <cmath>
#include <string>

#include "pfmc/errors.hpp"
#include "pfmc/numerics.hpp"

namespace pfmc {

namespace {

void for_each_tuple(std::span<const std::size_t> sizes, bool reverse,
                    const std::function<void(std::span<const std::size_t>)>& fn) {
  const std::size_t n = sizes.size();
  std::vector<std::size_t> idx(n);
  if (reverse)
    for (std::size_t i = 0; i < n; ++i) idx[i] = sizes[i] - 1;
  while (true) {
    fn(idx);
    std::size_t i = n;
    while (i-- > 0) {
      if (!reverse && ++idx[i] < sizes[i]) break;
      if (reverse && idx[i]-- > 0) break;
      idx[i] = reverse ? sizes[i] - 1 : 0;
    }
    if (i == static_cast<std::size_t>(-1)) return;
  }
}

MarginalSamples build_marginals(const DiscreteProductTarget& target, std::span<const std::size_t> counts,
                                std::span<const std::size_t> idx) {
  std::vector<SampleBlock> blocks;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < target.num_blocks(); ++k) {
    const auto& b = target.block(k);
    std::vector<double> v;
    v.reserve(counts[k] * b.width);
    for (std::size_t n = 0; n < counts[k]; ++n) {
      const auto p = b.point(idx[pos++]);
      v.insert(v.end(), p.begin(), p.end());
    }
    blocks.emplace_back(b.width, std::move(v));
  }
  return MarginalSamples(std::move(blocks));
}

double block_prob(const DiscreteProductTarget& target, std::span<const std::size_t> counts,
                  std::span<const std::size_t> idx) {
  double p = 1.0;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < target.num_blocks(); ++k)
    for (std::size_t n = 0; n < counts[k]; ++n) p *= target.block(k).probs[idx[pos++]];
  return p;
}

}  // namespace

OracleReport enumerate_oracle(std::span<const std::size_t> slot_sizes,
                              const std::function<double(std::span<const std::size_t>)>& prob,
                              const std::function<double(std::span<const std::size_t>)>& value,
                              const OracleLimits& limits) {
  double total = 1.0;
  for (auto s : slot_sizes) {
    if (s == 0) throw InvalidArgument("oracle: empty slot");
    total *= static_cast<double>(s);
  }
  if (total > static_cast<double>(limits.max_realizations))
    throw CapExceeded("oracle: " + std::to_string(total) + " realizations exceed cap " +
                      std::to_string(limits.max_realizations));
  CompensatedSum mean;
  CompensatedSum mass;
  std::uint64_t count = 0;
  for_each_tuple(slot_sizes, limits.reverse, [&](std::span<const std::size_t> idx) {
    const double p = prob(idx);
    const double v = value(idx);
    if (!std::isfinite(v)) throw NumericalError("oracle: estimator returned a non-finite value");
    mean.add(p * v);
    mass.add(p);
    ++count;
  });
  if (std::fabs(mass.value() - 1.0) > 1e-9) throw NumericalError("oracle: realization probabilities do not sum to 1");
  OracleReport r;
  r.exact_mean = mean.value();
  r.realizations = count;
  CompensatedSum var;
  for_each_tuple(slot_sizes, limits.reverse, [&](std::span<const std::size_t> idx) {
    const double d = value(idx) - r.exact_mean;
    var.add(prob(idx) * d * d);
  });
  r.exact_variance = std::max(0.0, var.value());
  return r;
}

OracleReport product_oracle(const DiscreteProductTarget& target, std::span<const std::size_t> counts,
                            const MarginalEstimator& estimator, const OracleLimits& limits) {
  if (counts.size() != target.num_blocks()) throw InvalidArgument("product_oracle: one count per block required");
  std::vector<std::size_t> sizes;
  for (std::size_t k = 0; k < target.num_blocks(); ++k) {
    if (counts[k] == 0) throw InvalidArgument("product_oracle: counts must be positive");
    sizes.insert(sizes.end(), counts[k], target.block(k).size());
  }
  return enumerate_oracle(
      sizes, [&](std::span<const std::size_t> idx) { return block_prob(target, counts, idx); },
      [&](std::span<const std::size_t> idx) { return estimator(build_marginals(target, counts, idx)); }, limits);
}

OracleReport conditional_oracle(const DiscreteBlock& theta_support, const std::vector<DiscreteProductTarget>& kernels,
                                std::size_t M, std::size_t N, const ConditionalEstimator& estimator,
                                const OracleLimits& limits) {
  if (M == 0 || N == 0) throw InvalidArgument("conditional_oracle: M and N must be positive");
  if (kernels.size() != theta_support.size())
    throw InvalidArgument("conditional_oracle: one kernel per theta atom required");
  const std::size_t K = kernels.front().num_blocks();
  for (const auto& kern : kernels) {
    if (kern.num_blocks() != K) throw InvalidArgument("conditional_oracle: kernels differ in block count");
    for (std::size_t k = 0; k < K; ++k)
      if (kern.block(k).size() != kernels.front().block(k).size() ||
          kern.block(k).width != kernels.front().block(k).width)
        throw InvalidArgument("conditional_oracle: kernels differ in block support size");
  }
  // Slots: M theta indices, then for each m the K blocks' N draws.
  std::vector<std::size_t> sizes(M, theta_support.size());
  std::vector<std::size_t> counts(K, N);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t k = 0; k < K; ++k) sizes.insert(sizes.end(), N, kernels.front().block(k).size());
  const std::size_t per_m = K * N;
  auto prob = [&](std::span<const std::size_t> idx) {
    double p = 1.0;
    for (std::size_t m = 0; m < M; ++m)
      p *= theta_support.probs[idx[m]] * block_prob(kernels[idx[m]], counts, idx.subspan(M + m * per_m, per_m));
    return p;
  };
  auto value = [&](std::span<const std::size_t> idx) {
    std::vector<double> th;
    std::vector<MarginalSamples> xs;
    for (std::size_t m = 0; m < M; ++m) {
      const auto p = theta_support.point(idx[m]);
      th.insert(th.end(), p.begin(), p.end());
      xs.push_back(build_marginals(kernels[idx[m]], counts, idx.subspan(M + m * per_m, per_m)));
    }
    return estimator(ConditionalSamples(SampleBlock(theta_support.width, std::move(th)), std::move(xs)));
  };
  return enumerate_oracle(sizes, prob, value, limits);
}

OracleReport mixture_oracle(const MixtureOfProducts& mix, std::span<const std::size_t> allocation,
                            const MixtureEstimator& estimator, const OracleLimits& limits) {
  if (allocation.size() != mix.size()) throw InvalidArgument("mixture_oracle: one allocation per component required");
  std::vector<std::size_t> sizes;
  std::vector<std::vector<std::size_t>> counts(mix.size());
  std::vector<std::size_t> offsets;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    const auto& c = mix.component(i);
    if (!c.oracle) throw InvalidArgument("mixture_oracle: component " + std::to_string(i) + " has no oracle");
    if (allocation[i] == 0) throw InvalidArgument("mixture_oracle: allocations must be positive");
    offsets.push_back(sizes.size());
    counts[i].assign(c.oracle->num_blocks(), allocation[i]);
    for (std::size_t k = 0; k < c.oracle->num_blocks(); ++k)
      sizes.insert(sizes.end(), allocation[i], c.oracle->block(k).size());
  }
  auto slice = [&](std::span<const std::size_t> idx, std::size_t i) {
    const std::size_t end = i + 1 < mix.size() ? offsets[i + 1] : idx.size();
    return idx.subspan(offsets[i], end - offsets[i]);
  };
  auto prob = [&](std::span<const std::size_t> idx) {
    double p = 1.0;
    for (std::size_t i = 0; i < mix.size(); ++i) p *= block_prob(*mix.component(i).oracle, counts[i], slice(idx, i));
    return p;
  };
  auto value = [&](std::span<const std::size_t> idx) {
    std::vector<MarginalSamples> xs;
    for (std::size_t i = 0; i < mix.size(); ++i)
      xs.push_back(build_marginals(*mix.component(i).oracle, counts[i], slice(idx, i)));
    return estimator(xs);
  };
  return enumerate_oracle(sizes, prob, value, limits);
}

}  // namespace pfmc
