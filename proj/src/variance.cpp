#include "pfmc/variance.hpp"

#include <bit>
#include <string>

#include "pfmc/errors.hpp"
#include "pfmc/estimators.hpp"
#include "pfmc/numerics.hpp"

namespace pfmc {

std::vector<std::size_t> subset_members(Subset s) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; s != 0; ++k, s >>= 1)
    if (s & 1u) out.push_back(k);
  return out;
}

Subset make_subset(std::span<const std::size_t> blocks) {
  Subset s = 0;
  for (std::size_t k : blocks) {
    if (k >= 32) throw InvalidArgument("subset index out of range");
    s |= Subset{1} << k;
  }
  return s;
}

namespace {

// phi and probability at every joint support point, last block fastest.
struct JointTable {
  std::vector<std::size_t> sizes;
  std::vector<double> values;
  std::vector<double> probs;
  double mean = 0.0;
};

JointTable tabulate(const DiscreteProductTarget& target, const TestFunction& phi, const ExactLimits& limits) {
  const std::size_t K = target.num_blocks();
  if (K > limits.max_blocks)
    throw CapExceeded("exact moments need " + std::to_string(K) + " blocks, cap is " +
                      std::to_string(limits.max_blocks));
  if (auto b = phi.blocks(); b && *b != K) throw InvalidArgument("test function block count differs from target");
  double support = 1.0;
  JointTable t;
  for (std::size_t k = 0; k < K; ++k) {
    t.sizes.push_back(target.block(k).size());
    support *= static_cast<double>(target.block(k).size());
  }
  if (support > static_cast<double>(limits.max_support))
    throw CapExceeded("joint support of " + std::to_string(support) + " points exceeds cap " +
                      std::to_string(limits.max_support));
  std::vector<BlockPoint> point(K);
  CompensatedSum mean;
  for_each_index_tuple(t.sizes, [&](std::span<const std::size_t> idx) {
    double p = 1.0;
    for (std::size_t k = 0; k < K; ++k) {
      point[k] = target.block(k).point(idx[k]);
      p *= target.block(k).probs[idx[k]];
    }
    const double v = phi(point);
    if (!std::isfinite(v)) throw NumericalError("non-finite test function value on the target support");
    t.values.push_back(v);
    t.probs.push_back(p);
    mean.add(p * v);
  });
  t.mean = mean.value();
  return t;
}

// Var(mu_{B^c}(phi)(X_B)) for every subset B.
std::vector<double> conditional_variances(const JointTable& t) {
  const std::size_t K = t.sizes.size();
  const std::size_t n_subsets = std::size_t{1} << K;
  std::vector<double> v(n_subsets, 0.0);
  std::vector<std::size_t> strides(K);
  std::size_t s = 1;
  for (std::size_t k = K; k-- > 0;) {
    strides[k] = s;
    s *= t.sizes[k];
  }
  for (Subset B = 1; B < n_subsets; ++B) {
    // Size of the B-marginal table and strides into it.
    std::vector<std::size_t> bstride(K, 0);
    std::size_t bsize = 1;
    for (std::size_t k = K; k-- > 0;) {
      if (B & (Subset{1} << k)) {
        bstride[k] = bsize;
        bsize *= t.sizes[k];
      }
    }
    std::vector<double> num(bsize, 0.0);
    std::vector<double> den(bsize, 0.0);
    for (std::size_t flat = 0; flat < t.values.size(); ++flat) {
      std::size_t bi = 0;
      for (std::size_t k = 0; k < K; ++k) bi += ((flat / strides[k]) % t.sizes[k]) * bstride[k];
      num[bi] += t.probs[flat] * t.values[flat];
      den[bi] += t.probs[flat];
    }
    CompensatedSum var;
    for (std::size_t i = 0; i < bsize; ++i) {
      const double g = num[i] / den[i];
      var.add(den[i] * (g - t.mean) * (g - t.mean));
    }
    v[B] = var.value();
  }
  return v;
}

}  // namespace

double expectation(const DiscreteProductTarget& target, const TestFunction& phi, const ExactLimits& limits) {
  return tabulate(target, phi, limits).mean;
}

VarianceReport exact_variance(const DiscreteProductTarget& target, const TestFunction& phi,
                              std::span<const std::size_t> n_per_block, const ExactLimits& limits) {
  const std::size_t K = target.num_blocks();
  if (n_per_block.size() != K) throw InvalidArgument("exact_variance: one sample count per block required");
  for (auto n : n_per_block)
    if (n == 0) throw InvalidArgument("exact_variance: sample counts must be positive");
  const auto table = tabulate(target, phi, limits);
  const auto v = conditional_variances(table);

  VarianceReport r;
  const Subset full = static_cast<Subset>((std::size_t{1} << K) - 1);
  CompensatedSum total;
  for (Subset A = 1; A <= full; ++A) {
    double prod_n = 1.0;
    for (std::size_t k : subset_members(A)) prod_n *= static_cast<double>(n_per_block[k]);
    CompensatedSum inner;
    // Enumerate B over subsets of A, including the empty set.
    for (Subset B = A;; B = (B - 1) & A) {
      const double term = v[B];
      r.terms[{A, B}] = term;
      const int sign = ((std::popcount(A) - std::popcount(B)) % 2 == 0) ? 1 : -1;
      inner.add(sign * term);
      if (B == 0) break;
    }
    total.add(inner.value() / prod_n);
  }
  r.finite_sample = total.value();
  for (std::size_t k = 0; k < K; ++k) r.asymptotic_pf += v[Subset{1} << k];
  r.asymptotic_std = v[full];
  return r;
}

AsymptoticVariances asymptotic_variances(const DiscreteProductTarget& target, const TestFunction& phi,
                                         const ExactLimits& limits) {
  const auto table = tabulate(target, phi, limits);
  const auto v = conditional_variances(table);
  AsymptoticVariances out;
  for (std::size_t k = 0; k < target.num_blocks(); ++k) out.sigma_sq_pf += v[Subset{1} << k];
  out.sigma_sq_std = v[(std::size_t{1} << target.num_blocks()) - 1];
  return out;
}

SubsetEvaluator conditional_mean(const DiscreteProductTarget& target, const TestFunction& phi, Subset blocks) {
  const std::size_t K = target.num_blocks();
  if (K < 32 && (blocks >> K) != 0) throw InvalidArgument("conditional_mean: subset index out of range");
  const auto members = subset_members(blocks);
  std::vector<std::size_t> others;
  for (std::size_t k = 0; k < K; ++k)
    if (!(blocks & (Subset{1} << k))) others.push_back(k);
  return [target, phi, members, others, K](JointPoint x_b) {
    if (x_b.size() != members.size()) throw InvalidArgument("conditional_mean: wrong number of block points");
    std::vector<BlockPoint> point(K);
    for (std::size_t i = 0; i < members.size(); ++i) point[members[i]] = x_b[i];
    std::vector<std::size_t> sizes;
    for (std::size_t k : others) sizes.push_back(target.block(k).size());
    CompensatedSum s;
    for_each_index_tuple(sizes, [&](std::span<const std::size_t> idx) {
      double p = 1.0;
      for (std::size_t i = 0; i < others.size(); ++i) {
        point[others[i]] = target.block(others[i]).point(idx[i]);
        p *= target.block(others[i]).probs[idx[i]];
      }
      s.add(p * phi(point));
    });
    return s.value();
  };
}

SubsetEvaluator hoeffding_projection(const DiscreteProductTarget& target, const TestFunction& phi, Subset blocks) {
  if (blocks == 0) throw InvalidArgument("hoeffding_projection: subset must be nonempty");
  const auto members = subset_members(blocks);
  if (members.back() >= target.num_blocks()) throw InvalidArgument("hoeffding_projection: subset index out of range");

  struct Piece {
    int sign;
    std::vector<std::size_t> positions;  // positions within x_A
    SubsetEvaluator g;
  };
  std::vector<Piece> pieces;
  for (Subset B = blocks;; B = (B - 1) & blocks) {
    Piece p;
    p.sign = ((std::popcount(blocks) - std::popcount(B)) % 2 == 0) ? 1 : -1;
    for (std::size_t i = 0; i < members.size(); ++i)
      if (B & (Subset{1} << members[i])) p.positions.push_back(i);
    p.g = conditional_mean(target, phi, B);
    pieces.push_back(std::move(p));
    if (B == 0) break;
  }
  return [pieces = std::move(pieces), n = members.size()](JointPoint x_a) {
    if (x_a.size() != n) throw InvalidArgument("hoeffding_projection: wrong number of block points");
    CompensatedSum s;
    std::vector<BlockPoint> sub;
    for (const auto& p : pieces) {
      sub.clear();
      for (std::size_t i : p.positions) sub.push_back(x_a[i]);
      s.add(p.sign * p.g(sub));
    }
    return s.value();
  };
}

}  // namespace pfmc
