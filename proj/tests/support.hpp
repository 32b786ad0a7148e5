#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "pfmc/discrete_target.hpp"
#include "pfmc/importance.hpp"
#include "pfmc/mixtures.hpp"
#include "pfmc/numerics.hpp"
#include "pfmc/rng.hpp"
#include "pfmc/samples.hpp"
#include "pfmc/test_function.hpp"

namespace pfmc::testing {

inline std::size_t draw_int(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
}

/// Probabilities on n atoms, bounded away from zero, normalized so the last entry absorbs rounding.
inline std::vector<double> random_probs(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& v : p) s += (v = 0.2 + rng.uniform());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) acc += (p[i] /= s);
  p.back() = 1.0 - acc;
  return p;
}

/// K scalar blocks with support sizes in [1, max_support] and distinct points in [-2, 2].
inline DiscreteProductTarget random_target(Rng& rng, std::size_t K, std::size_t max_support) {
  std::vector<DiscreteBlock> blocks;
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t n = draw_int(rng, 1, max_support);
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = -2.0 + 4.0 * rng.uniform();
    blocks.push_back(DiscreteBlock::scalar(std::move(pts), random_probs(rng, n)));
  }
  return DiscreteProductTarget(std::move(blocks));
}

/// A test function with additive, multiplicative and nonlinear interactions between coordinates.
inline TestFunction random_function(Rng& rng, std::size_t K) {
  std::vector<double> a(K), d(K);
  for (auto& v : a) v = rng.normal();
  for (auto& v : d) v = rng.normal();
  const double b = rng.normal();
  const double c = rng.normal();
  return scalar_function([a, d, b, c](std::span<const double> x) {
    double lin = 0.0, prod = 1.0, arg = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      lin += a[k] * x[k];
      prod *= x[k];
      arg += d[k] * x[k] * (k + 1.0);
    }
    return lin + b * prod + c * std::sin(arg);
  });
}

inline bool near_rel(double a, double b, double rel, double abs = 0.0) {
  return std::fabs(a - b) <= std::max(abs, rel * std::max(std::fabs(a), std::fabs(b)));
}

inline MarginalSamples random_samples(Rng& rng, std::span<const std::size_t> counts) {
  std::vector<std::vector<double>> b;
  for (auto n : counts) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    b.push_back(std::move(v));
  }
  return MarginalSamples::scalar(std::move(b));
}

inline SopFunction random_sop(Rng& rng, std::size_t J, std::size_t K) {
  std::vector<std::vector<UnivariateFactor>> grid(J);
  for (auto& row : grid)
    for (std::size_t k = 0; k < K; ++k) {
      const double a = rng.normal(), b = rng.normal();
      row.push_back([a, b](BlockPoint x) { return a + std::sin(b * x[0]); });
    }
  std::vector<double> c(J);
  for (auto& v : c) v = rng.normal();
  return SopFunction(std::move(grid), std::move(c));
}

inline Factor random_factor(Rng& rng, std::vector<std::size_t> scope) {
  const double a = rng.normal(), b = rng.normal();
  return {std::move(scope), [a, b](JointPoint x) {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += (i + 1.0) * x[i][0];
            return 1.0 + 0.5 * std::tanh(a * s + b);
          }};
}

inline BlockSampler discrete_sampler(DiscreteBlock b) {
  return [b](Rng& rng) {
    double u = rng.uniform();
    std::size_t i = 0;
    while (i + 1 < b.size() && u > b.probs[i]) u -= b.probs[i++];
    const auto p = b.point(i);
    return std::vector<double>(p.begin(), p.end());
  };
}

inline MixtureComponent discrete_component(double weight, std::vector<std::vector<std::size_t>> partition,
                                           std::vector<DiscreteBlock> blocks) {
  MixtureComponent c;
  c.weight = weight;
  c.partition = std::move(partition);
  for (const auto& b : blocks) c.samplers.push_back(discrete_sampler(b));
  c.oracle = DiscreteProductTarget(std::move(blocks));
  return c;
}

// Two components over R^3: one fully factorized, one pairing coordinates 0 and 2.
inline MixtureOfProducts random_mixture(Rng& rng) {
  auto scalar_block = [&](std::size_t n) {
    std::vector<double> pts(n);
    for (auto& p : pts) p = -1.0 + 3.0 * rng.uniform();
    return DiscreteBlock::scalar(pts, random_probs(rng, n));
  };
  auto pair_block = [&](std::size_t n) {
    std::vector<double> pts(2 * n);
    for (auto& p : pts) p = -1.0 + 3.0 * rng.uniform();
    return DiscreteBlock{2, pts, random_probs(rng, n)};
  };
  const double w = 0.25 * static_cast<double>(draw_int(rng, 1, 3));
  std::vector<MixtureComponent> cs;
  cs.push_back(discrete_component(w, {{0}, {1}, {2}}, {scalar_block(2), scalar_block(2), scalar_block(2)}));
  cs.push_back(discrete_component(1.0 - w, {{0, 2}, {1}}, {pair_block(2), scalar_block(2)}));
  return MixtureOfProducts(3, std::move(cs));
}

struct CondInstance {
  DiscreteBlock thetas;
  std::vector<DiscreteProductTarget> kernels;
  ConditionalTestFunction phi;
};

inline CondInstance random_conditional(Rng& rng, std::size_t K) {
  CondInstance c;
  const std::size_t T = draw_int(rng, 1, 3);
  std::vector<double> tp(T);
  for (std::size_t i = 0; i < T; ++i) tp[i] = 0.5 + i + 0.3 * rng.uniform();
  c.thetas = DiscreteBlock::scalar(tp, random_probs(rng, T));
  std::vector<std::size_t> sizes(K);
  for (auto& s : sizes) s = draw_int(rng, 1, 2);
  for (std::size_t i = 0; i < T; ++i) {
    std::vector<DiscreteBlock> b;
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<double> pts(sizes[k]);
      for (auto& p : pts) p = tp[i] * rng.normal();
      b.push_back(DiscreteBlock::scalar(pts, random_probs(rng, sizes[k])));
    }
    c.kernels.emplace_back(std::move(b));
  }
  const double a = rng.normal();
  c.phi = [a](BlockPoint th) {
    const double t = th[0];
    return scalar_function([t, a](std::span<const double> x) {
      double p = 1.0, s = 0.0;
      for (double v : x) {
        p *= v + t;
        s += v;
      }
      return p + a * std::sin(s * t);
    });
  };
  return c;
}

}  // namespace pfmc::testing
