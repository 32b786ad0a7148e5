#pragma once

#include <cstddef>
#include <vector>

#include "pfmc/samples.hpp"

namespace pfmc {

/// Finite-support distribution of one block.
struct DiscreteBlock {
  std::size_t width = 1;
  /// Row-major support points (support size x width).
  std::vector<double> points;
  std::vector<double> probs;

  std::size_t size() const noexcept { return probs.size(); }
  BlockPoint point(std::size_t i) const noexcept { return {points.data() + i * width, width}; }

  static DiscreteBlock scalar(std::vector<double> points, std::vector<double> probs) {
    return {1, std::move(points), std::move(probs)};
  }
};

/// Product of finite-support blocks: the exact-moment oracle for variance formulas.
class DiscreteProductTarget {
 public:
  /// Throws InvalidArgument unless every probability is > 0, each block sums to 1 within 1e-12,
  /// and points match width x size.
  explicit DiscreteProductTarget(std::vector<DiscreteBlock> blocks);

  std::size_t num_blocks() const noexcept { return blocks_.size(); }
  const DiscreteBlock& block(std::size_t k) const { return blocks_.at(k); }

  /// Product of the support sizes.
  std::size_t joint_support() const noexcept;

 private:
  std::vector<DiscreteBlock> blocks_;
};

}  // namespace pfmc
