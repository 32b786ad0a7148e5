#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pfmc {

/// One element of a block: a fixed-width real vector.
using BlockPoint = std::span<const double>;

/// A point of the joint space: one BlockPoint per block.
using JointPoint = std::span<const BlockPoint>;

/// The draws of one block, stored row-major (count x width).
class SampleBlock {
 public:
  /// Throws InvalidArgument unless width >= 1 and values is a nonempty multiple of width.
  SampleBlock(std::size_t width, std::vector<double> values);

  /// Width-1 block.
  static SampleBlock scalar(std::vector<double> values) { return SampleBlock(1, std::move(values)); }

  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return values_.size() / width_; }
  BlockPoint operator[](std::size_t n) const noexcept { return {values_.data() + n * width_, width_}; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t width_;
  std::vector<double> values_;
};

/// Independent per-block sample sequences X_k^1..X_k^{N_k}, k = 1..K. Immutable.
class MarginalSamples {
 public:
  /// Throws InvalidArgument when blocks is empty.
  explicit MarginalSamples(std::vector<SampleBlock> blocks);

  /// All blocks of width one.
  static MarginalSamples scalar(std::vector<std::vector<double>> blocks);

  std::size_t num_blocks() const noexcept { return blocks_.size(); }
  const SampleBlock& block(std::size_t k) const { return blocks_.at(k); }
  std::size_t count(std::size_t k) const { return blocks_.at(k).size(); }
  std::vector<std::size_t> counts() const;

  /// True when every block has the same number of draws, so that tuple n is (X_1^n, ..., X_K^n).
  bool aligned() const noexcept;

  /// Fills `out` (size K) with the permuted tuple X^{idx}.
  void gather(std::span<const std::size_t> idx, std::span<BlockPoint> out) const;

 private:
  std::vector<SampleBlock> blocks_;
};

}  // namespace pfmc
