#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace pfmc {

/// Counter-based random stream (Philox4x32-10).
///
/// A stream is identified by a 64-bit key; draws are the encryption of an
/// incrementing 128-bit counter under that key. `split(label)` derives a
/// child key from the parent key and the label alone, so child streams do not
/// depend on how many draws the parent has made and the same sequence of seed
/// and labels always reproduces the same draws. Satisfies
/// UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform() noexcept;

  /// Standard normal via the Box-Muller transform.
  double normal() noexcept;

  Rng split(std::uint64_t label) const noexcept;
  Rng split(std::string_view label) const noexcept;

  std::uint64_t key() const noexcept { return key_; }

 private:
  using Block = std::array<std::uint32_t, 4>;

  static Block philox(Block counter, std::uint64_t key) noexcept;
  void refill() noexcept;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  Block buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// FNV-1a hash used to turn string labels into split labels.
std::uint64_t hash_label(std::string_view label) noexcept;

}  // namespace pfmc
