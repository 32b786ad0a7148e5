#pragma once

#include <cstddef>
#include <vector>

namespace pfmc {

/// Weighted atoms over a (possibly vector-valued) space.
struct WeightedParticles {
  std::size_t width = 1;
  /// Row-major atom locations (size x width).
  std::vector<double> locations;
  /// Unnormalized log weights; -inf marks a zero weight.
  std::vector<double> log_weights;
  /// log of the sum of the weights.
  double log_normalizer = 0.0;

  std::size_t size() const noexcept { return log_weights.size(); }
  double location(std::size_t i, std::size_t d = 0) const { return locations.at(i * width + d); }

  /// Normalized weights, summing to one.
  std::vector<double> weights() const;

  /// Throws NumericalError on NaN or +inf log weights or when every weight is zero.
  static WeightedParticles from_log_weights(std::size_t width, std::vector<double> locations,
                                            std::vector<double> log_weights);

  /// Equal weights on every location.
  static WeightedParticles uniform(std::size_t width, std::vector<double> locations);
};

}  // namespace pfmc
