#include "pfmc/discrete_target.hpp"

#include <cmath>
#include <string>

#include "pfmc/errors.hpp"

namespace pfmc {

DiscreteProductTarget::DiscreteProductTarget(std::vector<DiscreteBlock> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw InvalidArgument("DiscreteProductTarget: need at least one block");
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& b = blocks_[k];
    const std::string where = "DiscreteProductTarget block " + std::to_string(k) + ": ";
    if (b.width == 0 || b.probs.empty() || b.points.size() != b.width * b.probs.size())
      throw InvalidArgument(where + "points must be width x support size");
    double total = 0.0;
    for (double p : b.probs) {
      if (!(p > 0.0)) throw InvalidArgument(where + "probabilities must be strictly positive");
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw InvalidArgument(where + "probabilities must sum to 1");
  }
}

std::size_t DiscreteProductTarget::joint_support() const noexcept {
  std::size_t n = 1;
  for (const auto& b : blocks_) n *= b.size();
  return n;
}

}  // namespace pfmc
