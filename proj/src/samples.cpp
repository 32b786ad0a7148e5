#include "pfmc/samples.hpp"

#include <algorithm>

#include "pfmc/errors.hpp"

namespace pfmc {

SampleBlock::SampleBlock(std::size_t width, std::vector<double> values) : width_(width), values_(std::move(values)) {
  if (width_ == 0) throw InvalidArgument("SampleBlock: width must be >= 1");
  if (values_.empty() || values_.size() % width_ != 0)
    throw InvalidArgument("SampleBlock: need a nonempty multiple of the width");
}

MarginalSamples::MarginalSamples(std::vector<SampleBlock> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw InvalidArgument("MarginalSamples: need at least one block");
}

MarginalSamples MarginalSamples::scalar(std::vector<std::vector<double>> blocks) {
  std::vector<SampleBlock> out;
  out.reserve(blocks.size());
  for (auto& b : blocks) out.push_back(SampleBlock::scalar(std::move(b)));
  return MarginalSamples(std::move(out));
}

std::vector<std::size_t> MarginalSamples::counts() const {
  std::vector<std::size_t> n(blocks_.size());
  std::transform(blocks_.begin(), blocks_.end(), n.begin(), [](const SampleBlock& b) { return b.size(); });
  return n;
}

bool MarginalSamples::aligned() const noexcept {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [&](const SampleBlock& b) { return b.size() == blocks_.front().size(); });
}

void MarginalSamples::gather(std::span<const std::size_t> idx, std::span<BlockPoint> out) const {
  for (std::size_t k = 0; k < blocks_.size(); ++k) out[k] = blocks_[k][idx[k]];
}

}  // namespace pfmc
