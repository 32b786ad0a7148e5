#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "pfmc/rng.hpp"

namespace pfmc {

/// One replicate: receives its own stream and its index, returns a scalar.
using ReplicateRunner = std::function<double(Rng&, std::size_t)>;

struct ReplicateSummary {
  double mean = 0.0;
  /// Unbiased sample variance (divisor R - 1).
  double variance = 0.0;
  double standard_error = 0.0;
  std::vector<double> values;
};

/// Stream of replicate r: Rng(seed).split("replicate").split(r).
Rng replicate_stream(std::uint64_t seed, std::size_t r);

/// Runs R replicates, each on replicate_stream(seed, r), optionally on several threads.
/// Results are stored by index, so the summary does not depend on scheduling.
/// A failing runner is rethrown as ReplicateError carrying its index.
ReplicateSummary replicate_variance(const ReplicateRunner& runner, std::size_t replicates, std::uint64_t seed,
                                    std::size_t threads = 1);

/// Same, for runners returning several statistics; out[r] is the vector of replicate r.
std::vector<std::vector<double>> run_replicates(const std::function<std::vector<double>(Rng&, std::size_t)>& runner,
                                                std::size_t replicates, std::uint64_t seed, std::size_t threads = 1);

/// Mean and unbiased variance of a sequence.
ReplicateSummary summarize(std::vector<double> values);

}  // namespace pfmc
