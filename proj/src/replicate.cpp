#include "pfmc/replicate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "pfmc/errors.hpp"
#include "pfmc/numerics.hpp"

namespace pfmc {

Rng replicate_stream(std::uint64_t seed, std::size_t r) { return Rng(seed).split("replicate").split(r); }

ReplicateSummary summarize(std::vector<double> values) {
  ReplicateSummary s;
  const auto n = static_cast<double>(values.size());
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  s.mean = values.empty() ? 0.0 : sum.value() / n;
  if (values.size() >= 2) {
    CompensatedSum sq;
    for (double v : values) sq.add((v - s.mean) * (v - s.mean));
    s.variance = sq.value() / (n - 1.0);
    s.standard_error = std::sqrt(s.variance / n);
  }
  s.values = std::move(values);
  return s;
}

std::vector<std::vector<double>> run_replicates(const std::function<std::vector<double>(Rng&, std::size_t)>& runner,
                                                std::size_t replicates, std::uint64_t seed, std::size_t threads) {
  std::vector<std::vector<double>> out(replicates);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::size_t failed_index = 0;
  std::mutex mu;

  auto work = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= replicates) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        Rng rng = replicate_stream(seed, r);
        out[r] = runner(rng, r);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure || r < failed_index) {
          failure = std::current_exception();
          failed_index = r;
        }
      }
    }
  };

  threads = std::max<std::size_t>(1, std::min(threads, replicates));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const ReplicateError&) {
      throw;
    } catch (const std::exception& e) {
      throw ReplicateError(failed_index, e.what());
    } catch (...) {
      throw ReplicateError(failed_index, "unknown failure");
    }
  }
  return out;
}

ReplicateSummary replicate_variance(const ReplicateRunner& runner, std::size_t replicates, std::uint64_t seed,
                                    std::size_t threads) {
  if (replicates < 2) throw InvalidArgument("replicate_variance: need at least two replicates");
  auto rows = run_replicates([&](Rng& rng, std::size_t r) { return std::vector<double>{runner(rng, r)}; },
                             replicates, seed, threads);
  std::vector<double> values;
  values.reserve(rows.size());
  for (auto& row : rows) values.push_back(row[0]);
  return summarize(std::move(values));
}

}  // namespace pfmc
