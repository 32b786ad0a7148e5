#include <cmath>

#include "common.hpp"
#include "pfmc/estimators.hpp"
#include "pfmc/replicate.hpp"
#include "pfmc/theory.hpp"

namespace pfmc::experiments {

TailConfig TailConfig::from_json(const json& j) {
  TailConfig c;
  ConfigReader r(j);
  r.read("alphas", c.alphas);
  r.read("N", c.N);
  r.read("R", c.R);
  detail::read_run(r, c.run);
  r.finish();
  if (c.alphas.empty()) throw ConfigError("alphas must not be empty");
  detail::require_at_least("N", double(c.N), 1);
  detail::require_at_least("R", double(c.R), 2);
  return c;
}

json TailConfig::to_json() const {
  json j{{"alphas", alphas}, {"N", N}, {"R", R}};
  detail::write_run(j, run);
  return j;
}

namespace {

TestFunction min_indicator(double alpha) {
  auto step = [alpha](BlockPoint x) { return x[0] >= alpha ? 1.0 : 0.0; };
  return SopFunction({{step, step}});
}

}  // namespace

TailResult run_tail(const TailConfig& c) {
  TailResult res;
  Table t{"tail",
          {{"alpha", "threshold in 1{min(x_1, x_2) >= alpha}"},
           {"mean_standard", "replicate mean of the standard estimate"},
           {"mean_product_form", "replicate mean of the product-form estimate"},
           {"exact_mean", "(1 - Phi(alpha))^2"},
           {"var_standard", "replicate variance of the standard estimate"},
           {"var_product_form", "replicate variance of the product-form estimate"},
           {"empirical_ratio", "var_standard / var_product_form"},
           {"theory_ratio", "(2 - Phi(alpha)) / (2 (1 - Phi(alpha)))"},
           {"relative_deviation", "empirical_ratio / theory_ratio - 1"}},
          {}};
  Records rec{"replicates", {}};
  for (std::size_t a = 0; a < c.alphas.size(); ++a) {
    const double alpha = c.alphas[a];
    const auto phi = min_indicator(alpha);
    const auto reps = run_replicates(
        [&](Rng& rng, std::size_t) {
          std::vector<std::vector<double>> blocks(2, std::vector<double>(c.N));
          for (auto& b : blocks)
            for (auto& x : b) x = rng.normal();
          const auto s = MarginalSamples::scalar(std::move(blocks));
          return std::vector<double>{standard_estimate(s, phi).value,
                                     product_form_estimate(s, phi, Strategy::sop_fast_path()).value};
        },
        c.R, Rng(c.run.seed).split(static_cast<std::uint64_t>(a)).key(), c.run.threads);
    const auto st = summarize(detail::column_of(reps, 0));
    const auto pf = summarize(detail::column_of(reps, 1));
    const double tail = 0.5 * std::erfc(alpha / std::sqrt(2.0));
    TailRow row{alpha, st.variance / pf.variance, tail_indicator_ratio(alpha)};
    t.add({alpha, st.mean, pf.mean, tail * tail, st.variance, pf.variance, row.empirical_ratio, row.theory_ratio,
           row.empirical_ratio / row.theory_ratio - 1.0});
    res.rows.push_back(row);
    for (std::size_t r = 0; r < reps.size(); ++r)
      rec.lines.push_back({{"alpha", alpha}, {"replicate", r}, {"standard", reps[r][0]}, {"product_form", reps[r][1]}});
  }
  res.artifacts.tables.push_back(std::move(t));
  res.artifacts.records.push_back(std::move(rec));
  return res;
}

}  // namespace pfmc::experiments
