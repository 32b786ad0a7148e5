#include <cmath>

#include "common.hpp"
#include "pfmc/estimators.hpp"
#include "pfmc/factorized.hpp"
#include "pfmc/replicate.hpp"
#include "pfmc/taylor.hpp"

namespace pfmc::experiments {

TaylorConfig TaylorConfig::from_json(const json& j) {
  TaylorConfig c;
  ConfigReader r(j);
  r.read("a", c.a);
  r.read("K", c.K);
  r.read("J", c.J);
  r.read("N", c.N);
  r.read("repeats", c.repeats);
  detail::read_run(r, c.run);
  r.finish();
  if (!(c.a > 0.0)) throw ConfigError("a must be positive");
  detail::require_at_least("K", double(c.K), 1);
  detail::require_at_least("N", double(c.N), 1);
  detail::require_at_least("repeats", double(c.repeats), 1);
  return c;
}

json TaylorConfig::to_json() const {
  json j{{"a", a}, {"K", K}, {"J", order()}, {"N", N}, {"repeats", repeats}};
  detail::write_run(j, run);
  return j;
}

std::size_t TaylorConfig::order() const { return J ? *J : default_taylor_order(a, K); }

TaylorResult run_taylor(const TaylorConfig& c) {
  const std::size_t J = c.order();
  const auto sop = taylor_sop_exp(J, c.K);
  TaylorResult res;
  res.mu = pfq_mean(c.a, c.K);
  res.sigma_sq = standard_asymptotic_variance(c.a, c.K);
  res.sigma_sq_pf = taylor_pf_asymptotic_variance(c.a, c.K, J);

  const auto reps = run_replicates(
      [&](Rng& rng, std::size_t) {
        std::vector<std::vector<double>> blocks(c.K, std::vector<double>(c.N));
        for (auto& b : blocks)
          for (auto& x : b) x = c.a * rng.uniform();
        const auto s = MarginalSamples::scalar(std::move(blocks));
        double standard = 0.0;
        for (std::size_t n = 0; n < c.N; ++n) {
          double p = 1.0;
          for (std::size_t k = 0; k < c.K; ++k) p *= s.block(k)[n][0];
          standard += std::exp(p);
        }
        return std::vector<double>{eval_sop(s, sop).value, standard / static_cast<double>(c.N)};
      },
      c.repeats, c.run.seed, c.run.threads);
  res.pf_estimates = detail::column_of(reps, 0);
  res.standard_estimates = detail::column_of(reps, 1);

  Table est{"taylor_estimates",
            {{"repeat", "repeat index"},
             {"pf_estimate", "product-form estimate of the order-J expansion"},
             {"pf_relative_error", "(pf_estimate - mu) / mu"},
             {"standard_estimate", "standard estimate of exp(x_1 ... x_K)"},
             {"standard_relative_error", "(standard_estimate - mu) / mu"}},
            {}};
  double pf_err = 0.0, st_err = 0.0;
  std::int64_t below = 0;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const double ep = (reps[r][0] - res.mu) / res.mu;
    const double es = (reps[r][1] - res.mu) / res.mu;
    pf_err += std::abs(ep);
    st_err += std::abs(es);
    below += reps[r][1] < res.mu;
    est.add({std::int64_t(r), reps[r][0], ep, reps[r][1], es});
  }
  const double R = static_cast<double>(reps.size());

  const double bias = taylor_bias(c.a, c.K, J);
  Table sum{"taylor_summary",
            {{"a", "interval length of each Uniform[0, a] coordinate"},
             {"K", "number of blocks"},
             {"J", "expansion order"},
             {"N", "samples per block"},
             {"mu", "exact mean of exp(x_1 ... x_K)"},
             {"sigma_sq", "standard asymptotic variance of exp(x_1 ... x_K)"},
             {"sigma_sq_pf", "product-form asymptotic variance of the order-J expansion"},
             {"sigma_ratio", "sigma_sq / sigma_sq_pf"},
             {"bias", "truncation bias of the order-J expansion"},
             {"relative_bias", "bias / mu"},
             {"pf_mean_abs_relative_error", "mean over repeats of |pf_estimate - mu| / mu"},
             {"standard_mean_abs_relative_error", "mean over repeats of |standard_estimate - mu| / mu"},
             {"standard_fraction_below_mu", "fraction of standard estimates below mu"}},
            {}};
  sum.add({c.a, std::int64_t(c.K), std::int64_t(J), std::int64_t(c.N), res.mu, res.sigma_sq, res.sigma_sq_pf,
           res.sigma_sq / res.sigma_sq_pf, bias, bias / res.mu, pf_err / R, st_err / R, double(below) / R});

  Table series{"taylor_series",
               {{"J", "expansion order"},
                {"bias", "truncation bias"},
                {"relative_bias", "bias / mu"},
                {"sigma_sq_pf", "product-form asymptotic variance of the order-J expansion"},
                {"sigma_ratio", "sigma_sq / sigma_sq_pf; inf at J = 0"}},
               {}};
  for (std::size_t j = 0; j <= J; ++j) {
    const double b = taylor_bias(c.a, c.K, j);
    const double v = taylor_pf_asymptotic_variance(c.a, c.K, j);
    series.add({std::int64_t(j), b, b / res.mu, v, v > 0.0 ? res.sigma_sq / v : INFINITY});
  }
  res.artifacts.tables.push_back(std::move(sum));
  res.artifacts.tables.push_back(std::move(est));
  res.artifacts.tables.push_back(std::move(series));
  return res;
}

}  // namespace pfmc::experiments
