#include <algorithm>
#include <cmath>
#include <numeric>

#include "common.hpp"
#include "pfmc/distributions.hpp"
#include "pfmc/importance.hpp"
#include "pfmc/mcmc.hpp"
#include "pfmc/reference_posterior.hpp"
#include "pfmc/replicate.hpp"

namespace pfmc::experiments {

HierarchicalConfig HierarchicalConfig::from_json(const json& j) {
  HierarchicalConfig c;
  ConfigReader r(j);
  r.read("K", c.K);
  r.read("alpha", c.alpha);
  r.read("beta", c.beta);
  r.read("N", c.N);
  r.read("R", c.R);
  r.read("theta_true", c.theta_true);
  r.read("methods", c.methods);
  r.read("chain_steps", c.chain_steps);
  r.read("gimh_steps", c.gimh_steps);
  r.read("y", c.y);
  detail::read_run(r, c.run);
  r.finish();
  if (c.y) c.K = c.y->size();
  detail::require_at_least("K", double(c.K), 1);
  detail::require_at_least("N", double(c.N), 2);
  detail::require_at_least("R", double(c.R), 1);
  if (!(c.alpha > 0.0) || !(c.beta > 0.0)) throw ConfigError("alpha and beta must be positive");
  if (!(c.theta_true > 0.0)) throw ConfigError("theta_true must be positive");
  if (c.methods.empty()) throw ConfigError("methods must not be empty");
  for (const auto& m : c.methods)
    if (std::find(std::begin(kHierarchicalMethods), std::end(kHierarchicalMethods), m) == std::end(kHierarchicalMethods))
      throw ConfigError("unknown method '" + m + "'");
  if (c.chain_steps && *c.chain_steps < 2) throw ConfigError("chain_steps must be at least 2");
  if (c.gimh_steps && *c.gimh_steps < 2) throw ConfigError("gimh_steps must be at least 2");
  return c;
}

json HierarchicalConfig::to_json() const {
  json j{{"K", K},
         {"alpha", alpha},
         {"beta", beta},
         {"N", N},
         {"R", R},
         {"theta_true", theta_true},
         {"methods", methods},
         {"chain_steps", chain_steps ? *chain_steps : N * N},
         {"gimh_steps", gimh_steps ? *gimh_steps : N},
         {"y", y ? json(*y) : json(nullptr)}};
  detail::write_run(j, run);
  return j;
}

namespace {

constexpr std::size_t kMetricCount = 10;

/// theta approximation and latent moment estimates of one method.
struct Approximation {
  Ecdf theta;
  std::optional<WeightedParticles> particles;
  std::optional<LatentMoments> latent;
};

LatentMoments chain_latent_moments(const ChainTrace& t, std::size_t K, std::size_t offset) {
  LatentMoments m;
  for (std::size_t k = 0; k < K; ++k) {
    const auto xs = t.component(k + offset);
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    m.mean.push_back(mean);
    m.sd.push_back(std::sqrt(ss / static_cast<double>(xs.size())));
  }
  return m;
}

std::vector<double> prior_draws(const HierarchicalModel& model, std::size_t n, Rng& rng) {
  const Dist1D prior(model.prior());
  return prior.sample(rng, n);
}

/// w_IS(theta, x) = prod_k N(y_k; x_k, 1) N(x_k; 0, theta) / N(x_k; 0, 1).
LogWeightModel is_weight(const HierarchicalModel& model) {
  const auto y = model.y();
  return LogWeightModel::factorized(
      model.K(),
      [y](BlockPoint theta, std::size_t k, BlockPoint x) {
        return normal_logpdf(y[k], x[0], 1.0) + normal_logpdf(x[0], 0.0, theta[0]) - normal_logpdf(x[0], 0.0, 1.0);
      },
      nullptr, true);
}

/// w_IS2(x) = prod_k N(y_k; x_k, 1).
LogWeightModel is2_weight(const HierarchicalModel& model) {
  const auto y = model.y();
  return LogWeightModel::factorized(
      model.K(), [y](BlockPoint, std::size_t k, BlockPoint x) { return normal_logpdf(y[k], x[0], 1.0); }, nullptr,
      false);
}

Approximation weighted(ThetaMethod method, const ThetaMarginalInput& input, const LogWeightModel& w) {
  auto p = theta_marginal(method, input, w);
  Approximation a{Ecdf::from_particles(p), std::nullopt, latent_moments(method, input, w)};
  a.particles = std::move(p);
  return a;
}

Approximation run_method(const std::string& method, const HierarchicalModel& model, const HierarchicalConfig& c,
                         Rng rng) {
  const std::size_t K = model.K(), N = c.N;
  const std::size_t chain_steps = c.chain_steps ? *c.chain_steps : N * N;
  const std::size_t gimh_steps = c.gimh_steps ? *c.gimh_steps : N;
  const double theta0 = model.initial_theta();

  if (method == "Gibbs") {
    const auto t = gibbs_hierarchical(model, chain_steps, rng(), theta0);
    return {Ecdf::from_samples(t.component(0)), std::nullopt, chain_latent_moments(t, K, 1)};
  }
  if (method == "RWM") {
    // State (log theta, x_1..x_K); the log-Jacobian u turns the theta density into one over u.
    const LogDensity logd = [&model](std::span<const double> s) {
      return model.log_joint(std::exp(s[0]), s.subspan(1)) + s[0];
    };
    std::vector<double> init{std::log(theta0)};
    for (double yk : model.y()) init.push_back(yk * theta0 / (theta0 + 1.0));
    const auto t = rwm_chain(logd, std::move(init), chain_steps, RwmOptions{}, rng());
    auto u = t.component(0);
    for (auto& v : u) v = std::exp(v);
    return {Ecdf::from_samples(u), std::nullopt, chain_latent_moments(t, K, 1)};
  }
  if (method == "IS" || method == "PFIS") {
    const std::size_t n = method == "IS" ? N * N : N;
    auto thetas = prior_draws(model, n, rng);
    std::vector<std::vector<double>> blocks(K, std::vector<double>(n));
    for (auto& b : blocks)
      for (auto& x : b) x = rng.normal();
    const ThetaMarginalInput input = JointProposalSamples{SampleBlock::scalar(std::move(thetas)),
                                                          MarginalSamples::scalar(std::move(blocks))};
    return weighted(method == "IS" ? ThetaMethod::IS : ThetaMethod::PFIS, input, is_weight(model));
  }
  if (method == "IS2" || method == "PFIS2") {
    auto thetas = prior_draws(model, N, rng);
    std::vector<MarginalSamples> xs;
    for (double th : thetas) {
      const double sd = std::sqrt(th);
      std::vector<std::vector<double>> blocks(K, std::vector<double>(N));
      for (auto& b : blocks)
        for (auto& x : b) x = sd * rng.normal();
      xs.push_back(MarginalSamples::scalar(std::move(blocks)));
    }
    const ThetaMarginalInput input = ConditionalSamples(SampleBlock::scalar(std::move(thetas)), std::move(xs));
    return weighted(method == "IS2" ? ThetaMethod::IS2 : ThetaMethod::PFIS2, input, is2_weight(model));
  }
  GimhConfig g;
  g.N = N;
  g.estimator = method == "GIMH" ? DensityMode::Standard : DensityMode::ProductForm;
  g.steps = gimh_steps;
  g.seed = rng();
  const auto t = gimh_chain(hierarchical_gimh_problem(model), g, theta0);
  return {Ecdf::from_samples(t.component(0)), std::nullopt, std::nullopt};
}

double total_abs_error(const std::vector<double>& est, const std::vector<double>& truth) {
  double s = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) s += std::abs(est[k] - truth[k]);
  return s;
}

}  // namespace

HierarchicalResult run_hierarchical(const HierarchicalConfig& c) {
  HierarchicalResult res;
  if (c.y) {
    res.y = *c.y;
  } else {
    Rng data = Rng(c.run.seed).split("data");
    res.y = HierarchicalModel::simulate(c.K, c.theta_true, data);
  }
  const HierarchicalModel model(res.y, c.alpha, c.beta);
  const ReferencePosterior ref(model);
  const auto reference = ref.as_reference();
  res.reference_mean = ref.mean();
  res.reference_sd = ref.sd();
  std::vector<double> ref_lmean, ref_lsd;
  for (std::size_t k = 0; k < model.K(); ++k) {
    ref_lmean.push_back(ref.latent_mean(k));
    ref_lsd.push_back(ref.latent_sd(k));
  }

  const std::size_t M = c.methods.size();
  std::vector<std::vector<EcdfDump>> dumps(c.R);
  const auto reps = run_replicates(
      [&](Rng& rng, std::size_t r) {
        std::vector<double> out;
        for (const auto& method : c.methods) {
          auto a = run_method(method, model, c, rng.split(method));
          const double w1 = w1_distance(a.theta, reference);
          const double nan = std::nan("");
          out.insert(out.end(),
                     {w1, w1 / res.reference_sd, w1 / res.reference_mean, ks_statistic(a.theta, reference),
                      std::abs(a.theta.mean() - res.reference_mean) / res.reference_mean,
                      std::abs(a.theta.sd() - res.reference_sd) / res.reference_sd,
                      a.particles ? top_mass(*a.particles, 1) : nan, a.particles ? top_mass(*a.particles, 3) : nan,
                      a.latent ? total_abs_error(a.latent->mean, ref_lmean) : nan,
                      a.latent ? total_abs_error(a.latent->sd, ref_lsd) : nan});
          if (r == 0) dumps[r].push_back({method, std::move(a.theta)});
        }
        return out;
      },
      c.R, c.run.seed, c.run.threads);

  Table metrics{"hierarchical_metrics",
                {{"replicate", "replicate index"},
                 {"method", "Gibbs, RWM, IS, PFIS, IS2, PFIS2, GIMH or PFGIMH"},
                 {"w1", "W1 distance between the theta approximation and the quadrature reference"},
                 {"w1_over_sd", "w1 / reference posterior sd of theta"},
                 {"w1_over_mean", "w1 / reference posterior mean of theta"},
                 {"ks", "Kolmogorov-Smirnov statistic against the reference"},
                 {"mean_error", "|approximate mean - reference mean| / reference mean"},
                 {"sd_error", "|approximate sd - reference sd| / reference sd"},
                 {"top_mass_1", "largest normalized weight; nan for chains"},
                 {"top_mass_3", "sum of the three largest normalized weights; nan for chains"},
                 {"latent_mean_error", "sum_k |approximate E[x_k|y] - reference E[x_k|y]|; nan for GIMH"},
                 {"latent_sd_error", "sum_k |approximate sd(x_k|y) - reference sd(x_k|y)|; nan for GIMH"}},
                {}};
  Records rec{"hierarchical_replicates", {}};
  res.metrics.resize(c.R);
  for (std::size_t r = 0; r < c.R; ++r) {
    for (std::size_t m = 0; m < M; ++m) {
      const double* v = &reps[r][m * kMetricCount];
      MethodMetrics mm{c.methods[m], v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]};
      std::vector<Cell> row{std::int64_t(r), mm.method};
      json line{{"replicate", r}, {"method", mm.method}};
      for (std::size_t i = 0; i < kMetricCount; ++i) {
        row.push_back(v[i]);
        line[metrics.columns[i + 2].name] = std::isfinite(v[i]) ? json(v[i]) : json(nullptr);
      }
      metrics.add(std::move(row));
      rec.lines.push_back(std::move(line));
      res.metrics[r].push_back(std::move(mm));
    }
  }

  Table summary{"hierarchical_summary",
                {{"method", "approximation method"},
                 {"w1_rank", "rank of mean w1 among the methods, 1 = smallest"},
                 {"w1", "mean over replicates of w1"},
                 {"w1_over_sd", "mean over replicates of w1_over_sd"},
                 {"w1_over_mean", "mean over replicates of w1_over_mean"},
                 {"ks", "mean over replicates of ks"},
                 {"mean_error", "mean over replicates of mean_error"},
                 {"sd_error", "mean over replicates of sd_error"},
                 {"top_mass_3_over_0.9", "fraction of replicates with top_mass_3 > 0.9; nan for chains"},
                 {"latent_mean_error", "mean over replicates of latent_mean_error"},
                 {"latent_sd_error", "mean over replicates of latent_sd_error"}},
                {}};
  std::vector<double> mean_w1(M);
  std::vector<std::vector<double>> avg(M, std::vector<double>(kMetricCount));
  std::vector<double> degenerate(M);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t r = 0; r < c.R; ++r) {
      for (std::size_t i = 0; i < kMetricCount; ++i) avg[m][i] += reps[r][m * kMetricCount + i] / double(c.R);
      degenerate[m] += reps[r][m * kMetricCount + 7] > 0.9 ? 1.0 / double(c.R) : 0.0;
    }
    if (std::isnan(avg[m][7])) degenerate[m] = std::nan("");
    mean_w1[m] = avg[m][0];
  }
  for (std::size_t m = 0; m < M; ++m) {
    const auto rank = 1 + std::count_if(mean_w1.begin(), mean_w1.end(), [&](double v) { return v < mean_w1[m]; });
    summary.add({c.methods[m], std::int64_t(rank), avg[m][0], avg[m][1], avg[m][2], avg[m][3], avg[m][4], avg[m][5],
                 degenerate[m], avg[m][8], avg[m][9]});
  }

  Table data{"hierarchical_data",
             {{"k", "observation index"},
              {"y", "observation y_k"},
              {"latent_mean", "reference E[x_k | y]"},
              {"latent_sd", "reference sd(x_k | y)"}},
             {}};
  for (std::size_t k = 0; k < model.K(); ++k) data.add({std::int64_t(k), res.y[k], ref_lmean[k], ref_lsd[k]});

  Table refcdf{"reference_cdf",
               {{"theta", "reference posterior quantile"}, {"cdf", "reference posterior CDF at theta"}},
               {}};
  for (std::size_t i = 1; i < 1000; ++i) {
    const double p = static_cast<double>(i) / 1000.0;
    const double q = ref.quantile(p);
    refcdf.add({q, ref.cdf(q)});
  }

  res.artifacts.tables.push_back(std::move(summary));
  res.artifacts.tables.push_back(std::move(metrics));
  res.artifacts.tables.push_back(std::move(data));
  res.artifacts.tables.push_back(std::move(refcdf));
  res.artifacts.records.push_back(std::move(rec));
  for (auto& d : dumps[0]) res.artifacts.ecdfs.push_back(std::move(d));
  return res;
}

}  // namespace pfmc::experiments
