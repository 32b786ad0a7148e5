#include "pfmc/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/inverse_gamma.hpp>

#include "pfmc/errors.hpp"

namespace pfmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Robbins-Monro step size for adaptation step t (1-based).
double adapt_gain(std::size_t t) { return std::pow(static_cast<double>(t), -0.6); }
}  // namespace

HierarchicalModel::HierarchicalModel(std::vector<double> y, double alpha, double beta)
    : y_(std::move(y)), alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidArgument("HierarchicalModel: alpha and beta must be positive");
  for (double v : y_)
    if (!std::isfinite(v)) throw InvalidArgument("HierarchicalModel: observations must be finite");
}

double HierarchicalModel::log_prior(double theta) const {
  if (!(theta > 0.0)) return kNegInf;
  return Dist1D(prior()).logpdf(theta);
}

double HierarchicalModel::log_marginal_likelihood(double theta) const {
  if (!(theta > 0.0)) return kNegInf;
  double s = 0.0;
  for (double v : y_) s += normal_logpdf(v, 0.0, theta + 1.0);
  return s;
}

double HierarchicalModel::log_joint(double theta, std::span<const double> x) const {
  if (x.size() != y_.size()) throw InvalidArgument("HierarchicalModel: latent vector has the wrong length");
  if (!(theta > 0.0)) return kNegInf;
  double s = log_prior(theta);
  for (std::size_t k = 0; k < y_.size(); ++k) s += normal_logpdf(y_[k], x[k], 1.0) + normal_logpdf(x[k], 0.0, theta);
  return s;
}

double HierarchicalModel::initial_theta() const {
  const auto p = prior();
  if (p.shape > 1.0) return p.scale / (p.shape - 1.0);
  return boost::math::quantile(boost::math::inverse_gamma_distribution<double>(p.shape, p.scale), 0.5);
}

std::vector<double> HierarchicalModel::simulate(std::size_t K, double theta, Rng& rng) {
  if (!(theta > 0.0)) throw InvalidArgument("HierarchicalModel::simulate: theta must be positive");
  std::vector<double> y(K);
  const double sd = std::sqrt(theta);
  for (auto& v : y) {
    const double x = sd * rng.normal();
    v = x + rng.normal();
  }
  return y;
}

std::vector<double> ChainTrace::component(std::size_t d, bool drop_burn_in) const {
  std::vector<double> out;
  for (std::size_t t = drop_burn_in ? burn_in : 0; t < steps(); ++t) out.push_back(state(t, d));
  return out;
}

ChainTrace rwm_chain(const LogDensity& log_density, std::vector<double> init, std::size_t steps,
                     const RwmOptions& options, std::uint64_t seed) {
  if (init.empty()) throw InvalidArgument("rwm_chain: empty initial state");
  if (!(options.burn_in_fraction >= 0.0 && options.burn_in_fraction < 1.0))
    throw InvalidArgument("rwm_chain: burn-in fraction must lie in [0, 1)");
  if (!(options.initial_scale > 0.0)) throw InvalidArgument("rwm_chain: initial scale must be positive");
  double current = log_density(init);
  if (!std::isfinite(current)) throw NumericalError("rwm_chain: log density is not finite at the initial state");

  Rng rng = Rng(seed).split("rwm");
  ChainTrace trace;
  trace.dim = init.size();
  trace.burn_in = static_cast<std::size_t>(options.burn_in_fraction * static_cast<double>(steps));
  trace.states.reserve(steps * trace.dim);
  trace.scale_history.reserve(steps);

  double log_scale = std::log(options.initial_scale);
  std::vector<double> x = std::move(init);
  std::vector<double> prop(x.size());
  for (std::size_t t = 0; t < steps; ++t) {
    const double scale = std::exp(log_scale);
    for (std::size_t d = 0; d < x.size(); ++d) prop[d] = x[d] + scale * rng.normal();
    const double lp = log_density(prop);
    const double log_ratio = std::isnan(lp) ? kNegInf : lp - current;
    const double accept_prob = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
    if (rng.uniform() < accept_prob) {
      x.swap(prop);
      current = lp;
      ++trace.acceptance_count;
    }
    if (options.adapt && t < trace.burn_in) log_scale += adapt_gain(t + 1) * (accept_prob - options.target_accept);
    trace.scale_history.push_back(scale);
    trace.states.insert(trace.states.end(), x.begin(), x.end());
  }
  return trace;
}

ChainTrace gibbs_hierarchical(const HierarchicalModel& model, std::size_t steps, std::uint64_t seed,
                              std::optional<double> theta0) {
  Rng rng = Rng(seed).split("gibbs");
  const std::size_t K = model.K();
  ChainTrace trace;
  trace.dim = K + 1;
  trace.burn_in = steps / 5;
  trace.states.reserve(steps * trace.dim);
  double theta = theta0.value_or(model.initial_theta());
  std::vector<double> x(K);
  const auto prior = model.prior();
  for (std::size_t t = 0; t < steps; ++t) {
    const double precision = 1.0 / theta + 1.0;
    const double var = 1.0 / precision;
    const double sd = std::sqrt(var);
    double ss = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      x[k] = model.y()[k] * var + sd * rng.normal();
      ss += x[k] * x[k];
    }
    const double shape = prior.shape + 0.5 * static_cast<double>(K);
    const double scale = prior.scale + 0.5 * ss;
    theta = scale / sample_gamma(rng, shape);
    trace.states.push_back(theta);
    trace.states.insert(trace.states.end(), x.begin(), x.end());
  }
  trace.acceptance_count = steps;
  return trace;
}

double density_estimate(double theta, const MarginalSamples& x, const LogWeightModel& w, DensityMode mode,
                        const EvalLimits& limits) {
  const double th[1] = {theta};
  const BlockPoint tp = w.uses_theta() ? BlockPoint(th, 1) : BlockPoint{};
  return mode == DensityMode::Standard ? log_standard_average(tp, x, w) : log_product_form_average(tp, x, w, limits);
}

ChainTrace gimh_chain(const GimhProblem& problem, const GimhConfig& config, double theta0,
                      const std::optional<ThetaProposal>& proposal) {
  if (config.N == 0) throw InvalidArgument("gimh_chain: N must be positive");
  if (!(config.burn_in_fraction >= 0.0 && config.burn_in_fraction < 1.0))
    throw InvalidArgument("gimh_chain: burn-in fraction must lie in [0, 1)");
  if (!proposal && !(theta0 > 0.0)) throw InvalidArgument("gimh_chain: log random walk needs a positive theta0");
  if (!(config.proposal_scale > 0.0)) throw InvalidArgument("gimh_chain: proposal scale must be positive");

  Rng rng = Rng(config.seed).split("gimh");
  auto estimate = [&](double theta) {
    const auto x = problem.sample_kernel(theta, config.N, rng);
    return density_estimate(theta, x, problem.w, config.estimator);
  };

  double theta = theta0;
  double current = kNegInf;
  for (std::size_t attempt = 0; attempt < std::max<std::size_t>(1, config.init_retries); ++attempt) {
    current = estimate(theta);
    if (current > kNegInf) break;
  }
  if (!(current > kNegInf))
    throw NumericalError("gimh_chain: density estimate is zero at the initial theta after " +
                         std::to_string(config.init_retries) + " attempts");

  ChainTrace trace;
  trace.dim = 1;
  trace.burn_in = static_cast<std::size_t>(config.burn_in_fraction * static_cast<double>(config.steps));
  trace.states.reserve(config.steps);
  trace.log_estimates.reserve(config.steps);
  trace.scale_history.reserve(config.steps);
  double log_scale = std::log(config.proposal_scale);

  for (std::size_t t = 0; t < config.steps; ++t) {
    const double scale = std::exp(log_scale);
    double cand = 0.0;
    double log_q_ratio = 0.0;  // log Q(cand, theta) - log Q(theta, cand)
    if (proposal) {
      cand = proposal->draw(theta, rng);
      log_q_ratio = proposal->log_q(cand, theta) - proposal->log_q(theta, cand);
    } else {
      cand = theta * std::exp(scale * rng.normal());
      log_q_ratio = std::log(cand) - std::log(theta);
    }
    const double cand_est = estimate(cand);
    const double log_ratio = cand_est == kNegInf ? kNegInf : cand_est - current + log_q_ratio;
    const double accept_prob = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
    if (rng.uniform() < accept_prob) {
      theta = cand;
      current = cand_est;
      ++trace.acceptance_count;
    }
    if (config.adapt && !proposal && t < trace.burn_in)
      log_scale += adapt_gain(t + 1) * (accept_prob - config.target_accept);
    trace.states.push_back(theta);
    trace.log_estimates.push_back(current);
    trace.scale_history.push_back(scale);
  }
  return trace;
}

GimhProblem hierarchical_gimh_problem(const HierarchicalModel& model) {
  GimhProblem p;
  const std::size_t K = model.K();
  if (K == 0) throw InvalidArgument("hierarchical_gimh_problem: need at least one observation");
  p.sample_kernel = [K](double theta, std::size_t N, Rng& rng) {
    const double sd = std::sqrt(theta);
    std::vector<std::vector<double>> blocks(K, std::vector<double>(N));
    for (auto& b : blocks)
      for (auto& v : b) v = sd * rng.normal();
    return MarginalSamples::scalar(std::move(blocks));
  };
  p.w = LogWeightModel::factorized(
      K,
      [y = model.y()](BlockPoint, std::size_t k, BlockPoint x) { return normal_logpdf(y[k], x[0], 1.0); },
      [model](BlockPoint theta) { return model.log_prior(theta[0]); }, true);
  return p;
}

}  // namespace pfmc
