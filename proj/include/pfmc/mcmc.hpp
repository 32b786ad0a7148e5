#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pfmc/distributions.hpp"
#include "pfmc/importance.hpp"
#include "pfmc/rng.hpp"
#include "pfmc/samples.hpp"

namespace pfmc {

/// y_k ~ N(x_k, 1), x_k ~ N(0, theta), theta ~ Inv-Gamma(alpha/2, alpha*beta/2).
///
/// An empty y is accepted and leaves the posterior equal to the prior.
class HierarchicalModel {
 public:
  HierarchicalModel(std::vector<double> y, double alpha, double beta);

  std::size_t K() const noexcept { return y_.size(); }
  const std::vector<double>& y() const noexcept { return y_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

  InverseGamma prior() const noexcept { return {alpha_ / 2.0, alpha_ * beta_ / 2.0}; }
  double log_prior(double theta) const;
  /// sum_k log N(y_k; 0, theta + 1).
  double log_marginal_likelihood(double theta) const;
  /// log p(theta) + sum_k [log N(y_k; x_k, 1) + log N(x_k; 0, theta)]; -inf for theta <= 0.
  double log_joint(double theta, std::span<const double> x) const;
  /// Prior mean when finite, prior median otherwise.
  double initial_theta() const;

  /// Draws y from the model with the given theta.
  static std::vector<double> simulate(std::size_t K, double theta, Rng& rng);

 private:
  std::vector<double> y_;
  double alpha_;
  double beta_;
};

/// A Markov chain trajectory, states stored row-major (steps x dim).
struct ChainTrace {
  std::size_t dim = 1;
  std::vector<double> states;
  std::size_t acceptance_count = 0;
  std::vector<double> scale_history;
  /// Log density estimate held by the chain at each step (GIMH only).
  std::vector<double> log_estimates;
  std::size_t burn_in = 0;

  std::size_t steps() const noexcept { return dim == 0 ? 0 : states.size() / dim; }
  double state(std::size_t t, std::size_t d = 0) const { return states.at(t * dim + d); }
  double acceptance_rate() const noexcept {
    return steps() == 0 ? 0.0 : static_cast<double>(acceptance_count) / static_cast<double>(steps());
  }
  /// Component d of every state after the burn-in.
  std::vector<double> component(std::size_t d, bool drop_burn_in = true) const;
};

struct RwmOptions {
  double target_accept = 0.25;
  double burn_in_fraction = 0.2;
  double initial_scale = 1.0;
  /// Adapt the scale during burn-in; frozen afterwards.
  bool adapt = true;
};

using LogDensity = std::function<double(std::span<const double>)>;

/// Gaussian random-walk Metropolis with an isotropic proposal.
/// The log scale follows a Robbins-Monro recursion toward target_accept during burn-in.
/// Throws NumericalError when the log density is not finite at init.
ChainTrace rwm_chain(const LogDensity& log_density, std::vector<double> init, std::size_t steps,
                     const RwmOptions& options, std::uint64_t seed);

/// Conjugate Gibbs sampler over (theta, x_1..x_K); state layout [theta, x_1, ..., x_K].
ChainTrace gibbs_hierarchical(const HierarchicalModel& model, std::size_t steps, std::uint64_t seed,
                              std::optional<double> theta0 = std::nullopt);

enum class DensityMode { Standard, ProductForm };

/// log of the N-sample (Standard) or all-tuple (ProductForm) average of w(theta, .) over x.
/// Returns -inf when every weight is zero.
double density_estimate(double theta, const MarginalSamples& x, const LogWeightModel& w, DensityMode mode,
                        const EvalLimits& limits = {});

/// Target of a pseudo-marginal chain over a scalar theta: pi(theta) = integral of M(theta, dx) w(theta, x).
struct GimhProblem {
  /// Draws N samples of each latent block from M(theta, .).
  std::function<MarginalSamples(double theta, std::size_t N, Rng& rng)> sample_kernel;
  /// Weight over (theta, x); must use theta. Include the prior in its theta term.
  LogWeightModel w;
};

struct GimhConfig {
  std::size_t N = 100;
  DensityMode estimator = DensityMode::ProductForm;
  double proposal_scale = 1.0;
  std::size_t steps = 10'000;
  double burn_in_fraction = 0.2;
  std::uint64_t seed = 0;
  double target_accept = 0.25;
  bool adapt = true;
  std::size_t init_retries = 100;
};

/// Non-default proposal kernel for theta.
struct ThetaProposal {
  std::function<double(double from, Rng& rng)> draw;
  /// log Q(from, to); only differences matter.
  std::function<double(double from, double to)> log_q;
};

/// Grouped independence Metropolis-Hastings over theta.
///
/// The default proposal is a Gaussian random walk on log theta whose scale
/// adapts toward target_accept during burn-in. Inner samples and the density
/// estimate are kept on rejection. Throws NumericalError when no nonzero
/// estimate is found at theta0 within init_retries draws.
ChainTrace gimh_chain(const GimhProblem& problem, const GimhConfig& config, double theta0,
                      const std::optional<ThetaProposal>& proposal = std::nullopt);

/// Weight of GIMH for the hierarchical model: w(theta, x) = p(theta) prod_k N(y_k; x_k, 1),
/// with x_k ~ N(0, theta) as the kernel.
GimhProblem hierarchical_gimh_problem(const HierarchicalModel& model);

}  // namespace pfmc
