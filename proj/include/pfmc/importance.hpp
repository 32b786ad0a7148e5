#pragma once

#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

#include "pfmc/discrete_target.hpp"
#include "pfmc/estimate.hpp"
#include "pfmc/numerics.hpp"
#include "pfmc/particles.hpp"
#include "pfmc/samples.hpp"
#include "pfmc/test_function.hpp"

namespace pfmc {

/// Log Radon-Nikodym weight log w(theta, x) over K latent blocks.
///
/// When the weight depends on theta, sample containers passed alongside it
/// carry theta as block 0 and the latent blocks as 1..K. A theta-free weight
/// receives an empty theta.
class LogWeightModel {
 public:
  enum class Mode { Joint, Factorized };

  using JointLogWeight = std::function<double(BlockPoint theta, JointPoint x)>;
  using ThetaTerm = std::function<double(BlockPoint theta)>;
  /// g_k(theta, x_k) for latent block k (0-based).
  using BlockTerm = std::function<double(BlockPoint theta, std::size_t k, BlockPoint x_k)>;

  static LogWeightModel joint(std::size_t latent_blocks, JointLogWeight log_w, bool uses_theta);
  /// log w = g0(theta) + sum_k g_k(theta, x_k); g0 may be empty.
  static LogWeightModel factorized(std::size_t latent_blocks, BlockTerm g, ThetaTerm g0, bool uses_theta);
  /// w == 1.
  static LogWeightModel unit(std::size_t latent_blocks, bool uses_theta = false);

  Mode mode() const noexcept { return mode_; }
  std::size_t latent_blocks() const noexcept { return latent_blocks_; }
  bool uses_theta() const noexcept { return uses_theta_; }

  double log_weight(BlockPoint theta, JointPoint x) const;
  /// Factorized mode only.
  double theta_term(BlockPoint theta) const;
  double block_term(BlockPoint theta, std::size_t k, BlockPoint x_k) const;

 private:
  Mode mode_ = Mode::Joint;
  std::size_t latent_blocks_ = 0;
  bool uses_theta_ = false;
  JointLogWeight joint_;
  ThetaTerm g0_;
  BlockTerm g_;
};

/// Product-form IS estimate mu_x^N(w phi) of gamma(phi), in signed log form.
///
/// BruteForce works for any w and phi. SopFastPath requires a Factorized w
/// and a Sop phi and costs O(N_0 K N J) with a theta block, O(K N J)
/// without. Eliminate requires a FactorGraph phi; w's terms are added as
/// factors and the contraction runs in the linear domain.
SignedLog pf_is_log_estimate(const MarginalSamples& marginals, const LogWeightModel& w, const TestFunction& phi,
                             const Strategy& strategy = Strategy::brute_force(), const EvalLimits& limits = {});

Estimate pf_is_estimate(const MarginalSamples& marginals, const LogWeightModel& w, const TestFunction& phi,
                        const Strategy& strategy = Strategy::brute_force(), const EvalLimits& limits = {});

/// Self-normalized ratio mu_x^N(w phi) / mu_x^N(w). Throws NumericalError when the denominator is zero.
Estimate pf_snis_estimate(const MarginalSamples& marginals, const LogWeightModel& w, const TestFunction& phi,
                          const Strategy& strategy = Strategy::brute_force(), const EvalLimits& limits = {});

/// Standard IS estimate N^-1 sum_n w(X^n) phi(X^n) over aligned samples.
Estimate is_estimate(const MarginalSamples& samples, const LogWeightModel& w, const TestFunction& phi);

/// log of the product-form average of w(theta, .) over every latent index tuple of x.
/// O(K N) for a Factorized w; a Joint w is summed by brute force under limits.brute_force_tuples.
double log_product_form_average(BlockPoint theta, const MarginalSamples& x, const LogWeightModel& w,
                                const EvalLimits& limits = {});

/// log N^-1 sum_n w(theta, X^n) over aligned x.
double log_standard_average(BlockPoint theta, const MarginalSamples& x, const LogWeightModel& w);

/// theta^1..theta^M with N_m conditionally independent draws per theta: x[m] ~ prod_k M_k(theta^m, .).
struct ConditionalSamples {
  SampleBlock thetas;
  std::vector<MarginalSamples> x;

  /// Throws InvalidArgument unless there is one MarginalSamples per theta, all with the same block count.
  ConditionalSamples(SampleBlock thetas, std::vector<MarginalSamples> x);
  std::size_t size() const noexcept { return thetas.size(); }
};

/// phi(theta, .) as a test function over the latent blocks.
using ConditionalTestFunction = std::function<TestFunction(BlockPoint theta)>;

enum class DuplicatePolicy { Reject, Allow };

/// Partially product-form estimate M^-1 sum_m mu_x^N(phi(theta^m, .)) over x[m].
///
/// Coinciding theta values make the estimator lose its optimality; by default
/// they are rejected with InvalidArgument. Allow keeps the same unbiased average.
Estimate ppf_estimate(const ConditionalSamples& cs, const ConditionalTestFunction& phi,
                      const Strategy& strategy = Strategy::brute_force(),
                      DuplicatePolicy duplicates = DuplicatePolicy::Reject, const EvalLimits& limits = {});

/// Two-level average (M N)^-1 sum_m sum_n phi(theta^m, X^{m,n}) over aligned x[m].
Estimate ppf_standard_estimate(const ConditionalSamples& cs, const ConditionalTestFunction& phi);

struct PpfVariance {
  /// Var of the partially product-form estimate at (M, N).
  double variance = 0.0;
  /// sigma^2_{x,N} = M * variance.
  double sigma_sq_pf = 0.0;
  /// Var of the two-level standard average.
  double standard_variance = 0.0;
  double sigma_sq_std = 0.0;
};

/// Exact variances for a finite theta-distribution with per-theta finite kernels.
/// kernels[i] is the conditional product target at theta_support.point(i).
PpfVariance ppf_exact_variance(const DiscreteBlock& theta_support, const std::vector<DiscreteProductTarget>& kernels,
                               const ConditionalTestFunction& phi, std::size_t M, std::size_t N);

/// Draws from a theta-proposal and independent latent proposals, used by IS and PFIS.
struct JointProposalSamples {
  SampleBlock thetas;
  MarginalSamples x;
};

using ThetaMarginalInput = std::variant<JointProposalSamples, ConditionalSamples>;

enum class ThetaMethod { IS, PFIS, IS2, PFIS2 };

/// Weighted atoms at the theta samples approximating the theta-marginal.
///
/// IS: atom n weighted by w(theta^n, X^n) over aligned joint samples.
/// PFIS: atom n weighted by the average of w(theta^n, X^n) over all latent
///   index tuples; O(K N) per atom for a Factorized w.
/// IS2: atom m weighted by N^-1 sum_n w(theta^m, X^{m,n}).
/// PFIS2: atom m weighted by the product-form average over x[m].
/// IS and PFIS take JointProposalSamples, IS2 and PFIS2 ConditionalSamples.
WeightedParticles theta_marginal(ThetaMethod method, const ThetaMarginalInput& input, const LogWeightModel& w,
                                 const EvalLimits& limits = {});

/// Posterior mean and standard deviation of each scalar latent coordinate.
struct LatentMoments {
  std::vector<double> mean;
  std::vector<double> sd;
};

/// Latent-marginal moment estimates matching theta_marginal's four methods.
/// PFIS and PFIS2 require a Factorized w and scalar latent blocks.
LatentMoments latent_moments(ThetaMethod method, const ThetaMarginalInput& input, const LogWeightModel& w);

}  // namespace pfmc
