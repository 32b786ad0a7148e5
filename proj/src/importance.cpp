#include "pfmc/importance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pfmc/errors.hpp"
#include "pfmc/estimators.hpp"
#include "pfmc/factorized.hpp"
#include "pfmc/variance.hpp"

namespace pfmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_log_weight(double lw) {
  if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity())
    throw NumericalError("non-finite log-weight " + std::to_string(lw));
}
}  // namespace

// ---------------------------------------------------------------- particles

std::vector<double> WeightedParticles::weights() const {
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i] - log_normalizer);
  return w;
}

WeightedParticles WeightedParticles::from_log_weights(std::size_t width, std::vector<double> locations,
                                                      std::vector<double> log_weights) {
  if (width == 0 || locations.size() != width * log_weights.size())
    throw InvalidArgument("WeightedParticles: locations must be size x width");
  for (double lw : log_weights) check_log_weight(lw);
  const double z = log_sum_exp(log_weights);
  if (z == kNegInf) throw NumericalError("weight degeneracy: every importance weight is zero");
  return {width, std::move(locations), std::move(log_weights), z};
}

WeightedParticles WeightedParticles::uniform(std::size_t width, std::vector<double> locations) {
  const std::size_t n = width == 0 ? 0 : locations.size() / width;
  return from_log_weights(width, std::move(locations), std::vector<double>(n, 0.0));
}

// ------------------------------------------------------------ weight model

LogWeightModel LogWeightModel::joint(std::size_t latent_blocks, JointLogWeight log_w, bool uses_theta) {
  if (!log_w) throw InvalidArgument("LogWeightModel: missing joint log-weight");
  LogWeightModel m;
  m.mode_ = Mode::Joint;
  m.latent_blocks_ = latent_blocks;
  m.uses_theta_ = uses_theta;
  m.joint_ = std::move(log_w);
  return m;
}

LogWeightModel LogWeightModel::factorized(std::size_t latent_blocks, BlockTerm g, ThetaTerm g0, bool uses_theta) {
  if (!g) throw InvalidArgument("LogWeightModel: missing per-block log-weight terms");
  LogWeightModel m;
  m.mode_ = Mode::Factorized;
  m.latent_blocks_ = latent_blocks;
  m.uses_theta_ = uses_theta;
  m.g_ = std::move(g);
  m.g0_ = std::move(g0);
  return m;
}

LogWeightModel LogWeightModel::unit(std::size_t latent_blocks, bool uses_theta) {
  return factorized(
      latent_blocks, [](BlockPoint, std::size_t, BlockPoint) { return 0.0; }, {}, uses_theta);
}

double LogWeightModel::log_weight(BlockPoint theta, JointPoint x) const {
  if (mode_ == Mode::Joint) return joint_(theta, x);
  double s = theta_term(theta);
  for (std::size_t k = 0; k < x.size(); ++k) s += g_(theta, k, x[k]);
  return s;
}

double LogWeightModel::theta_term(BlockPoint theta) const {
  if (mode_ != Mode::Factorized) throw InvalidArgument("LogWeightModel: theta_term needs a factorized weight");
  return g0_ ? g0_(theta) : 0.0;
}

double LogWeightModel::block_term(BlockPoint theta, std::size_t k, BlockPoint x_k) const {
  if (mode_ != Mode::Factorized) throw InvalidArgument("LogWeightModel: block_term needs a factorized weight");
  return g_(theta, k, x_k);
}

// ---------------------------------------------------------- product-form IS

namespace {

std::size_t theta_offset(const LogWeightModel& w) { return w.uses_theta() ? 1 : 0; }

void check_layout(const MarginalSamples& m, const LogWeightModel& w, const TestFunction& phi) {
  const std::size_t expected = w.latent_blocks() + theta_offset(w);
  if (m.num_blocks() != expected)
    throw InvalidArgument("importance: samples have " + std::to_string(m.num_blocks()) + " blocks, weight expects " +
                          std::to_string(expected));
  if (auto b = phi.blocks(); b && *b != expected)
    throw InvalidArgument("importance: test function has " + std::to_string(*b) + " blocks, expected " +
                          std::to_string(expected));
}

struct LogResult {
  SignedLog value;
  Estimate counters;
};

LogResult brute_force_log(const MarginalSamples& m, const LogWeightModel& w, const TestFunction& phi,
                          const EvalLimits& limits) {
  const auto counts = m.counts();
  double tuples = 1.0;
  for (auto n : counts) tuples *= static_cast<double>(n);
  if (tuples > static_cast<double>(limits.brute_force_tuples))
    throw CapExceeded("brute-force importance sum needs " + std::to_string(tuples) + " tuples, cap is " +
                      std::to_string(limits.brute_force_tuples));
  const std::size_t off = theta_offset(w);
  std::vector<BlockPoint> point(m.num_blocks());
  SignedLogAccumulator acc;
  LogResult r;
  for_each_index_tuple(counts, [&](std::span<const std::size_t> idx) {
    m.gather(idx, point);
    const JointPoint full(point);
    const BlockPoint theta = off ? full[0] : BlockPoint{};
    const double lw = w.log_weight(theta, full.subspan(off));
    check_log_weight(lw);
    const double f = phi(full);
    if (!std::isfinite(f)) throw NumericalError("non-finite test function value in importance sum");
    acc.add(SignedLog::from_log(lw) * SignedLog::from_value(f));
    ++r.counters.n_phi_evals;
  });
  r.value = acc.total();
  if (!r.value.is_zero()) r.value.log_abs -= std::log(tuples);
  r.counters.strategy = StrategyKind::BruteForce;
  return r;
}

LogResult sop_log(const MarginalSamples& m, const LogWeightModel& w, const SopFunction& sop) {
  if (w.mode() != LogWeightModel::Mode::Factorized)
    throw InvalidArgument("SopFastPath importance estimate requires a factorized weight");
  const std::size_t off = theta_offset(w);
  const std::size_t K = w.latent_blocks();
  const std::size_t J = sop.terms();

  // Latent factor columns do not depend on theta: evaluate once.
  std::vector<std::vector<double>> cols(K);
  LogResult r;
  for (std::size_t k = 0; k < K; ++k) {
    const auto& block = m.block(k + off);
    cols[k].resize(block.size() * J);
    for (std::size_t n = 0; n < block.size(); ++n) {
      std::span<double> out(cols[k].data() + n * J, J);
      sop.column(k + off, block[n], out);
      for (std::size_t j = 0; j < J; ++j)
        if (!std::isfinite(out[j]))
          throw NumericalError("non-finite factor value at term " + std::to_string(j) + ", block " +
                               std::to_string(k + off) + ", sample " + std::to_string(n));
    }
    r.counters.n_factor_evals += block.size() * J;
  }

  const std::size_t n_theta = off ? m.count(0) : 1;
  SignedLogAccumulator outer;
  std::vector<double> theta_col(J, 1.0);
  std::vector<SignedLog> term(J);
  std::vector<double> g;
  std::vector<double> s(J);
  for (std::size_t t = 0; t < n_theta; ++t) {
    const BlockPoint theta = off ? m.block(0)[t] : BlockPoint{};
    if (off) {
      sop.column(0, theta, theta_col);
      r.counters.n_factor_evals += J;
    }
    const double g0 = w.theta_term(theta);
    check_log_weight(g0);
    for (std::size_t j = 0; j < J; ++j)
      term[j] = SignedLog::from_value(sop.coeff(j) * theta_col[j]) * SignedLog::from_log(g0);
    for (std::size_t k = 0; k < K; ++k) {
      const auto& block = m.block(k + off);
      const std::size_t N = block.size();
      g.resize(N);
      double gmax = kNegInf;
      for (std::size_t n = 0; n < N; ++n) {
        g[n] = w.block_term(theta, k, block[n]);
        check_log_weight(g[n]);
        gmax = std::max(gmax, g[n]);
      }
      if (gmax == kNegInf) {
        std::fill(term.begin(), term.end(), SignedLog{});
        break;
      }
      std::fill(s.begin(), s.end(), 0.0);
      for (std::size_t n = 0; n < N; ++n) {
        const double e = std::exp(g[n] - gmax);
        const double* c = cols[k].data() + n * J;
        for (std::size_t j = 0; j < J; ++j) s[j] += e * c[j];
      }
      for (std::size_t j = 0; j < J; ++j) {
        SignedLog mean = SignedLog::from_value(s[j] / static_cast<double>(N));
        if (!mean.is_zero()) mean.log_abs += gmax;
        term[j] = term[j] * mean;
      }
    }
    for (const auto& tj : term) outer.add(tj);
  }
  r.value = outer.total();
  if (!r.value.is_zero()) r.value.log_abs -= std::log(static_cast<double>(n_theta));
  r.counters.strategy = StrategyKind::SopFastPath;
  return r;
}

FactorGraphFunction with_weight_factors(const FactorGraphFunction& fg, const LogWeightModel& w, double& constant) {
  const std::size_t off = theta_offset(w);
  std::vector<Factor> factors = fg.factors();
  constant = 1.0;
  if (w.mode() == LogWeightModel::Mode::Joint) {
    std::vector<std::size_t> scope(fg.blocks());
    std::iota(scope.begin(), scope.end(), 0);
    factors.push_back({scope, [w, off](JointPoint x) {
                         const BlockPoint theta = off ? x[0] : BlockPoint{};
                         return std::exp(w.log_weight(theta, x.subspan(off)));
                       }});
  } else {
    if (off) {
      factors.push_back({{0}, [w](JointPoint x) { return std::exp(w.theta_term(x[0])); }});
    } else {
      constant = std::exp(w.theta_term({}));
    }
    for (std::size_t k = 0; k < w.latent_blocks(); ++k) {
      if (off) {
        factors.push_back({{0, k + 1}, [w, k](JointPoint x) { return std::exp(w.block_term(x[0], k, x[1])); }});
      } else {
        factors.push_back({{k}, [w, k](JointPoint x) { return std::exp(w.block_term({}, k, x[0])); }});
      }
    }
  }
  return FactorGraphFunction(fg.blocks(), std::move(factors));
}

LogResult eliminate_log(const MarginalSamples& m, const LogWeightModel& w, const FactorGraphFunction& fg,
                        const Strategy& strategy, const EvalLimits& limits) {
  double constant = 1.0;
  const auto full = with_weight_factors(fg, w, constant);
  const auto counts = m.counts();
  const auto plan = strategy.plan ? *strategy.plan : plan_elimination(full, EliminationHeuristic::MinFill, {}, counts);
  const auto e = eval_eliminated(m, full, plan, limits);
  LogResult r;
  r.value = SignedLog::from_value(e.value * constant);
  r.counters = e;
  return r;
}

LogResult pf_is_log(const MarginalSamples& m, const LogWeightModel& w, const TestFunction& phi,
                    const Strategy& strategy, const EvalLimits& limits) {
  check_layout(m, w, phi);
  LogResult r;
  switch (strategy.kind) {
    case StrategyKind::BruteForce:
      r = brute_force_log(m, w, phi, limits);
      break;
    case StrategyKind::SopFastPath:
      if (!phi.sop()) throw InvalidArgument("SopFastPath requires a sum-of-products test function");
      r = sop_log(m, w, *phi.sop());
      break;
    case StrategyKind::Eliminate:
      if (!phi.factor_graph()) throw InvalidArgument("Eliminate requires a factor-graph test function");
      r = eliminate_log(m, w, *phi.factor_graph(), strategy, limits);
      break;
    case StrategyKind::Standard:
      throw InvalidArgument("product-form importance estimate: Standard is not a product-form strategy");
  }
  r.counters.n_samples_used = m.counts();
  return r;
}

TestFunction unit_function_like(const TestFunction& phi, std::size_t blocks, StrategyKind kind) {
  switch (kind) {
    case StrategyKind::SopFastPath:
      return SopFunction::from_columns(
          1, std::vector<ColumnEvaluator>(blocks, [](BlockPoint, std::span<double> out) { out[0] = 1.0; }));
    case StrategyKind::Eliminate:
      return FactorGraphFunction(blocks, {});
    default:
      break;
  }
  (void)phi;
  return TestFunction(JointEvaluator([](JointPoint) { return 1.0; }));
}

}  // namespace

SignedLog pf_is_log_estimate(const MarginalSamples& marginals, const LogWeightModel& w, const TestFunction& phi,
                             const Strategy& strategy, const EvalLimits& limits) {
  return pf_is_log(marginals, w, phi, strategy, limits).value;
}

Estimate pf_is_estimate(const MarginalSamples& marginals, const LogWeightModel& w, const TestFunction& phi,
                        const Strategy& strategy, const EvalLimits& limits) {
  auto r = pf_is_log(marginals, w, phi, strategy, limits);
  r.counters.value = r.value.value();
  if (!std::isfinite(r.counters.value)) throw NumericalError("importance estimate overflows; use pf_is_log_estimate");
  return r.counters;
}

Estimate pf_snis_estimate(const MarginalSamples& marginals, const LogWeightModel& w, const TestFunction& phi,
                          const Strategy& strategy, const EvalLimits& limits) {
  auto num = pf_is_log(marginals, w, phi, strategy, limits);
  const auto den = pf_is_log(marginals, w, unit_function_like(phi, marginals.num_blocks(), strategy.kind), strategy,
                             limits);
  if (den.value.is_zero() || den.value.sign < 0)
    throw NumericalError("self-normalized estimate is degenerate: the weight average is zero");
  Estimate e = num.counters;
  e.value = num.value.is_zero() ? 0.0 : num.value.sign * std::exp(num.value.log_abs - den.value.log_abs);
  e.n_phi_evals += den.counters.n_phi_evals;
  e.n_factor_evals += den.counters.n_factor_evals;
  return e;
}

Estimate is_estimate(const MarginalSamples& samples, const LogWeightModel& w, const TestFunction& phi) {
  if (!samples.aligned()) throw InvalidArgument("is_estimate: samples must be aligned tuples");
  check_layout(samples, w, phi);
  const std::size_t off = theta_offset(w);
  const std::size_t N = samples.count(0);
  std::vector<BlockPoint> point(samples.num_blocks());
  std::vector<std::size_t> idx(samples.num_blocks());
  SignedLogAccumulator acc;
  for (std::size_t n = 0; n < N; ++n) {
    std::fill(idx.begin(), idx.end(), n);
    samples.gather(idx, point);
    const JointPoint full(point);
    const double lw = w.log_weight(off ? full[0] : BlockPoint{}, full.subspan(off));
    check_log_weight(lw);
    const double f = phi(full);
    if (!std::isfinite(f)) throw NumericalError("non-finite test function value at sample " + std::to_string(n));
    acc.add(SignedLog::from_log(lw) * SignedLog::from_value(f));
  }
  auto total = acc.total();
  Estimate e;
  e.value = total.is_zero() ? 0.0 : total.sign * std::exp(total.log_abs - std::log(static_cast<double>(N)));
  e.n_phi_evals = N;
  e.n_samples_used = samples.counts();
  e.strategy = StrategyKind::Standard;
  return e;
}

// ------------------------------------------------- partially product-form

ConditionalSamples::ConditionalSamples(SampleBlock thetas_, std::vector<MarginalSamples> x_)
    : thetas(std::move(thetas_)), x(std::move(x_)) {
  if (x.size() != thetas.size())
    throw InvalidArgument("ConditionalSamples: need one latent sample set per theta (" +
                          std::to_string(thetas.size()) + " thetas, " + std::to_string(x.size()) + " sets)");
  for (const auto& xm : x)
    if (xm.num_blocks() != x.front().num_blocks())
      throw InvalidArgument("ConditionalSamples: every theta must have the same block count");
}

namespace {

void reject_duplicate_thetas(const SampleBlock& thetas) {
  std::vector<std::size_t> order(thetas.size());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    const auto ra = thetas[a];
    const auto rb = thetas[b];
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto ra = thetas[order[i - 1]];
    const auto rb = thetas[order[i]];
    if (std::equal(ra.begin(), ra.end(), rb.begin(), rb.end()))
      throw InvalidArgument("ppf_estimate: theta samples " + std::to_string(std::min(order[i - 1], order[i])) +
                            " and " + std::to_string(std::max(order[i - 1], order[i])) + " coincide");
  }
}

}  // namespace

Estimate ppf_estimate(const ConditionalSamples& cs, const ConditionalTestFunction& phi, const Strategy& strategy,
                      DuplicatePolicy duplicates, const EvalLimits& limits) {
  if (duplicates == DuplicatePolicy::Reject) reject_duplicate_thetas(cs.thetas);
  Estimate out;
  out.strategy = strategy.kind;
  out.n_samples_used.assign(cs.x.front().num_blocks(), 0);
  CompensatedSum sum;
  for (std::size_t m = 0; m < cs.size(); ++m) {
    const auto e = product_form_estimate(cs.x[m], phi(cs.thetas[m]), strategy, limits);
    sum.add(e.value);
    out.n_phi_evals += e.n_phi_evals;
    out.n_factor_evals += e.n_factor_evals;
    for (std::size_t k = 0; k < e.n_samples_used.size(); ++k) out.n_samples_used[k] += e.n_samples_used[k];
  }
  out.value = sum.value() / static_cast<double>(cs.size());
  return out;
}

Estimate ppf_standard_estimate(const ConditionalSamples& cs, const ConditionalTestFunction& phi) {
  Estimate out;
  out.strategy = StrategyKind::Standard;
  out.n_samples_used.assign(cs.x.front().num_blocks(), 0);
  CompensatedSum sum;
  for (std::size_t m = 0; m < cs.size(); ++m) {
    const auto e = standard_estimate(cs.x[m], phi(cs.thetas[m]));
    sum.add(e.value);
    out.n_phi_evals += e.n_phi_evals;
    for (std::size_t k = 0; k < e.n_samples_used.size(); ++k) out.n_samples_used[k] += e.n_samples_used[k];
  }
  out.value = sum.value() / static_cast<double>(cs.size());
  return out;
}

PpfVariance ppf_exact_variance(const DiscreteBlock& theta_support, const std::vector<DiscreteProductTarget>& kernels,
                               const ConditionalTestFunction& phi, std::size_t M, std::size_t N) {
  if (M == 0 || N == 0) throw InvalidArgument("ppf_exact_variance: M and N must be positive");
  if (kernels.size() != theta_support.size())
    throw InvalidArgument("ppf_exact_variance: need one kernel per theta support point");
  const std::size_t n = theta_support.size();
  std::vector<double> means(n);
  CompensatedSum mu;
  CompensatedSum inner_pf;
  CompensatedSum inner_std;
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = phi(theta_support.point(i));
    const std::vector<std::size_t> counts(kernels[i].num_blocks(), N);
    const auto rep = exact_variance(kernels[i], f, counts);
    means[i] = expectation(kernels[i], f);
    const double p = theta_support.probs[i];
    mu.add(p * means[i]);
    inner_pf.add(p * rep.finite_sample);
    inner_std.add(p * rep.asymptotic_std / static_cast<double>(N));
  }
  CompensatedSum outer;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = means[i] - mu.value();
    outer.add(theta_support.probs[i] * d * d);
  }
  PpfVariance r;
  r.sigma_sq_pf = outer.value() + inner_pf.value();
  r.sigma_sq_std = outer.value() + inner_std.value();
  r.variance = r.sigma_sq_pf / static_cast<double>(M);
  r.standard_variance = r.sigma_sq_std / static_cast<double>(M);
  return r;
}

// ------------------------------------------------------- theta marginals

namespace {

std::vector<double> log_weights_aligned(BlockPoint theta, const MarginalSamples& x, const LogWeightModel& w);

double log_pf_average(BlockPoint theta, const MarginalSamples& x, const LogWeightModel& w, const EvalLimits& limits) {
  if (w.mode() == LogWeightModel::Mode::Factorized) {
    double s = w.theta_term(theta);
    check_log_weight(s);
    std::vector<double> g;
    for (std::size_t k = 0; k < x.num_blocks(); ++k) {
      const auto& block = x.block(k);
      g.resize(block.size());
      for (std::size_t n = 0; n < block.size(); ++n) {
        g[n] = w.block_term(theta, k, block[n]);
        check_log_weight(g[n]);
      }
      s += log_mean_exp(g);
    }
    return s;
  }
  const auto counts = x.counts();
  double tuples = 1.0;
  for (auto n : counts) tuples *= static_cast<double>(n);
  if (tuples > static_cast<double>(limits.brute_force_tuples))
    throw CapExceeded("theta_marginal: joint weight needs " + std::to_string(tuples) + " tuples per atom");
  std::vector<BlockPoint> point(x.num_blocks());
  SignedLogAccumulator acc;
  for_each_index_tuple(counts, [&](std::span<const std::size_t> idx) {
    x.gather(idx, point);
    const double lw = w.log_weight(theta, point);
    check_log_weight(lw);
    acc.add(SignedLog::from_log(lw));
  });
  const auto t = acc.total();
  return t.is_zero() ? kNegInf : t.log_abs - std::log(tuples);
}

}  // namespace

double log_product_form_average(BlockPoint theta, const MarginalSamples& x, const LogWeightModel& w,
                                const EvalLimits& limits) {
  if (x.num_blocks() != w.latent_blocks()) throw InvalidArgument("log_product_form_average: block count mismatch");
  return log_pf_average(theta, x, w, limits);
}

double log_standard_average(BlockPoint theta, const MarginalSamples& x, const LogWeightModel& w) {
  if (x.num_blocks() != w.latent_blocks()) throw InvalidArgument("log_standard_average: block count mismatch");
  return log_mean_exp(log_weights_aligned(theta, x, w));
}

namespace {

BlockPoint theta_arg(const LogWeightModel& w, BlockPoint theta) { return w.uses_theta() ? theta : BlockPoint{}; }

std::vector<double> log_weights_joint(const JointProposalSamples& s, const LogWeightModel& w) {
  if (!s.x.aligned() || s.x.count(0) != s.thetas.size())
    throw InvalidArgument("theta_marginal(IS): latent samples must be aligned with the theta samples");
  std::vector<double> lw(s.thetas.size());
  std::vector<BlockPoint> point(s.x.num_blocks());
  std::vector<std::size_t> idx(s.x.num_blocks());
  for (std::size_t n = 0; n < lw.size(); ++n) {
    std::fill(idx.begin(), idx.end(), n);
    s.x.gather(idx, point);
    lw[n] = w.log_weight(theta_arg(w, s.thetas[n]), point);
    check_log_weight(lw[n]);
  }
  return lw;
}

// Per-theta log weights of sample n of x[m] under the joint weight.
std::vector<double> log_weights_aligned(BlockPoint theta, const MarginalSamples& x, const LogWeightModel& w) {
  if (!x.aligned()) throw InvalidArgument("theta_marginal(IS2): latent samples must be aligned per theta");
  std::vector<double> lw(x.count(0));
  std::vector<BlockPoint> point(x.num_blocks());
  std::vector<std::size_t> idx(x.num_blocks());
  for (std::size_t n = 0; n < lw.size(); ++n) {
    std::fill(idx.begin(), idx.end(), n);
    x.gather(idx, point);
    lw[n] = w.log_weight(theta, point);
    check_log_weight(lw[n]);
  }
  return lw;
}

const JointProposalSamples& need_joint(const ThetaMarginalInput& in) {
  if (const auto* s = std::get_if<JointProposalSamples>(&in)) return *s;
  throw InvalidArgument("IS and PFIS take joint-proposal samples");
}

const ConditionalSamples& need_conditional(const ThetaMarginalInput& in) {
  if (const auto* s = std::get_if<ConditionalSamples>(&in)) return *s;
  throw InvalidArgument("IS2 and PFIS2 take conditional samples");
}

const SampleBlock& thetas_of(const ThetaMarginalInput& in) {
  return std::visit([](const auto& s) -> const SampleBlock& { return s.thetas; }, in);
}

}  // namespace

WeightedParticles theta_marginal(ThetaMethod method, const ThetaMarginalInput& input, const LogWeightModel& w,
                                 const EvalLimits& limits) {
  std::vector<double> lw;
  switch (method) {
    case ThetaMethod::IS:
      lw = log_weights_joint(need_joint(input), w);
      break;
    case ThetaMethod::PFIS: {
      const auto& s = need_joint(input);
      lw.resize(s.thetas.size());
      for (std::size_t n = 0; n < lw.size(); ++n) lw[n] = log_pf_average(theta_arg(w, s.thetas[n]), s.x, w, limits);
      break;
    }
    case ThetaMethod::IS2: {
      const auto& s = need_conditional(input);
      lw.resize(s.size());
      for (std::size_t m = 0; m < lw.size(); ++m)
        lw[m] = log_mean_exp(log_weights_aligned(theta_arg(w, s.thetas[m]), s.x[m], w));
      break;
    }
    case ThetaMethod::PFIS2: {
      const auto& s = need_conditional(input);
      lw.resize(s.size());
      for (std::size_t m = 0; m < lw.size(); ++m) lw[m] = log_pf_average(theta_arg(w, s.thetas[m]), s.x[m], w, limits);
      break;
    }
  }
  const auto& thetas = thetas_of(input);
  return WeightedParticles::from_log_weights(thetas.width(),
                                             std::vector<double>(thetas.values().begin(), thetas.values().end()),
                                             std::move(lw));
}

namespace {

struct MomentSums {
  std::vector<double> m1;
  std::vector<double> m2;
  explicit MomentSums(std::size_t K) : m1(K, 0.0), m2(K, 0.0) {}
};

// Adds weight * (self-normalized inner average of x and x^2 under log weights g) to slot k.
void add_inner(MomentSums& acc, std::size_t k, double weight, std::span<const double> g, const SampleBlock& block) {
  const double z = log_sum_exp(g);
  if (z == kNegInf) return;
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double v = std::exp(g[n] - z);
    const double xv = block[n][0];
    s1 += v * xv;
    s2 += v * xv * xv;
  }
  acc.m1[k] += weight * s1;
  acc.m2[k] += weight * s2;
}

LatentMoments finish(const MomentSums& acc) {
  LatentMoments out;
  for (std::size_t k = 0; k < acc.m1.size(); ++k) {
    out.mean.push_back(acc.m1[k]);
    out.sd.push_back(std::sqrt(std::max(0.0, acc.m2[k] - acc.m1[k] * acc.m1[k])));
  }
  return out;
}

void require_scalar(const MarginalSamples& x) {
  for (std::size_t k = 0; k < x.num_blocks(); ++k)
    if (x.block(k).width() != 1) throw InvalidArgument("latent_moments: latent blocks must be scalar");
}

}  // namespace

LatentMoments latent_moments(ThetaMethod method, const ThetaMarginalInput& input, const LogWeightModel& w) {
  const auto particles = theta_marginal(method, input, w);
  const auto W = particles.weights();
  std::vector<double> g;
  switch (method) {
    case ThetaMethod::IS: {
      const auto& s = need_joint(input);
      require_scalar(s.x);
      MomentSums acc(s.x.num_blocks());
      for (std::size_t n = 0; n < W.size(); ++n)
        for (std::size_t k = 0; k < s.x.num_blocks(); ++k) {
          const double xv = s.x.block(k)[n][0];
          acc.m1[k] += W[n] * xv;
          acc.m2[k] += W[n] * xv * xv;
        }
      return finish(acc);
    }
    case ThetaMethod::IS2: {
      const auto& s = need_conditional(input);
      MomentSums acc(s.x.front().num_blocks());
      for (std::size_t m = 0; m < W.size(); ++m) {
        require_scalar(s.x[m]);
        const auto lw = log_weights_aligned(theta_arg(w, s.thetas[m]), s.x[m], w);
        for (std::size_t k = 0; k < s.x[m].num_blocks(); ++k) add_inner(acc, k, W[m], lw, s.x[m].block(k));
      }
      return finish(acc);
    }
    case ThetaMethod::PFIS:
    case ThetaMethod::PFIS2: {
      if (w.mode() != LogWeightModel::Mode::Factorized)
        throw InvalidArgument("latent_moments: PFIS and PFIS2 need a factorized weight");
      const bool joint = method == ThetaMethod::PFIS;
      const std::size_t n_atoms = W.size();
      const std::size_t K = joint ? need_joint(input).x.num_blocks() : need_conditional(input).x.front().num_blocks();
      MomentSums acc(K);
      for (std::size_t a = 0; a < n_atoms; ++a) {
        const auto& thetas = thetas_of(input);
        const auto& x = joint ? need_joint(input).x : need_conditional(input).x[a];
        require_scalar(x);
        const BlockPoint theta = theta_arg(w, thetas[a]);
        for (std::size_t k = 0; k < K; ++k) {
          const auto& block = x.block(k);
          g.resize(block.size());
          for (std::size_t n = 0; n < block.size(); ++n) g[n] = w.block_term(theta, k, block[n]);
          add_inner(acc, k, W[a], g, block);
        }
      }
      return finish(acc);
    }
  }
  return {};
}

}  // namespace pfmc
