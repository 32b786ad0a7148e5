#include "pfmc/reference_posterior.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/inverse_gamma.hpp>

#include "pfmc/errors.hpp"
#include "pfmc/numerics.hpp"

namespace pfmc {

namespace {

constexpr double kMaxAbsU = 200.0;

struct Pass {
  std::vector<double> u, f, f_mid, cdf;
  double z = 0.0;
};

Pass integrate(const std::function<double(double)>& log_f, double peak, double lo, double hi, std::size_t n) {
  Pass p;
  p.u.resize(n + 1);
  p.f.resize(n + 1);
  p.f_mid.resize(n);
  p.cdf.resize(n + 1);
  const double h = (hi - lo) / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) {
    p.u[i] = lo + h * static_cast<double>(i);
    p.f[i] = std::exp(log_f(p.u[i]) - peak);
  }
  CompensatedSum run;
  p.cdf[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p.f_mid[i] = std::exp(log_f(p.u[i] + 0.5 * h) - peak);
    run.add(h * (p.f[i] + 4.0 * p.f_mid[i] + p.f[i + 1]) / 6.0);
    p.cdf[i + 1] = run.value();
  }
  p.z = run.value();
  for (auto& c : p.cdf) c /= p.z;
  return p;
}

}  // namespace

ReferencePosterior::ReferencePosterior(const HierarchicalModel& model, const ReferenceGrid& grid) : model_(model) {
  if (model.K() == 0) {
    prior_only_ = true;
    return;
  }
  auto log_f = [&](double u) {
    const double th = std::exp(u);
    return model_.log_prior(th) + model_.log_marginal_likelihood(th) + u;
  };
  // Locate the peak on a coarse scan, then walk outward until the density has dropped enough.
  double peak = -std::numeric_limits<double>::infinity();
  double u_peak = 0.0;
  for (double u = -50.0; u <= 50.0; u += 0.01) {
    const double v = log_f(u);
    if (v > peak) {
      peak = v;
      u_peak = u;
    }
  }
  if (!std::isfinite(peak)) throw NumericalError("reference posterior: density is not finite anywhere on the scan");
  auto edge = [&](double dir) {
    double u = u_peak;
    while (log_f(u) > peak - grid.log_density_drop) {
      u += 0.05 * dir;
      if (std::fabs(u) > kMaxAbsU) throw NumericalError("reference posterior: density does not decay within range");
    }
    return u;
  };
  const double lo = edge(-1.0);
  const double hi = edge(1.0);

  std::size_t n = std::max<std::size_t>(grid.initial_points, 16);
  Pass prev = integrate(log_f, peak, lo, hi, n);
  while (true) {
    if (2 * n > grid.max_points)
      throw NumericalError("reference posterior: quadrature did not converge within the grid limit");
    Pass next = integrate(log_f, peak, lo, hi, 2 * n);
    double change = 0.0;
    for (std::size_t i = 0; i <= n; ++i) change = std::max(change, std::fabs(next.cdf[2 * i] - prev.cdf[i]));
    n *= 2;
    prev = std::move(next);
    if (change < grid.tolerance) {
      change_ = change;
      break;
    }
  }
  u_ = std::move(prev.u);
  f_ = std::move(prev.f);
  f_mid_ = std::move(prev.f_mid);
  cdf_ = std::move(prev.cdf);
  z_ = prev.z;
}

double ReferencePosterior::cdf(double theta) const {
  if (!(theta > 0.0)) return 0.0;
  if (prior_only_) {
    const auto p = model_.prior();
    return boost::math::cdf(boost::math::inverse_gamma_distribution<double>(p.shape, p.scale), theta);
  }
  const double u = std::log(theta);
  if (u <= u_.front()) return 0.0;
  if (u >= u_.back()) return 1.0;
  const double h = u_[1] - u_[0];
  const auto i = std::min(static_cast<std::size_t>((u - u_.front()) / h), u_.size() - 2);
  const double t = (u - u_[i]) / h;
  return cdf_[i] + t * (cdf_[i + 1] - cdf_[i]);
}

double ReferencePosterior::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("reference posterior: quantile level must lie in [0, 1]");
  if (prior_only_) {
    const auto pr = model_.prior();
    if (p == 0.0) return 0.0;
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return boost::math::quantile(boost::math::inverse_gamma_distribution<double>(pr.shape, pr.scale), p);
  }
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
  if (it == cdf_.begin()) return std::exp(u_.front());
  if (it == cdf_.end()) return std::exp(u_.back());
  const auto i = static_cast<std::size_t>(it - cdf_.begin());
  const double span = cdf_[i] - cdf_[i - 1];
  const double t = span > 0.0 ? (p - cdf_[i - 1]) / span : 0.0;
  return std::exp(u_[i - 1] + t * (u_[i] - u_[i - 1]));
}

double ReferencePosterior::expectation(const std::function<double(double)>& fn) const {
  if (prior_only_) throw Unsupported("reference posterior: expectations need at least one observation");
  const double h = u_[1] - u_[0];
  CompensatedSum s;
  for (std::size_t i = 0; i + 1 < u_.size(); ++i) {
    const double a = fn(std::exp(u_[i])) * f_[i];
    const double m = fn(std::exp(u_[i] + 0.5 * h)) * f_mid_[i];
    const double b = fn(std::exp(u_[i + 1])) * f_[i + 1];
    s.add(h * (a + 4.0 * m + b) / 6.0);
  }
  return s.value() / z_;
}

double ReferencePosterior::mean() const {
  return expectation([](double t) { return t; });
}

double ReferencePosterior::sd() const {
  const double m = mean();
  return std::sqrt(std::max(0.0, expectation([m](double t) { return (t - m) * (t - m); })));
}

double ReferencePosterior::latent_mean(std::size_t k) const {
  return expectation([](double t) { return t / (t + 1.0); }) * model_.y().at(k);
}

double ReferencePosterior::latent_sd(std::size_t k) const {
  const double y = model_.y().at(k);
  const double m = latent_mean(k);
  const double second = expectation([y](double t) {
    const double s = t / (t + 1.0);
    return s + s * s * y * y;
  });
  return std::sqrt(std::max(0.0, second - m * m));
}

ReferenceCdf ReferencePosterior::as_reference() const {
  return {[this](double t) { return cdf(t); }, [this](double p) { return quantile(p); }};
}

}  // namespace pfmc
