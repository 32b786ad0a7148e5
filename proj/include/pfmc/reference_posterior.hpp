#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "pfmc/diagnostics.hpp"
#include "pfmc/mcmc.hpp"

namespace pfmc {

struct ReferenceGrid {
  /// Points in the first quadrature pass; doubled until the CDF settles.
  std::size_t initial_points = 2048;
  double tolerance = 1e-8;
  std::size_t max_points = std::size_t{1} << 22;
  /// The u = log theta range ends where the log density falls this far below its maximum.
  double log_density_drop = 50.0;
};

/// theta-marginal posterior p(theta) prod_k N(y_k; 0, theta + 1), normalized by quadrature in u = log theta.
class ReferencePosterior {
 public:
  /// Throws NumericalError when the grid fails to converge within max_points
  /// or the density does not decay within |u| <= 200.
  explicit ReferencePosterior(const HierarchicalModel& model, const ReferenceGrid& grid = {});

  double cdf(double theta) const;
  double quantile(double p) const;

  /// Posterior expectation of fn(theta).
  double expectation(const std::function<double(double)>& fn) const;
  double mean() const;
  double sd() const;

  /// E[x_k | y] and sd(x_k | y) from E[theta/(theta+1)] and its square.
  double latent_mean(std::size_t k) const;
  double latent_sd(std::size_t k) const;

  ReferenceCdf as_reference() const;

  /// Largest CDF change at shared grid points in the final refinement.
  double refinement_change() const noexcept { return change_; }
  std::size_t grid_points() const noexcept { return u_.size(); }

 private:
  HierarchicalModel model_;
  bool prior_only_ = false;
  std::vector<double> u_;
  std::vector<double> cdf_;
  /// Unnormalized density at grid points and interval midpoints, scaled by the peak.
  std::vector<double> f_;
  std::vector<double> f_mid_;
  double z_ = 1.0;
  double change_ = 0.0;
};

}  // namespace pfmc
