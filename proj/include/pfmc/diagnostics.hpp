#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "pfmc/particles.hpp"

namespace pfmc {

/// Weighted empirical distribution on the real line: sorted distinct atoms with cumulative weights.
class Ecdf {
 public:
  /// Merges equal atoms and sorts. Throws InvalidArgument when the weights do not sum
  /// to 1 within 1e-12, are negative, or the atoms are not finite.
  Ecdf(std::vector<double> atoms, std::vector<double> weights);

  static Ecdf from_samples(std::span<const double> xs);
  /// Scalar particles only.
  static Ecdf from_particles(const WeightedParticles& particles);

  const std::vector<double>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& cumulative() const noexcept { return cumulative_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  /// P(X <= x).
  double operator()(double x) const noexcept;
  /// P(X < x).
  double left_limit(double x) const noexcept;

  double mean() const noexcept;
  double sd() const noexcept;

  /// "x F(x)" lines, one per atom.
  void write(std::ostream& out) const;

 private:
  std::vector<double> atoms_;
  std::vector<double> cumulative_;
  std::vector<double> weights_;
};

/// A continuous reference distribution given by its CDF and quantile function.
struct ReferenceCdf {
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;
};

struct DistanceOptions {
  /// Initial number of reference quantile points in the grid.
  std::size_t grid = 4096;
  /// Stop doubling the grid once the integral changes by less than this.
  double tolerance = 1e-6;
  std::size_t max_refinements = 8;
  /// Reference mass left out at each tail.
  double tail_mass = 1e-12;
};

/// Exact integral of |F - G| between two step functions.
double w1_distance(const Ecdf& f, const Ecdf& g);
/// Exact sup |F - G| between two step functions.
double ks_statistic(const Ecdf& f, const Ecdf& g);

/// Integral of |F - G| against a continuous reference, on the ECDF atoms plus a quantile grid of G.
/// Sub-intervals where F - G changes sign are split at G's crossing point.
double w1_distance(const Ecdf& f, const ReferenceCdf& g, const DistanceOptions& options = {});
/// sup |F - G| for a continuous reference, attained at an atom from one side.
double ks_statistic(const Ecdf& f, const ReferenceCdf& g);

/// Asymptotic Kolmogorov p-value for statistic d on n samples.
double ks_pvalue(double d, std::size_t n);

/// Sum of the p largest normalized weights; 1 when p reaches the atom count.
double top_mass(const WeightedParticles& particles, std::size_t p);

/// (sum w)^2 / sum w^2.
double effective_sample_size(const WeightedParticles& particles);

struct BatchMeans {
  /// Estimated asymptotic variance of the series mean times its length.
  double asymptotic_variance = 0.0;
  /// Standard error of that estimate.
  double standard_error = 0.0;
  std::size_t batches = 0;
};

/// Non-overlapping batch means with floor(sqrt(n)) batches.
BatchMeans batch_means(std::span<const double> series);

}  // namespace pfmc
