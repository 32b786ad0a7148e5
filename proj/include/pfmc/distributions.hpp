#pragma once

#include <variant>
#include <vector>

#include "pfmc/rng.hpp"

namespace pfmc {

/// Normal with mean and variance (not standard deviation).
struct Normal {
  double mean;
  double variance;
};

struct StudentT {
  double dof;
  double location = 0.0;
  double scale = 1.0;
};

/// Uniform on [0, upper].
struct Uniform {
  double upper;
};

/// Density proportional to x^(-shape-1) exp(-scale/x) on x > 0.
/// Inv-Gamma(a, b) in the conjugate-update convention: shape a, scale b.
struct InverseGamma {
  double shape;
  double scale;
};

struct PointMass {
  double location;
};

struct FiniteDiscrete {
  std::vector<double> points;
  std::vector<double> probs;
};

/// A univariate distribution with validated parameters.
class Dist1D {
 public:
  using Family = std::variant<Normal, StudentT, Uniform, InverseGamma, PointMass, FiniteDiscrete>;

  /// Throws InvalidArgument on invalid parameters.
  explicit Dist1D(Family family);

  const Family& family() const noexcept { return family_; }

  double sample(Rng& rng) const;
  std::vector<double> sample(Rng& rng, std::size_t n) const;

  /// Log density (log mass for FiniteDiscrete and PointMass).
  double logpdf(double x) const;

  /// Throws Unsupported for StudentT.
  double cdf(double x) const;

  /// Throws Unsupported when the mean does not exist.
  double mean() const;
  double variance() const;

 private:
  Family family_;
};

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

/// log N(x; mean, variance).
double normal_logpdf(double x, double mean, double variance) noexcept;

/// Gamma(shape, 1) draw (Marsaglia-Tsang) on the given stream.
double sample_gamma(Rng& rng, double shape);

}  // namespace pfmc
