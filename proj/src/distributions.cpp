#include "pfmc/distributions.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "pfmc/errors.hpp"

namespace pfmc {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const Dist1D::Family& f) {
  std::visit(Overloaded{
                 [](const Normal& d) {
                   if (!(d.variance > 0.0) || !std::isfinite(d.mean)) throw InvalidArgument("Normal: variance must be > 0");
                 },
                 [](const StudentT& d) {
                   if (!(d.dof > 0.0) || !(d.scale > 0.0)) throw InvalidArgument("StudentT: dof and scale must be > 0");
                 },
                 [](const Uniform& d) {
                   if (!(d.upper > 0.0)) throw InvalidArgument("Uniform: upper bound must be > 0");
                 },
                 [](const InverseGamma& d) {
                   if (!(d.shape > 0.0) || !(d.scale > 0.0))
                     throw InvalidArgument("InverseGamma: shape and scale must be > 0");
                 },
                 [](const PointMass& d) {
                   if (!std::isfinite(d.location)) throw InvalidArgument("PointMass: location must be finite");
                 },
                 [](const FiniteDiscrete& d) {
                   if (d.points.empty() || d.points.size() != d.probs.size())
                     throw InvalidArgument("FiniteDiscrete: points and probs must be nonempty and of equal length");
                   double total = 0.0;
                   for (double p : d.probs) {
                     if (!(p >= 0.0)) throw InvalidArgument("FiniteDiscrete: negative probability");
                     total += p;
                   }
                   if (std::fabs(total - 1.0) > 1e-12) throw InvalidArgument("FiniteDiscrete: probabilities must sum to 1");
                 },
             },
             f);
}

}  // namespace

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_logpdf(double x, double mean, double variance) noexcept {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + d * d / variance);
}

double sample_gamma(Rng& rng, double shape) {
  if (shape < 1.0) {
    const double u = rng.uniform();
    return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = rng.normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Dist1D::Dist1D(Family family) : family_(std::move(family)) { validate(family_); }

double Dist1D::sample(Rng& rng) const {
  return std::visit(Overloaded{
                        [&](const Normal& d) { return d.mean + std::sqrt(d.variance) * rng.normal(); },
                        [&](const StudentT& d) {
                          const double z = rng.normal();
                          const double chi2 = 2.0 * sample_gamma(rng, 0.5 * d.dof);
                          return d.location + d.scale * z / std::sqrt(chi2 / d.dof);
                        },
                        [&](const Uniform& d) { return d.upper * rng.uniform(); },
                        [&](const InverseGamma& d) { return d.scale / sample_gamma(rng, d.shape); },
                        [&](const PointMass& d) { return d.location; },
                        [&](const FiniteDiscrete& d) {
                          const double u = rng.uniform();
                          double acc = 0.0;
                          for (std::size_t i = 0; i < d.points.size(); ++i) {
                            acc += d.probs[i];
                            if (u < acc) return d.points[i];
                          }
                          return d.points.back();
                        },
                    },
                    family_);
}

std::vector<double> Dist1D::sample(Rng& rng, std::size_t n) const {
  std::vector<double> out(n);
  for (auto& x : out) x = sample(rng);
  return out;
}

double Dist1D::logpdf(double x) const {
  return std::visit(
      Overloaded{
          [&](const Normal& d) { return normal_logpdf(x, d.mean, d.variance); },
          [&](const StudentT& d) {
            const double z = (x - d.location) / d.scale;
            return std::lgamma(0.5 * (d.dof + 1.0)) - std::lgamma(0.5 * d.dof) -
                   0.5 * std::log(d.dof * std::numbers::pi) - std::log(d.scale) -
                   0.5 * (d.dof + 1.0) * std::log1p(z * z / d.dof);
          },
          [&](const Uniform& d) { return (x >= 0.0 && x <= d.upper) ? -std::log(d.upper) : -kInf; },
          [&](const InverseGamma& d) {
            if (!(x > 0.0)) return -kInf;
            return d.shape * std::log(d.scale) - std::lgamma(d.shape) - (d.shape + 1.0) * std::log(x) - d.scale / x;
          },
          [&](const PointMass& d) { return x == d.location ? 0.0 : -kInf; },
          [&](const FiniteDiscrete& d) {
            double p = 0.0;
            for (std::size_t i = 0; i < d.points.size(); ++i) {
              if (d.points[i] == x) p += d.probs[i];
            }
            return p > 0.0 ? std::log(p) : -kInf;
          },
      },
      family_);
}

double Dist1D::cdf(double x) const {
  return std::visit(Overloaded{
                        [&](const Normal& d) { return normal_cdf((x - d.mean) / std::sqrt(d.variance)); },
                        [&](const StudentT&) -> double { throw Unsupported("cdf is not available for StudentT"); },
                        [&](const Uniform& d) { return std::clamp(x / d.upper, 0.0, 1.0); },
                        [&](const InverseGamma& d) {
                          if (!(x > 0.0)) return 0.0;
                          return boost::math::gamma_q(d.shape, d.scale / x);
                        },
                        [&](const PointMass& d) { return x >= d.location ? 1.0 : 0.0; },
                        [&](const FiniteDiscrete& d) {
                          double acc = 0.0;
                          for (std::size_t i = 0; i < d.points.size(); ++i) {
                            if (d.points[i] <= x) acc += d.probs[i];
                          }
                          return std::min(acc, 1.0);
                        },
                    },
                    family_);
}

double Dist1D::mean() const {
  return std::visit(Overloaded{
                        [](const Normal& d) { return d.mean; },
                        [](const StudentT& d) -> double {
                          if (d.dof <= 1.0) throw Unsupported("StudentT mean requires dof > 1");
                          return d.location;
                        },
                        [](const Uniform& d) { return 0.5 * d.upper; },
                        [](const InverseGamma& d) -> double {
                          if (d.shape <= 1.0) throw Unsupported("InverseGamma mean requires shape > 1");
                          return d.scale / (d.shape - 1.0);
                        },
                        [](const PointMass& d) { return d.location; },
                        [](const FiniteDiscrete& d) {
                          return std::inner_product(d.points.begin(), d.points.end(), d.probs.begin(), 0.0);
                        },
                    },
                    family_);
}

double Dist1D::variance() const {
  return std::visit(Overloaded{
                        [](const Normal& d) { return d.variance; },
                        [](const StudentT& d) -> double {
                          if (d.dof <= 2.0) throw Unsupported("StudentT variance requires dof > 2");
                          return d.scale * d.scale * d.dof / (d.dof - 2.0);
                        },
                        [](const Uniform& d) { return d.upper * d.upper / 12.0; },
                        [](const InverseGamma& d) -> double {
                          if (d.shape <= 2.0) throw Unsupported("InverseGamma variance requires shape > 2");
                          const double m = d.scale / (d.shape - 1.0);
                          return m * m / (d.shape - 2.0);
                        },
                        [](const PointMass&) { return 0.0; },
                        [](const FiniteDiscrete& d) {
                          double m = 0.0, s = 0.0;
                          for (std::size_t i = 0; i < d.points.size(); ++i) m += d.probs[i] * d.points[i];
                          for (std::size_t i = 0; i < d.points.size(); ++i)
                            s += d.probs[i] * (d.points[i] - m) * (d.points[i] - m);
                          return s;
                        },
                    },
                    family_);
}

}  // namespace pfmc
