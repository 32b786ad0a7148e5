#include "pfmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "pfmc/errors.hpp"
#include "pfmc/numerics.hpp"

namespace pfmc {

Ecdf::Ecdf(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.size() != weights.size() || atoms.empty())
    throw InvalidArgument("Ecdf: need matching, nonempty atoms and weights");
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });
  CompensatedSum total;
  for (std::size_t i : order) {
    if (!std::isfinite(atoms[i])) throw InvalidArgument("Ecdf: atoms must be finite");
    if (!(weights[i] >= 0.0)) throw InvalidArgument("Ecdf: weights must be nonnegative");
    if (!atoms_.empty() && atoms_.back() == atoms[i]) {
      weights_.back() += weights[i];
    } else {
      atoms_.push_back(atoms[i]);
      weights_.push_back(weights[i]);
    }
    total.add(weights[i]);
    cumulative_.push_back(0.0);
  }
  cumulative_.resize(atoms_.size());
  if (std::fabs(total.value() - 1.0) > 1e-12) throw InvalidArgument("Ecdf: weights are not normalized");
  CompensatedSum run;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    run.add(weights_[i]);
    cumulative_[i] = run.value();
  }
  cumulative_.back() = 1.0;
}

Ecdf Ecdf::from_samples(std::span<const double> xs) {
  if (xs.empty()) throw InvalidArgument("Ecdf: no samples");
  std::vector<double> atoms(xs.begin(), xs.end());
  std::sort(atoms.begin(), atoms.end());
  // Equal weights summed exactly: cumulative value i/n per sorted position.
  std::vector<double> w(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
  Ecdf e(atoms, std::vector<double>(atoms.size(), 0.0) = w);
  const double n = static_cast<double>(atoms.size());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < e.atoms_.size(); ++i) {
    while (pos < atoms.size() && atoms[pos] == e.atoms_[i]) ++pos;
    e.cumulative_[i] = static_cast<double>(pos) / n;
  }
  return e;
}

Ecdf Ecdf::from_particles(const WeightedParticles& particles) {
  if (particles.width != 1) throw InvalidArgument("Ecdf: particles must be scalar");
  auto w = particles.weights();
  // Renormalize against rounding in exp.
  CompensatedSum s;
  for (double v : w) s.add(v);
  for (double& v : w) v /= s.value();
  std::vector<double> atoms(particles.locations.begin(), particles.locations.end());
  // Tolerate the last-ulp drift left by the division above.
  CompensatedSum check;
  for (double v : w) check.add(v);
  if (std::fabs(check.value() - 1.0) > 1e-12) throw NumericalError("Ecdf: particle weights failed to normalize");
  return Ecdf(std::move(atoms), std::move(w));
}

double Ecdf::operator()(double x) const noexcept {
  const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x);
  if (it == atoms_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

double Ecdf::left_limit(double x) const noexcept {
  const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x);
  if (it == atoms_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

double Ecdf::mean() const noexcept {
  CompensatedSum s;
  double prev = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    s.add((cumulative_[i] - prev) * atoms_[i]);
    prev = cumulative_[i];
  }
  return s.value();
}

double Ecdf::sd() const noexcept {
  const double m = mean();
  CompensatedSum s;
  double prev = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    s.add((cumulative_[i] - prev) * (atoms_[i] - m) * (atoms_[i] - m));
    prev = cumulative_[i];
  }
  return std::sqrt(std::max(0.0, s.value()));
}

void Ecdf::write(std::ostream& out) const {
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < atoms_.size(); ++i) out << atoms_[i] << ' ' << cumulative_[i] << '\n';
  out.precision(old);
}

double w1_distance(const Ecdf& f, const Ecdf& g) {
  std::vector<double> pts;
  pts.reserve(f.size() + g.size());
  std::merge(f.atoms().begin(), f.atoms().end(), g.atoms().begin(), g.atoms().end(), std::back_inserter(pts));
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  CompensatedSum s;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) s.add(std::fabs(f(pts[i]) - g(pts[i])) * (pts[i + 1] - pts[i]));
  return s.value();
}

double ks_statistic(const Ecdf& f, const Ecdf& g) {
  double d = 0.0;
  for (double x : f.atoms()) d = std::max(d, std::fabs(f(x) - g(x)));
  for (double x : g.atoms()) d = std::max(d, std::fabs(f(x) - g(x)));
  return d;
}

namespace {

// Integral of |c - G| over [a, b] with G monotone and c - G of one sign; Simpson on G.
double piece(double c, double a, double b, const std::function<double(double)>& G) {
  if (!(b > a)) return 0.0;
  const double integral_g = (b - a) * (G(a) + 4.0 * G(0.5 * (a + b)) + G(b)) / 6.0;
  return std::fabs(c * (b - a) - integral_g);
}

double w1_on_grid(const Ecdf& f, const ReferenceCdf& g, std::size_t n, double tail) {
  std::vector<double> pts(f.atoms().begin(), f.atoms().end());
  pts.push_back(g.quantile(tail));
  pts.push_back(g.quantile(1.0 - tail));
  for (std::size_t i = 0; i < n; ++i) pts.push_back(g.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n)));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  CompensatedSum s;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i];
    const double b = pts[i + 1];
    const double c = f(a);
    const double ga = g.cdf(a);
    const double gb = g.cdf(b);
    if (ga < c && c < gb) {
      const double x = std::clamp(g.quantile(c), a, b);
      s.add(piece(c, a, x, g.cdf));
      s.add(piece(c, x, b, g.cdf));
    } else {
      s.add(piece(c, a, b, g.cdf));
    }
  }
  return s.value();
}

}  // namespace

double w1_distance(const Ecdf& f, const ReferenceCdf& g, const DistanceOptions& options) {
  if (!g.cdf || !g.quantile) throw InvalidArgument("w1_distance: reference needs a cdf and a quantile");
  std::size_t n = std::max<std::size_t>(options.grid, 2);
  double prev = w1_on_grid(f, g, n, options.tail_mass);
  for (std::size_t r = 0; r < options.max_refinements; ++r) {
    n *= 2;
    const double next = w1_on_grid(f, g, n, options.tail_mass);
    if (std::fabs(next - prev) < options.tolerance) return next;
    prev = next;
  }
  return prev;
}

double ks_statistic(const Ecdf& f, const ReferenceCdf& g) {
  if (!g.cdf) throw InvalidArgument("ks_statistic: reference needs a cdf");
  double d = 0.0;
  for (double x : f.atoms()) {
    const double gx = g.cdf(x);
    d = std::max({d, std::fabs(f(x) - gx), std::fabs(f.left_limit(x) - gx)});
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  if (n == 0) throw InvalidArgument("ks_pvalue: n must be positive");
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-3) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

double top_mass(const WeightedParticles& particles, std::size_t p) {
  auto w = particles.weights();
  if (p >= w.size()) return 1.0;
  std::partial_sort(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(p), w.end(), std::greater<>());
  CompensatedSum s;
  for (std::size_t i = 0; i < p; ++i) s.add(w[i]);
  return s.value();
}

double effective_sample_size(const WeightedParticles& particles) {
  const auto w = particles.weights();
  CompensatedSum s;
  CompensatedSum s2;
  for (double v : w) {
    s.add(v);
    s2.add(v * v);
  }
  return s.value() * s.value() / s2.value();
}

BatchMeans batch_means(std::span<const double> series) {
  const std::size_t n = series.size();
  const auto b = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  if (b < 2) throw InvalidArgument("batch_means: series too short");
  const std::size_t len = n / b;
  std::vector<double> means(b);
  CompensatedSum total;
  for (std::size_t i = 0; i < b; ++i) {
    CompensatedSum s;
    for (std::size_t j = 0; j < len; ++j) s.add(series[i * len + j]);
    means[i] = s.value() / static_cast<double>(len);
    total.add(means[i]);
  }
  const double grand = total.value() / static_cast<double>(b);
  CompensatedSum sq;
  for (double m : means) sq.add((m - grand) * (m - grand));
  const double var_means = sq.value() / static_cast<double>(b - 1);
  BatchMeans r;
  r.batches = b;
  r.asymptotic_variance = static_cast<double>(len) * var_means;
  r.standard_error = r.asymptotic_variance * std::sqrt(2.0 / static_cast<double>(b - 1));
  return r;
}

}  // namespace pfmc
