#include <cmath>

#include "common.hpp"
#include "pfmc/mixtures.hpp"
#include "pfmc/replicate.hpp"

namespace pfmc::experiments {

MixtureConfig MixtureConfig::from_json(const json& j) {
  MixtureConfig c;
  ConfigReader r(j);
  r.read("weights", c.weights);
  r.read("spreads", c.spreads);
  r.read("N", c.N);
  r.read("R", c.R);
  detail::read_run(r, c.run);
  r.finish();
  if (c.weights.empty()) throw ConfigError("weights must not be empty");
  if (c.spreads && c.spreads->size() != c.weights.size()) throw ConfigError("spreads must have one entry per weight");
  detail::require_at_least("N", double(c.N), double(c.weights.size()));
  detail::require_at_least("R", double(c.R), 2);
  return c;
}

json MixtureConfig::to_json() const {
  json j{{"weights", weights}, {"spreads", spreads ? json(*spreads) : json(nullptr)}, {"N", N}, {"R", R}};
  detail::write_run(j, run);
  return j;
}

namespace {

MixtureOfProducts build_mixture(const MixtureConfig& c) {
  std::vector<MixtureComponent> comps;
  for (std::size_t i = 0; i < c.weights.size(); ++i) {
    const double center = 1.0 + static_cast<double>(i);
    const double s = c.spreads ? (*c.spreads)[i] : 1.0 + static_cast<double>(i);
    const std::vector<double> pts{center - s, center + s};
    auto sampler = [pts](Rng& rng) { return std::vector<double>{pts[rng.uniform() < 0.5 ? 0 : 1]}; };
    MixtureComponent m;
    m.weight = c.weights[i];
    m.partition = {{0}, {1}};
    m.samplers = {sampler, sampler};
    m.oracle = DiscreteProductTarget({DiscreteBlock::scalar(pts, {0.5, 0.5}), DiscreteBlock::scalar(pts, {0.5, 0.5})});
    comps.push_back(std::move(m));
  }
  return MixtureOfProducts(2, std::move(comps));
}

double plain_estimate(const MixtureOfProducts& mix, const FlatFunction& phi, std::size_t N, Rng& rng) {
  double sum = 0.0;
  std::vector<double> x(mix.dim());
  for (std::size_t n = 0; n < N; ++n) {
    double u = rng.uniform();
    std::size_t i = 0;
    while (i + 1 < mix.size() && u >= mix.component(i).weight) u -= mix.component(i++).weight;
    const auto& comp = mix.component(i);
    for (std::size_t b = 0; b < comp.partition.size(); ++b) {
      const auto v = comp.samplers[b](rng);
      for (std::size_t d = 0; d < comp.partition[b].size(); ++d) x[comp.partition[b][d]] = v[d];
    }
    sum += phi(x);
  }
  return sum / static_cast<double>(N);
}

}  // namespace

MixtureResult run_mixture(const MixtureConfig& c) {
  const auto mix = build_mixture(c);
  const FlatFunction phi = [](std::span<const double> x) { return x[0] * x[1]; };
  const auto w = mix.weights();
  const auto prop = proportional_allocation(w, c.N);
  const auto exact = mixture_exact_variances(mix, phi, prop);
  const auto opt = optimal_allocation(w, exact.sigma_pf, c.N);
  const auto exact_opt = mixture_exact_variances(mix, phi, opt);

  MixtureResult res;
  res.exact_plain = exact.plain;
  res.exact_stratified = exact.stratified;
  res.exact_stratified_pf = exact.stratified_pf;
  res.formula_proportional = allocation_variance(w, exact.sigma_pf, prop);
  res.formula_optimal = allocation_variance(w, exact.sigma_pf, opt);

  const auto reps = run_replicates(
      [&](Rng& rng, std::size_t) {
        const std::uint64_t s1 = rng(), s2 = rng();
        return std::vector<double>{plain_estimate(mix, phi, c.N, rng), stratified_estimate(mix, phi, prop, s1).value,
                                   stratified_pf_estimate(mix, phi, prop, s2).value,
                                   stratified_pf_estimate(mix, phi, opt, s2).value};
      },
      c.R, c.run.seed, c.run.threads);

  Table comp{"mixture_components",
             {{"component", "component index i"},
              {"weight", "mixture weight theta_i"},
              {"sigma_std", "standard asymptotic standard deviation of phi under component i"},
              {"sigma_pf", "product-form asymptotic standard deviation under component i"},
              {"proportional_allocation", "N_i proportional to theta_i"},
              {"optimal_allocation", "N_i proportional to theta_i sigma_pf_i"}},
             {}};
  for (std::size_t i = 0; i < mix.size(); ++i)
    comp.add({std::int64_t(i), w[i], exact.sigma_std[i], exact.sigma_pf[i], std::int64_t(prop[i]), std::int64_t(opt[i])});

  Table var{"mixture_variances",
            {{"estimator", "plain, stratified or stratified_pf"},
             {"allocation", "proportional or optimal"},
             {"exact_variance", "variance from the components' finite supports"},
             {"replicate_variance", "variance across replicates"},
             {"replicate_mean", "mean across replicates"},
             {"exact_mean", "mu(phi)"}},
            {}};
  const char* names[] = {"plain", "stratified", "stratified_pf", "stratified_pf"};
  const char* allocs[] = {"proportional", "proportional", "proportional", "optimal"};
  const double exacts[] = {exact.plain, exact.stratified, exact.stratified_pf, exact_opt.stratified_pf};
  for (std::size_t e = 0; e < 4; ++e) {
    const auto s = summarize(detail::column_of(reps, e));
    var.add({std::string(names[e]), std::string(allocs[e]), exacts[e], s.variance, s.mean, exact.mean});
  }

  Table alloc{"mixture_allocation",
              {{"allocation", "proportional or optimal"},
               {"formula_variance", "sum_i theta_i^2 sigma_pf_i^2 / N_i"}},
              {}};
  alloc.add({std::string("proportional"), res.formula_proportional});
  alloc.add({std::string("optimal"), res.formula_optimal});

  res.artifacts.tables.push_back(std::move(comp));
  res.artifacts.tables.push_back(std::move(var));
  res.artifacts.tables.push_back(std::move(alloc));
  return res;
}

}  // namespace pfmc::experiments
