#include <cmath>

#include "common.hpp"
#include "pfmc/theory.hpp"

namespace pfmc::experiments {

ScalingConfig ScalingConfig::from_json(const json& j) {
  ScalingConfig c;
  ConfigReader r(j);
  r.read("cvs", c.cvs);
  r.read("Ks", c.Ks);
  r.read("eps", c.eps);
  r.read("c_r", c.c_r);
  detail::read_run(r, c.run);
  r.finish();
  if (c.cvs.empty() || c.Ks.empty()) throw ConfigError("cvs and Ks must not be empty");
  for (double cv : c.cvs)
    if (!(cv > 0.0)) throw ConfigError("cvs must be positive");
  for (int K : c.Ks)
    if (K < 1) throw ConfigError("Ks must be at least 1");
  if (!(c.eps > 0.0)) throw ConfigError("eps must be positive");
  detail::require_at_least("c_r", c.c_r, 0.0);
  return c;
}

json ScalingConfig::to_json() const {
  json j{{"cvs", cvs}, {"Ks", Ks}, {"eps", eps}, {"c_r", c_r}};
  detail::write_run(j, run);
  return j;
}

namespace {

const char* status_name(FrontierStatus s) {
  switch (s) {
    case FrontierStatus::Satisfied:
      return "satisfied";
    case FrontierStatus::NotSatisfied:
      return "not_satisfied";
    case FrontierStatus::RegimeViolation:
      return "regime_violation";
  }
  return "";
}

}  // namespace

Artifacts run_scaling(const ScalingConfig& c) {
  Table t{"scaling",
          {{"cv", "coefficient of variation of each factor psi(x_k)"},
           {"K", "number of blocks"},
           {"iid_ratio", "((1 + CV^2)^K - 1) / (CV^2 K)"},
           {"sigma_sq", "(1 + CV^2)^K - 1, standard asymptotic variance at |mu| = 1"},
           {"sigma_sq_pf", "K CV^2, product-form asymptotic variance at |mu| = 1"},
           {"frontier", "satisfied, not_satisfied or regime_violation at target eps^2 and C_r"},
           {"log_lhs", "log(sigma^2 / sigma^2_x)"},
           {"log_rhs", "log(((sigma^2_x / eps^2)^(K-1) C_r + 1) / (C_r + 1))"},
           {"log_rhs_large_k", "log((sigma^2_x / eps^2)^(K-1) / 2)"},
           {"iid_frontier_satisfied", "1 when the iid-product large-K form holds at eps"}},
          {}};
  for (double cv : c.cvs) {
    for (int K : c.Ks) {
      const double c2 = cv * cv;
      const double sigma_sq = std::expm1(K * std::log1p(c2));
      const double sigma_sq_pf = K * c2;
      const auto iid = iid_frontier(cv, K, c.eps);
      if (!std::isfinite(sigma_sq)) {
        t.add({cv, std::int64_t{K}, iid_product_ratio(cv, K), sigma_sq, sigma_sq_pf, std::string("overflow"),
               std::nan(""), std::nan(""), std::nan(""), std::int64_t{iid.satisfied}});
        continue;
      }
      const auto f = efficiency_frontier(sigma_sq, sigma_sq_pf, K, c.eps * c.eps, c.c_r);
      t.add({cv, std::int64_t{K}, iid_product_ratio(cv, K), sigma_sq, sigma_sq_pf, std::string(status_name(f.status)),
             f.log_lhs, f.log_rhs, f.log_rhs_large_k, std::int64_t{iid.satisfied}});
    }
  }
  Artifacts a;
  a.tables.push_back(std::move(t));
  return a;
}

}  // namespace pfmc::experiments
