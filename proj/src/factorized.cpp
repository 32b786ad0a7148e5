#include "pfmc/factorized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "pfmc/errors.hpp"
#include "pfmc/estimators.hpp"
#include "pfmc/numerics.hpp"

namespace pfmc {

std::vector<std::vector<double>> sop_block_means(const MarginalSamples& marginals, const SopFunction& f) {
  if (f.blocks() != marginals.num_blocks())
    throw InvalidArgument("eval_sop: function has " + std::to_string(f.blocks()) + " blocks but samples have " +
                          std::to_string(marginals.num_blocks()));
  const std::size_t terms = f.terms();
  const std::size_t blocks = f.blocks();
  std::vector<std::vector<double>> means(terms, std::vector<double>(blocks));
  std::vector<double> col(terms);
  std::vector<CompensatedSum> sums(terms);
  for (std::size_t k = 0; k < blocks; ++k) {
    const auto& block = marginals.block(k);
    std::fill(sums.begin(), sums.end(), CompensatedSum{});
    for (std::size_t n = 0; n < block.size(); ++n) {
      f.column(k, block[n], col);
      for (std::size_t j = 0; j < terms; ++j) {
        if (!std::isfinite(col[j]))
          throw NumericalError("non-finite factor value at term " + std::to_string(j) + ", block " +
                               std::to_string(k) + ", sample " + std::to_string(n));
        sums[j].add(col[j]);
      }
    }
    for (std::size_t j = 0; j < terms; ++j) means[j][k] = sums[j].value() / static_cast<double>(block.size());
  }
  return means;
}

Estimate eval_sop(const MarginalSamples& marginals, const SopFunction& f) {
  const auto means = sop_block_means(marginals, f);
  CompensatedSum total;
  for (std::size_t j = 0; j < f.terms(); ++j) {
    double p = f.coeff(j);
    for (double m : means[j]) p *= m;
    total.add(p);
  }
  Estimate e;
  e.value = total.value();
  std::uint64_t n_total = 0;
  for (auto n : marginals.counts()) n_total += n;
  e.n_factor_evals = static_cast<std::uint64_t>(f.terms()) * n_total;
  e.n_samples_used = marginals.counts();
  e.strategy = StrategyKind::SopFastPath;
  return e;
}

namespace {

using Graph = std::vector<std::set<std::size_t>>;

struct Interaction {
  Graph adj;
  std::vector<bool> present;
};

Interaction interaction_graph(const FactorGraphFunction& f) {
  Interaction g{Graph(f.blocks()), std::vector<bool>(f.blocks(), false)};
  for (const auto& factor : f.factors()) {
    for (std::size_t a : factor.scope) {
      g.present[a] = true;
      for (std::size_t b : factor.scope)
        if (a != b) g.adj[a].insert(b);
    }
  }
  return g;
}

double count_of(std::span<const std::size_t> counts, std::size_t k) {
  return counts.empty() ? 1.0 : static_cast<double>(counts[k]);
}

std::size_t fill_in(const Graph& adj, std::size_t v) {
  std::size_t missing = 0;
  for (auto a = adj[v].begin(); a != adj[v].end(); ++a)
    for (auto b = std::next(a); b != adj[v].end(); ++b)
      if (!adj[*a].count(*b)) ++missing;
  return missing;
}

// Removes v, connects its neighbours, and records the step in the plan.
void eliminate_vertex(Graph& adj, std::size_t v, std::span<const std::size_t> counts, EliminationPlan& plan) {
  const auto nbrs = adj[v];
  double cost = count_of(counts, v);
  for (std::size_t a : nbrs) {
    cost *= count_of(counts, a);
    adj[a].erase(v);
    for (std::size_t b : nbrs)
      if (a != b) adj[a].insert(b);
  }
  adj[v].clear();
  plan.order.push_back(v);
  plan.width = std::max(plan.width, nbrs.size() + 1);
  plan.predicted_cost += cost;
}

}  // namespace

EliminationPlan plan_elimination(const FactorGraphFunction& f, EliminationHeuristic heuristic,
                                 std::span<const std::size_t> keep, std::span<const std::size_t> sample_counts) {
  if (!sample_counts.empty() && sample_counts.size() != f.blocks())
    throw InvalidArgument("plan_elimination: one sample count per block required");
  auto g = interaction_graph(f);
  std::vector<bool> kept(f.blocks(), false);
  for (std::size_t k : keep) {
    if (k >= f.blocks()) throw InvalidArgument("plan_elimination: keep index out of range");
    kept[k] = true;
  }

  EliminationPlan plan;
  std::vector<bool> done(f.blocks(), false);
  for (;;) {
    std::size_t best = f.blocks();
    std::size_t best_score = std::numeric_limits<std::size_t>::max();
    for (std::size_t v = 0; v < f.blocks(); ++v) {
      if (!g.present[v] || done[v] || kept[v]) continue;
      const std::size_t score = heuristic == EliminationHeuristic::MinDegree ? g.adj[v].size() : fill_in(g.adj, v);
      if (score < best_score) {
        best = v;
        best_score = score;
      }
    }
    if (best == f.blocks()) break;
    done[best] = true;
    eliminate_vertex(g.adj, best, sample_counts, plan);
  }
  for (std::size_t v = 0; v < f.blocks(); ++v) {
    if (g.present[v] && !done[v]) {
      done[v] = true;
      eliminate_vertex(g.adj, v, sample_counts, plan);
    }
  }
  return plan;
}

EliminationPlan evaluate_order(const FactorGraphFunction& f, std::vector<std::size_t> order,
                               std::span<const std::size_t> sample_counts) {
  if (!sample_counts.empty() && sample_counts.size() != f.blocks())
    throw InvalidArgument("evaluate_order: one sample count per block required");
  auto g = interaction_graph(f);
  std::vector<bool> seen(f.blocks(), false);
  EliminationPlan plan;
  for (std::size_t v : order) {
    if (v >= f.blocks() || seen[v]) throw InvalidArgument("evaluate_order: order must list distinct valid blocks");
    seen[v] = true;
    eliminate_vertex(g.adj, v, sample_counts, plan);
  }
  for (std::size_t v = 0; v < f.blocks(); ++v)
    if (g.present[v] && !seen[v]) throw InvalidArgument("evaluate_order: block " + std::to_string(v) + " missing");
  return plan;
}

namespace {

// Dense table over sample indices of `scope` (sorted), row-major, last block fastest.
struct Table {
  std::vector<std::size_t> scope;
  std::vector<double> data;
};

double table_size(std::span<const std::size_t> scope, std::span<const std::size_t> counts) {
  double s = 1.0;
  for (std::size_t k : scope) s *= static_cast<double>(counts[k]);
  return s;
}

void check_cap(double entries, const EvalLimits& limits) {
  if (entries > static_cast<double>(limits.table_entries))
    throw CapExceeded("elimination table needs " + std::to_string(entries) + " entries, cap is " +
                      std::to_string(limits.table_entries));
}

// Strides of `t` expressed along the positions of `universe` (0 where absent).
std::vector<std::size_t> strides_in(const std::vector<std::size_t>& scope, const std::vector<std::size_t>& universe,
                                    std::span<const std::size_t> counts) {
  std::vector<std::size_t> own(scope.size());
  std::size_t s = 1;
  for (std::size_t i = scope.size(); i-- > 0;) {
    own[i] = s;
    s *= counts[scope[i]];
  }
  std::vector<std::size_t> out(universe.size(), 0);
  for (std::size_t i = 0; i < scope.size(); ++i) {
    const auto pos = std::lower_bound(universe.begin(), universe.end(), scope[i]) - universe.begin();
    out[static_cast<std::size_t>(pos)] = own[i];
  }
  return out;
}

}  // namespace

Estimate eval_eliminated(const MarginalSamples& marginals, const FactorGraphFunction& f, const EliminationPlan& plan,
                         const EvalLimits& limits) {
  if (f.blocks() != marginals.num_blocks())
    throw InvalidArgument("eval_eliminated: function has " + std::to_string(f.blocks()) + " blocks but samples have " +
                          std::to_string(marginals.num_blocks()));
  const auto counts = marginals.counts();

  std::vector<bool> in_plan(f.blocks(), false);
  for (std::size_t v : plan.order) {
    if (v >= f.blocks() || in_plan[v]) throw InvalidArgument("eval_eliminated: plan must list distinct valid blocks");
    in_plan[v] = true;
  }

  Estimate e;
  e.n_samples_used = counts;
  e.strategy = StrategyKind::Eliminate;

  // Factor tables.
  std::vector<Table> tables;
  std::vector<BlockPoint> scoped;
  for (const auto& factor : f.factors()) {
    for (std::size_t k : factor.scope)
      if (!in_plan[k]) throw InvalidArgument("eval_eliminated: plan misses block " + std::to_string(k));
    Table t;
    t.scope = factor.scope;
    std::sort(t.scope.begin(), t.scope.end());
    check_cap(table_size(t.scope, counts), limits);
    std::vector<std::size_t> sub_counts;
    for (std::size_t k : t.scope) sub_counts.push_back(counts[k]);
    // Map sorted scope positions back to the factor's own argument order.
    std::vector<std::size_t> arg_pos(factor.scope.size());
    for (std::size_t i = 0; i < factor.scope.size(); ++i)
      arg_pos[i] = static_cast<std::size_t>(std::lower_bound(t.scope.begin(), t.scope.end(), factor.scope[i]) -
                                            t.scope.begin());
    scoped.resize(factor.scope.size());
    for_each_index_tuple(sub_counts, [&](std::span<const std::size_t> idx) {
      for (std::size_t i = 0; i < factor.scope.size(); ++i)
        scoped[i] = marginals.block(factor.scope[i])[idx[arg_pos[i]]];
      const double v = factor.evaluate(scoped);
      if (!std::isfinite(v)) throw NumericalError("non-finite factor value in elimination table");
      t.data.push_back(v);
      ++e.n_factor_evals;
    });
    tables.push_back(std::move(t));
  }

  for (std::size_t v : plan.order) {
    std::vector<Table> involved;
    std::vector<Table> rest;
    for (auto& t : tables) {
      if (std::binary_search(t.scope.begin(), t.scope.end(), v))
        involved.push_back(std::move(t));
      else
        rest.push_back(std::move(t));
    }
    tables = std::move(rest);
    if (involved.empty()) continue;

    std::vector<std::size_t> universe;
    for (const auto& t : involved) universe.insert(universe.end(), t.scope.begin(), t.scope.end());
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
    check_cap(table_size(universe, counts), limits);

    Table out;
    for (std::size_t k : universe)
      if (k != v) out.scope.push_back(k);
    out.data.assign(static_cast<std::size_t>(table_size(out.scope, counts)), 0.0);

    std::vector<std::vector<std::size_t>> strides;
    for (const auto& t : involved) strides.push_back(strides_in(t.scope, universe, counts));
    const auto out_strides = strides_in(out.scope, universe, counts);

    std::vector<std::size_t> ucounts;
    for (std::size_t k : universe) ucounts.push_back(counts[k]);
    std::vector<std::size_t> idx(universe.size(), 0);
    std::vector<std::size_t> offs(involved.size(), 0);
    std::size_t out_off = 0;
    for (;;) {
      double p = 1.0;
      for (std::size_t i = 0; i < involved.size(); ++i) p *= involved[i].data[offs[i]];
      out.data[out_off] += p;
      std::size_t k = idx.size();
      bool done = true;
      while (k > 0) {
        --k;
        if (++idx[k] < ucounts[k]) {
          for (std::size_t i = 0; i < involved.size(); ++i) offs[i] += strides[i][k];
          out_off += out_strides[k];
          done = false;
          break;
        }
        for (std::size_t i = 0; i < involved.size(); ++i) offs[i] -= strides[i][k] * (ucounts[k] - 1);
        out_off -= out_strides[k] * (ucounts[k] - 1);
        idx[k] = 0;
      }
      if (done) break;
    }
    const double inv = 1.0 / static_cast<double>(counts[v]);
    for (double& x : out.data) x *= inv;
    tables.push_back(std::move(out));
  }

  double value = 1.0;
  for (const auto& t : tables) value *= t.data.at(0);
  e.value = value;
  return e;
}

}  // namespace pfmc
