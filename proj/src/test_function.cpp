#include "pfmc/test_function.hpp"

#include <algorithm>

#include "pfmc/errors.hpp"

namespace pfmc {

SopFunction::SopFunction(std::vector<std::vector<UnivariateFactor>> grid, std::vector<double> coeffs) {
  if (grid.empty() || grid.front().empty()) throw InvalidArgument("SopFunction: grid must be nonempty");
  const std::size_t k_blocks = grid.front().size();
  for (const auto& row : grid) {
    if (row.size() != k_blocks) throw InvalidArgument("SopFunction: grid must be rectangular");
  }
  terms_ = grid.size();
  columns_.reserve(k_blocks);
  for (std::size_t k = 0; k < k_blocks; ++k) {
    std::vector<UnivariateFactor> col;
    col.reserve(terms_);
    for (const auto& row : grid) col.push_back(row[k]);
    columns_.push_back([col = std::move(col)](BlockPoint x, std::span<double> out) {
      for (std::size_t j = 0; j < col.size(); ++j) out[j] = col[j](x);
    });
  }
  coeffs_ = coeffs.empty() ? std::vector<double>(terms_, 1.0) : std::move(coeffs);
  if (coeffs_.size() != terms_) throw InvalidArgument("SopFunction: one coefficient per term required");
}

SopFunction SopFunction::from_columns(std::size_t terms, std::vector<ColumnEvaluator> columns,
                                      std::vector<double> coeffs) {
  if (terms == 0 || columns.empty()) throw InvalidArgument("SopFunction: need at least one term and one block");
  SopFunction f;
  f.terms_ = terms;
  f.columns_ = std::move(columns);
  f.coeffs_ = coeffs.empty() ? std::vector<double>(terms, 1.0) : std::move(coeffs);
  if (f.coeffs_.size() != terms) throw InvalidArgument("SopFunction: one coefficient per term required");
  return f;
}

double SopFunction::evaluate(JointPoint x) const {
  std::vector<double> prod(coeffs_.begin(), coeffs_.end());
  std::vector<double> col(terms_);
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    columns_[k](x[k], col);
    for (std::size_t j = 0; j < terms_; ++j) prod[j] *= col[j];
  }
  double s = 0.0;
  for (double p : prod) s += p;
  return s;
}

FactorGraphFunction::FactorGraphFunction(std::size_t blocks, std::vector<Factor> factors)
    : blocks_(blocks), factors_(std::move(factors)) {
  for (const auto& f : factors_) {
    if (f.scope.empty()) throw InvalidArgument("FactorGraphFunction: empty scope");
    auto sorted = f.scope;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidArgument("FactorGraphFunction: duplicate block in scope");
    if (sorted.back() >= blocks_) throw InvalidArgument("FactorGraphFunction: scope index out of range");
    if (!f.evaluate) throw InvalidArgument("FactorGraphFunction: missing evaluator");
  }
}

std::size_t FactorGraphFunction::max_scope() const noexcept {
  std::size_t m = 0;
  for (const auto& f : factors_) m = std::max(m, f.scope.size());
  return m;
}

double FactorGraphFunction::evaluate(JointPoint x) const {
  double prod = 1.0;
  std::vector<BlockPoint> scoped;
  for (const auto& f : factors_) {
    scoped.clear();
    for (std::size_t k : f.scope) scoped.push_back(x[k]);
    prod *= f.evaluate(scoped);
  }
  return prod;
}

std::optional<std::size_t> TestFunction::blocks() const noexcept {
  if (const auto* s = sop()) return s->blocks();
  if (const auto* g = factor_graph()) return g->blocks();
  return std::nullopt;
}

double TestFunction::operator()(JointPoint x) const {
  switch (kind()) {
    case FunctionKind::BlackBox:
      return std::get<JointEvaluator>(repr_)(x);
    case FunctionKind::Sop:
      return std::get<SopFunction>(repr_).evaluate(x);
    case FunctionKind::FactorGraph:
      return std::get<FactorGraphFunction>(repr_).evaluate(x);
  }
  return 0.0;
}

TestFunction TestFunction::as_black_box() const {
  return TestFunction(JointEvaluator([self = *this](JointPoint x) { return self(x); }));
}

TestFunction scalar_function(std::function<double(std::span<const double>)> f) {
  return TestFunction(JointEvaluator([f = std::move(f)](JointPoint x) {
    std::vector<double> flat(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) flat[k] = x[k][0];
    return f(flat);
  }));
}

TestFunction product_of_coordinates(std::size_t blocks) {
  std::vector<ColumnEvaluator> cols(blocks, [](BlockPoint x, std::span<double> out) { out[0] = x[0]; });
  return SopFunction::from_columns(1, std::move(cols));
}

}  // namespace pfmc
