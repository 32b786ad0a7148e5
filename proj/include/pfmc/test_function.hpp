#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "pfmc/samples.hpp"

namespace pfmc {

/// Evaluator over a joint point (or over the scoped coordinates of a factor).
using JointEvaluator = std::function<double(JointPoint)>;

/// Univariate (single-block) factor phi^j_k.
using UnivariateFactor = std::function<double(BlockPoint)>;

/// Evaluates all J factors of one block at once: out[j] = phi^j_k(x).
using ColumnEvaluator = std::function<void(BlockPoint, std::span<double>)>;

/// Sum of products: phi(x) = sum_j c_j prod_k phi^j_k(x_k).
///
/// Factors are stored column-wise (one evaluator per block producing every
/// term's factor) so that families such as monomials x^j can share work.
class SopFunction {
 public:
  /// grid[j][k] = phi^j_k. Throws InvalidArgument unless the grid is rectangular and nonempty.
  explicit SopFunction(std::vector<std::vector<UnivariateFactor>> grid, std::vector<double> coeffs = {});

  static SopFunction from_columns(std::size_t terms, std::vector<ColumnEvaluator> columns,
                                  std::vector<double> coeffs = {});

  std::size_t terms() const noexcept { return terms_; }
  std::size_t blocks() const noexcept { return columns_.size(); }
  double coeff(std::size_t j) const { return coeffs_.at(j); }
  std::span<const double> coeffs() const noexcept { return coeffs_; }

  /// Writes phi^j_k(x) for every j into out (size terms()).
  void column(std::size_t k, BlockPoint x, std::span<double> out) const { columns_.at(k)(x, out); }

  double evaluate(JointPoint x) const;

 private:
  SopFunction() = default;

  std::size_t terms_ = 0;
  std::vector<ColumnEvaluator> columns_;
  std::vector<double> coeffs_;
};

/// A factor over a subset of blocks. The evaluator receives the scoped block points in scope order.
struct Factor {
  std::vector<std::size_t> scope;
  JointEvaluator evaluate;
};

/// phi(x) = prod_i phi_i(x_{A_i}). Blocks outside every scope are ignored.
class FactorGraphFunction {
 public:
  /// Throws InvalidArgument on empty scopes, duplicate entries or indices >= blocks.
  FactorGraphFunction(std::size_t blocks, std::vector<Factor> factors);

  std::size_t blocks() const noexcept { return blocks_; }
  const std::vector<Factor>& factors() const noexcept { return factors_; }
  std::size_t max_scope() const noexcept;

  double evaluate(JointPoint x) const;

 private:
  std::size_t blocks_;
  std::vector<Factor> factors_;
};

enum class FunctionKind { BlackBox, Sop, FactorGraph };

/// The test function phi in one of its three representations.
class TestFunction {
 public:
  TestFunction(JointEvaluator black_box) : repr_(std::move(black_box)) {}  // NOLINT
  TestFunction(SopFunction sop) : repr_(std::move(sop)) {}                 // NOLINT
  TestFunction(FactorGraphFunction fg) : repr_(std::move(fg)) {}           // NOLINT

  FunctionKind kind() const noexcept { return static_cast<FunctionKind>(repr_.index()); }

  const SopFunction* sop() const noexcept { return std::get_if<SopFunction>(&repr_); }
  const FactorGraphFunction* factor_graph() const noexcept { return std::get_if<FactorGraphFunction>(&repr_); }

  /// Block count when the representation declares one.
  std::optional<std::size_t> blocks() const noexcept;

  double operator()(JointPoint x) const;

  /// Same values, BlackBox representation.
  TestFunction as_black_box() const;

 private:
  std::variant<JointEvaluator, SopFunction, FactorGraphFunction> repr_;
};

/// Convenience: phi(x) = f(x_1[0], ..., x_K[0]) for width-1 blocks.
TestFunction scalar_function(std::function<double(std::span<const double>)> f);

/// prod_k x_k[0].
TestFunction product_of_coordinates(std::size_t blocks);

}  // namespace pfmc
