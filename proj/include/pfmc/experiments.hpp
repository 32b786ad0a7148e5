#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pfmc/diagnostics.hpp"
#include "pfmc/errors.hpp"

namespace pfmc::experiments {

using json = nlohmann::ordered_json;

/// Malformed or unknown configuration entries.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

using Cell = std::variant<std::int64_t, double, std::string>;

struct Column {
  std::string name;
  std::string description;
};

/// A CSV table. The first emitted line documents every column.
struct Table {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  /// Throws InvalidArgument when the row width differs from the column count.
  void add(std::vector<Cell> row);
  /// Index of a named column; throws InvalidArgument when absent.
  std::size_t column(const std::string& name) const;
};

/// One NDJSON file: a record per line.
struct Records {
  std::string name;
  std::vector<json> lines;
};

struct EcdfDump {
  std::string name;
  Ecdf ecdf;
};

struct Artifacts {
  std::vector<Table> tables;
  std::vector<Records> records;
  std::vector<EcdfDump> ecdfs;
};

/// Shortest round-trip decimal form; "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double v);
void write_csv(const Table& table, std::ostream& out);

/// Writes <table>.csv, <records>.ndjson and ecdf_<name>.txt into dir and returns the file names in write order.
/// Existing files are overwritten.
std::vector<std::string> write_artifacts(const Artifacts& artifacts, const std::filesystem::path& dir);

/// 64-bit FNV-1a digest of a file's bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& file);

/// Reads keys from a JSON object and rejects any key that was never read.
class ConfigReader {
 public:
  /// Throws ConfigError unless j is an object.
  explicit ConfigReader(const json& j);

  /// Leaves out unchanged when the key is absent. Throws ConfigError on a type mismatch.
  template <class T>
  void read(const char* key, T& out) {
    seen_.emplace_back(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  }

  /// A null value resets out.
  template <class T>
  void read(const char* key, std::optional<T>& out) {
    seen_.emplace_back(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      out.reset();
      return;
    }
    T v{};
    read(key, v);
    out = std::move(v);
  }

  /// Throws ConfigError naming the first unread key.
  void finish() const;

 private:
  const json& j_;
  std::vector<std::string> seen_;
};

/// Settings shared by every experiment.
struct RunSettings {
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

struct ToyGaussianConfig {
  std::size_t K = 10;
  std::size_t N = 1000;
  std::size_t R = 500;
  RunSettings run;

  static ToyGaussianConfig from_json(const json& j);
  json to_json() const;
};

struct ToyGaussianResult {
  double var_standard = 0.0;
  double var_product_form = 0.0;
  /// (2^K - 1) / N and K / N.
  double theory_standard = 0.0;
  double theory_product_form = 0.0;
  Artifacts artifacts;
};

/// K blocks of N(1, 1) draws, phi = prod_k x_k; replicate variances of both estimators.
ToyGaussianResult run_toy_gaussian(const ToyGaussianConfig& config);

struct TailConfig {
  std::vector<double> alphas = {0.0, 1.0, 2.0};
  std::size_t N = 200;
  std::size_t R = 2000;
  RunSettings run;

  static TailConfig from_json(const json& j);
  json to_json() const;
};

struct TailRow {
  double alpha = 0.0;
  double empirical_ratio = 0.0;
  double theory_ratio = 0.0;
};

struct TailResult {
  std::vector<TailRow> rows;
  Artifacts artifacts;
};

/// Two N(0, 1) blocks and phi = 1{min(x_1, x_2) >= alpha}.
TailResult run_tail(const TailConfig& config);

struct ScalingConfig {
  std::vector<double> cvs = {0.5, 1.0, 2.0};
  std::vector<int> Ks = {1, 2, 5, 10, 20, 50, 100};
  /// Relative tolerance of the frontier and the cost ratio C_r.
  double eps = 0.1;
  double c_r = 1.0;
  RunSettings run;

  static ScalingConfig from_json(const json& j);
  json to_json() const;
};

/// iid-product variance ratios and the efficiency frontier over a (CV, K) grid; no sampling.
Artifacts run_scaling(const ScalingConfig& config);

struct TaylorConfig {
  double a = 1.5;
  std::size_t K = 10;
  /// Expansion order; defaults to ceil(1.2 a^K) + 2.
  std::optional<std::size_t> J;
  std::size_t N = 1'000'000;
  std::size_t repeats = 20;
  RunSettings run;

  static TaylorConfig from_json(const json& j);
  json to_json() const;
  std::size_t order() const;
};

struct TaylorResult {
  double mu = 0.0;
  double sigma_sq = 0.0;
  double sigma_sq_pf = 0.0;
  std::vector<double> pf_estimates;
  std::vector<double> standard_estimates;
  Artifacts artifacts;
};

/// phi = exp(x_1 ... x_K) on Uniform[0, a]^K: product-form estimates of the order-J expansion,
/// standard estimates of phi itself, and the bias and variance series over J.
TaylorResult run_taylor(const TaylorConfig& config);

inline constexpr const char* kHierarchicalMethods[] = {"Gibbs", "RWM", "IS", "PFIS", "IS2", "PFIS2", "GIMH", "PFGIMH"};

struct HierarchicalConfig {
  std::size_t K = 100;
  double alpha = 1.0;
  double beta = 1.0;
  std::size_t N = 100;
  std::size_t R = 10;
  /// theta used to simulate y when y is not given.
  double theta_true = 1.0;
  std::vector<std::string> methods{std::begin(kHierarchicalMethods), std::end(kHierarchicalMethods)};
  /// Gibbs and RWM length; defaults to N^2.
  std::optional<std::size_t> chain_steps;
  /// GIMH and PFGIMH length; defaults to N, so that every method costs O(K N^2).
  std::optional<std::size_t> gimh_steps;
  /// Observations; simulated from Rng(seed).split("data") when absent.
  std::optional<std::vector<double>> y;
  RunSettings run;

  static HierarchicalConfig from_json(const json& j);
  json to_json() const;
};

/// Errors of one method in one replicate. NaN marks a metric that does not apply.
struct MethodMetrics {
  std::string method;
  double w1 = 0.0;
  double w1_over_sd = 0.0;
  double w1_over_mean = 0.0;
  double ks = 0.0;
  double mean_error = 0.0;
  double sd_error = 0.0;
  double top_mass_1 = 0.0;
  double top_mass_3 = 0.0;
  double latent_mean_error = 0.0;
  double latent_sd_error = 0.0;
};

struct HierarchicalResult {
  std::vector<double> y;
  double reference_mean = 0.0;
  double reference_sd = 0.0;
  /// metrics[r][m] follows config.methods.
  std::vector<std::vector<MethodMetrics>> metrics;
  Artifacts artifacts;
};

/// The eight theta-marginal approximations against the quadrature reference.
HierarchicalResult run_hierarchical(const HierarchicalConfig& config);

struct MixtureConfig {
  std::vector<double> weights = {0.5, 0.3, 0.2};
  /// Per-component spread s_i of the two-point coordinates c_i +- s_i with c_i = 1 + i; defaults to 1 + i.
  std::optional<std::vector<double>> spreads;
  std::size_t N = 60;
  std::size_t R = 2000;
  RunSettings run;

  static MixtureConfig from_json(const json& j);
  json to_json() const;
};

struct MixtureResult {
  double exact_plain = 0.0;
  double exact_stratified = 0.0;
  double exact_stratified_pf = 0.0;
  double formula_proportional = 0.0;
  double formula_optimal = 0.0;
  Artifacts artifacts;
};

/// Mixture of two-coordinate products with phi = x_1 x_2: exact and replicate variances of the plain,
/// stratified and stratified product-form estimators, and proportional against optimal allocation.
MixtureResult run_mixture(const MixtureConfig& config);

inline constexpr const char* kExperiments[] = {"toy-gaussian", "tail", "scaling", "taylor", "hierarchical", "mixture"};

struct ExperimentRun {
  /// Normalized config: every key with its effective value.
  json config;
  Artifacts artifacts;
};

/// Parses the config for the named experiment, runs it and returns its artifacts and normalized config.
/// Throws ConfigError on an unknown experiment name.
ExperimentRun run_experiment(const std::string& name, const json& config);

/// Manifest of a finished run: experiment, normalized config, versions and output digests.
json make_manifest(const std::string& experiment, const json& config, const std::filesystem::path& dir,
                   const std::vector<std::string>& files);

/// Library version written into manifests.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace pfmc::experiments
