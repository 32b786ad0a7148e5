// pfmc: runs the experiments and writes CSV, NDJSON and ECDF artifacts plus a manifest.
//
// Exit codes: 0 success, 1 manifest re-run whose outputs differ, 2 configuration error,
// 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pfmc/experiments.hpp"

namespace fs = std::filesystem;
using pfmc::experiments::ConfigError;
using pfmc::experiments::json;

namespace {

/// A command-line flag that overrides one config key when given.
struct Override {
  CLI::Option* option = nullptr;
  std::function<void(json&)> apply;
};

struct Command {
  std::string experiment;
  CLI::App* app = nullptr;
  std::vector<Override> overrides;
  std::string config_file;
  std::string out;
  std::string y_csv;
  bool force = false;
};

template <class T>
void bind(Command& cmd, const std::string& flag, const std::string& key, const std::string& help) {
  auto value = std::make_shared<T>();
  auto* opt = cmd.app->add_option(flag, *value, help);
  if constexpr (requires { value->begin(); } && !std::is_same_v<T, std::string>) opt->delimiter(',');
  cmd.overrides.push_back({opt, [value, key](json& j) { j[key] = *value; }});
}

void add_common(Command& cmd) {
  bind<std::uint64_t>(cmd, "--seed", "seed", "master seed");
  bind<std::size_t>(cmd, "--threads", "threads", "worker threads for replicates");
  cmd.app->add_option("--config", cmd.config_file, "JSON config file; flags override its keys");
  cmd.app->add_option("--out", cmd.out, "output directory (default $PFMC_OUT_DIR/<experiment> or pfmc_out/<experiment>)");
  cmd.app->add_flag("--force", cmd.force, "write into an existing output directory");
}

json read_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

/// Numbers from a CSV or whitespace-separated file; lines starting with '#' and non-numeric fields are skipped.
std::vector<double> read_numbers(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open " + p.string());
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (auto& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream fields(line);
    std::string f;
    while (fields >> f) {
      try {
        std::size_t used = 0;
        const double v = std::stod(f, &used);
        if (used == f.size()) out.push_back(v);
      } catch (const std::exception&) {
      }
    }
  }
  if (out.empty()) throw ConfigError(p.string() + ": no observations found");
  return out;
}

fs::path output_dir(const std::string& flag, const std::string& experiment) {
  if (!flag.empty()) return flag;
  if (const char* base = std::getenv("PFMC_OUT_DIR"); base && *base) return fs::path(base) / experiment;
  return fs::path("pfmc_out") / experiment;
}

void prepare_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir) && !fs::is_empty(dir) && !force)
    throw ConfigError("output directory " + dir.string() + " is not empty; pass --force to overwrite");
}

/// Runs an experiment and writes its artifacts and manifest; returns the manifest.
json execute(const std::string& experiment, const json& config, const fs::path& dir) {
  const auto run = pfmc::experiments::run_experiment(experiment, config);
  const auto files = pfmc::experiments::write_artifacts(run.artifacts, dir);
  auto manifest = pfmc::experiments::make_manifest(experiment, run.config, dir, files);
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
  std::cout << "wrote " << files.size() << " files and manifest.json to " << dir.string() << '\n';
  return manifest;
}

int run_command(const Command& cmd) {
  json config = json::object();
  if (!cmd.config_file.empty()) config = read_json_file(cmd.config_file);
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& o : cmd.overrides)
    if (o.option->count() > 0) o.apply(config);
  if (!cmd.y_csv.empty()) config["y"] = read_numbers(cmd.y_csv);
  const auto dir = output_dir(cmd.out, cmd.experiment);
  prepare_dir(dir, cmd.force);
  execute(cmd.experiment, config, dir);
  return 0;
}

int rerun_manifest(const std::string& manifest_path, const std::string& out, bool force) {
  const json manifest = read_json_file(manifest_path);
  if (!manifest.contains("experiment") || !manifest.contains("config"))
    throw ConfigError(manifest_path + ": missing experiment or config");
  const auto experiment = manifest["experiment"].get<std::string>();
  const auto dir = output_dir(out, experiment);
  prepare_dir(dir, force);
  const auto fresh = execute(experiment, manifest["config"], dir);
  if (!manifest.contains("outputs")) return 0;
  std::size_t differing = 0;
  for (const auto& o : manifest["outputs"]) {
    const auto file = o["file"].get<std::string>();
    const bool same = fs::exists(dir / file) && pfmc::experiments::file_digest(dir / file) == o["fnv1a64"];
    if (!same) {
      ++differing;
      std::cerr << "differs: " << file << '\n';
    }
  }
  std::cout << (differing == 0 ? "reproduced: every output matches the manifest digests\n"
                               : "not reproduced: " + std::to_string(differing) + " outputs differ\n");
  return differing == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Product-form Monte Carlo experiments"};
  app.require_subcommand(1);

  std::vector<std::unique_ptr<Command>> commands;
  auto make = [&](const std::string& name, const std::string& help) -> Command& {
    auto cmd = std::make_unique<Command>();
    cmd->experiment = name;
    cmd->app = app.add_subcommand(name, help);
    add_common(*cmd);
    commands.push_back(std::move(cmd));
    return *commands.back();
  };

  auto& toy = make("toy-gaussian", "standard vs product-form variance on N(1,1) blocks with phi = prod x_k");
  bind<std::size_t>(toy, "--K", "K", "blocks");
  bind<std::size_t>(toy, "--N", "N", "samples per block");
  bind<std::size_t>(toy, "--R", "R", "replicates");

  auto& tail = make("tail", "empirical vs theoretical variance ratio for 1{min(x1, x2) >= alpha}");
  bind<std::vector<double>>(tail, "--alphas", "alphas", "comma-separated thresholds");
  bind<std::size_t>(tail, "--N", "N", "samples per block");
  bind<std::size_t>(tail, "--R", "R", "replicates");

  auto& scaling = make("scaling", "iid-product variance ratios and the efficiency frontier");
  bind<std::vector<double>>(scaling, "--cvs", "cvs", "comma-separated coefficients of variation");
  bind<std::vector<int>>(scaling, "--Ks", "Ks", "comma-separated block counts");
  bind<double>(scaling, "--eps", "eps", "relative tolerance");
  bind<double>(scaling, "--c-r", "c_r", "relative cost C_r");

  auto& taylor = make("taylor", "Taylor-expansion estimates of the mean of exp(x_1 ... x_K) on Uniform[0, a]^K");
  bind<double>(taylor, "--a", "a", "interval length");
  bind<std::size_t>(taylor, "--K", "K", "blocks");
  bind<std::size_t>(taylor, "--J", "J", "expansion order (default ceil(1.2 a^K) + 2)");
  bind<std::size_t>(taylor, "--N", "N", "samples per block");
  bind<std::size_t>(taylor, "--repeats", "repeats", "independent repeats");

  auto& hier = make("hierarchical", "eight theta-marginal approximations for the hierarchical Gaussian model");
  bind<std::size_t>(hier, "--K", "K", "observations");
  bind<double>(hier, "--alpha", "alpha", "prior shape parameter");
  bind<double>(hier, "--beta", "beta", "prior scale parameter");
  bind<std::size_t>(hier, "--N", "N", "samples per block, and M = N");
  bind<std::size_t>(hier, "--R", "R", "replicates");
  bind<double>(hier, "--theta-true", "theta_true", "theta used to simulate y");
  bind<std::vector<std::string>>(hier, "--methods", "methods", "comma-separated subset of the eight methods");
  bind<std::size_t>(hier, "--chain-steps", "chain_steps", "Gibbs and RWM steps (default N^2)");
  bind<std::size_t>(hier, "--gimh-steps", "gimh_steps", "GIMH and PFGIMH steps (default N)");
  hier.app->add_option("--y-csv", hier.y_csv, "file of observations replacing simulated data");

  auto& mix = make("mixture", "stratified and product-form estimators on a mixture of products");
  bind<std::vector<double>>(mix, "--weights", "weights", "comma-separated mixture weights");
  bind<std::vector<double>>(mix, "--spreads", "spreads", "comma-separated component spreads");
  bind<std::size_t>(mix, "--N", "N", "total sample budget");
  bind<std::size_t>(mix, "--R", "R", "replicates");

  std::string manifest_path, rerun_out;
  bool rerun_force = false;
  auto* rerun = app.add_subcommand("run", "re-run an experiment from a manifest and compare output digests");
  rerun->add_option("--manifest", manifest_path, "manifest.json of an earlier run")->required();
  rerun->add_option("--out", rerun_out, "output directory");
  rerun->add_flag("--force", rerun_force, "write into an existing output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rerun->parsed()) return rerun_manifest(manifest_path, rerun_out, rerun_force);
    for (const auto& cmd : commands)
      if (cmd->app->parsed()) return run_command(*cmd);
  } catch (const pfmc::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const pfmc::CapExceeded& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const pfmc::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
