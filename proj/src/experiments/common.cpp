#include "common.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace pfmc::experiments {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw InvalidArgument("table " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                          std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& col) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == col) return i;
  throw InvalidArgument("table " + name + ": no column " + col);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string cell_text(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return csv_field(std::get<std::string>(c));
}

}  // namespace

void write_csv(const Table& table, std::ostream& out) {
  out << "# schema";
  for (const auto& c : table.columns) out << " | " << c.name << ": " << c.description;
  out << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << csv_field(table.columns[i].name);
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << '\n';
  }
}

std::vector<std::string> write_artifacts(const Artifacts& artifacts, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + (dir / name).string());
    files.push_back(name);
    return out;
  };
  for (const auto& t : artifacts.tables) {
    auto out = open(t.name + ".csv");
    write_csv(t, out);
  }
  for (const auto& r : artifacts.records) {
    auto out = open(r.name + ".ndjson");
    for (const auto& line : r.lines) out << line.dump() << '\n';
  }
  for (const auto& e : artifacts.ecdfs) {
    auto out = open("ecdf_" + e.name + ".txt");
    e.ecdf.write(out);
  }
  return files;
}

std::string file_digest(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + file.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

ConfigReader::ConfigReader(const json& j) : j_(j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
}

void ConfigReader::finish() const {
  for (const auto& [key, value] : j_.items())
    if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) throw ConfigError("unknown config key '" + key + "'");
}

namespace detail {

void read_run(ConfigReader& reader, RunSettings& run) {
  reader.read("seed", run.seed);
  reader.read("threads", run.threads);
  if (run.threads == 0) throw ConfigError("threads must be at least 1");
}

void write_run(json& j, const RunSettings& run) {
  j["seed"] = run.seed;
  j["threads"] = run.threads;
}

void require_at_least(const char* key, double value, double lo) {
  if (!(value >= lo)) throw ConfigError(std::string(key) + " must be at least " + format_double(lo));
}

std::vector<double> column_of(const std::vector<std::vector<double>>& rows, std::size_t c) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(c));
  return out;
}

}  // namespace detail

ExperimentRun run_experiment(const std::string& name, const json& config) {
  if (name == "toy-gaussian") {
    const auto c = ToyGaussianConfig::from_json(config);
    return {c.to_json(), run_toy_gaussian(c).artifacts};
  }
  if (name == "tail") {
    const auto c = TailConfig::from_json(config);
    return {c.to_json(), run_tail(c).artifacts};
  }
  if (name == "scaling") {
    const auto c = ScalingConfig::from_json(config);
    return {c.to_json(), run_scaling(c)};
  }
  if (name == "taylor") {
    const auto c = TaylorConfig::from_json(config);
    return {c.to_json(), run_taylor(c).artifacts};
  }
  if (name == "hierarchical") {
    const auto c = HierarchicalConfig::from_json(config);
    return {c.to_json(), run_hierarchical(c).artifacts};
  }
  if (name == "mixture") {
    const auto c = MixtureConfig::from_json(config);
    return {c.to_json(), run_mixture(c).artifacts};
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

json make_manifest(const std::string& experiment, const json& config, const std::filesystem::path& dir,
                   const std::vector<std::string>& files) {
  json m;
  m["experiment"] = experiment;
  m["config"] = config;
  m["versions"] = {{"pfmc", kVersion}, {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  json outputs = json::array();
  for (const auto& f : files) outputs.push_back({{"file", f}, {"fnv1a64", file_digest(dir / f)}});
  m["outputs"] = outputs;
  return m;
}

}  // namespace pfmc::experiments
