#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pfmc/experiments.hpp"

namespace pfmc::experiments {
namespace {

namespace fs = std::filesystem;

std::string serialize(const Artifacts& a) {
  std::ostringstream out;
  for (const auto& t : a.tables) write_csv(t, out);
  for (const auto& r : a.records)
    for (const auto& l : r.lines) out << l.dump() << '\n';
  for (const auto& e : a.ecdfs) e.ecdf.write(out);
  return out.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("pfmc_test_experiments_" + name);
  fs::remove_all(d);
  return d;
}

TEST(FormatDouble, RoundTripsAndSpellsNonFinite) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.0), "-2");
  EXPECT_EQ(format_double(1e300), "1e+300");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_double(NAN), "nan");
  EXPECT_EQ(format_double(INFINITY), "inf");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
}

TEST(Table, SchemaLineHeaderAndQuoting) {
  Table t{"demo", {{"a", "an integer"}, {"b", "a label"}}, {}};
  t.add({std::int64_t(3), std::string("x,y")});
  t.add({std::int64_t(-1), std::string("say \"hi\"")});
  std::ostringstream out;
  write_csv(t, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# schema", 0), 0u);
  EXPECT_NE(line.find("a: an integer"), std::string::npos);
  std::getline(in, line);
  EXPECT_EQ(line, "a,b");
  std::getline(in, line);
  EXPECT_EQ(line, "3,\"x,y\"");
  std::getline(in, line);
  EXPECT_EQ(line, "-1,\"say \"\"hi\"\"\"");
  EXPECT_THROW(t.add({1.0}), InvalidArgument);
  EXPECT_EQ(t.column("b"), 1u);
  EXPECT_THROW(t.column("c"), InvalidArgument);
}

TEST(FileDigest, KnownFnv1aVectors) {
  const auto d = scratch_dir("digest");
  fs::create_directories(d);
  std::ofstream(d / "empty").close();
  std::ofstream(d / "a") << "a";
  std::ofstream(d / "foobar") << "foobar";
  EXPECT_EQ(file_digest(d / "empty"), "cbf29ce484222325");
  EXPECT_EQ(file_digest(d / "a"), "af63dc4c8601ec8c");
  EXPECT_EQ(file_digest(d / "foobar"), "85944171f73967e8");
  fs::remove_all(d);
}

TEST(ConfigReader, UnknownKeysTypesAndNull) {
  EXPECT_THROW(ToyGaussianConfig::from_json(json{{"K", 3}, {"bogus", 1}}), ConfigError);
  EXPECT_THROW(ToyGaussianConfig::from_json(json{{"K", "three"}}), ConfigError);
  EXPECT_THROW(ToyGaussianConfig::from_json(json::array()), ConfigError);
  EXPECT_EQ(ToyGaussianConfig::from_json(json{{"K", 3}}).K, 3u);
  EXPECT_FALSE(TaylorConfig::from_json(json{{"J", nullptr}}).J.has_value());
  EXPECT_EQ(TaylorConfig::from_json(json{{"J", 7}}).order(), 7u);
}

TEST(Config, ValidationRejectsDegenerateSizes) {
  EXPECT_THROW(ToyGaussianConfig::from_json(json{{"N", 0}}), ConfigError);
  EXPECT_THROW(TailConfig::from_json(json{{"R", 1}}), ConfigError);
  EXPECT_THROW(TaylorConfig::from_json(json{{"a", -1.0}}), ConfigError);
  EXPECT_THROW(MixtureConfig::from_json(json{{"weights", {0.5, 0.5}}, {"spreads", {1.0}}}), ConfigError);
  EXPECT_THROW(HierarchicalConfig::from_json(json{{"methods", {"Gibbs", "NUTS"}}}), ConfigError);
  EXPECT_THROW(run_experiment("no-such-experiment", json::object()), ConfigError);
}

TEST(Config, NormalizedConfigRoundTrips) {
  for (const char* name : kExperiments) {
    json small = json::object();
    const std::string n = name;
    if (n == "toy-gaussian") small = {{"K", 3}, {"N", 20}, {"R", 5}};
    if (n == "tail") small = {{"N", 20}, {"R", 5}};
    if (n == "taylor") small = {{"a", 1.2}, {"K", 2}, {"N", 100}, {"repeats", 2}};
    if (n == "hierarchical") small = {{"K", 30}, {"N", 6}, {"R", 1}, {"methods", {"Gibbs", "PFIS"}}};
    if (n == "mixture") small = {{"N", 10}, {"R", 5}};
    const auto first = run_experiment(n, small);
    const auto second = run_experiment(n, first.config);
    EXPECT_EQ(first.config, second.config) << n;
    EXPECT_EQ(serialize(first.artifacts), serialize(second.artifacts)) << n;
  }
}

TEST(Determinism, ThreadCountDoesNotChangeArtifacts) {
  const json base = {{"K", 4}, {"N", 50}, {"R", 40}, {"seed", 9}};
  json threaded = base;
  threaded["threads"] = 3;
  EXPECT_EQ(serialize(run_experiment("toy-gaussian", base).artifacts),
            serialize(run_experiment("toy-gaussian", threaded).artifacts));
  const json h = {{"K", 30}, {"N", 10}, {"R", 2}, {"seed", 2}, {"methods", {"RWM", "IS", "PFIS2", "PFGIMH"}}};
  json h3 = h;
  h3["threads"] = 2;
  EXPECT_EQ(serialize(run_experiment("hierarchical", h).artifacts), serialize(run_experiment("hierarchical", h3).artifacts));
}

TEST(Determinism, SeedChangesSampledOutputs) {
  const json a = {{"K", 3}, {"N", 20}, {"R", 10}, {"seed", 1}};
  json b = a;
  b["seed"] = 2;
  EXPECT_NE(serialize(run_experiment("toy-gaussian", a).artifacts), serialize(run_experiment("toy-gaussian", b).artifacts));
}

TEST(ToyGaussian, TheoryColumns) {
  ToyGaussianConfig c;
  c.K = 4;
  c.N = 200;
  c.R = 50;
  const auto r = run_toy_gaussian(c);
  EXPECT_DOUBLE_EQ(r.theory_standard, 15.0 / 200);
  EXPECT_DOUBLE_EQ(r.theory_product_form, 4.0 / 200);
  EXPECT_GT(r.var_standard, r.var_product_form);
}

TEST(Scaling, OverflowIsReportedNotThrown) {
  ScalingConfig c;
  c.cvs = {3.0};
  c.Ks = {1, 1000};
  const auto a = run_scaling(c);
  ASSERT_FALSE(a.tables.empty());
  std::ostringstream out;
  write_csv(a.tables[0], out);
  EXPECT_NE(out.str().find("inf"), std::string::npos);
}

TEST(Hierarchical, EveryMethodReportsMetrics) {
  HierarchicalConfig c;
  c.K = 5;
  c.N = 8;
  c.R = 2;
  const auto r = run_hierarchical(c);
  ASSERT_EQ(r.metrics.size(), 2u);
  ASSERT_EQ(r.metrics[0].size(), 8u);
  EXPECT_EQ(r.y.size(), 5u);
  EXPECT_GT(r.reference_mean, 0.0);
  EXPECT_GT(r.reference_sd, 0.0);
  for (const auto& rep : r.metrics)
    for (const auto& m : rep) {
      EXPECT_GE(m.w1, 0.0) << m.method;
      EXPECT_GE(m.ks, 0.0) << m.method;
      EXPECT_LE(m.ks, 1.0) << m.method;
      // Chains carry no weights, so their degeneracy columns are NaN.
      const bool weighted = m.method.find("IS") != std::string::npos;
      EXPECT_EQ(weighted, !std::isnan(m.top_mass_3)) << m.method;
      if (weighted) EXPECT_LE(m.top_mass_1, m.top_mass_3 + 1e-15) << m.method;
    }
}

TEST(Hierarchical, SuppliedObservationsAreUsed) {
  HierarchicalConfig c;
  c.y = std::vector<double>{0.5, -1.0, 2.0};
  c.N = 6;
  c.R = 1;
  c.methods = {"Gibbs", "PFIS2"};
  const auto r = run_hierarchical(c);
  EXPECT_EQ(r.y, *c.y);
  ASSERT_EQ(r.metrics[0].size(), 2u);
  EXPECT_EQ(r.metrics[0][1].method, "PFIS2");
}

TEST(Mixture, ExactChainAndAllocation) {
  const auto r = run_mixture(MixtureConfig{});
  EXPECT_LE(r.exact_stratified_pf, r.exact_stratified);
  EXPECT_LE(r.exact_stratified, r.exact_plain);
  EXPECT_LT(r.formula_optimal, r.formula_proportional);
}

TEST(Manifest, ListsEveryOutputWithItsDigest) {
  const auto d = scratch_dir("manifest");
  const auto run = run_experiment("tail", json{{"N", 20}, {"R", 5}});
  const auto files = write_artifacts(run.artifacts, d);
  const auto m = make_manifest("tail", run.config, d, files);
  EXPECT_EQ(m["experiment"], "tail");
  EXPECT_EQ(m["config"], run.config);
  EXPECT_EQ(m["versions"]["pfmc"], kVersion);
  ASSERT_EQ(m["outputs"].size(), files.size());
  for (const auto& o : m["outputs"]) EXPECT_EQ(o["fnv1a64"], file_digest(d / o["file"].get<std::string>()));
  fs::remove_all(d);
}

}  // namespace
}  // namespace pfmc::experiments
