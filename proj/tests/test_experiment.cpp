#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ctri/experiment.hpp"
#include "oracles.hpp"

using namespace ctri;

namespace {

std::vector<std::uint64_t> seeds(std::uint64_t from, std::size_t count) {
  std::vector<std::uint64_t> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = from + i;
  return s;
}

ExperimentConfig base(const std::string& algo, const std::string& kind, std::size_t n) {
  ExperimentConfig c;
  c.algo = algo;
  c.instance.kind = kind;
  c.instance.n = n;
  return c;
}

}  // namespace

TEST(RunExperiment, ListOnTriangleFree) {
  auto c = base("list", "triangle-free", 40);
  c.seeds = seeds(1, 10);
  const auto r = run_experiment(c);
  EXPECT_EQ(r.exit_code, kExitOk);
  for (const auto& run : r.doc["runs"]) {
    EXPECT_EQ(run["oracle_triangles"], 0);
    EXPECT_EQ(run["found"], 0);
    EXPECT_EQ(run["missed"], 0);
    EXPECT_EQ(run["spurious"], 0);
  }
}

TEST(RunExperiment, ListOnK4FindsAllFour) {
  auto c = base("list", "complete", 4);
  c.seeds = seeds(1, 10);
  const auto r = run_experiment(c);
  const std::size_t expected = oracle::triple_scan(complete_graph(4)).size();
  ASSERT_EQ(expected, 4u);
  ASSERT_EQ(r.doc["runs"].size(), 10u);
  for (const auto& run : r.doc["runs"]) {
    EXPECT_EQ(run["found"], expected);
    EXPECT_EQ(run["spurious"], 0);
  }
  EXPECT_EQ(r.exit_code, kExitOk);
}

TEST(RunExperiment, FindOnGnp64) {
  auto c = base("find", "gnp", 64);
  c.delta = 0.1;
  c.seeds = seeds(100, 100);
  const auto r = run_experiment(c);
  const auto& st = r.doc["statistics"];
  const double rate = st["success_rate"];
  EXPECT_GE(rate, 0.9);
  const double lo = st["success_ci95"][0], hi = st["success_ci95"][1];
  EXPECT_LE(lo, rate);
  EXPECT_GE(hi, rate);
  EXPECT_GT(lo, 0.0);
  EXPECT_EQ(st["spurious_total"], 0);
  EXPECT_EQ(st["hard_violations"], 0);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_TRUE(r.doc.contains("plan"));
}

TEST(RunExperiment, ReproducibleBitForBit) {
  auto c = base("list", "gnp", 24);
  c.seeds = {3, 4};
  const auto a = run_experiment(c, true).doc.dump();
  const auto b = run_experiment(c, true).doc.dump();
  EXPECT_EQ(a, b);
}

TEST(RunExperiment, ReportFieldsPresent) {
  auto c = base("a3", "sparse-triangles", 32);
  c.instance.t = 3;
  c.seeds = {1};
  const auto r = run_experiment(c, true);
  const auto& run = r.doc["runs"][0];
  for (const char* k : {"seed", "rounds", "halted", "oracle_triangles", "found", "missed", "spurious",
                        "max_edge_round_bits", "bandwidth", "reference_rounds", "normalized_rounds",
                        "hard_violations", "lemma4", "heaviest_output_node", "report"})
    EXPECT_TRUE(run.contains(k)) << k;
  EXPECT_LE(run["max_edge_round_bits"].get<std::uint64_t>(), run["bandwidth"].get<std::uint64_t>());
  const auto& st = r.doc["statistics"];
  EXPECT_TRUE(st.contains("rounds"));
  EXPECT_LE(st["rounds"]["min"].get<double>(), st["rounds"]["median"].get<double>());
  EXPECT_LE(st["rounds"]["median"].get<double>(), st["rounds"]["max"].get<double>());
}

TEST(RunExperiment, HeaviestNodeEcho) {
  auto c = base("list", "complete", 6);
  c.seeds = {1};
  const auto s = run_one(c, complete_graph(6), 1, true);
  ASSERT_TRUE(s.report);
  const auto& ev = s.report->per_node_output_events;
  EXPECT_EQ(s.heaviest_output_events, *std::max_element(ev.begin(), ev.end()));
  const double want = std::sqrt(2.0) / 3.0 * std::pow(static_cast<double>(s.heaviest_output_events), 2.0 / 3.0) *
                      static_cast<double>(s.report->id_bits);
  EXPECT_NEAR(s.heaviest_echo_bits, want, 1e-9);
}

TEST(ExitCodes, StatisticalFailureWhenCutShort) {
  auto c = base("list", "gnp", 32);
  c.seeds = {1, 2};
  c.max_rounds = 1;
  const auto r = run_experiment(c);
  EXPECT_EQ(r.exit_code, kExitStatistical);
  EXPECT_EQ(r.doc["statistics"]["spurious_total"], 0);
  EXPECT_EQ(r.doc["statistics"]["halted_runs"], 0);
}

TEST(ExitCodes, ConfigErrors) {
  auto c = base("list", "gnp", 16);
  c.seeds.clear();
  EXPECT_THROW(run_experiment(c), ConfigError);
  c = base("nope", "gnp", 16);
  EXPECT_THROW(run_experiment(c), ConfigError);
  c = base("list", "gnp", 16);
  c.max_rounds = 0;
  EXPECT_THROW(run_experiment(c), ConfigError);
  c = base("list", "gnp", 16);
  c.beta = 1;
  EXPECT_THROW(run_experiment(c), ConfigError);
  c = base("find", "gnp", 16);
  c.delta = 1.0;
  EXPECT_THROW(run_experiment(c), ConfigError);
  c = base("list", "mystery", 16);
  EXPECT_THROW(run_experiment(c), ConfigError);
  c = base("list", "file", 16);
  c.instance.path = "/nonexistent/graph.txt";
  EXPECT_ANY_THROW(run_experiment(c));
  EXPECT_THROW(write_text("/nonexistent-dir/out.json", "{}"), ConfigError);
}

TEST(ExitCodes, ValuesAreFixed) {
  EXPECT_EQ(kExitOk, 0);
  EXPECT_EQ(kExitStatistical, 1);
  EXPECT_EQ(kExitHard, 2);
  EXPECT_EQ(kExitConfig, 3);
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig c = base("find", "heavy-edge", 64);
  c.instance.h = 16;
  c.instance.p = 0.3;
  c.seeds = {5, 9, 11};
  c.delta = 0.05;
  c.beta = 4;
  c.max_rounds = 12345;
  c.algo_config.eps = 0.25;
  c.algo_config.m_bar = 17.5;
  c.algo_config.c_rep = 6.0;
  const json j = c;
  const ExperimentConfig back = j.get<ExperimentConfig>();
  EXPECT_EQ(json(back).dump(), j.dump());
  EXPECT_EQ(back.instance.h, 16u);
  EXPECT_EQ(*back.algo_config.m_bar, 17.5);
  EXPECT_EQ(back.seeds, c.seeds);
}

TEST(Config, FileInstance) {
  const auto path = std::filesystem::temp_directory_path() / "ctri_exp_k4.txt";
  save_edge_list(complete_graph(4), path.string());
  auto c = base("list", "file", 0);
  c.instance.path = path.string();
  c.seeds = {1, 2};
  const auto r = run_experiment(c);
  for (const auto& run : r.doc["runs"]) EXPECT_EQ(run["found"], 4);
  std::filesystem::remove(path);
}

TEST(WriteText, WritesFile) {
  const auto path = std::filesystem::temp_directory_path() / "ctri_write_text.json";
  write_text(path.string(), "{\"a\":1}");
  std::ifstream f(path);
  std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  EXPECT_EQ(s, "{\"a\":1}");
  std::filesystem::remove(path);
}

TEST(Wilson, KnownValues) {
  const auto i = wilson(90, 100);
  EXPECT_NEAR(i.lo, 0.8256, 1e-3);
  EXPECT_NEAR(i.hi, 0.9448, 1e-3);
  const auto all = wilson(10, 10);
  EXPECT_DOUBLE_EQ(all.hi, 1.0);
  EXPECT_LT(all.lo, 1.0);
  EXPECT_DOUBLE_EQ(median_of({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median_of({4, 1, 2, 3}), 2.5);
}

TEST(Scaling, ConstantBaselineRatioDecreases) {
  // A program that halts at once takes 1 round everywhere; its ratio is 1/reference.
  std::vector<double> ratios;
  for (std::size_t n : {64u, 128u, 256u, 512u}) {
    const Graph g = gen_gnp(n, 0.5, 1);
    NodeProgram halt_now;
    halt_now.spawn = [](VertexId) -> std::unique_ptr<NodeProcess> {
      struct P : NodeProcess {
        void on_round(NodeContext& ctx) override { ctx.halt(); }
      };
      return std::make_unique<P>();
    };
    const auto rep = run(Network(g, 2), halt_now);
    ASSERT_TRUE(rep.halted);
    const double rounds = std::max<double>(1.0, static_cast<double>(rep.rounds));
    ratios.push_back(rounds / reference_rounds("list", n, 0.0, 0.0, 0));
  }
  for (std::size_t i = 1; i < ratios.size(); ++i) EXPECT_LT(ratios[i], ratios[i - 1]);
}

TEST(Scaling, SmallGridRowsAndCsv) {
  auto c = base("list", "gnp", 16);
  c.seeds = {1, 2, 3};
  const auto r = scaling_study(c, {16, 24, 32});
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.hard_violations, 0u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.runs, 3u);
    EXPECT_EQ(row.excluded, 0u);
    EXPECT_NEAR(row.reference, std::pow(row.n, 0.75) * std::log2(row.n), 1e-9);
    EXPECT_NEAR(row.ratio, row.median_rounds / row.reference, 1e-12);
  }
  double lo = 1e300, hi = 0;
  for (const auto& row : r.rows) lo = std::min(lo, row.ratio), hi = std::max(hi, row.ratio);
  EXPECT_NEAR(r.spread, hi / lo, 1e-12);
  EXPECT_EQ(r.flagged, r.spread > 3.0);

  const std::string csv = scaling_csv(r);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "n,median_rounds,reference,ratio,runs,excluded");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
  }
  EXPECT_EQ(rows, 3);
  const json j = scaling_json(c, r);
  EXPECT_EQ(j["kind"], "scaling");
  EXPECT_EQ(j["rows"].size(), 3u);
}

TEST(Scaling, NonHaltingRunsExcludedWithWarning) {
  auto c = base("list", "gnp", 16);
  c.seeds = {1, 2};
  c.max_rounds = 1;
  const auto r = scaling_study(c, {16, 20, 24});
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.runs, 0u);
    EXPECT_EQ(row.excluded, 2u);
  }
  EXPECT_EQ(r.warnings.size(), 6u);
}

TEST(Scaling, GridValidation) {
  auto c = base("list", "gnp", 16);
  EXPECT_THROW(scaling_study(c, {16, 32}), ConfigError);
  EXPECT_THROW(scaling_study(c, {32, 16, 64}), ConfigError);
}

TEST(Lemmas, Lemma1DomainRange4) {
  const auto c = lemma1_check(64, 4, 100000, 1);
  EXPECT_DOUBLE_EQ(c.bound, 3.0 / 64.0);
  EXPECT_TRUE(c.pass) << c.observed << " vs " << c.bound << " sigma " << c.sigma;
}

TEST(Lemmas, Lemma2Gnp40) {
  const auto c = lemma2_check(gen_gnp(40, 0.5, 1), 0.5, 500, 1);
  EXPECT_NEAR(c.sigma, std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / 500.0), 1e-12);
  EXPECT_GE(c.observed, 2.0 / 3.0 - 3 * c.sigma);
  EXPECT_TRUE(c.pass);
}

TEST(Lemmas, VerifyLemmasReport) {
  LemmaConfig lc;
  lc.lemma1_trials = 20000;
  lc.samples = 100;
  const auto r = verify_lemmas(lc);
  EXPECT_EQ(r.doc["kind"], "lemmas");
  std::set<std::string> names;
  for (const auto& c : r.doc["checks"]) {
    names.insert(c["name"].get<std::string>());
    for (const char* k : {"observed", "bound", "sigma", "pass", "detail"}) EXPECT_TRUE(c.contains(k));
  }
  for (const char* n : {"lemma1_range4", "lemma1_range8", "lemma2", "lemma3_statement1", "lemma3_statement2", "lemma4"})
    EXPECT_TRUE(names.count(n)) << n;
  for (const auto& c : r.doc["checks"]) {
    if (c["name"] == "lemma4") {
      EXPECT_EQ(c["observed"], 0.0);
    }
  }
  EXPECT_NE(r.exit_code, kExitHard);
}
