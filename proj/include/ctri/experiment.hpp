#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "algo_params.hpp"
#include "compose.hpp"
#include "congest.hpp"
#include "edge_list.hpp"
#include "generators.hpp"
#include "graph.hpp"
#include "hash_family.hpp"
#include "lemmas.hpp"

namespace ctri {

using json = nlohmann::json;

enum ExitCode : int { kExitOk = 0, kExitStatistical = 1, kExitHard = 2, kExitConfig = 3 };

struct InstanceSpec {
  std::string kind = "gnp";  // gnp | heavy-edge | sparse-triangles | triangle-free | complete | file
  std::size_t n = 64;
  std::optional<double> p;   // gnp: edge probability (default 1/2); planted kinds: background p
  std::size_t h = 0;
  std::size_t t = 0;
  std::string path;          // kind == file
};

inline Graph make_instance(const InstanceSpec& s, std::uint64_t seed) {
  if (s.kind == "gnp") return gen_gnp(s.n, s.p.value_or(0.5), seed);
  if (s.kind == "complete") return complete_graph(s.n);
  if (s.kind == "file") return load_edge_list(s.path);
  PlantedKind k;
  if (s.kind == "heavy-edge") k = PlantedKind::HeavyEdge;
  else if (s.kind == "sparse-triangles") k = PlantedKind::SparseTriangles;
  else if (s.kind == "triangle-free") k = PlantedKind::TriangleFree;
  else throw ConfigError("unknown instance kind '" + s.kind + "'");
  PlantedParams pp;
  pp.h = s.h;
  pp.t = s.t;
  pp.p = s.p.value_or(-1.0);
  return gen_planted(s.n, k, pp, seed).graph;
}

struct ExperimentConfig {
  InstanceSpec instance;
  std::vector<std::uint64_t> seeds{1};
  std::string algo = "list";  // a1 | a2 | a3 | sub_a | find | list
  AlgoConfig algo_config;
  double delta = 0.1;
  unsigned beta = 2;
  std::uint64_t max_rounds = 10'000'000;
  std::string out;

  void validate() const {
    if (seeds.empty()) throw ConfigError("seed list must be non-empty");
    if (max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
    if (beta < 2) throw ConfigError("beta must be >= 2");
    static const char* known[] = {"a1", "a2", "a3", "sub_a", "find", "list"};
    if (std::find(std::begin(known), std::end(known), algo) == std::end(known))
      throw ConfigError("unknown algorithm '" + algo + "'");
    algo_config.validate();
    if (algo == "find" && !(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
  }
};

inline void to_json(json& j, const AlgoConfig& c) {
  j = json{{"eps", c.eps}, {"c_stop", c.c_stop}, {"log_base", c.log_base}};
  j["m_bar"] = c.m_bar ? json(*c.m_bar) : json(nullptr);
  j["c_rep"] = c.c_rep ? json(*c.c_rep) : json(nullptr);
}

inline void from_json(const json& j, AlgoConfig& c) {
  if (j.contains("eps")) c.eps = j.at("eps").get<double>();
  if (j.contains("m_bar") && !j.at("m_bar").is_null()) c.m_bar = j.at("m_bar").get<double>();
  if (j.contains("c_stop")) c.c_stop = j.at("c_stop").get<double>();
  if (j.contains("c_rep") && !j.at("c_rep").is_null()) c.c_rep = j.at("c_rep").get<double>();
  if (j.contains("log_base")) c.log_base = j.at("log_base").get<int>();
}

inline void to_json(json& j, const InstanceSpec& s) {
  j = json{{"kind", s.kind}, {"n", s.n}, {"h", s.h}, {"t", s.t}};
  j["p"] = s.p ? json(*s.p) : json(nullptr);
  if (!s.path.empty()) j["path"] = s.path;
}

inline void from_json(const json& j, InstanceSpec& s) {
  if (j.contains("kind")) s.kind = j.at("kind").get<std::string>();
  if (j.contains("n")) s.n = j.at("n").get<std::size_t>();
  if (j.contains("p") && !j.at("p").is_null()) s.p = j.at("p").get<double>();
  if (j.contains("h")) s.h = j.at("h").get<std::size_t>();
  if (j.contains("t")) s.t = j.at("t").get<std::size_t>();
  if (j.contains("path")) s.path = j.at("path").get<std::string>();
}

inline void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"instance", c.instance}, {"seeds", c.seeds},       {"algo", c.algo},
           {"algo_config", c.algo_config}, {"delta", c.delta}, {"beta", c.beta},
           {"max_rounds", c.max_rounds}};
}

inline void from_json(const json& j, ExperimentConfig& c) {
  if (j.contains("instance")) c.instance = j.at("instance").get<InstanceSpec>();
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("algo")) c.algo = j.at("algo").get<std::string>();
  if (j.contains("algo_config")) c.algo_config = j.at("algo_config").get<AlgoConfig>();
  if (j.contains("delta")) c.delta = j.at("delta").get<double>();
  if (j.contains("beta")) c.beta = j.at("beta").get<unsigned>();
  if (j.contains("max_rounds")) c.max_rounds = j.at("max_rounds").get<std::uint64_t>();
}

inline void to_json(json& j, const TriangleSet& ts) {
  j = json::array();
  for (const Triangle& t : ts) j.push_back({t.a, t.b, t.c});
}

inline json run_report_json(const RunReport& r) {
  json j{{"rounds", r.rounds},
         {"halted", r.halted},
         {"stalled", r.stalled},
         {"bandwidth", r.bandwidth},
         {"id_bits", r.id_bits},
         {"max_edge_round_bits", r.max_edge_round_bits},
         {"per_node_rx_bits", r.per_node_rx_bits},
         {"per_node_output_events", r.per_node_output_events},
         {"output", r.output},
         {"spurious", r.spurious}};
  return j;
}

struct Interval {
  double lo = 0.0, hi = 1.0;
};

// Wilson score interval, 95%.
inline Interval wilson(std::size_t successes, std::size_t trials, double z = 1.96) {
  if (trials == 0) return {};
  const double n = static_cast<double>(trials), p = static_cast<double>(successes) / n;
  const double den = 1.0 + z * z / n;
  const double mid = (p + z * z / (2 * n)) / den;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den;
  return {successes == 0 ? 0.0 : std::max(0.0, mid - half), successes == trials ? 1.0 : std::min(1.0, mid + half)};
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Theory curve a run's rounds are normalized by.
inline double reference_rounds(const std::string& algo, std::size_t n, double eps, double m_bar,
                               std::size_t x_size) {
  const double lg = log2n(n);
  if (algo == "list") return npow(n, 0.75) * lg;
  if (algo == "find") return npow(n, 2.0 / 3.0) * std::pow(lg, 2.0 / 3.0);
  if (algo == "a1") return npow(n, 1.0 - eps);
  if (algo == "a2") return npow(n, 1.0 - eps / 2.0);
  if (algo == "a3") return npow(n, 1.0 - eps) + npow(n, (1.0 + eps) / 2.0) * lg;
  if (algo == "sub_a") return static_cast<double>(x_size) + m_bar * lg;
  return 1.0;
}

struct RunSummary {
  std::uint64_t seed = 0;
  std::uint64_t rounds = 0;
  bool halted = false;
  std::size_t oracle = 0, found = 0, missed = 0, spurious = 0;
  bool success = false;
  std::uint64_t max_edge_round_bits = 0;
  std::size_t bandwidth = 0;
  double reference = 0.0;
  std::size_t x_size = 0;
  std::vector<std::string> hard_violations;
  std::size_t lemma4_checked = 0, lemma4_violations = 0;
  VertexId heaviest_node = 0;
  std::uint64_t heaviest_output_events = 0;
  std::uint64_t heaviest_rx_bits = 0;
  double heaviest_echo_bits = 0.0;
  std::optional<RunReport> report;
  std::shared_ptr<RunTrace> trace;
};

// Edge-cover bound on R and on a few of its subsets.
inline std::pair<std::size_t, std::size_t> rivin_check_family(const TriangleSet& r) {
  std::size_t checked = 0, bad = 0;
  auto test = [&](const TriangleSet& s) {
    ++checked;
    if (!rivin_holds(s)) ++bad;
  };
  test(r);
  for (std::size_t stride : {2, 3, 7}) {
    std::vector<Triangle> sub;
    for (std::size_t i = 0; i < r.size(); i += stride) sub.push_back(r[i]);
    test(TriangleSet::from_sorted_unique(std::move(sub)));
  }
  return {checked, bad};
}

struct ProgramBundle {
  NodeProgram program;
  std::shared_ptr<RunTrace> trace;
  std::optional<CompositionPlan> plan;
  std::size_t x_size = 0;
  double m_bar = 0.0;
};

inline ProgramBundle build_program(const ExperimentConfig& c, const Graph& g, std::uint64_t seed) {
  ProgramBundle b;
  b.trace = std::make_shared<RunTrace>();
  const std::size_t n = g.n();
  const auto& a = c.algo_config;
  if (c.algo == "a1") {
    b.program = algo_a1(a.eps, b.trace);
  } else if (c.algo == "a2") {
    b.program = algo_a2(a.eps, b.trace);
  } else if (c.algo == "a3") {
    b.program = algo_a3(a, b.trace);
    b.plan = single_plan(StageKind::A3, n, c.beta, a);
    b.m_bar = b.plan->m_bar;
  } else if (c.algo == "sub_a") {
    Rng rng = derive_rng(seed, 0x58);
    const DynBitset x = sample_x(n, a.eps, rng);
    std::vector<std::uint8_t> flags(n, 0);
    x.for_each([&](std::size_t v) { flags[v] = 1; });
    b.x_size = x.count();
    b.m_bar = a.m_bar ? *a.m_bar : m_bar_auto(n, a.eps);
    b.program = algo_sub_a(flags, b.m_bar, b.trace);
  } else if (c.algo == "find") {
    b.program = find_triangle(c.delta, a, b.trace);
    b.plan = find_plan(n, c.beta, c.delta, a);
  } else if (c.algo == "list") {
    b.program = list_triangles(a, b.trace);
    b.plan = list_plan(n, c.beta, a);
  } else {
    throw ConfigError("unknown algorithm '" + c.algo + "'");
  }
  return b;
}

inline RunSummary run_one(const ExperimentConfig& c, const Graph& g, std::uint64_t seed,
                          bool keep_report = false) {
  RunSummary s;
  s.seed = seed;
  const TriangleSet truth = enumerate_triangles(g);
  s.oracle = truth.size();
  ProgramBundle b = build_program(c, g, seed);
  const Network net(g, c.beta);
  s.bandwidth = net.bandwidth();
  RunReport rep;
  try {
    rep = run(net, b.program, {c.max_rounds, seed, false});
  } catch (const BandwidthFault& f) {
    s.hard_violations.push_back(std::string("bandwidth fault: ") + f.what());
    return s;
  }
  s.rounds = rep.rounds;
  s.halted = rep.halted;
  s.max_edge_round_bits = rep.max_edge_round_bits;
  s.spurious = rep.spurious.size();
  s.found = rep.output.size();
  s.missed = truth.minus(rep.output).size();
  if (c.algo == "find") s.success = truth.empty() ? rep.output.empty() : !rep.output.empty();
  else s.success = s.missed == 0;

  if (s.spurious > 0) s.hard_violations.push_back("spurious triangles in output");
  if (!truth.includes(rep.output)) s.hard_violations.push_back("output is not a subset of T(G)");
  if (rep.max_edge_round_bits > net.bandwidth()) s.hard_violations.push_back("edge carried more than B bits");
  for (VertexId v = 0; v < g.n(); ++v)
    if (rep.per_node_rx_bits[v] > rep.rounds * g.degree(v) * net.bandwidth())
      s.hard_violations.push_back("rx bits exceed rounds*deg*B at node " + std::to_string(v));
  if (b.trace->window_overruns > 0) s.hard_violations.push_back("stage overran its window");
  const double eps = b.plan ? b.plan->eps.eps : c.algo_config.eps;
  if (static_cast<double>(b.trace->a2_max_sent) > a2_set_cap(g.n(), eps))
    s.hard_violations.push_back("A2 transmitted a set above its cap");
  if (static_cast<double>(b.trace->a1_max_sent) > a1_set_cap(g.n(), eps))
    s.hard_violations.push_back("A1 transmitted a set above its cap");

  const auto [checked, bad] = rivin_check_family(rep.output);
  s.lemma4_checked = checked;
  s.lemma4_violations = bad;
  if (bad > 0) s.hard_violations.push_back("edge-cover bound violated");

  if (!b.trace->sub_a.empty()) s.x_size = b.trace->sub_a.front().x_size();
  else s.x_size = b.x_size;
  s.reference = reference_rounds(c.algo, g.n(), eps, b.m_bar, s.x_size);

  if (g.n() > 0) {
    const auto& ev = rep.per_node_output_events;
    const auto it = std::max_element(ev.begin(), ev.end());
    s.heaviest_node = static_cast<VertexId>(it - ev.begin());
    s.heaviest_output_events = *it;
    s.heaviest_rx_bits = rep.per_node_rx_bits[s.heaviest_node];
    s.heaviest_echo_bits = rivin_bound(*it) * net.id_bits();
  }
  if (keep_report) s.report = std::move(rep);
  s.trace = b.trace;
  return s;
}

inline json summary_json(const RunSummary& s) {
  json j{{"seed", s.seed},
         {"rounds", s.rounds},
         {"halted", s.halted},
         {"oracle_triangles", s.oracle},
         {"found", s.found},
         {"missed", s.missed},
         {"spurious", s.spurious},
         {"success", s.success},
         {"max_edge_round_bits", s.max_edge_round_bits},
         {"bandwidth", s.bandwidth},
         {"reference_rounds", s.reference},
         {"normalized_rounds", s.reference > 0 ? static_cast<double>(s.rounds) / s.reference : 0.0},
         {"x_size", s.x_size},
         {"hard_violations", s.hard_violations},
         {"lemma4", {{"checked", s.lemma4_checked}, {"violations", s.lemma4_violations}}},
         {"heaviest_output_node",
          {{"node", s.heaviest_node},
           {"output_events", s.heaviest_output_events},
           {"rx_bits", s.heaviest_rx_bits},
           {"edge_cover_echo_bits", s.heaviest_echo_bits}}}};
  if (s.report) j["report"] = run_report_json(*s.report);
  return j;
}

inline json plan_json(const CompositionPlan& p) {
  json stages = json::array();
  std::uint64_t w1 = 0, w2 = 0, w3 = 0;
  for (const auto& s : p.stages) {
    if (s.kind == StageKind::A1) w1 = s.length;
    if (s.kind == StageKind::A2) w2 = s.length;
    if (s.kind == StageKind::A3) w3 = s.length;
  }
  return json{{"name", p.name},       {"n", p.n},
              {"beta", p.beta},       {"eps", p.eps.eps},
              {"eps_raw", std::isfinite(p.eps.raw) ? json(p.eps.raw) : json(nullptr)},
              {"eps_clamped", p.eps.clamped},
              {"repetitions", p.reps}, {"c_rep", p.c_rep},
              {"c_stop", p.c_stop},   {"m_bar", p.m_bar},
              {"x_probability", p.x_prob},
              {"windows", {{"a1", w1}, {"a2", w2}, {"a3", w3}}},
              {"scheduled_rounds", p.total_rounds()}};
}

struct ExperimentReport {
  json doc;
  int exit_code = kExitOk;
};

// Success-rate target for the statistical verdict, if the algorithm has one.
inline std::optional<double> success_target(const ExperimentConfig& c, std::size_t n) {
  if (c.algo == "find") return 1.0 - c.delta;
  if (c.algo == "list") return std::min(0.95, 1.0 - 1.0 / static_cast<double>(std::max<std::size_t>(n, 2)));
  return std::nullopt;
}

inline ExperimentReport run_experiment(const ExperimentConfig& c, bool keep_reports = false) {
  c.validate();
  ExperimentReport out;
  std::vector<RunSummary> runs;
  std::size_t n = 0;
  for (std::uint64_t seed : c.seeds) {
    const Graph g = make_instance(c.instance, seed);
    n = g.n();
    runs.push_back(run_one(c, g, seed, keep_reports));
  }
  std::size_t ok = 0, spurious = 0, hard = 0, lemma4 = 0;
  std::vector<double> rounds, ratios;
  json runs_j = json::array();
  for (const auto& r : runs) {
    ok += r.success;
    spurious += r.spurious;
    hard += r.hard_violations.size();
    lemma4 += r.lemma4_violations;
    if (r.halted) {
      rounds.push_back(static_cast<double>(r.rounds));
      if (r.reference > 0) ratios.push_back(static_cast<double>(r.rounds) / r.reference);
    }
    runs_j.push_back(summary_json(r));
  }
  const Interval ci = wilson(ok, runs.size());
  const double rate = static_cast<double>(ok) / static_cast<double>(runs.size());
  json stats{{"runs", runs.size()},
             {"successes", ok},
             {"success_rate", rate},
             {"success_ci95", {ci.lo, ci.hi}},
             {"spurious_total", spurious},
             {"hard_violations", hard},
             {"lemma4_violations", lemma4},
             {"halted_runs", rounds.size()}};
  if (!rounds.empty()) {
    stats["rounds"] = {{"min", *std::min_element(rounds.begin(), rounds.end())},
                       {"median", median_of(rounds)},
                       {"max", *std::max_element(rounds.begin(), rounds.end())}};
    stats["normalized_rounds_median"] = median_of(ratios);
  }
  const auto target = success_target(c, n);
  bool stat_ok = true;
  if (target) {
    stats["success_target"] = *target;
    stat_ok = rate >= *target;
  }
  if (c.algo == "list" || c.algo == "find") {
    const auto p = c.algo == "list" ? list_plan(n, c.beta, c.algo_config)
                                    : find_plan(n, c.beta, c.delta, c.algo_config);
    out.doc["plan"] = plan_json(p);
  }
  out.doc["kind"] = "experiment";
  out.doc["config"] = c;
  out.doc["runs"] = runs_j;
  out.doc["statistics"] = stats;
  out.exit_code = hard > 0 ? kExitHard : (stat_ok ? kExitOk : kExitStatistical);
  out.doc["exit_code"] = out.exit_code;
  return out;
}

// Unwritable output path is a configuration problem, not a run failure.
inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write output file '" + path + "'");
  f << text;
  if (!f) throw ConfigError("write failed for '" + path + "'");
}

struct ScalingRow {
  std::size_t n = 0;
  double median_rounds = 0.0;
  double reference = 0.0;
  double ratio = 0.0;
  std::size_t runs = 0;
  std::size_t excluded = 0;
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  double spread = 0.0;  // max ratio / min ratio
  bool flagged = false;
  std::vector<std::string> warnings;
  std::size_t hard_violations = 0;
};

// Median rounds per grid point and their ratio to the algorithm's reference curve.
inline ScalingResult scaling_study(const ExperimentConfig& base, const std::vector<std::size_t>& n_grid) {
  if (n_grid.size() < 3) throw ConfigError("scaling grid needs at least 3 points");
  if (!std::is_sorted(n_grid.begin(), n_grid.end())) throw ConfigError("scaling grid must be ascending");
  ScalingResult res;
  for (std::size_t n : n_grid) {
    ExperimentConfig c = base;
    c.instance.n = n;
    c.validate();
    ScalingRow row;
    row.n = n;
    std::vector<double> rounds, refs;
    for (std::uint64_t seed : c.seeds) {
      const Graph g = make_instance(c.instance, seed);
      const RunSummary s = run_one(c, g, seed);
      res.hard_violations += s.hard_violations.size();
      if (!s.halted) {
        ++row.excluded;
        res.warnings.push_back("n=" + std::to_string(n) + " seed=" + std::to_string(seed) +
                               " did not halt within max_rounds; excluded");
        continue;
      }
      rounds.push_back(static_cast<double>(s.rounds));
      refs.push_back(s.reference);
    }
    row.runs = rounds.size();
    row.median_rounds = median_of(rounds);
    row.reference = median_of(refs);
    row.ratio = row.reference > 0 ? row.median_rounds / row.reference : 0.0;
    res.rows.push_back(row);
  }
  double lo = 0, hi = 0;
  bool first = true;
  for (const auto& r : res.rows) {
    if (r.runs == 0) continue;
    lo = first ? r.ratio : std::min(lo, r.ratio);
    hi = first ? r.ratio : std::max(hi, r.ratio);
    first = false;
  }
  res.spread = lo > 0 ? hi / lo : 0.0;
  res.flagged = res.spread > 3.0;
  return res;
}

inline json scaling_json(const ExperimentConfig& base, const ScalingResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n},
                    {"median_rounds", row.median_rounds},
                    {"reference", row.reference},
                    {"ratio", row.ratio},
                    {"runs", row.runs},
                    {"excluded", row.excluded}});
  return json{{"kind", "scaling"},
              {"config", base},
              {"rows", rows},
              {"ratio_spread", r.spread},
              {"flagged", r.flagged},
              {"warnings", r.warnings},
              {"hard_violations", r.hard_violations}};
}

inline std::string scaling_csv(const ScalingResult& r) {
  std::ostringstream os;
  os << "n,median_rounds,reference,ratio,runs,excluded\n";
  for (const auto& row : r.rows)
    os << row.n << ',' << row.median_rounds << ',' << row.reference << ',' << row.ratio << ','
       << row.runs << ',' << row.excluded << '\n';
  return os.str();
}

struct LemmaConfig {
  std::uint64_t seed = 1;
  std::size_t lemma1_trials = 100'000;
  std::uint64_t lemma1_domain = 64;
  std::vector<std::uint64_t> lemma1_ranges{4, 8};
  std::size_t lemma2_n = 40;
  std::size_t lemma3_n = 48;
  double eps = 0.5;
  std::size_t samples = 500;
  std::optional<double> m_bar;  // lemma3 check; default sqrt(54 n^{1+eps} log n)
};

struct LemmaCheck {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  double sigma = 0.0;
  bool pass = false;
  json detail;
};

inline LemmaCheck lemma1_check(std::uint64_t domain, std::uint64_t range, std::size_t trials,
                               std::uint64_t seed) {
  Rng rng = derive_rng(seed, 0x4c31 + range);
  const auto e = lemma1_estimate(domain, range, 0, 1, 0, trials, rng);
  LemmaCheck c{"lemma1_range" + std::to_string(range), e.estimate, e.bound, e.sigma, e.passes(), {}};
  c.detail = {{"domain", domain}, {"range", range}, {"trials", trials}, {"hits", e.hits},
              {"bucket_limit", e.bucket_limit}, {"threshold", e.bound - 3 * e.sigma}};
  return c;
}

// Minimum over light triangles of the capture rate across `samples` X draws.
inline LemmaCheck lemma2_check(const Graph& g, double eps, std::size_t samples, std::uint64_t seed) {
  std::vector<std::size_t> hits;
  std::size_t light = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto t = lemma2_trial(g, eps, splitmix64(seed * 1'000'003ULL + s));
    if (hits.empty()) hits.assign(t.captured.size(), 0);
    light = t.captured.size();
    for (std::size_t i = 0; i < t.captured.size(); ++i) hits[i] += t.captured[i];
  }
  const double p = 2.0 / 3.0;
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(samples));
  double worst = 1.0;
  for (auto h : hits) worst = std::min(worst, static_cast<double>(h) / static_cast<double>(samples));
  LemmaCheck c{"lemma2", light ? worst : 1.0, p, sigma, false, {}};
  c.pass = c.observed >= p - 3 * sigma;
  c.detail = {{"n", g.n()}, {"eps", eps}, {"samples", samples}, {"light_triangles", light},
              {"threshold", p - 3 * sigma}};
  return c;
}

struct Lemma3Checks {
  LemmaCheck statement1, statement2;
};

inline Lemma3Checks lemma3_check(const Graph& g, double eps, double m_bar, std::size_t samples,
                                 std::uint64_t seed) {
  std::size_t v1 = 0, v2 = 0, tested = 0;
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto t = lemma3_trial(g, eps, m_bar, splitmix64(seed * 1'000'033ULL + s));
    v1 += t.statement1_violated;
    v2 += t.statement2_violated;
    tested += t.tested_sets;
    worst = std::max(worst, t.worst_not_good_fraction);
  }
  const double p = 1.0 / static_cast<double>(g.n());
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(samples));
  const double ns = static_cast<double>(samples);
  Lemma3Checks out;
  out.statement1 = {"lemma3_statement1", v1 / ns, p, sigma, v1 / ns <= p + 3 * sigma, {}};
  out.statement2 = {"lemma3_statement2", v2 / ns, p, sigma, v2 / ns <= p + 3 * sigma, {}};
  const json d{{"n", g.n()}, {"eps", eps}, {"m_bar", m_bar}, {"samples", samples},
               {"tested_u_sets", tested}, {"worst_not_good_fraction", worst},
               {"threshold", p + 3 * sigma}};
  out.statement1.detail = d;
  out.statement2.detail = d;
  return out;
}

inline json lemma_json(const LemmaCheck& c) {
  return json{{"name", c.name}, {"observed", c.observed}, {"bound", c.bound},
              {"sigma", c.sigma}, {"pass", c.pass}, {"detail", c.detail}};
}

inline ExperimentReport verify_lemmas(const LemmaConfig& lc) {
  std::vector<LemmaCheck> checks;
  for (auto r : lc.lemma1_ranges) checks.push_back(lemma1_check(lc.lemma1_domain, r, lc.lemma1_trials, lc.seed));
  const Graph g2 = gen_gnp(lc.lemma2_n, 0.5, lc.seed);
  checks.push_back(lemma2_check(g2, lc.eps, lc.samples, lc.seed));
  const Graph g3 = gen_gnp(lc.lemma3_n, 0.5, lc.seed);
  const double mb = lc.m_bar ? *lc.m_bar : m_bar_auto(lc.lemma3_n, lc.eps);
  const auto l3 = lemma3_check(g3, lc.eps, mb, lc.samples, lc.seed);
  checks.push_back(l3.statement1);
  checks.push_back(l3.statement2);

  // Edge-cover bound on every triangle set this session produced.
  std::size_t checked = 0, bad = 0;
  for (const Graph* g : {&g2, &g3}) {
    const auto all = enumerate_triangles(*g);
    const auto split = classify_heavy(*g, lc.eps);
    for (const TriangleSet* r : {&all, &split.heavy, &split.light}) {
      const auto [c, b] = rivin_check_family(*r);
      checked += c;
      bad += b;
    }
  }
  LemmaCheck l4{"lemma4", static_cast<double>(bad), 0.0, 0.0, bad == 0, {{"sets_checked", checked}}};
  checks.push_back(l4);

  ExperimentReport out;
  json arr = json::array();
  bool all_pass = true;
  for (const auto& c : checks) {
    arr.push_back(lemma_json(c));
    all_pass = all_pass && c.pass;
  }
  out.doc = {{"kind", "lemmas"}, {"seed", lc.seed}, {"checks", arr}};
  out.exit_code = bad > 0 ? kExitHard : (all_pass ? kExitOk : kExitStatistical);
  out.doc["exit_code"] = out.exit_code;
  return out;
}

}  // namespace ctri
