#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "ctri/ctri.hpp"
#include "oracles.hpp"

using namespace ctri;

namespace {

std::vector<VertexId> members(const std::vector<std::uint8_t>& flags) {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < flags.size(); ++v)
    if (flags[v]) out.push_back(v);
  return out;
}

// Triangles whose three edges avoid every N(x), from the set-algebra oracle.
std::set<std::tuple<VertexId, VertexId, VertexId>> delta_triangles(const Graph& g,
                                                                   const std::vector<VertexId>& x) {
  const auto d = oracle::delta_pairs(g, x);
  std::set<std::tuple<VertexId, VertexId, VertexId>> out;
  for (const auto& t : oracle::triple_scan(g)) {
    const auto [a, b, c] = t;
    if (d.count({a, b}) && d.count({a, c}) && d.count({b, c})) out.insert(t);
  }
  return out;
}

bool covers(const TriangleSet& big, const std::set<std::tuple<VertexId, VertexId, VertexId>>& small) {
  const auto b = oracle::as_tuples(big);
  return std::includes(b.begin(), b.end(), small.begin(), small.end());
}

RunReport run_seed(const Graph& g, const NodeProgram& p, std::uint64_t seed, unsigned beta = 2,
                   bool record = false) {
  RunOptions opt;
  opt.seed = seed;
  opt.record_node_outputs = record;
  return run(Network(g, beta), p, opt);
}

double sigma(double p, double n) { return std::sqrt(std::max(p * (1 - p), 1e-12) / n); }

}  // namespace

// ---------------------------------------------------------------- parameters

TEST(Params, FormulaValues) {
  EXPECT_NEAR(m_bar_auto(48, 0.5), std::sqrt(54.0 * std::pow(48.0, 1.5) * std::log2(48.0)), 1e-9);
  EXPECT_NEAR(x_probability(64, 0.5), 1.0 / 72.0, 1e-15);
  EXPECT_EQ(a2_range(64, 0.5), 2u);     // 64^{1/4} = 2.83
  EXPECT_EQ(a2_range(256, 0.5), 4u);    // exactly 4, guarded floor
  EXPECT_EQ(a2_range(10, 0.0), 1u);
  EXPECT_DOUBLE_EQ(a2_set_cap(64, 0.5), 8.0 + 4.0 * 64 / 2);
  EXPECT_DOUBLE_EQ(a1_set_cap(100, 0.5), 40.0);
  EXPECT_EQ(a3_cap(64, 0.5, 4.0), static_cast<std::uint64_t>(std::ceil(4.0 * (8.0 + std::pow(64.0, 0.75) * 6.0))));
}

TEST(Params, EpsilonChoices) {
  // n^eps = n^{1/3} / (log n)^{2/3}
  for (std::size_t n : {64u, 1000u, 1u << 20}) {
    const auto f = find_eps(n);
    const double target = std::cbrt(static_cast<double>(n)) / std::pow(std::log2(n), 2.0 / 3.0);
    if (!f.clamped) { EXPECT_NEAR(std::pow(static_cast<double>(n), f.eps), target, 1e-6 * target); }
    const auto l = list_eps(n);
    const double lt = std::sqrt(static_cast<double>(n)) / std::pow(std::log2(n), 2.0);
    if (!l.clamped) { EXPECT_NEAR(std::pow(static_cast<double>(n), l.eps), lt, 1e-6 * lt); }
  }
  // Below 1: clamped to 0 at every desk size.
  for (std::size_t n : {4u, 32u, 64u, 96u, 512u, 4096u}) {
    EXPECT_TRUE(list_eps(n).clamped);
    EXPECT_EQ(list_eps(n).eps, 0.0);
  }
  EXPECT_FALSE(list_eps(std::size_t{1} << 20).clamped);
  EXPECT_TRUE(find_eps(1).clamped);
  EXPECT_GE(find_eps(64).eps, 0.0);
}

TEST(Params, Repetitions) {
  EXPECT_EQ(find_reps(0.1), static_cast<std::size_t>(std::ceil(4 * std::log(10.0))));
  EXPECT_EQ(list_reps(64), 18u);
  EXPECT_THROW(find_reps(0.0), ConfigError);
  EXPECT_THROW(find_reps(1.0), ConfigError);
}

TEST(Params, ConfigValidation) {
  AlgoConfig c;
  c.eps = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.m_bar = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.log_base = 10;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Params, PlanLayout) {
  const auto p = list_plan(64, 2);
  EXPECT_EQ(p.reps, 18u);
  ASSERT_EQ(p.stages.size(), 36u);
  for (std::size_t i = 1; i < p.stages.size(); ++i)
    EXPECT_EQ(p.stages[i].start, p.stages[i - 1].start + p.stages[i - 1].length);
  EXPECT_EQ(p.stages[0].kind, StageKind::A2);
  EXPECT_EQ(p.stages[1].kind, StageKind::A3);
  EXPECT_EQ(p.stages[1].length, a3_cap(64, 0.0, 4.0));
}

// ---------------------------------------------------------------------- A1

TEST(A1, TriangleFreeOutputsNothing) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Graph g = gen_planted(40, PlantedKind::TriangleFree, {}, s).graph;
    const auto rep = run_seed(g, algo_a1(0.3), s);
    EXPECT_TRUE(rep.output.empty());
    EXPECT_TRUE(rep.spurious.empty());
    EXPECT_TRUE(rep.halted);
  }
}

TEST(A1, K3WithEpsZero) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto rep = run_seed(complete_graph(3), algo_a1(0.0), s);
    ASSERT_EQ(rep.output.size(), 1u);
    EXPECT_TRUE(rep.output.contains(Triangle{0, 1, 2}));
  }
}

TEST(A1, HeavyEdgeMonteCarlo) {
  const std::size_t n = 40, seeds = 200;
  const double eps = 0.5;
  std::size_t hits = 0;
  double ref = 0.0;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    PlantedParams pp;
    pp.h = 20;
    const auto pg = gen_planted(n, PlantedKind::HeavyEdge, pp, s);
    const auto heavy = classify_heavy(pg.graph, eps).heavy;
    ASSERT_FALSE(heavy.empty());
    const double m = static_cast<double>(oracle::common(pg.graph, pg.heavy_edge->u, pg.heavy_edge->v));
    ref += 1.0 - std::pow(1.0 - std::pow(n, -eps), m);
    auto trace = std::make_shared<RunTrace>();
    const auto rep = run_seed(pg.graph, algo_a1(eps, trace), 1000 + s);
    EXPECT_TRUE(rep.spurious.empty());
    EXPECT_LE(static_cast<double>(trace->a1_max_sent), a1_set_cap(n, eps));
    hits += heavy.minus(rep.output).size() < heavy.size();
  }
  const double rate = static_cast<double>(hits) / seeds;
  ref /= seeds;
  EXPECT_GE(rate, 0.4);
  EXPECT_GE(rate, ref - 3 * sigma(ref, seeds)) << "reference " << ref;
}

// ---------------------------------------------------------------------- A2

TEST(A2, K3WithEpsZeroListedByEveryNode) {
  const auto rep = run_seed(complete_graph(3), algo_a2(0.0), 1, 2, true);
  EXPECT_EQ(rep.output.size(), 1u);
  for (VertexId v = 0; v < 3; ++v) EXPECT_TRUE(rep.node_outputs[v].contains(Triangle{0, 1, 2}));
}

TEST(A2, TriangleFreeOutputsNothing) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Graph g = gen_planted(40, PlantedKind::TriangleFree, {}, s).graph;
    const auto rep = run_seed(g, algo_a2(0.5), s);
    EXPECT_TRUE(rep.output.empty());
    EXPECT_TRUE(rep.spurious.empty());
  }
}

TEST(A2, HeavyEdgeDetectionAgainstReference) {
  const std::size_t n = 64, seeds = 300;
  const double eps = 0.5;
  double found = 0, ref = 0, total = 0;
  std::size_t max_sent = 0;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    PlantedParams pp;
    pp.h = 16;
    const auto pg = gen_planted(n, PlantedKind::HeavyEdge, pp, s);
    const auto heavy = classify_heavy(pg.graph, eps).heavy;
    auto trace = std::make_shared<RunTrace>();
    const auto rep = run_seed(pg.graph, algo_a2(eps, trace), 5000 + s);
    EXPECT_TRUE(rep.spurious.empty());
    max_sent = std::max(max_sent, trace->a2_max_sent);
    for (const Triangle& t : heavy) {
      std::size_t m = 0;
      for (const Edge& e : t.edges()) m = std::max(m, oracle::common(pg.graph, e.u, e.v));
      ref += 1.0 - std::pow(1.0 - 3.0 / (4.0 * std::pow(n, eps)), static_cast<double>(m));
      found += rep.output.contains(t);
      total += 1;
    }
  }
  EXPECT_LE(static_cast<double>(max_sent), a2_set_cap(n, eps));
  const double rate = found / total;
  ref /= total;
  EXPECT_GE(rate, ref - 3 * sigma(ref, seeds)) << "reference " << ref;
}

// ------------------------------------------------------------------- A(X,m)

TEST(SubA, EmptyXOnK3) {
  auto trace = std::make_shared<RunTrace>();
  trace->record_steps = true;
  const auto rep = run_seed(complete_graph(3), algo_sub_a({0, 0, 0}, 3.0, trace), 1);
  ASSERT_EQ(rep.output.size(), 1u);
  const auto& t = trace->sub_a.at(0);
  ASSERT_FALSE(t.entries.empty());
  for (const auto& e : t.entries) EXPECT_EQ(e.iteration, 1u);
  EXPECT_TRUE(t.complete());
  EXPECT_EQ(t.iterations(), 1u);
}

TEST(SubA, FullXOnK3) {
  const auto rep = run_seed(complete_graph(3), algo_sub_a({1, 1, 1}, 3.0), 1);
  EXPECT_TRUE(rep.spurious.empty());
  EXPECT_TRUE(rep.halted);
}

TEST(SubA, OracleCrossCheckGnp48) {
  const Graph g = gen_gnp(48, 0.5, 13);
  const double eps = 0.5, m_bar = m_bar_auto(48, eps);
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng = derive_rng(s, 0x4c32);
    const DynBitset x = sample_x(48, eps, rng);
    std::vector<std::uint8_t> flags(48, 0);
    x.for_each([&](std::size_t v) { flags[v] = 1; });
    const auto rep = run_seed(g, algo_sub_a(flags, m_bar), s);
    EXPECT_TRUE(rep.halted);
    EXPECT_TRUE(rep.spurious.empty());
    EXPECT_TRUE(covers(rep.output, delta_triangles(g, members(flags))));
  }
}

TEST(SubA, DenseXCrossCheck) {
  // Larger X so Delta(X) is a proper, nonempty part of the pairs.
  const Graph g = gen_gnp(30, 0.3, 5);
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(s);
    std::vector<std::uint8_t> flags(30, 0);
    for (auto& f : flags) f = bernoulli(rng, 0.1);
    const auto want = delta_triangles(g, members(flags));
    const auto rep = run_seed(g, algo_sub_a(flags, 1000.0), s);
    EXPECT_TRUE(covers(rep.output, want));
  }
}

TEST(SubA, TrichotomyAndIterationsMatchOracle) {
  // Pick m_bar so the central recursion needs several iterations and ends.
  std::size_t checked = 0;
  for (std::uint64_t gs = 0; gs < 6; ++gs) {
    const Graph g = gen_gnp(36, 0.35, 40 + gs);
    Rng rng(gs);
    std::vector<std::uint8_t> flags(36, 0);
    for (auto& f : flags) f = bernoulli(rng, 0.05);
    const auto xs = members(flags);
    double m_bar = 0;
    oracle::CentralSubA want;
    for (double m = 1; m < 36; m += 1) {
      auto c = oracle::central_sub_a(g, xs, m, 40);
      if (c.terminated && c.u_seq.size() >= 3) {
        m_bar = m;
        want = c;
        break;
      }
    }
    if (m_bar == 0) continue;
    ++checked;

    auto trace = std::make_shared<RunTrace>();
    trace->record_steps = true;
    const auto rep = run_seed(g, algo_sub_a(flags, m_bar, trace), gs);
    ASSERT_TRUE(rep.halted);
    const SubATrace& t = trace->sub_a.at(0);
    ASSERT_EQ(t.iterations(), want.u_seq.size());
    EXPECT_EQ(t.u_sizes().size(), want.u_seq.size());

    const auto delta = oracle::delta_pairs(g, xs);
    const auto dtri = delta_triangles(g, xs);
    for (std::uint32_t it = 1; it <= t.iterations(); ++it) {
      const auto& u = want.u_seq[it - 1];
      const auto& good = want.good_seq[it - 1];
      // The distributed U' equals the oracle's good set.
      std::set<VertexId> traced_good;
      for (VertexId v = 0; v < 36; ++v)
        if (t.exit_iteration[v] == it) traced_good.insert(v);
      EXPECT_EQ(traced_good, good) << "iteration " << it;

      std::set<std::tuple<VertexId, VertexId, VertexId>> step1, step3;
      for (const auto& e : t.entries) {
        if (e.iteration != it) continue;
        (e.step == 1 ? step1 : step3).insert({e.triangle.a, e.triangle.b, e.triangle.c});
      }
      for (const auto& tri : dtri) {
        const auto [a, b, c] = tri;
        if (!u.count(a) || !u.count(b) || !u.count(c)) continue;
        const VertexId vs[3] = {a, b, c};
        bool type_a = false, type_b = false;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            // (a): |S(vj, vk)| <= m_bar and the third vertex lies in it
            if (static_cast<double>(oracle::s_size(g, delta, u, vs[i], vs[j])) <= m_bar) type_a = true;
            // (b): vj good and vk in T-bar(vj)
            if (good.count(vs[i]) && oracle::t_bar(g, delta, u, vs[i], m_bar).count(vs[j])) type_b = true;
          }
        const bool type_c = !good.count(a) && !good.count(b) && !good.count(c);
        EXPECT_TRUE(type_a || type_b || type_c);
        if (type_a) {
          EXPECT_TRUE(step1.count(tri)) << "type (a) not listed from an S-set, iteration " << it;
        }
        if (type_b) {
          EXPECT_TRUE(step3.count(tri)) << "type (b) not listed from a T-bar set, iteration " << it;
        }
      }
    }
    EXPECT_TRUE(covers(rep.output, dtri));
  }
  EXPECT_GE(checked, 2u);
}

TEST(SubA, UHalvesWhenFewNodesAreBad) {
  const Graph g = gen_gnp(48, 0.5, 2);
  const double eps = 0.5, m_bar = m_bar_auto(48, eps);
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto trace = std::make_shared<RunTrace>();
    Rng rng = derive_rng(s, 0x4c32);
    const DynBitset x = sample_x(48, eps, rng);
    std::vector<std::uint8_t> flags(48, 0);
    x.for_each([&](std::size_t v) { flags[v] = 1; });
    run_seed(g, algo_sub_a(flags, m_bar, trace), s);
    const auto sizes = trace->sub_a.at(0).u_sizes();
    const GoodnessOracle oracle(g, x, m_bar);
    const Recursion rec = central_recursion(g, oracle, 64);
    bool statement1 = rec.terminated;
    for (std::size_t i = 0; i < rec.u.size(); ++i)
      statement1 = statement1 && 2 * (rec.u[i].count() - rec.good[i].count()) <= rec.u[i].count();
    if (!statement1) continue;
    EXPECT_LE(sizes.size(), std::floor(std::log2(48.0)) + 1);
    for (std::size_t i = 1; i < sizes.size(); ++i) EXPECT_LE(2 * sizes[i], sizes[i - 1]);
  }
}

// ---------------------------------------------------------------------- A3

TEST(A3, TriangleFreeOutputsNothing) {
  AlgoConfig cfg;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Graph g = gen_planted(40, PlantedKind::TriangleFree, {}, s).graph;
    EXPECT_TRUE(run_seed(g, algo_a3(cfg), s).output.empty());
  }
}

TEST(A3, SparseTrianglesDetectionAndCap) {
  const std::size_t n = 48, seeds = 200;
  AlgoConfig cfg;
  cfg.eps = 0.5;
  const auto cap = a3_cap(n, cfg.eps, cfg.c_stop);
  double found = 0, total = 0;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    PlantedParams pp;
    pp.t = 5;
    const auto pg = gen_planted(n, PlantedKind::SparseTriangles, pp, s);
    const auto light = classify_heavy(pg.graph, cfg.eps).light;
    const auto rep = run_seed(pg.graph, algo_a3(cfg), 9000 + s);
    EXPECT_LE(rep.rounds, cap);
    EXPECT_TRUE(rep.spurious.empty());
    for (const Triangle& t : pg.planted) {
      EXPECT_TRUE(light.contains(t));
      found += rep.output.contains(t);
      total += 1;
    }
  }
  EXPECT_GE(found / total, 0.4);
}

TEST(A3, RoundCapEnforced) {
  // A tiny m_bar makes nobody good, so only the cap stops the run.
  AlgoConfig cfg;
  cfg.eps = 0.5;
  cfg.m_bar = 0.5;
  cfg.c_stop = 0.5;
  const Graph g = complete_graph(20);
  const auto rep = run_seed(g, algo_a3(cfg), 1);
  EXPECT_TRUE(rep.halted);
  EXPECT_EQ(rep.rounds, a3_cap(20, 0.5, 0.5));
}

// ------------------------------------------------------------ compositions

TEST(Find, TriangleFreeNeverFinds) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Graph g = gen_planted(48, PlantedKind::TriangleFree, {}, s).graph;
    const auto rep = run_seed(g, find_triangle(0.1), s);
    EXPECT_TRUE(rep.output.empty());
    EXPECT_TRUE(rep.halted);
  }
}

TEST(Find, K3AlwaysFound) {
  std::size_t hits = 0;
  for (std::uint64_t s = 0; s < 100; ++s) hits += !run_seed(complete_graph(3), find_triangle(0.1), s).output.empty();
  EXPECT_GE(hits, 90u);
}

TEST(Find, Gnp64SuccessRate) {
  const Graph g = gen_gnp(64, 0.5, 77);
  std::size_t hits = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto rep = run_seed(g, find_triangle(0.1), s);
    EXPECT_TRUE(rep.spurious.empty());
    hits += !rep.output.empty();
  }
  EXPECT_GE(hits, 90u);
}

TEST(List, K4AllFourEverySeed) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto rep = run_seed(complete_graph(4), list_triangles(), s);
    EXPECT_EQ(rep.output.size(), 4u) << "seed " << s;
  }
}

TEST(List, TriangleFreeEmpty) {
  const Graph g = gen_planted(40, PlantedKind::TriangleFree, {}, 1).graph;
  EXPECT_TRUE(run_seed(g, list_triangles(), 1).output.empty());
}

TEST(List, MatchesOracleOnSmallGnp) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Graph g = gen_gnp(32, 0.5, s);
    const auto rep = run_seed(g, list_triangles(), s);
    EXPECT_EQ(oracle::as_tuples(rep.output), oracle::triple_scan(g));
    EXPECT_TRUE(rivin_holds(rep.output));
  }
}

TEST(List, MonotoneCoverage) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Graph g = gen_gnp(40, 0.3, 100 + s);
    const auto full = run_seed(g, list_triangles(), s).output;
    const auto one = run_seed(g, list_single_pass(), s).output;
    EXPECT_EQ(one.minus(full).size(), 0u);
  }
}

TEST(List, NoWindowOverrunsAndCapsRespected) {
  for (unsigned beta : {2u, 4u}) {
    auto trace = std::make_shared<RunTrace>();
    const Graph g = gen_gnp(64, 0.5, 3);
    const auto rep = run_seed(g, list_triangles({}, trace), 1, beta);
    EXPECT_EQ(trace->window_overruns, 0u);
    EXPECT_LE(rep.rounds, list_plan(64, beta).total_rounds());
    EXPECT_LE(rep.max_edge_round_bits, rep.bandwidth);
  }
}

// ------------------------------------------------------------------ lemmas

TEST(Lemma2, EmptyXCapturesEverything) {
  const Graph g = gen_gnp(30, 0.5, 1);
  bool saw_empty = false;
  for (std::uint64_t s = 0; s < 200 && !saw_empty; ++s) {
    const auto t = lemma2_trial(g, 0.9, s);
    if (!t.x.none()) continue;
    saw_empty = true;
    for (auto c : t.captured) EXPECT_TRUE(c);
    EXPECT_EQ(t.captured.size(), t.light.size());
  }
  EXPECT_TRUE(saw_empty);
}

TEST(Lemma2, AllHeavyGivesEmptyVector) {
  EXPECT_TRUE(lemma2_trial(complete_graph(6), 0.0, 3).captured.empty());
}

TEST(Lemma2, CaptureMatchesOracle) {
  const Graph g = gen_gnp(25, 0.5, 4);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto t = lemma2_trial(g, 0.5, s);
    std::vector<VertexId> xs;
    t.x.for_each([&](std::size_t v) { xs.push_back(static_cast<VertexId>(v)); });
    const auto d = oracle::delta_pairs(g, xs);
    std::size_t i = 0;
    for (const Triangle& tri : t.light) {
      const bool want = d.count({tri.a, tri.b}) && d.count({tri.a, tri.c}) && d.count({tri.b, tri.c});
      EXPECT_EQ(static_cast<bool>(t.captured[i++]), want);
    }
  }
}

TEST(Lemma3, K3EveryNodeGood) {
  const auto t = lemma3_trial(complete_graph(3), 0.5, 3.0, 1);
  EXPECT_DOUBLE_EQ(t.worst_not_good_fraction, 0.0);
  EXPECT_FALSE(t.statement1_violated);
  EXPECT_TRUE(t.recursion_terminated);
}

TEST(Lemma3, GoodnessOracleMatchesSetOracle) {
  const Graph g = gen_gnp(20, 0.5, 6);
  const std::vector<VertexId> xs{3, 11};
  const DynBitset x = vertex_set(20, xs);
  const auto delta = oracle::delta_pairs(g, xs);
  for (double m : {2.0, 4.0, 6.0}) {
    const GoodnessOracle go(g, x, m);
    DynBitset u(20);
    std::set<VertexId> us;
    for (VertexId v = 0; v < 20; v += 2) {
      u.set(v);
      us.insert(v);
    }
    for (VertexId j : us) {
      EXPECT_EQ(go.t_bar_size(u, j), oracle::t_bar(g, delta, us, j, m).size());
      for (VertexId k : us) EXPECT_EQ(go.s_size(u, j, k), oracle::s_size(g, delta, us, j, k));
    }
    const auto rec = central_recursion(g, go, 40);
    const auto want = oracle::central_sub_a(g, xs, m, 40);
    ASSERT_EQ(rec.u.size(), want.u_seq.size());
    for (std::size_t i = 0; i < rec.u.size(); ++i) EXPECT_EQ(rec.good[i].count(), want.good_seq[i].size());
  }
}
