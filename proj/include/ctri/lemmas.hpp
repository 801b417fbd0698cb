#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "algo_params.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace ctri {

// X with each vertex included independently with probability 1/(9 n^eps).
inline DynBitset sample_x(std::size_t n, double eps, Rng& rng) {
  DynBitset x(n);
  const double p = x_probability(n, eps);
  for (std::size_t v = 0; v < n; ++v)
    if (bernoulli(rng, p)) x.set(v);
  return x;
}

struct Lemma2Trial {
  TriangleSet light;
  std::vector<std::uint8_t> captured;  // all three edges in Delta(X), per light triangle
  DynBitset x;
};

inline Lemma2Trial lemma2_trial(const Graph& g, double eps, std::uint64_t seed) {
  Lemma2Trial t;
  t.light = classify_heavy(g, eps).light;
  Rng rng = derive_rng(seed, 0x4c32);
  t.x = sample_x(g.n(), eps, rng);
  const DeltaOracle delta(g, t.x);
  t.captured.reserve(t.light.size());
  for (const Triangle& tri : t.light) {
    bool all = true;
    for (const Edge& e : tri.edges()) all = all && delta.contains(e.u, e.v);
    t.captured.push_back(all);
  }
  return t;
}

// Goodness of every node of U for (U, X), computed centrally.
class GoodnessOracle {
 public:
  GoodnessOracle(const Graph& g, const DynBitset& x, double m_bar)
      : g_(g), m_bar_(m_bar), delta_rows_(g.n(), DynBitset(g.n())), nbr_rows_(g.n(), DynBitset(g.n())) {
    const DeltaOracle d(g, x);
    const std::size_t n = g.n();
    for (VertexId j = 0; j < n; ++j) {
      for (VertexId l = 0; l < n; ++l)
        if (d.contains(j, l)) delta_rows_[j].set(l);
      for (VertexId k : g.neighbors(j)) nbr_rows_[j].set(k);
    }
  }

  // |S_U^X(j,k)| = |{l in U : {j,l} in Delta(X), l in N(k)}|
  std::size_t s_size(const DynBitset& u, VertexId j, VertexId k) const {
    std::size_t c = 0;
    const auto a = delta_rows_[j].words(), b = nbr_rows_[k].words(), w = u.words();
    for (std::size_t i = 0; i < a.size(); ++i) c += static_cast<std::size_t>(std::popcount(a[i] & b[i] & w[i]));
    return c;
  }

  std::size_t t_bar_size(const DynBitset& u, VertexId j) const {
    std::size_t c = 0;
    for (VertexId k : g_.neighbors(j))
      if (u.test(k) && static_cast<double>(s_size(u, j, k)) > m_bar_) ++c;
    return c;
  }

  // Nodes of U that are m_bar-good for (U, X).
  DynBitset good(const DynBitset& u) const {
    DynBitset out(g_.n());
    u.for_each([&](std::size_t j) {
      if (static_cast<double>(t_bar_size(u, static_cast<VertexId>(j))) <= m_bar_) out.set(j);
    });
    return out;
  }

 private:
  const Graph& g_;
  double m_bar_;
  std::vector<DynBitset> delta_rows_;
  std::vector<DynBitset> nbr_rows_;
};

// U_1 = V, U_{i+1} = U_i minus its good nodes, until empty or stuck.
struct Recursion {
  std::vector<DynBitset> u;     // U at the start of each iteration
  std::vector<DynBitset> good;  // U' of each iteration
  bool terminated = false;
};

inline Recursion central_recursion(const Graph& g, const GoodnessOracle& oracle, std::size_t max_iter) {
  Recursion rec;
  DynBitset u(g.n());
  for (std::size_t v = 0; v < g.n(); ++v) u.set(v);
  while (!u.none() && rec.u.size() < max_iter) {
    DynBitset gd = oracle.good(u);
    rec.u.push_back(u);
    rec.good.push_back(gd);
    if (gd.none()) return rec;
    auto uw = u.words();
    auto gw = gd.words();
    for (std::size_t i = 0; i < uw.size(); ++i) uw[i] &= ~gw[i];
  }
  rec.terminated = u.none();
  return rec;
}

struct Lemma3Trial {
  DynBitset x;
  double m_bar = 0.0;
  std::size_t tested_sets = 0;
  double worst_not_good_fraction = 0.0;
  bool statement1_violated = false;  // some tested U has more than |U|/2 nodes that are not good
  bool statement2_violated = false;  // some pair of Delta(X) has m >= 27 n^eps log n
  std::vector<std::size_t> recursion_u_sizes;
  bool recursion_terminated = false;
};

inline Lemma3Trial lemma3_trial(const Graph& g, double eps, double m_bar, std::uint64_t seed,
                                std::size_t random_halves = 8) {
  const std::size_t n = g.n();
  Lemma3Trial t;
  t.m_bar = m_bar;
  Rng rng = derive_rng(seed, 0x4c33);
  t.x = sample_x(n, eps, rng);
  const GoodnessOracle oracle(g, t.x, m_bar);

  auto check = [&](const DynBitset& u) {
    const std::size_t size = u.count();
    if (size == 0) return;
    const std::size_t not_good = size - oracle.good(u).count();
    ++t.tested_sets;
    t.worst_not_good_fraction =
        std::max(t.worst_not_good_fraction, static_cast<double>(not_good) / static_cast<double>(size));
    if (2 * not_good > size) t.statement1_violated = true;
  };

  DynBitset all(n);
  for (std::size_t v = 0; v < n; ++v) all.set(v);
  check(all);

  std::vector<VertexId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t h = 0; h < random_halves; ++h) {
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[uniform_below(rng, i)]);
    DynBitset u(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) u.set(perm[i]);
    check(u);
  }

  const Recursion rec = central_recursion(g, oracle, static_cast<std::size_t>(log2n(n)) + 2);
  for (std::size_t i = 1; i < rec.u.size(); ++i) check(rec.u[i]);
  for (const auto& u : rec.u) t.recursion_u_sizes.push_back(u.count());
  t.recursion_terminated = rec.terminated;

  const double limit = 27.0 * npow(n, eps) * log2n(n);
  const DeltaOracle d(g, t.x);
  for (VertexId j = 0; j < n && !t.statement2_violated; ++j)
    for (VertexId l = j + 1; l < n; ++l)
      if (d.contains(j, l) && static_cast<double>(pair_common_neighbors(g, j, l)) >= limit) {
        t.statement2_violated = true;
        break;
      }
  return t;
}

}  // namespace ctri
