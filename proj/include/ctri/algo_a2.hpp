#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "algo_a1.hpp"
#include "algo_params.hpp"
#include "congest.hpp"
#include "hash_family.hpp"

namespace ctri {

// Every node i draws h_i from the degree-2 polynomial family onto
// {0..max(1, floor(n^{eps/2}))-1} and sends it to its neighbors. Node j then
// sends E_a^j = {l in N(j) : h_a(l) = 0} to each neighbor a when it is within
// 8 + 4n/floor(n^{eps/2}) (an overflow notice otherwise). Each node outputs
// the triangles whose three edges it received.
class A2Node : public NodeProcess {
 public:
  A2Node(double eps, std::shared_ptr<RunTrace> trace) : eps_(eps), trace_(std::move(trace)) {}

  void on_round(NodeContext& ctx) override {
    if (phase_ == Phase::Start) start(ctx);
    if (phase_ == Phase::Hashes) collect_hashes(ctx);
    if (phase_ == Phase::Edges) collect_edges(ctx);
    if (phase_ == Phase::Done) sends_.finish(ctx);
    else ctx.wait();
  }

 private:
  enum class Phase { Start, Hashes, Edges, Done };

  void start(NodeContext& ctx) {
    const std::size_t n = ctx.n();
    family_ = HashFamily::standard(n, a2_range(n, eps_));
    const HashFn h = sample_hash(3, n, family_.range, ctx.rng());
    const BitString frame = make_hash_frame(h);
    for (std::size_t i = 0; i < ctx.degree(); ++i) sends_.note(ctx, ctx.send_frame(i, frame));
    hashes_.assign(ctx.degree(), std::nullopt);
    received_.assign(ctx.degree(), {});
    phase_ = Phase::Hashes;
  }

  void collect_hashes(NodeContext& ctx) {
    for (std::size_t s = 0; s < ctx.degree(); ++s) {
      auto& q = ctx.frames(s);
      if (hashes_[s] || q.empty()) continue;
      hashes_[s] = parse_hash_frame(q.front(), family_);
      q.pop();
      ++have_;
    }
    if (have_ < ctx.degree()) return;

    const std::size_t n = ctx.n();
    const double cap = a2_set_cap(n, eps_);
    const auto nbrs = ctx.neighbors();
    std::vector<VertexId> e;
    for (std::size_t s = 0; s < nbrs.size(); ++s) {
      e.clear();
      for (VertexId l : nbrs)
        if (hashes_[s]->eval_unchecked(l) == 0) e.push_back(l);
      if (static_cast<double>(e.size()) <= cap) {
        sends_.note(ctx, ctx.send_set(nbrs[s], Tag::EdgeSet, e));
        if (trace_) trace_->a2_max_sent = std::max(trace_->a2_max_sent, e.size());
      } else {
        sends_.note(ctx, ctx.send_frame(s, make_flag_frame(Tag::Overflow, true)));
        if (trace_) ++trace_->a2_overflows;
      }
    }
    hashes_.clear();
    phase_ = Phase::Edges;
  }

  void collect_edges(NodeContext& ctx) {
    for (std::size_t s = 0; s < ctx.degree(); ++s) {
      auto& q = ctx.frames(s);
      while (!q.empty()) {
        if (frame_tag(q.front()) == Tag::EdgeSet)
          received_[s] = parse_set_frame(q.front(), ctx.id_bits());
        q.pop();
        ++got_;
      }
    }
    if (got_ < ctx.degree()) return;
    list(ctx);
    phase_ = Phase::Done;
  }

  // F_i as adjacency rows; each triangle {u<v<w} is emitted once from (u,v).
  void list(NodeContext& ctx) {
    const std::size_t n = ctx.n();
    std::vector<DynBitset> adj(n);
    auto touch = [&](VertexId v) -> DynBitset& {
      if (adj[v].size() == 0) adj[v] = DynBitset(n);
      return adj[v];
    };
    const auto nbrs = ctx.neighbors();
    for (std::size_t s = 0; s < nbrs.size(); ++s)
      for (VertexId l : received_[s]) {
        if (l >= n || l == nbrs[s]) continue;
        touch(nbrs[s]).set(l);
        touch(l).set(nbrs[s]);
      }
    received_.clear();

    std::vector<std::uint64_t> third(DynBitset::word_count(n));
    for (VertexId u = 0; u < n; ++u) {
      if (adj[u].size() == 0) continue;
      const auto au = adj[u].words();
      adj[u].for_each([&](std::size_t vv) {
        const auto v = static_cast<VertexId>(vv);
        if (v <= u) return;
        const auto av = adj[v].words();
        const std::size_t vw = v / 64;
        bool any = false;
        std::fill(third.begin(), third.begin() + static_cast<std::ptrdiff_t>(vw), 0);
        for (std::size_t i = vw; i < third.size(); ++i) {
          third[i] = au[i] & av[i];
          any |= third[i] != 0;
        }
        third[vw] &= (v % 64 == 63) ? 0 : (~std::uint64_t{0} << (v % 64 + 1));
        if (any) ctx.output_common(u, v, third);
      });
    }
  }

  double eps_;
  std::shared_ptr<RunTrace> trace_;
  Phase phase_ = Phase::Start;
  HashFamily family_;
  std::vector<std::optional<HashFn>> hashes_;
  std::size_t have_ = 0;
  std::vector<std::vector<VertexId>> received_;
  std::size_t got_ = 0;
  SendClock sends_;
};

inline NodeProgram algo_a2(double eps, std::shared_ptr<RunTrace> trace = nullptr) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError("eps must lie in [0,1]");
  return {"a2", [eps, trace](VertexId) { return std::make_unique<A2Node>(eps, trace); }};
}

}  // namespace ctri
