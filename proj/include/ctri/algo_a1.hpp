#pragma once

#include <memory>
#include <vector>

#include "algo_params.hpp"
#include "congest.hpp"

namespace ctri {

// Tracks when the node's own queued frames have fully left.
class SendClock {
 public:
  void note(const NodeContext& ctx, std::size_t rounds) {
    if (rounds == 0) return;
    done_at_ = std::max(done_at_, ctx.round() + rounds - 1);
    any_ = true;
  }
  bool idle(std::uint64_t r) const { return !any_ || r > done_at_; }
  // Halts once everything sent has been transmitted.
  void finish(NodeContext& ctx) const {
    if (idle(ctx.round())) ctx.halt();
    else ctx.wait_until(done_at_ + 1);
  }

 private:
  std::uint64_t done_at_ = 0;
  bool any_ = false;
};

inline DynBitset own_neighborhood(const NodeContext& ctx) {
  DynBitset b(ctx.n());
  for (VertexId v : ctx.neighbors()) b.set(v);
  return b;
}

// Each node j keeps every neighbor with probability n^-eps, and sends the
// sample S_j to all neighbors unless it is larger than 4 n^{1-eps}; in that
// case a one-frame overflow notice goes out instead so receivers need not wait.
// A receiver k outputs {j,k,l} for l in S_j ∩ N(k).
class A1Node : public NodeProcess {
 public:
  A1Node(double eps, std::shared_ptr<RunTrace> trace) : eps_(eps), trace_(std::move(trace)) {}

  void on_round(NodeContext& ctx) override {
    if (!started_) start(ctx);
    const auto nbrs = ctx.neighbors();
    for (std::size_t s = 0; s < nbrs.size(); ++s) {
      auto& q = ctx.frames(s);
      while (!q.empty()) {
        if (frame_tag(q.front()) == Tag::EdgeSet) list_from(ctx, nbrs[s], q.front());
        q.pop();
        ++received_;
      }
    }
    if (received_ < nbrs.size()) {
      ctx.wait();
      return;
    }
    sends_.finish(ctx);
  }

 private:
  void start(NodeContext& ctx) {
    started_ = true;
    const std::size_t n = ctx.n();
    mine_ = own_neighborhood(ctx);
    scratch_ = DynBitset(n);
    const double p = 1.0 / npow(n, eps_);
    std::vector<VertexId> s;
    for (VertexId v : ctx.neighbors())
      if (bernoulli(ctx.rng(), p)) s.push_back(v);
    const bool fits = static_cast<double>(s.size()) <= a1_set_cap(n, eps_);
    const BitString frame = fits ? make_set_frame(Tag::EdgeSet, s, ctx.id_bits())
                                 : make_flag_frame(Tag::Overflow, true);
    for (std::size_t i = 0; i < ctx.degree(); ++i) sends_.note(ctx, ctx.send_frame(i, frame));
    if (trace_ && ctx.degree() > 0) {
      if (fits) trace_->a1_max_sent = std::max(trace_->a1_max_sent, s.size());
      else ++trace_->a1_overflows;
    }
  }

  void list_from(NodeContext& ctx, VertexId j, const BitString& frame) {
    scratch_.clear();
    for (VertexId l : parse_set_frame(frame, ctx.id_bits()))
      if (l < ctx.n() && mine_.test(l)) scratch_.set(l);
    if (!scratch_.none()) ctx.output_common(j, ctx.id(), scratch_.words());
  }

  double eps_;
  std::shared_ptr<RunTrace> trace_;
  bool started_ = false;
  std::size_t received_ = 0;
  SendClock sends_;
  DynBitset mine_, scratch_;
};

inline NodeProgram algo_a1(double eps, std::shared_ptr<RunTrace> trace = nullptr) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError("eps must lie in [0,1]");
  return {"a1", [eps, trace](VertexId) { return std::make_unique<A1Node>(eps, trace); }};
}

}  // namespace ctri
