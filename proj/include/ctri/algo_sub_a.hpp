#pragma once

#include <memory>
#include <vector>

#include "algo_a1.hpp"
#include "algo_params.hpp"
#include "congest.hpp"

namespace ctri {

// Per-node run of A(X, m_bar).
//
// Every channel carries the frames of one iteration in a fixed order:
//   S-set or overflow, optional T-bar set, U-flag
// so a node can move on as soon as it holds the frames it needs, without a
// global clock. A good node leaves U after its iteration; the U-flag it sends
// then carries 0. Flags go to current U-neighbors only, the only nodes that
// still listen.
class SubANode : public NodeProcess {
 public:
  SubANode(bool in_x, double m_bar, std::shared_ptr<RunTrace> trace, std::size_t trace_index)
      : in_x_(in_x), m_bar_(m_bar), trace_(std::move(trace)), trace_index_(trace_index) {}

  void on_round(NodeContext& ctx) override {
    if (phase_ == Phase::Start) start(ctx);
    bool moved = true;
    while (moved) {
      moved = false;
      switch (phase_) {
        case Phase::XFlags: moved = collect_x_flags(ctx); break;
        case Phase::NeighborX: moved = collect_neighbor_x(ctx); break;
        case Phase::Step41: moved = collect_step41(ctx); break;
        case Phase::Step45: moved = collect_step45(ctx); break;
        default: break;
      }
    }
    if (phase_ == Phase::Done) sends_.finish(ctx);
    else ctx.wait();
  }

 private:
  enum class Phase { Start, XFlags, NeighborX, Step41, Step45, Done };

  SubATrace* trace(std::size_t n) {
    return trace_ ? &trace_->sub_a_at(trace_index_, n) : nullptr;
  }

  void start(NodeContext& ctx) {
    const std::size_t d = ctx.degree();
    if (auto* t = trace(ctx.n())) {
      t->in_x[ctx.id()] = in_x_;
      t->start_round = ctx.round();
      t->m_bar = m_bar_;
    }
    mine_ = own_neighborhood(ctx);
    scratch_ = DynBitset(ctx.n());
    nbr_x_.assign(d, 0);
    nbr_nx_.assign(d, {});
    flag_seen_.assign(d, 0);
    const BitString f = make_flag_frame(Tag::XFlag, in_x_);
    for (std::size_t s = 0; s < d; ++s) sends_.note(ctx, ctx.send_frame(s, f));
    phase_ = Phase::XFlags;
  }

  bool collect_x_flags(NodeContext& ctx) {
    for (std::size_t s = 0; s < ctx.degree(); ++s) {
      auto& q = ctx.frames(s);
      if (flag_seen_[s] || q.empty()) continue;
      nbr_x_[s] = parse_flag_frame(q.front());
      q.pop();
      flag_seen_[s] = 1;
      ++count_;
    }
    if (count_ < ctx.degree()) return false;
    std::vector<VertexId> nx;
    const auto nbrs = ctx.neighbors();
    for (std::size_t s = 0; s < nbrs.size(); ++s)
      if (nbr_x_[s]) nx.push_back(nbrs[s]);
    const BitString f = make_set_frame(Tag::NeighborhoodX, nx, ctx.id_bits());
    for (std::size_t s = 0; s < nbrs.size(); ++s) sends_.note(ctx, ctx.send_frame(s, f));
    std::fill(flag_seen_.begin(), flag_seen_.end(), 0);
    count_ = 0;
    phase_ = Phase::NeighborX;
    return true;
  }

  bool collect_neighbor_x(NodeContext& ctx) {
    for (std::size_t s = 0; s < ctx.degree(); ++s) {
      auto& q = ctx.frames(s);
      if (flag_seen_[s] || q.empty()) continue;
      nbr_nx_[s] = parse_set_frame(q.front(), ctx.id_bits());
      q.pop();
      flag_seen_[s] = 1;
      ++count_;
    }
    if (count_ < ctx.degree()) return false;
    // x_mask_[x] = neighbor slots adjacent to x, for the x in X we heard of.
    const std::size_t d = ctx.degree();
    x_mask_.assign(ctx.n(), DynBitset());
    for (std::size_t s = 0; s < d; ++s)
      for (VertexId x : nbr_nx_[s]) {
        if (x >= ctx.n()) continue;
        if (x_mask_[x].size() == 0) x_mask_[x] = DynBitset(d);
        x_mask_[x].set(s);
      }
    u_mask_ = DynBitset(d);
    for (std::size_t s = 0; s < d; ++s) u_mask_.set(s);
    iteration_ = 1;
    send_step41(ctx);
    return true;
  }

  // S(j,k) = {l in N(k) ∩ U, l != j : no x in X adjacent to both j and l}.
  void send_step41(NodeContext& ctx) {
    const std::size_t d = ctx.degree();
    const auto nbrs = ctx.neighbors();
    DynBitset s_mask(d);
    std::vector<VertexId> ids;
    u_mask_.for_each([&](std::size_t j) {
      s_mask = u_mask_;
      for (VertexId x : nbr_nx_[j])
        if (x < ctx.n() && x_mask_[x].size() != 0) {
          auto sw = s_mask.words();
          auto xw = x_mask_[x].words();
          for (std::size_t i = 0; i < sw.size(); ++i) sw[i] &= ~xw[i];
        }
      s_mask.reset(j);
      if (static_cast<double>(s_mask.count()) <= m_bar_) {
        ids.clear();
        s_mask.for_each([&](std::size_t l) { ids.push_back(nbrs[l]); });
        sends_.note(ctx, ctx.send_frame(j, make_set_frame(Tag::SSet, ids, ctx.id_bits())));
      } else {
        sends_.note(ctx, ctx.send_frame(j, make_flag_frame(Tag::Overflow, true)));
      }
    });
    std::fill(flag_seen_.begin(), flag_seen_.end(), 0);
    count_ = 0;
    expected_ = u_mask_.count();
    t_bar_.clear();
    phase_ = Phase::Step41;
  }

  void list(NodeContext& ctx, VertexId a, VertexId b, std::uint8_t step) {
    if (scratch_.none()) return;
    ctx.output_common(a, b, scratch_.words());
    if (trace_ && trace_->record_steps) {
      auto* t = trace(ctx.n());
      scratch_.for_each([&](std::size_t w) {
        t->entries.push_back({iteration_, step, ctx.id(), Triangle::make(a, b, static_cast<VertexId>(w))});
      });
    }
  }

  void fill_scratch(const std::vector<VertexId>& ids, std::size_t n) {
    scratch_.clear();
    for (VertexId v : ids)
      if (v < n && mine_.test(v)) scratch_.set(v);
  }

  bool collect_step41(NodeContext& ctx) {
    const auto nbrs = ctx.neighbors();
    u_mask_.for_each([&](std::size_t k) {
      auto& q = ctx.frames(k);
      if (flag_seen_[k] || q.empty()) return;
      const BitString& f = q.front();
      if (frame_tag(f) == Tag::SSet) {
        fill_scratch(parse_set_frame(f, ctx.id_bits()), ctx.n());
        list(ctx, ctx.id(), nbrs[k], 1);
      } else {
        t_bar_.push_back(nbrs[k]);
      }
      q.pop();
      flag_seen_[k] = 1;
      ++count_;
    });
    if (count_ < expected_) return false;

    // goodness, then the T-bar listing
    good_ = static_cast<double>(t_bar_.size()) <= m_bar_;
    if (auto* t = trace(ctx.n())) t->t_bar_size[ctx.id()] = static_cast<std::uint32_t>(t_bar_.size());
    const BitString t_frame = make_set_frame(Tag::TBarSet, t_bar_, ctx.id_bits());
    const BitString u_frame = make_flag_frame(Tag::UFlag, !good_);
    u_mask_.for_each([&](std::size_t l) {
      if (good_ && !t_bar_.empty()) sends_.note(ctx, ctx.send_frame(l, t_frame));
      sends_.note(ctx, ctx.send_frame(l, u_frame));
    });
    std::fill(flag_seen_.begin(), flag_seen_.end(), 0);
    count_ = 0;
    next_u_ = DynBitset(ctx.degree());
    phase_ = Phase::Step45;
    return true;
  }

  bool collect_step45(NodeContext& ctx) {
    const auto nbrs = ctx.neighbors();
    u_mask_.for_each([&](std::size_t j) {
      auto& q = ctx.frames(j);
      while (!flag_seen_[j] && !q.empty()) {
        const BitString& f = q.front();
        if (frame_tag(f) == Tag::TBarSet) {
          fill_scratch(parse_set_frame(f, ctx.id_bits()), ctx.n());
          list(ctx, nbrs[j], ctx.id(), 3);
        } else {
          if (parse_flag_frame(f)) next_u_.set(j);
          flag_seen_[j] = 1;
          ++count_;
        }
        q.pop();
      }
    });
    if (count_ < expected_) return false;

    if (good_) {
      if (auto* t = trace(ctx.n())) {
        t->exit_iteration[ctx.id()] = iteration_;
        t->finish_round[ctx.id()] = ctx.round();
      }
      phase_ = Phase::Done;
      return false;
    }
    u_mask_ = next_u_;
    ++iteration_;
    send_step41(ctx);
    return true;
  }

  bool in_x_;
  double m_bar_;
  std::shared_ptr<RunTrace> trace_;
  std::size_t trace_index_;
  Phase phase_ = Phase::Start;
  SendClock sends_;

  DynBitset mine_, scratch_;
  std::vector<std::uint8_t> nbr_x_;
  std::vector<std::vector<VertexId>> nbr_nx_;
  std::vector<DynBitset> x_mask_;
  std::vector<std::uint8_t> flag_seen_;
  std::size_t count_ = 0;
  std::size_t expected_ = 0;

  DynBitset u_mask_, next_u_;
  std::uint32_t iteration_ = 0;
  std::vector<VertexId> t_bar_;
  bool good_ = false;
};

// x_flags[v] != 0 marks v as a member of X.
inline NodeProgram algo_sub_a(std::vector<std::uint8_t> x_flags, double m_bar,
                              std::shared_ptr<RunTrace> trace = nullptr) {
  if (!(m_bar > 0.0)) throw ConfigError("m_bar must be positive");
  auto flags = std::make_shared<const std::vector<std::uint8_t>>(std::move(x_flags));
  return {"sub_a", [flags, m_bar, trace](VertexId v) {
            const bool in_x = v < flags->size() && (*flags)[v] != 0;
            return std::make_unique<SubANode>(in_x, m_bar, trace, 0);
          }};
}

// A3 stage body: self-selection into X, then A(X, m_bar). The round cap is
// applied by the surrounding window (see compose.hpp).
class A3Node : public NodeProcess {
 public:
  A3Node(double x_prob, double m_bar, std::shared_ptr<RunTrace> trace, std::size_t trace_index)
      : x_prob_(x_prob), m_bar_(m_bar), trace_(std::move(trace)), trace_index_(trace_index) {}

  void on_round(NodeContext& ctx) override {
    if (!inner_) {
      const bool in_x = bernoulli(ctx.rng(), x_prob_);
      inner_ = std::make_unique<SubANode>(in_x, m_bar_, trace_, trace_index_);
    }
    inner_->on_round(ctx);
  }

 private:
  double x_prob_;
  double m_bar_;
  std::shared_ptr<RunTrace> trace_;
  std::size_t trace_index_;
  std::unique_ptr<SubANode> inner_;
};

}  // namespace ctri
