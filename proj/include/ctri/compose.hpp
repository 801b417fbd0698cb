#pragma once

#include <functional>
#include <memory>

#include "algo_a1.hpp"
#include "algo_a2.hpp"
#include "algo_params.hpp"
#include "algo_sub_a.hpp"
#include "congest.hpp"

namespace ctri {

using PlanMaker = std::function<CompositionPlan(std::size_t n, unsigned beta)>;

// Runs the stages of a plan back to back. Stage s owns the rounds
// [start, start + length); a node that finishes early idles until the window
// closes, and at the close any frame still in flight is dropped. The last
// stage halts the node as soon as it is done.
class CompositeNode : public NodeProcess {
 public:
  CompositeNode(PlanMaker make, std::shared_ptr<RunTrace> trace)
      : make_(std::move(make)), trace_(std::move(trace)) {}

  void on_round(NodeContext& ctx) override {
    if (!plan_) {
      const auto beta = static_cast<unsigned>(ctx.bandwidth() / ctx.id_bits());
      plan_ = std::make_unique<CompositionPlan>(make_(ctx.n(), beta));
    }
    const std::uint64_t r = ctx.round();
    for (;;) {
      if (idx_ == plan_->stages.size()) {
        ctx.halt();
        return;
      }
      const StagePlan& sp = plan_->stages[idx_];
      const std::uint64_t end = sp.start + sp.length;
      if (r >= end) {
        if (stage_ && !finished_ && sp.kind != StageKind::A3 && trace_) ++trace_->window_overruns;
        ctx.cancel_sends();
        ctx.clear_inbox();
        stage_.reset();
        ++idx_;
        continue;
      }
      if (!stage_) {
        stage_ = spawn(sp.kind);
        finished_ = false;
      }
      if (finished_) {
        ctx.clear_inbox();
        ctx.wait_until(end);
        return;
      }
      stage_->on_round(ctx);
      if (ctx.halted()) {
        finished_ = true;
        if (idx_ + 1 == plan_->stages.size()) return;
        ctx.resume();
        ctx.clear_inbox();
        ctx.wait_until(end);
        return;
      }
      if (ctx.wake_round() > end) ctx.wait_until(end);
      return;
    }
  }

 private:
  std::unique_ptr<NodeProcess> spawn(StageKind k) {
    const double eps = plan_->eps.eps;
    switch (k) {
      case StageKind::A1: return std::make_unique<A1Node>(eps, trace_);
      case StageKind::A2: return std::make_unique<A2Node>(eps, trace_);
      case StageKind::A3:
        return std::make_unique<A3Node>(plan_->x_prob, plan_->m_bar, trace_, a3_count_++);
    }
    return nullptr;
  }

  PlanMaker make_;
  std::shared_ptr<RunTrace> trace_;
  std::unique_ptr<CompositionPlan> plan_;
  std::size_t idx_ = 0;
  std::unique_ptr<NodeProcess> stage_;
  bool finished_ = false;
  std::size_t a3_count_ = 0;
};

inline NodeProgram composite_program(std::string name, PlanMaker make,
                                     std::shared_ptr<RunTrace> trace) {
  return {std::move(name), [make = std::move(make), trace](VertexId) {
            return std::make_unique<CompositeNode>(make, trace);
          }};
}

// X sampled with probability 1/(9 n^eps), then A(X, m_bar) stopped after
// c_stop (n^{1-eps} + n^{(1+eps)/2} log n) rounds.
inline NodeProgram algo_a3(const AlgoConfig& cfg, std::shared_ptr<RunTrace> trace = nullptr) {
  cfg.validate();
  return composite_program(
      "a3", [cfg](std::size_t n, unsigned beta) { return single_plan(StageKind::A3, n, beta, cfg); },
      std::move(trace));
}

inline NodeProgram find_triangle(double delta, const AlgoConfig& cfg = {},
                                 std::shared_ptr<RunTrace> trace = nullptr) {
  cfg.validate();
  find_reps(delta);
  return composite_program(
      "find", [delta, cfg](std::size_t n, unsigned beta) { return find_plan(n, beta, delta, cfg); },
      std::move(trace));
}

inline NodeProgram list_triangles(const AlgoConfig& cfg = {}, std::shared_ptr<RunTrace> trace = nullptr) {
  cfg.validate();
  return composite_program(
      "list", [cfg](std::size_t n, unsigned beta) { return list_plan(n, beta, cfg); }, std::move(trace));
}

// A single (A2; A3) pass with the listing exponent, i.e. the first repetition
// of list_triangles.
inline NodeProgram list_single_pass(const AlgoConfig& cfg = {},
                                    std::shared_ptr<RunTrace> trace = nullptr) {
  cfg.validate();
  return composite_program(
      "list1",
      [cfg](std::size_t n, unsigned beta) {
        auto p = list_plan(n, beta, cfg);
        p.stages.resize(std::min<std::size_t>(2, p.stages.size()));
        p.reps = 1;
        return p;
      },
      std::move(trace));
}

}  // namespace ctri
