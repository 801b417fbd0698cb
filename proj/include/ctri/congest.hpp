#pragma once

// Round-synchronous CONGEST engine.
//
// Every directed edge carries at most B = beta * ceil(log2 n) bits per round.
// Node programs talk in two ways:
//  * stage_send: a single-round payload (<= B bits cumulative per edge per
//    round), delivered whole at the next round;
//  * send_frame / send_set: a self-delimiting frame queued on the edge and
//    streamed at B bits per round; the receiver gets the frame once its last
//    bit has crossed the edge.
// A node is stepped at round 0, whenever something new was delivered to it,
// and at the round it asked to be woken; in every other round it would do
// nothing, so the engine skips those rounds in bulk. Rounds during which only
// streams are in flight therefore cost nothing, while the round counter and
// bit ledgers stay exact.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "bits.hpp"
#include "errors.hpp"
#include "framing.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace ctri {

inline constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

class Network {
 public:
  // B = beta * ceil(log2 n). Throws ConfigError for beta < 2.
  explicit Network(Graph g, unsigned beta = 2)
      : graph_(std::move(g)), beta_(beta), id_bits_(id_bits_for(graph_.n())) {
    if (beta < 2)
      throw ConfigError("beta=" + std::to_string(beta) +
                        " cannot carry one vertex id plus framing per round (need beta >= 2)");
    bandwidth_ = static_cast<std::size_t>(beta_) * id_bits_;
  }

  const Graph& graph() const { return graph_; }
  unsigned beta() const { return beta_; }
  unsigned id_bits() const { return id_bits_; }
  std::size_t bandwidth() const { return bandwidth_; }
  std::size_t channel_count() const { return graph_.slot_count(); }

 private:
  Graph graph_;
  unsigned beta_;
  unsigned id_bits_;
  std::size_t bandwidth_ = 0;
};

// FIFO of received frames from one neighbor.
class FrameQueue {
 public:
  bool empty() const { return head_ == items_.size(); }
  std::size_t size() const { return items_.size() - head_; }
  const BitString& front() const { return items_[head_]; }
  void pop() {
    ++head_;
    if (head_ == items_.size()) clear();
  }
  void push(BitString b) { items_.push_back(std::move(b)); }
  void clear() {
    items_.clear();
    head_ = 0;
  }

 private:
  std::vector<BitString> items_;
  std::size_t head_ = 0;
};

struct DirectMessage {
  std::size_t slot = 0;  // index of the sender in neighbors()
  BitString payload;
};

struct NodeProgram;
struct RunOptions;
struct RunReport;

namespace detail {
struct EngineState;
}

// The only window a node program has onto the network: its own id, n, its
// incident edges, its private random stream and what it has received.
class NodeContext {
 public:
  VertexId id() const { return id_; }
  std::size_t n() const;
  std::span<const VertexId> neighbors() const;
  std::size_t degree() const { return neighbors().size(); }
  std::optional<std::size_t> slot_of(VertexId neighbor) const;
  unsigned id_bits() const;
  std::size_t bandwidth() const;
  std::uint64_t round() const;
  Rng& rng() { return rng_; }

  FrameQueue& frames(std::size_t slot) { return inbox_[slot]; }
  const std::vector<DirectMessage>& direct_inbox() const { return direct_; }

  // Single-round payload; cumulative bits to one neighbor in one round must
  // not exceed B. Empty payloads are no-ops. Throws BandwidthFault.
  void stage_send(VertexId neighbor, const BitString& payload);

  // Queues a frame to neighbors()[slot]; returns the number of rounds, counting
  // the current one, until its last bit has been transmitted.
  std::size_t send_frame(std::size_t slot, BitString frame);

  // Length-prefixed id set (see framing.hpp). Returns rounds consumed.
  std::size_t send_set(VertexId neighbor, Tag tag, std::span<const VertexId> ids);

  // Drops every queued or partially transmitted outgoing frame.
  void cancel_sends();
  // Drops every received frame not yet consumed.
  void clear_inbox();

  // Local output. Triples that are not triangles of the input graph are kept
  // apart as spurious by the engine.
  void output(VertexId a, VertexId b, VertexId c);
  // Outputs {u, v, w} for every w set in `third` (an n-bit word array).
  void output_common(VertexId u, VertexId v, std::span<const std::uint64_t> third);

  void halt() { halted_ = true; }
  bool halted() const { return halted_; }
  // Clears a halt requested during this step (used by sequential compositions).
  void resume() { halted_ = false; }

  // Sleep until something new arrives.
  void wait() { wake_ = kNever; }
  // Sleep until `round` or until something new arrives.
  void wait_until(std::uint64_t round);
  std::uint64_t wake_round() const { return wake_; }

 private:
  friend struct detail::EngineState;
  friend RunReport run(const Network&, const NodeProgram&, const RunOptions&);
  detail::EngineState* eng_ = nullptr;
  VertexId id_ = 0;
  Rng rng_;
  std::vector<FrameQueue> inbox_;
  std::vector<DirectMessage> direct_;
  bool halted_ = false;
  std::uint64_t wake_ = 0;
};

class NodeProcess {
 public:
  virtual ~NodeProcess() = default;
  virtual void on_round(NodeContext& ctx) = 0;
};

// Factory producing one process per node.
struct NodeProgram {
  std::string name;
  std::function<std::unique_ptr<NodeProcess>(VertexId)> spawn;
};

struct RunOptions {
  std::uint64_t max_rounds = 10'000'000;
  std::uint64_t seed = 0;
  bool record_node_outputs = false;
};

struct RunReport {
  std::uint64_t rounds = 0;
  bool halted = false;
  bool stalled = false;  // every live node waits for messages that never come
  std::size_t bandwidth = 0;
  unsigned id_bits = 0;
  std::vector<std::uint64_t> per_node_rx_bits;
  std::uint64_t max_edge_round_bits = 0;
  TriangleSet output;
  TriangleSet spurious;
  std::vector<std::uint64_t> per_node_output_events;
  std::vector<TriangleSet> node_outputs;  // only with record_node_outputs

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

namespace detail {

struct Channel {
  std::vector<BitString> queue;
  std::size_t head = 0;
  std::size_t queued_bits = 0;  // total length of queue[head..]
  std::size_t front_sent = 0;   // bits of the front frame sent before round `base`
  std::uint64_t base = 0;       // first round whose transmission is not yet accounted
  std::uint32_t version = 0;
  std::vector<BitString> direct;
  std::size_t direct_bits = 0;
  bool dirty = false;

  bool streaming() const { return head < queue.size(); }
  std::size_t front_len() const { return queue[head].size(); }
};

struct Event {
  std::uint64_t round;
  std::size_t channel;
  std::uint32_t version;
  bool operator>(const Event& o) const {
    return std::tie(round, channel, version) > std::tie(o.round, o.channel, o.version);
  }
};

struct Delivery {
  std::size_t channel;
  bool direct;
  BitString payload;
};

struct EngineState {
  const Network* net = nullptr;
  const Graph* g = nullptr;
  std::size_t B = 0;
  std::uint64_t round = 0;
  bool record = false;

  std::vector<NodeContext> ctx;
  std::vector<Channel> ch;
  std::vector<VertexId> ch_src, ch_dst;
  std::vector<std::size_t> ch_rev_slot;  // slot of src in neighbors(dst)
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  std::vector<std::size_t> dirty;
  std::vector<Delivery> pending;

  std::vector<std::uint64_t> rx_bits;
  std::uint64_t max_edge_bits = 0;

  std::size_t words_per_row = 0;
  std::vector<std::uint64_t> union_rows;  // one n-bit row per edge id: third vertices seen with that edge
  std::vector<Triangle> spurious;
  std::vector<std::uint64_t> out_events;
  std::vector<std::vector<Triangle>> node_out;

  explicit EngineState(const Network& network, const RunOptions& opt)
      : net(&network), g(&network.graph()), B(network.bandwidth()), record(opt.record_node_outputs) {
    const std::size_t n = g->n();
    ch.resize(g->slot_count());
    ch_src.resize(ch.size());
    ch_dst.resize(ch.size());
    ch_rev_slot.resize(ch.size());
    for (VertexId u = 0; u < n; ++u) {
      auto nb = g->neighbors(u);
      for (std::size_t i = 0; i < nb.size(); ++i) {
        const std::size_t c = g->slot_base(u) + i;
        ch_src[c] = u;
        ch_dst[c] = nb[i];
        ch_rev_slot[c] = *g->neighbor_index(nb[i], u);
      }
    }
    rx_bits.assign(n, 0);
    out_events.assign(n, 0);
    if (record) node_out.resize(n);
    words_per_row = DynBitset::word_count(n);
    union_rows.assign(g->m() * words_per_row, 0);
    ctx.resize(n);
    for (VertexId v = 0; v < n; ++v) {
      NodeContext& c = ctx[v];
      c.eng_ = this;
      c.id_ = v;
      c.rng_ = derive_rng(opt.seed, v);
      c.inbox_.resize(g->degree(v));
    }
  }

  void note_round_bits(std::size_t bits) {
    if (bits > B)
      throw std::logic_error("engine transmitted more than B bits on one edge in one round");
    max_edge_bits = std::max<std::uint64_t>(max_edge_bits, bits);
  }

  void schedule(std::size_t c) {
    Channel& k = ch[c];
    ++k.version;
    if (!k.streaming()) return;
    const std::size_t rem = k.front_len() - k.front_sent;
    const std::uint64_t done = k.base + (rem + B - 1) / B - 1;
    events.push({done, c, k.version});
  }

  // Accounts rounds [base, r) for a streaming channel: each carried B bits of
  // the front frame without completing it.
  void catch_up(Channel& k, std::uint64_t r) {
    if (!k.streaming() || r <= k.base) return;
    k.front_sent += B * static_cast<std::size_t>(r - k.base);
    if (k.front_sent >= k.front_len()) throw std::logic_error("missed a frame completion event");
    note_round_bits(B);
    k.base = r;
  }

  // Transmission of round r on channel c.
  void advance(std::size_t c, std::uint64_t r) {
    Channel& k = ch[c];
    const VertexId dst = ch_dst[c];
    std::size_t round_bits = 0;
    for (auto& p : k.direct) {
      round_bits += p.size();
      rx_bits[dst] += p.size();
      pending.push_back({c, true, std::move(p)});
    }
    const std::size_t cap = B - k.direct_bits;
    k.direct.clear();
    k.direct_bits = 0;
    k.dirty = false;

    if (k.streaming()) {
      catch_up(k, r);
      std::size_t avail = cap;
      while (avail > 0 && k.streaming()) {
        const std::size_t rem = k.front_len() - k.front_sent;
        if (rem <= avail) {
          avail -= rem;
          round_bits += rem;
          rx_bits[dst] += k.front_len();
          k.queued_bits -= k.front_len();
          pending.push_back({c, false, std::move(k.queue[k.head])});
          ++k.head;
          k.front_sent = 0;
        } else {
          k.front_sent += avail;
          round_bits += avail;
          avail = 0;
        }
      }
      if (!k.streaming()) {
        k.queue.clear();
        k.head = 0;
      }
    }
    note_round_bits(round_bits);
    k.base = r + 1;
    schedule(c);
  }

  void transmit(std::uint64_t r) {
    for (std::size_t c : dirty) advance(c, r);
    dirty.clear();
    while (!events.empty() && events.top().round <= r) {
      const Event e = events.top();
      events.pop();
      if (e.version != ch[e.channel].version) continue;
      if (e.round < r) throw std::logic_error("stale stream event");
      advance(e.channel, r);
    }
  }

  std::uint64_t next_event_round() {
    while (!events.empty() && events.top().version != ch[events.top().channel].version) events.pop();
    return events.empty() ? kNever : events.top().round;
  }

  void deliver() {
    for (Delivery& d : pending) {
      NodeContext& to = ctx[ch_dst[d.channel]];
      if (to.halted_) continue;
      if (d.direct) to.direct_.push_back({ch_rev_slot[d.channel], std::move(d.payload)});
      else to.inbox_[ch_rev_slot[d.channel]].push(std::move(d.payload));
    }
  }

  // Bits of partially transmitted frames reached the receiver too.
  void flush_partial(std::size_t c, std::uint64_t r) {
    Channel& k = ch[c];
    if (!k.streaming()) return;
    catch_up(k, r);
    rx_bits[ch_dst[c]] += k.front_sent;
  }

  void cancel(std::size_t c, std::uint64_t r) {
    flush_partial(c, r);
    Channel& k = ch[c];
    k.queue.clear();
    k.head = 0;
    k.queued_bits = 0;
    k.front_sent = 0;
    k.base = r;
    ++k.version;
  }

  std::size_t enqueue(std::size_t c, BitString frame) {
    Channel& k = ch[c];
    const std::size_t len = frame.size();
    std::size_t backlog = 0;
    if (k.streaming()) {
      catch_up(k, round);
      backlog = k.queued_bits - k.front_sent;
      k.queue.push_back(std::move(frame));
      k.queued_bits += len;
    } else {
      k.queue.clear();
      k.head = 0;
      k.queue.push_back(std::move(frame));
      k.queued_bits = len;
      k.front_sent = 0;
      k.base = round;
      schedule(c);
    }
    const std::size_t total = backlog + len;
    const std::size_t first = B - k.direct_bits;
    if (total <= first) return 1;
    return 1 + (total - first + B - 1) / B;
  }

  void record_triangle(VertexId node, VertexId a, VertexId b, VertexId c) {
    const Triangle t = Triangle::make(a, b, c);
    ++out_events[node];
    const auto e = (t.a != t.b && t.b != t.c) ? g->edge_id(t.a, t.b) : std::nullopt;
    if (!e || !g->has_edge(t.a, t.c) || !g->has_edge(t.b, t.c)) {
      spurious.push_back(t);
      return;
    }
    union_rows[*e * words_per_row + t.c / 64] |= std::uint64_t{1} << (t.c % 64);
    if (record) node_out[node].push_back(t);
  }

  void record_common(VertexId node, VertexId u, VertexId v, std::span<const std::uint64_t> third) {
    const auto e = g->edge_id(u, v);
    if (!e || !g->has_bitset_rows() || third.size() != words_per_row) {
      DynBitset::for_each_in(third, [&](std::size_t w) {
        record_triangle(node, u, v, static_cast<VertexId>(w));
      });
      return;
    }
    const auto ru = g->row(u).words(), rv = g->row(v).words();
    std::uint64_t* row = &union_rows[*e * words_per_row];
    for (std::size_t i = 0; i < third.size(); ++i) {
      const std::uint64_t w = third[i];
      if (!w) continue;
      const std::uint64_t ok = w & ru[i] & rv[i];
      row[i] |= ok;
      out_events[node] += static_cast<std::uint64_t>(std::popcount(ok));
      if (record) {
        std::uint64_t b = ok;
        while (b) {
          const auto c = static_cast<VertexId>(i * 64 + static_cast<std::size_t>(std::countr_zero(b)));
          b &= b - 1;
          node_out[node].push_back(Triangle::make(u, v, c));
        }
      }
      std::uint64_t bad = w & ~ok;
      while (bad) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(bad));
        bad &= bad - 1;
        record_triangle(node, u, v, static_cast<VertexId>(i * 64 + bit));
      }
    }
  }

  // Rows may hold a triangle under any of its edges; move each bit to the row
  // of the triangle's smallest edge, then read rows in edge order.
  TriangleSet union_output() {
    const auto& edges = g->edges();
    for (std::size_t id = 0; id < edges.size(); ++id) {
      std::uint64_t* row = &union_rows[id * words_per_row];
      const VertexId u = edges[id].u, v = edges[id].v;
      const std::size_t vw = v / 64;
      for (std::size_t i = 0; i <= vw && i < words_per_row; ++i) {
        std::uint64_t low = row[i];
        if (i == vw) low &= (v % 64 == 0) ? 0 : ((std::uint64_t{1} << (v % 64)) - 1);
        row[i] &= ~low;
        while (low) {
          const auto w = static_cast<VertexId>(i * 64 + static_cast<std::size_t>(std::countr_zero(low)));
          low &= low - 1;
          const std::size_t to = *g->edge_id(std::min(u, w), std::max(u, w));
          union_rows[to * words_per_row + v / 64] |= std::uint64_t{1} << (v % 64);
        }
      }
    }
    std::vector<Triangle> out;
    for (std::size_t id = 0; id < edges.size(); ++id) {
      std::span<const std::uint64_t> row(&union_rows[id * words_per_row], words_per_row);
      DynBitset::for_each_in(row, [&](std::size_t w) {
        out.push_back({edges[id].u, edges[id].v, static_cast<VertexId>(w)});
      });
    }
    return TriangleSet::from_sorted_unique(std::move(out));
  }
};

}  // namespace detail

inline std::size_t NodeContext::n() const { return eng_->g->n(); }
inline std::span<const VertexId> NodeContext::neighbors() const { return eng_->g->neighbors(id_); }
inline std::optional<std::size_t> NodeContext::slot_of(VertexId nb) const {
  return eng_->g->neighbor_index(id_, nb);
}
inline unsigned NodeContext::id_bits() const { return eng_->net->id_bits(); }
inline std::size_t NodeContext::bandwidth() const { return eng_->B; }
inline std::uint64_t NodeContext::round() const { return eng_->round; }

inline void NodeContext::stage_send(VertexId neighbor, const BitString& payload) {
  const auto slot = slot_of(neighbor);
  if (!slot) throw BandwidthFault(round(), id_, neighbor, "destination is not a neighbor");
  if (payload.empty()) return;
  const std::size_t c = eng_->g->slot_base(id_) + *slot;
  detail::Channel& k = eng_->ch[c];
  if (k.direct_bits + payload.size() > eng_->B)
    throw BandwidthFault(round(), id_, neighbor,
                         "staged " + std::to_string(k.direct_bits + payload.size()) +
                             " bits, capacity " + std::to_string(eng_->B));
  k.direct_bits += payload.size();
  k.direct.push_back(payload);
  if (!k.dirty) {
    k.dirty = true;
    eng_->dirty.push_back(c);
  }
}

inline std::size_t NodeContext::send_frame(std::size_t slot, BitString frame) {
  if (slot >= degree()) throw BandwidthFault(round(), id_, id_, "invalid neighbor slot");
  return eng_->enqueue(eng_->g->slot_base(id_) + slot, std::move(frame));
}

inline std::size_t NodeContext::send_set(VertexId neighbor, Tag tag, std::span<const VertexId> ids) {
  const auto slot = slot_of(neighbor);
  if (!slot) throw BandwidthFault(round(), id_, neighbor, "destination is not a neighbor");
  for (VertexId v : ids)
    if (v >= n()) throw std::out_of_range("send_set: vertex id out of range");
  return send_frame(*slot, make_set_frame(tag, ids, id_bits()));
}

inline void NodeContext::cancel_sends() {
  const std::size_t base = eng_->g->slot_base(id_);
  for (std::size_t i = 0; i < degree(); ++i) eng_->cancel(base + i, round());
}

inline void NodeContext::clear_inbox() {
  for (auto& q : inbox_) q.clear();
  direct_.clear();
}

inline void NodeContext::output(VertexId a, VertexId b, VertexId c) {
  eng_->record_triangle(id_, a, b, c);
}

inline void NodeContext::output_common(VertexId u, VertexId v, std::span<const std::uint64_t> third) {
  eng_->record_common(id_, u, v, third);
}

inline void NodeContext::wait_until(std::uint64_t r) { wake_ = std::max(r, round() + 1); }

// Executes `program` on every node until all halt or max_rounds is reached.
// The result is a pure function of (graph, beta, program, seed).
inline RunReport run(const Network& net, const NodeProgram& program, const RunOptions& opt) {
  detail::EngineState st(net, opt);
  const std::size_t n = net.graph().n();
  std::vector<std::unique_ptr<NodeProcess>> procs(n);
  for (VertexId v = 0; v < n; ++v) procs[v] = program.spawn(v);

  std::vector<char> fresh(n, 0);
  std::size_t live = n;
  RunReport rep;
  rep.bandwidth = st.B;
  rep.id_bits = net.id_bits();

  std::uint64_t r = 0;
  for (;;) {
    st.round = r;
    st.deliver();
    for (const auto& d : st.pending) fresh[st.ch_dst[d.channel]] = 1;
    st.pending.clear();

    for (VertexId v = 0; v < n; ++v) {
      NodeContext& c = st.ctx[v];
      if (c.halted_) continue;
      if (!fresh[v] && c.wake_ > r) continue;
      fresh[v] = 0;
      c.wake_ = r + 1;
      procs[v]->on_round(c);
      c.direct_.clear();
      if (c.halted_) {
        --live;
        c.clear_inbox();
      }
    }
    if (live == 0) {
      rep.halted = true;
      break;
    }
    if (r >= opt.max_rounds) break;

    st.transmit(r);

    std::uint64_t next = r + 1;
    if (st.pending.empty()) {
      next = st.next_event_round();
      for (VertexId v = 0; v < n; ++v)
        if (!st.ctx[v].halted_) next = std::min(next, st.ctx[v].wake_);
      if (next == kNever) {
        rep.stalled = true;
        r = opt.max_rounds;
        break;
      }
      next = std::max(next, r + 1);
    }
    if (next > opt.max_rounds) {
      r = opt.max_rounds;
      break;
    }
    r = next;
  }
  rep.rounds = r;
  for (std::size_t c = 0; c < st.ch.size(); ++c) st.flush_partial(c, r);

  rep.per_node_rx_bits = std::move(st.rx_bits);
  rep.max_edge_round_bits = st.max_edge_bits;
  rep.output = st.union_output();
  rep.spurious = TriangleSet(std::move(st.spurious));
  rep.per_node_output_events = std::move(st.out_events);
  if (st.record) {
    rep.node_outputs.reserve(n);
    for (auto& v : st.node_out) rep.node_outputs.emplace_back(std::move(v));
  }
  return rep;
}

inline RunReport run(const Network& net, const NodeProgram& program) { return run(net, program, RunOptions{}); }

}  // namespace ctri
