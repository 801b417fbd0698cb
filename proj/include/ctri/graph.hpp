#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bitset.hpp"

namespace ctri {

using VertexId = std::uint32_t;

// Unordered pair stored with u < v.
struct Edge {
  VertexId u = 0;
  VertexId v = 0;

  static Edge make(VertexId a, VertexId b) { return a < b ? Edge{a, b} : Edge{b, a}; }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Unordered triple stored with a < b < c.
struct Triangle {
  VertexId a = 0;
  VertexId b = 0;
  VertexId c = 0;

  static Triangle make(VertexId x, VertexId y, VertexId z) {
    if (x > y) std::swap(x, y);
    if (y > z) std::swap(y, z);
    if (x > y) std::swap(x, y);
    return {x, y, z};
  }
  std::array<Edge, 3> edges() const { return {Edge{a, b}, Edge{a, c}, Edge{b, c}}; }
  bool contains(Edge e) const {
    return (e.u == a && (e.v == b || e.v == c)) || (e.u == b && e.v == c);
  }
  friend auto operator<=>(const Triangle&, const Triangle&) = default;
};

// Sorted, duplicate-free sequence. Used for TriangleSet and EdgeSubset.
template <class T>
class SortedSet {
 public:
  SortedSet() = default;
  explicit SortedSet(std::vector<T> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
  }
  static SortedSet from_sorted_unique(std::vector<T> items) {
    SortedSet s;
    s.items_ = std::move(items);
    return s;
  }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const T& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<T>& items() const { return items_; }

  bool contains(const T& x) const { return std::binary_search(items_.begin(), items_.end(), x); }
  bool includes(const SortedSet& o) const {
    return std::includes(items_.begin(), items_.end(), o.items_.begin(), o.items_.end());
  }
  SortedSet minus(const SortedSet& o) const {
    std::vector<T> out;
    std::set_difference(items_.begin(), items_.end(), o.items_.begin(), o.items_.end(),
                        std::back_inserter(out));
    return from_sorted_unique(std::move(out));
  }
  SortedSet united(const SortedSet& o) const {
    std::vector<T> out;
    std::set_union(items_.begin(), items_.end(), o.items_.begin(), o.items_.end(),
                   std::back_inserter(out));
    return from_sorted_unique(std::move(out));
  }
  friend bool operator==(const SortedSet&, const SortedSet&) = default;

 private:
  std::vector<T> items_;
};

using TriangleSet = SortedSet<Triangle>;
using EdgeSubset = SortedSet<Edge>;

// Undirected simple graph on vertices 0..n-1 with sorted adjacency lists.
// Immutable after construction; concurrent reads are safe.
class Graph {
 public:
  // Dense adjacency bitsets are kept only up to this size.
  static constexpr std::size_t kBitsetRowsMaxN = 8192;

  Graph() : Graph(0, {}) {}

  // Throws std::invalid_argument on self-loops, duplicate edges or ids >= n.
  Graph(std::size_t n, std::span<const Edge> edges) : n_(n), offsets_(n + 1, 0) {
    for (const Edge& e : edges) {
      if (e.u == e.v) throw std::invalid_argument("self-loop at vertex " + std::to_string(e.u));
      if (e.u >= n || e.v >= n)
        throw std::invalid_argument("vertex id out of range in edge " + std::to_string(e.u) +
                                    " " + std::to_string(e.v));
    }
    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (const Edge& e : edges) canon.push_back(Edge::make(e.u, e.v));
    std::sort(canon.begin(), canon.end());
    if (auto it = std::adjacent_find(canon.begin(), canon.end()); it != canon.end())
      throw std::invalid_argument("duplicate edge " + std::to_string(it->u) + " " +
                                  std::to_string(it->v));
    edges_ = std::move(canon);

    for (const Edge& e : edges_) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    adj_.resize(offsets_[n]);
    slot_edge_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t id = 0; id < edges_.size(); ++id) {
      const Edge& e = edges_[id];
      adj_[fill[e.u]] = e.v;
      slot_edge_[fill[e.u]++] = id;
      adj_[fill[e.v]] = e.u;
      slot_edge_[fill[e.v]++] = id;
    }
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t b = offsets_[v], e = offsets_[v + 1];
      std::vector<std::pair<VertexId, std::size_t>> tmp;
      tmp.reserve(e - b);
      for (std::size_t i = b; i < e; ++i) tmp.emplace_back(adj_[i], slot_edge_[i]);
      std::sort(tmp.begin(), tmp.end());
      for (std::size_t i = b; i < e; ++i) std::tie(adj_[i], slot_edge_[i]) = tmp[i - b];
    }
    if (n <= kBitsetRowsMaxN) {
      auto rows = std::make_shared<std::vector<DynBitset>>(n, DynBitset(n));
      for (const Edge& e : edges_) {
        (*rows)[e.u].set(e.v);
        (*rows)[e.v].set(e.u);
      }
      rows_ = std::move(rows);
    }
  }

  std::size_t n() const { return n_; }
  std::size_t m() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

  // CSR slot of directed pair (v -> neighbors(v)[i]) is slot_base(v) + i.
  std::size_t slot_base(VertexId v) const { return offsets_[v]; }
  std::size_t slot_count() const { return adj_.size(); }

  // Position of w in neighbors(v), if adjacent.
  std::optional<std::size_t> neighbor_index(VertexId v, VertexId w) const {
    auto nb = neighbors(v);
    auto it = std::lower_bound(nb.begin(), nb.end(), w);
    if (it == nb.end() || *it != w) return std::nullopt;
    return static_cast<std::size_t>(it - nb.begin());
  }

  bool has_edge(VertexId u, VertexId v) const {
    if (u >= n_ || v >= n_ || u == v) return false;
    if (rows_) return (*rows_)[u].test(v);
    return neighbor_index(u, v).has_value();
  }

  // Index into edges(), if {u,v} is an edge.
  std::optional<std::size_t> edge_id(VertexId u, VertexId v) const {
    if (u >= n_ || v >= n_) return std::nullopt;
    auto pos = neighbor_index(u, v);
    if (!pos) return std::nullopt;
    return slot_edge_[offsets_[u] + *pos];
  }

  bool has_bitset_rows() const { return rows_ != nullptr; }
  // Requires has_bitset_rows().
  const DynBitset& row(VertexId v) const { return (*rows_)[v]; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<VertexId> adj_;
  std::vector<std::size_t> slot_edge_;
  std::shared_ptr<const std::vector<DynBitset>> rows_;
};

inline Graph make_graph(std::size_t n, std::initializer_list<std::pair<VertexId, VertexId>> es) {
  std::vector<Edge> edges;
  for (auto [a, b] : es) edges.push_back({a, b});
  return Graph(n, edges);
}

inline Graph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (VertexId i = 0; i < n; ++i)
    for (VertexId j = i + 1; j < n; ++j) edges.push_back({i, j});
  return Graph(n, edges);
}

// Number of common neighbors of an arbitrary pair (m({u,v}) for non-edges too).
inline std::size_t pair_common_neighbors(const Graph& g, VertexId u, VertexId v) {
  if (g.has_bitset_rows()) return g.row(u).intersection_count(g.row(v));
  auto a = g.neighbors(u), b = g.neighbors(v);
  std::size_t c = 0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else { ++c; ++i; ++j; }
  }
  return c;
}

// m(e): number of triangles containing edge e. Throws std::domain_error if e is
// not an edge of g.
inline std::size_t common_neighbors_count(const Graph& g, Edge e) {
  if (!g.has_edge(e.u, e.v))
    throw std::domain_error("not an edge: " + std::to_string(e.u) + " " + std::to_string(e.v));
  return pair_common_neighbors(g, e.u, e.v);
}

// All triangles, canonical order. Edge-iterator with sorted-list merge.
inline TriangleSet enumerate_triangles(const Graph& g) {
  std::vector<Triangle> out;
  for (const Edge& e : g.edges()) {
    auto a = g.neighbors(e.u), b = g.neighbors(e.v);
    auto ia = std::upper_bound(a.begin(), a.end(), e.v);
    auto ib = std::upper_bound(b.begin(), b.end(), e.v);
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) ++ia;
      else if (*ib < *ia) ++ib;
      else {
        out.push_back({e.u, e.v, *ia});
        ++ia;
        ++ib;
      }
    }
  }
  return TriangleSet::from_sorted_unique(std::move(out));
}

// n^eps, compared against integer counts without rounding.
inline double heavy_threshold(std::size_t n, double eps) {
  return std::pow(static_cast<double>(n), eps);
}

struct HeavyLightSplit {
  TriangleSet heavy;
  TriangleSet light;
};

// A triangle is eps-heavy if some edge e of it has m(e) >= n^eps.
inline HeavyLightSplit classify_heavy(const Graph& g, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::domain_error("eps must lie in [0,1]");
  const double thr = heavy_threshold(g.n(), eps);
  std::vector<std::size_t> mult(g.m());
  for (std::size_t id = 0; id < g.m(); ++id) {
    const Edge& e = g.edges()[id];
    mult[id] = pair_common_neighbors(g, e.u, e.v);
  }
  std::vector<Triangle> heavy, light;
  for (const Triangle& t : enumerate_triangles(g)) {
    bool is_heavy = false;
    for (const Edge& e : t.edges())
      if (static_cast<double>(mult[*g.edge_id(e.u, e.v)]) >= thr) is_heavy = true;
    (is_heavy ? heavy : light).push_back(t);
  }
  return {TriangleSet::from_sorted_unique(std::move(heavy)),
          TriangleSet::from_sorted_unique(std::move(light))};
}

// Membership of the pair {j,l} in Delta(X): no x in X is adjacent to both.
// On-demand variant; see DeltaOracle for repeated queries.
inline bool in_delta(const Graph& g, const DynBitset& x_set, VertexId j, VertexId l) {
  if (j == l) throw std::domain_error("in_delta needs two distinct vertices");
  auto a = g.neighbors(j), b = g.neighbors(l);
  for (std::size_t i = 0, k = 0; i < a.size() && k < b.size();) {
    if (a[i] < b[k]) ++i;
    else if (b[k] < a[i]) ++k;
    else {
      if (x_set.test(a[i])) return false;
      ++i;
      ++k;
    }
  }
  return true;
}

// Precomputed N(v) ∩ X bitsets answering Delta(X) membership in O(n/64).
class DeltaOracle {
 public:
  DeltaOracle(const Graph& g, const DynBitset& x_set) : nx_(g.n(), DynBitset(g.n())) {
    x_set.for_each([&](std::size_t x) {
      for (VertexId v : g.neighbors(static_cast<VertexId>(x))) nx_[v].set(x);
    });
  }
  bool contains(VertexId j, VertexId l) const { return j != l && !nx_[j].intersects(nx_[l]); }
  const DynBitset& neighbors_in_x(VertexId v) const { return nx_[v]; }

 private:
  std::vector<DynBitset> nx_;
};

// P(R): union of the edges of the triples in R.
inline EdgeSubset edge_cover(const TriangleSet& r) {
  std::vector<Edge> out;
  out.reserve(r.size() * 3);
  for (const Triangle& t : r)
    for (const Edge& e : t.edges()) out.push_back(e);
  return EdgeSubset(std::move(out));
}

// Lower bound on |P(R)| for a set R of triangles: (sqrt 2 / 3) |R|^{2/3}.
inline double rivin_bound(std::size_t triangles) {
  return std::sqrt(2.0) / 3.0 * std::pow(static_cast<double>(triangles), 2.0 / 3.0);
}

inline bool rivin_holds(const TriangleSet& r) {
  return static_cast<double>(edge_cover(r).size()) >= rivin_bound(r.size());
}

inline DynBitset vertex_set(std::size_t n, std::span<const VertexId> members) {
  DynBitset s(n);
  for (VertexId v : members) s.set(v);
  return s;
}

}  // namespace ctri
