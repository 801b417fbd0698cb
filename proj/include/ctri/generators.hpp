#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace ctri {

// Erdős–Rényi G(n, p); deterministic in (n, p, seed).
inline Graph gen_gnp(std::size_t n, double p, std::uint64_t seed) {
  if (n < 1) throw ConfigError("gen_gnp: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("gen_gnp: p must lie in [0,1]");
  Rng rng = derive_rng(seed, 0x676E70);
  std::vector<Edge> edges;
  for (VertexId i = 0; i < n; ++i)
    for (VertexId j = i + 1; j < n; ++j)
      if (bernoulli(rng, p)) edges.push_back({i, j});
  return Graph(n, edges);
}

enum class PlantedKind { HeavyEdge, SparseTriangles, TriangleFree };

struct PlantedParams {
  std::size_t h = 0;  // heavy-edge: common neighbors of the designated edge
  std::size_t t = 0;  // sparse-triangles: planted vertex-disjoint triangles
  double p = -1.0;    // background edge probability; < 0 picks the kind's default
};

struct PlantedGraph {
  Graph graph;
  std::optional<Edge> heavy_edge;
  std::vector<Triangle> planted;
};

inline double default_background_p(PlantedKind kind) {
  switch (kind) {
    case PlantedKind::HeavyEdge: return 0.1;
    case PlantedKind::SparseTriangles: return 0.05;
    case PlantedKind::TriangleFree: return 0.5;
  }
  return 0.1;
}

// Test instances targeting the heavy/light split.
//  heavy-edge:       G(n,p) plus an edge {a,b} with at least h common neighbors.
//  sparse-triangles: G(n,p) plus t vertex-disjoint triangles; the only pairs
//                    present among planted vertices are the triangle edges.
//  triangle-free:    random bipartite graph.
inline PlantedGraph gen_planted(std::size_t n, PlantedKind kind, const PlantedParams& params,
                                std::uint64_t seed) {
  if (n < 3) throw ConfigError("gen_planted: n must be >= 3");
  const double p = params.p < 0 ? default_background_p(kind) : params.p;
  if (p > 1.0) throw ConfigError("gen_planted: p must lie in [0,1]");
  Rng rng = derive_rng(seed, 0x706C616E74ULL + static_cast<std::uint64_t>(kind));

  std::vector<VertexId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[uniform_below(rng, i + 1)]);

  PlantedGraph out;
  std::vector<Edge> edges;
  switch (kind) {
    case PlantedKind::HeavyEdge: {
      if (params.h > n - 2)
        throw ConfigError("gen_planted: heavy-edge needs h <= n-2 (h=" + std::to_string(params.h) +
                          ", n=" + std::to_string(n) + ")");
      const VertexId a = perm[0], b = perm[1];
      std::vector<char> forced(n, 0);
      for (std::size_t i = 0; i < params.h; ++i) forced[perm[2 + i]] = 1;
      for (VertexId i = 0; i < n; ++i)
        for (VertexId j = i + 1; j < n; ++j) {
          const Edge e{i, j};
          const bool touches_ab = (i == a || i == b || j == a || j == b);
          const VertexId other = (i == a || i == b) ? j : i;
          const bool planted = (Edge::make(a, b) == e) || (touches_ab && forced[other]);
          if (planted || bernoulli(rng, p)) edges.push_back(e);
        }
      out.heavy_edge = Edge::make(a, b);
      break;
    }
    case PlantedKind::SparseTriangles: {
      if (3 * params.t > n)
        throw ConfigError("gen_planted: sparse-triangles needs 3t <= n (t=" +
                          std::to_string(params.t) + ", n=" + std::to_string(n) + ")");
      std::vector<std::int64_t> group(n, -1);
      for (std::size_t k = 0; k < params.t; ++k)
        for (std::size_t r = 0; r < 3; ++r) group[perm[3 * k + r]] = static_cast<std::int64_t>(k);
      for (std::size_t k = 0; k < params.t; ++k)
        out.planted.push_back(Triangle::make(perm[3 * k], perm[3 * k + 1], perm[3 * k + 2]));
      for (VertexId i = 0; i < n; ++i)
        for (VertexId j = i + 1; j < n; ++j) {
          if (group[i] >= 0 && group[j] >= 0) {
            if (group[i] == group[j]) edges.push_back({i, j});
            continue;
          }
          if (bernoulli(rng, p)) edges.push_back({i, j});
        }
      std::sort(out.planted.begin(), out.planted.end());
      break;
    }
    case PlantedKind::TriangleFree: {
      std::vector<char> side(n);
      for (auto& s : side) s = static_cast<char>(rng() & 1U);
      for (VertexId i = 0; i < n; ++i)
        for (VertexId j = i + 1; j < n; ++j)
          if (side[i] != side[j] && bernoulli(rng, p)) edges.push_back({i, j});
      break;
    }
  }
  out.graph = Graph(n, edges);
  return out;
}

inline std::optional<PlantedKind> parse_planted_kind(const std::string& s) {
  if (s == "heavy-edge") return PlantedKind::HeavyEdge;
  if (s == "sparse-triangles") return PlantedKind::SparseTriangles;
  if (s == "triangle-free") return PlantedKind::TriangleFree;
  return std::nullopt;
}

inline const char* to_string(PlantedKind k) {
  switch (k) {
    case PlantedKind::HeavyEdge: return "heavy-edge";
    case PlantedKind::SparseTriangles: return "sparse-triangles";
    case PlantedKind::TriangleFree: return "triangle-free";
  }
  return "?";
}

}  // namespace ctri
