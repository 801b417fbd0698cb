#pragma once

#include <cctype>
#include <charconv>
#include <optional>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"

namespace ctri {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool parse_u64(std::string_view s, std::uint64_t& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace detail

// Edge-list text format:
//   n <count>          header (the two-integer form "<n> <m>" is also accepted,
//                      in which case exactly m edge lines must follow)
//   j k                one edge per line
// Blank lines and lines starting with '#' are ignored.
inline Graph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::uint64_t n = 0;
  std::optional<std::uint64_t> declared_m;
  std::set<Edge> seen;
  std::vector<Edge> edges;

  while (std::getline(in, line)) {
    ++lineno;
    auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    if (!have_header) {
      std::uint64_t a = 0, b = 0;
      if (tok.size() == 2 && tok[0] == "n" && detail::parse_u64(tok[1], a)) {
        n = a;
      } else if (tok.size() == 2 && detail::parse_u64(tok[0], a) && detail::parse_u64(tok[1], b)) {
        n = a;
        declared_m = b;
      } else {
        throw ParseError(lineno, "expected header \"n <count>\"");
      }
      if (n > UINT32_MAX) throw ParseError(lineno, "vertex count too large");
      have_header = true;
      continue;
    }
    std::uint64_t j = 0, k = 0;
    if (tok.size() != 2 || !detail::parse_u64(tok[0], j) || !detail::parse_u64(tok[1], k))
      throw ParseError(lineno, "malformed edge line \"" + line + "\"");
    if (j >= n || k >= n)
      throw ParseError(lineno, "vertex id out of range (n=" + std::to_string(n) + ")");
    if (j == k) throw ParseError(lineno, "self-loop at vertex " + std::to_string(j));
    const Edge e = Edge::make(static_cast<VertexId>(j), static_cast<VertexId>(k));
    if (!seen.insert(e).second)
      throw ParseError(lineno, "duplicate edge " + std::to_string(e.u) + " " + std::to_string(e.v));
    edges.push_back(e);
  }
  if (!have_header) throw ParseError(lineno + 1, "missing header");
  if (declared_m && *declared_m != edges.size())
    throw ParseError(lineno, "header declares " + std::to_string(*declared_m) + " edges, found " +
                                 std::to_string(edges.size()));
  return Graph(static_cast<std::size_t>(n), edges);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "n " << g.n() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

inline Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_edge_list(in);
}

inline void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_edge_list(out, g);
}

// Canonical triangle listing: "j k l" with j<k<l, lexicographic order.
inline void write_triangles(std::ostream& out, const TriangleSet& ts) {
  for (const Triangle& t : ts) out << t.a << ' ' << t.b << ' ' << t.c << '\n';
}

}  // namespace ctri
