#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "framing.hpp"
#include "graph.hpp"
#include "hash_family.hpp"

namespace ctri {

// All logarithms are base 2.
inline double log2n(std::size_t n) { return n <= 1 ? 0.0 : std::log2(static_cast<double>(n)); }

inline double npow(std::size_t n, double e) { return std::pow(static_cast<double>(n), e); }

// floor() that tolerates pow() landing a hair below an exact integer.
inline std::uint64_t floor_guarded(double x) {
  return static_cast<std::uint64_t>(std::floor(x + 1e-9));
}

struct AlgoConfig {
  double eps = 0.5;
  std::optional<double> m_bar;  // default: sqrt(54 n^{1+eps} log n)
  double c_stop = 4.0;
  std::optional<double> c_rep;  // default: 4 for finding, 3 for listing
  int log_base = 2;

  void validate() const {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError("eps must lie in [0,1]");
    if (m_bar && !(*m_bar > 0.0)) throw ConfigError("m_bar must be positive");
    if (!(c_stop > 0.0)) throw ConfigError("c_stop must be positive");
    if (c_rep && !(*c_rep > 0.0)) throw ConfigError("c_rep must be positive");
    if (log_base != 2) throw ConfigError("log_base is fixed to 2");
  }
};

inline constexpr double kCRepFind = 4.0;
inline constexpr double kCRepList = 3.0;

inline double x_probability(std::size_t n, double eps) { return 1.0 / (9.0 * npow(n, eps)); }

inline double m_bar_auto(std::size_t n, double eps) {
  return std::sqrt(54.0 * npow(n, 1.0 + eps) * log2n(n));
}

// Largest |S_j| that A1 transmits.
inline double a1_set_cap(std::size_t n, double eps) { return 4.0 * npow(n, 1.0 - eps); }

inline std::uint64_t a2_range(std::size_t n, double eps) {
  return std::max<std::uint64_t>(1, floor_guarded(npow(n, eps / 2.0)));
}

// Largest |E_a^j| that A2 transmits.
inline double a2_set_cap(std::size_t n, double eps) {
  return 8.0 + 4.0 * static_cast<double>(n) / static_cast<double>(a2_range(n, eps));
}

inline double a3_cap_real(std::size_t n, double eps, double c_stop) {
  return c_stop * (npow(n, 1.0 - eps) + npow(n, (1.0 + eps) / 2.0) * log2n(n));
}

inline std::uint64_t a3_cap(std::size_t n, double eps, double c_stop) {
  return static_cast<std::uint64_t>(std::ceil(a3_cap_real(n, eps, c_stop)));
}

struct EpsChoice {
  double raw = 0.0;  // unclamped solution, may be outside [0,1] or -inf
  double eps = 0.0;
  bool clamped = false;
};

inline EpsChoice clamp_eps(double raw) {
  EpsChoice c;
  c.raw = raw;
  c.eps = std::isnan(raw) ? 0.0 : std::clamp(raw, 0.0, 1.0);
  c.clamped = !(raw >= 0.0 && raw <= 1.0);
  return c;
}

// n^eps = n^{1/3} / (log n)^{2/3}
inline EpsChoice find_eps(std::size_t n) {
  if (n < 2) return clamp_eps(std::nan(""));
  const double ln = std::log(static_cast<double>(n));
  return clamp_eps((ln / 3.0 - (2.0 / 3.0) * std::log(log2n(n))) / ln);
}

// n^eps = n^{1/2} / (log n)^2
inline EpsChoice list_eps(std::size_t n) {
  if (n < 2) return clamp_eps(std::nan(""));
  const double ln = std::log(static_cast<double>(n));
  return clamp_eps((ln / 2.0 - 2.0 * std::log(log2n(n))) / ln);
}

inline std::size_t find_reps(double delta, double c_rep = kCRepFind) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(c_rep * std::log(1.0 / delta))));
}

inline std::size_t list_reps(std::size_t n, double c_rep = kCRepList) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(c_rep * log2n(n))));
}

enum class StageKind { A1, A2, A3 };

inline const char* to_string(StageKind k) {
  switch (k) {
    case StageKind::A1: return "a1";
    case StageKind::A2: return "a2";
    case StageKind::A3: return "a3";
  }
  return "?";
}

inline std::size_t bandwidth_for(std::size_t n, unsigned beta) {
  return static_cast<std::size_t>(beta) * id_bits_for(n);
}

inline std::uint64_t rounds_for(std::size_t bits, std::size_t bandwidth) {
  return (bits + bandwidth - 1) / bandwidth;
}

// Fixed window lengths used when stages run back to back. Each covers the
// worst case allowed by the stage's own caps, plus one round for the last
// delivery to be processed.
inline std::uint64_t a1_window(std::size_t n, double eps, unsigned beta) {
  const std::size_t b = bandwidth_for(n, beta);
  const auto cnt = std::min<std::size_t>(floor_guarded(a1_set_cap(n, eps)), n > 0 ? n - 1 : 0);
  const std::size_t bits = std::max(set_frame_bits(cnt, id_bits_for(n)), flag_frame_bits());
  return rounds_for(bits, b) + 1;
}

inline std::uint64_t a2_window(std::size_t n, double eps, unsigned beta) {
  const std::size_t b = bandwidth_for(n, beta);
  const HashFamily fam = HashFamily::standard(std::max<std::size_t>(n, 1), a2_range(n, eps));
  const auto cnt = std::min<std::size_t>(floor_guarded(a2_set_cap(n, eps)), n > 0 ? n - 1 : 0);
  const std::size_t bits = std::max(set_frame_bits(cnt, id_bits_for(n)), flag_frame_bits());
  return rounds_for(hash_frame_bits(fam, 3), b) + rounds_for(bits, b) + 1;
}

struct StagePlan {
  StageKind kind;
  std::uint64_t start = 0;
  std::uint64_t length = 0;
};

struct CompositionPlan {
  std::string name;
  std::size_t n = 0;
  unsigned beta = 2;
  EpsChoice eps;
  std::size_t reps = 0;
  double m_bar = 0.0;
  double c_stop = 4.0;
  double c_rep = 0.0;
  double x_prob = 0.0;
  std::vector<StagePlan> stages;

  std::uint64_t total_rounds() const {
    return stages.empty() ? 0 : stages.back().start + stages.back().length;
  }
};

inline std::uint64_t stage_window(StageKind k, std::size_t n, double eps, unsigned beta, double c_stop) {
  switch (k) {
    case StageKind::A1: return a1_window(n, eps, beta);
    case StageKind::A2: return a2_window(n, eps, beta);
    case StageKind::A3: return std::max<std::uint64_t>(1, a3_cap(n, eps, c_stop));
  }
  return 1;
}

inline CompositionPlan make_plan(std::string name, std::size_t n, unsigned beta, EpsChoice eps,
                                 std::size_t reps, std::vector<StageKind> per_rep,
                                 const AlgoConfig& cfg, double c_rep) {
  CompositionPlan p;
  p.name = std::move(name);
  p.n = n;
  p.beta = beta;
  p.eps = eps;
  p.reps = reps;
  p.m_bar = cfg.m_bar ? *cfg.m_bar : m_bar_auto(n, eps.eps);
  p.c_stop = cfg.c_stop;
  p.c_rep = c_rep;
  p.x_prob = x_probability(n, eps.eps);
  std::uint64_t at = 0;
  for (std::size_t r = 0; r < reps; ++r)
    for (StageKind k : per_rep) {
      const auto len = stage_window(k, n, eps.eps, beta, cfg.c_stop);
      p.stages.push_back({k, at, len});
      at += len;
    }
  return p;
}

// Repeat (A1; A3) with the finding exponent.
inline CompositionPlan find_plan(std::size_t n, unsigned beta, double delta, const AlgoConfig& cfg = {}) {
  const double c = cfg.c_rep.value_or(kCRepFind);
  return make_plan("find", n, beta, find_eps(n), find_reps(delta, c), {StageKind::A1, StageKind::A3},
                   cfg, c);
}

// Repeat (A2; A3) with the listing exponent.
inline CompositionPlan list_plan(std::size_t n, unsigned beta, const AlgoConfig& cfg = {}) {
  const double c = cfg.c_rep.value_or(kCRepList);
  return make_plan("list", n, beta, list_eps(n), list_reps(n, c), {StageKind::A2, StageKind::A3},
                   cfg, c);
}

// Single stage with the configured eps (used for component runs).
inline CompositionPlan single_plan(StageKind k, std::size_t n, unsigned beta, const AlgoConfig& cfg) {
  return make_plan(to_string(k), n, beta, clamp_eps(cfg.eps), 1, {k}, cfg, 1.0);
}

// Instrumentation shared by the nodes of one run. Nodes only write their own
// slots; nothing here is read back by a node program.
struct SubATrace {
  struct Entry {
    std::uint32_t iteration;
    std::uint8_t step;  // 1: listed from an S-set, 3: listed from a T-bar set
    VertexId node;
    Triangle triangle;
  };
  std::vector<std::uint8_t> in_x;
  std::vector<std::uint32_t> exit_iteration;  // 0 = never left U
  std::vector<std::uint64_t> finish_round;
  std::vector<std::uint32_t> t_bar_size;      // |T-bar(j)| in the node's last iteration
  std::vector<Entry> entries;
  std::uint64_t start_round = 0;
  double m_bar = 0.0;

  void ensure(std::size_t n) {
    if (exit_iteration.size() == n) return;
    in_x.assign(n, 0);
    exit_iteration.assign(n, 0);
    finish_round.assign(n, 0);
    t_bar_size.assign(n, 0);
  }
  bool complete() const {
    return std::all_of(exit_iteration.begin(), exit_iteration.end(), [](auto e) { return e > 0; });
  }
  std::uint32_t iterations() const {
    return exit_iteration.empty() ? 0 : *std::max_element(exit_iteration.begin(), exit_iteration.end());
  }
  std::size_t x_size() const {
    return static_cast<std::size_t>(std::count(in_x.begin(), in_x.end(), 1));
  }
  // |U| at the start of each iteration, from the exit record.
  std::vector<std::size_t> u_sizes() const {
    std::vector<std::size_t> out;
    const std::uint32_t last = iterations();
    for (std::uint32_t it = 1; it <= last; ++it) {
      std::size_t c = 0;
      for (auto e : exit_iteration) c += (e == 0 || e >= it);
      out.push_back(c);
    }
    return out;
  }
};

struct RunTrace {
  bool record_steps = false;
  std::size_t a1_max_sent = 0;  // largest S_j actually transmitted
  std::size_t a2_max_sent = 0;  // largest E_a^j actually transmitted
  std::size_t a1_overflows = 0;
  std::size_t a2_overflows = 0;
  std::size_t window_overruns = 0;  // A1/A2 stages still busy at their window end
  std::vector<SubATrace> sub_a;

  SubATrace& sub_a_at(std::size_t idx, std::size_t n) {
    if (sub_a.size() <= idx) sub_a.resize(idx + 1);
    sub_a[idx].ensure(n);
    return sub_a[idx];
  }
};

}  // namespace ctri
