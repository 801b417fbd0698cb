#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ctri {

// Malformed input file; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A node program tried to put more than B bits on one directed edge in one
// round, or addressed a non-neighbor.
class BandwidthFault : public std::runtime_error {
 public:
  BandwidthFault(std::uint64_t round, std::uint32_t from, std::uint32_t to, const std::string& what)
      : std::runtime_error("round " + std::to_string(round) + ", edge " + std::to_string(from) +
                           "->" + std::to_string(to) + ": " + what),
        round_(round), from_(from), to_(to) {}
  std::uint64_t round() const { return round_; }
  std::uint32_t from() const { return from_; }
  std::uint32_t to() const { return to_; }

 private:
  std::uint64_t round_;
  std::uint32_t from_, to_;
};

}  // namespace ctri
