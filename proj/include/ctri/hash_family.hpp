#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bits.hpp"
#include "rng.hpp"

namespace ctri {

// Smallest b with 2^b >= x (0 for x <= 1).
inline unsigned ceil_log2(std::uint64_t x) {
  return x <= 1 ? 0U : static_cast<unsigned>(std::bit_width(x - 1));
}

inline bool is_prime(std::uint64_t x) {
  if (x < 2) return false;
  if (x % 2 == 0) return x == 2;
  for (std::uint64_t d = 3; d * d <= x; d += 2)
    if (x % d == 0) return false;
  return true;
}

inline std::uint64_t next_prime(std::uint64_t x) {
  if (x <= 2) return 2;
  while (!is_prime(x)) ++x;
  return x;
}

// Public parameters shared by every member of a polynomial family: domain
// [0, domain), range [0, range) and the field size q.
struct HashFamily {
  std::uint64_t domain = 1;
  std::uint64_t range = 1;
  std::uint64_t q = 2;

  // q is the smallest prime >= max(domain, 4 range^2); the bias of reducing
  // Z_q onto the range is then at most range/q.
  static HashFamily standard(std::uint64_t domain, std::uint64_t range) {
    if (domain < 1 || range < 1) throw std::invalid_argument("domain and range must be >= 1");
    return {domain, range, next_prime(std::max<std::uint64_t>(domain, 4 * range * range))};
  }

  unsigned q_bits() const { return ceil_log2(q); }
  unsigned range_bits() const { return ceil_log2(range); }
  friend bool operator==(const HashFamily&, const HashFamily&) = default;
};

// h(x) = ((sum_i a_i x^i) mod q) mod range, a polynomial of degree k-1 over Z_q.
//
// Wire encoding (big-endian):
//   k:4 | ceil(log2 q):6 | ceil(log2 range):6 | a_0 .. a_{k-1}, ceil(log2 q) bits each
// Decoding needs the family (all nodes know n and therefore domain, range, q);
// the header fields are checked against it.
class HashFn {
 public:
  static constexpr unsigned kHeaderBits = 16;
  static constexpr unsigned kMaxK = 15;

  HashFn(const HashFamily& family, std::vector<std::uint64_t> coeffs)
      : family_(family), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty() || coeffs_.size() > kMaxK)
      throw std::invalid_argument("hash order k must lie in [1, 15]");
    if (family_.q < family_.domain || !is_prime(family_.q))
      throw std::invalid_argument("q must be a prime >= domain size");
    if (family_.range < 1) throw std::invalid_argument("range must be >= 1");
    if (family_.q_bits() > 63 || family_.range_bits() > 63)
      throw std::invalid_argument("family too large for the 6-bit header fields");
    for (auto a : coeffs_)
      if (a >= family_.q) throw std::invalid_argument("coefficient out of Z_q");
  }

  unsigned k() const { return static_cast<unsigned>(coeffs_.size()); }
  std::uint64_t q() const { return family_.q; }
  std::uint64_t domain_size() const { return family_.domain; }
  std::uint64_t range_size() const { return family_.range; }
  const HashFamily& family() const { return family_; }
  const std::vector<std::uint64_t>& coefficients() const { return coeffs_; }

  // Throws std::domain_error for x outside [0, domain).
  std::uint64_t eval(std::uint64_t x) const {
    if (x >= family_.domain) throw std::domain_error("hash input outside the domain");
    return eval_unchecked(x);
  }
  std::uint64_t operator()(std::uint64_t x) const { return eval(x); }

  std::uint64_t eval_unchecked(std::uint64_t x) const {
    if (family_.range == 1) return 0;
    if (family_.q < (std::uint64_t{1} << 32)) {
      const std::uint64_t q = family_.q, xr = x % q;
      std::uint64_t acc = 0;
      for (std::size_t i = coeffs_.size(); i-- > 0;) acc = (acc * xr + coeffs_[i]) % q;
      return acc % family_.range;
    }
    const unsigned __int128 q = family_.q;
    unsigned __int128 acc = 0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) acc = (acc * x + coeffs_[i]) % q;
    return static_cast<std::uint64_t>(acc) % family_.range;
  }

  std::size_t encoded_bits() const { return kHeaderBits + k() * family_.q_bits(); }

  BitString encode() const {
    BitString b;
    b.push(k(), 4);
    b.push(family_.q_bits(), 6);
    b.push(family_.range_bits(), 6);
    for (auto a : coeffs_) b.push(a, family_.q_bits());
    return b;
  }

  // Rejects empty, truncated, oversized or header-inconsistent strings with
  // std::invalid_argument.
  static HashFn decode(const BitString& bits, const HashFamily& family) {
    if (bits.size() < kHeaderBits) throw std::invalid_argument("hash encoding truncated");
    BitReader r(bits);
    const auto k = static_cast<unsigned>(r.read(4));
    const auto qb = static_cast<unsigned>(r.read(6));
    const auto rb = static_cast<unsigned>(r.read(6));
    if (k == 0) throw std::invalid_argument("hash encoding has k = 0");
    if (qb != family.q_bits() || rb != family.range_bits())
      throw std::invalid_argument("hash header does not match the family");
    const std::size_t expect = kHeaderBits + static_cast<std::size_t>(k) * qb;
    if (bits.size() < expect) throw std::invalid_argument("hash encoding truncated");
    if (bits.size() > expect) throw std::invalid_argument("hash encoding oversized");
    std::vector<std::uint64_t> coeffs(k);
    for (auto& a : coeffs) a = r.read(qb);
    return HashFn(family, std::move(coeffs));
  }

  friend bool operator==(const HashFn&, const HashFn&) = default;

 private:
  HashFamily family_;
  std::vector<std::uint64_t> coeffs_;
};

// Uniform member of the k-wise independent family over the standard field.
inline HashFn sample_hash(unsigned k, std::uint64_t domain, std::uint64_t range, Rng& rng) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const HashFamily fam = HashFamily::standard(domain, range);
  std::vector<std::uint64_t> coeffs(k);
  for (auto& a : coeffs) a = uniform_below(rng, fam.q);
  return HashFn(fam, std::move(coeffs));
}

struct Lemma1Estimate {
  std::size_t trials = 0;
  std::size_t hits = 0;
  double estimate = 0.0;
  double bound = 0.0;         // 3 / (4 |Y|^2)
  double bucket_limit = 0.0;  // 4 (2 + (|X|-2)/|Y|)
  double sigma = 0.0;         // binomial sd of the estimator at p = bound
  bool passes() const { return estimate >= bound - 3.0 * sigma; }
};

// Monte-Carlo estimate of Pr[h(x)=h(x')=y and |h^{-1}(y)| <= 4(2+(|X|-2)/|Y|)]
// for h drawn from the degree-2 (3-wise independent) polynomial family.
inline Lemma1Estimate lemma1_estimate(std::uint64_t domain, std::uint64_t range, std::uint64_t x,
                                      std::uint64_t x2, std::uint64_t y, std::size_t trials,
                                      Rng& rng) {
  if (x == x2) throw std::invalid_argument("lemma1_estimate needs x != x'");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (x >= domain || x2 >= domain || y >= range)
    throw std::domain_error("lemma1_estimate arguments outside domain/range");
  Lemma1Estimate est;
  est.trials = trials;
  const double X = static_cast<double>(domain), Y = static_cast<double>(range);
  est.bucket_limit = 4.0 * (2.0 + (X - 2.0) / Y);
  est.bound = 3.0 / (4.0 * Y * Y);
  for (std::size_t t = 0; t < trials; ++t) {
    const HashFn h = sample_hash(3, domain, range, rng);
    if (h.eval_unchecked(x) != y || h.eval_unchecked(x2) != y) continue;
    std::size_t bucket = 0;
    for (std::uint64_t z = 0; z < domain; ++z) bucket += h.eval_unchecked(z) == y;
    if (static_cast<double>(bucket) <= est.bucket_limit) ++est.hits;
  }
  est.estimate = static_cast<double>(est.hits) / static_cast<double>(trials);
  est.sigma = std::sqrt(est.bound * (1.0 - est.bound) / static_cast<double>(trials));
  return est;
}

}  // namespace ctri
