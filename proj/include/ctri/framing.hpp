#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "bits.hpp"
#include "graph.hpp"
#include "hash_family.hpp"

namespace ctri {

// 8-bit phase tag at the start of every frame.
enum class Tag : std::uint8_t {
  XFlag = 0,
  Hash = 1,
  EdgeSet = 2,
  SSet = 3,
  Overflow = 4,
  TBarSet = 5,
  UFlag = 6,
  NeighborhoodX = 7,
};

inline constexpr unsigned kTagBits = 8;
inline constexpr unsigned kLenBits = 8;
// A length field holding 255 is followed by an explicit (id_bits+1)-bit count.
inline constexpr std::uint64_t kLenEscape = 255;

enum class FrameKind { Flag, Set, Hash };

inline FrameKind frame_kind(Tag t) {
  switch (t) {
    case Tag::XFlag:
    case Tag::Overflow:
    case Tag::UFlag: return FrameKind::Flag;
    case Tag::Hash: return FrameKind::Hash;
    case Tag::EdgeSet:
    case Tag::SSet:
    case Tag::TBarSet:
    case Tag::NeighborhoodX: return FrameKind::Set;
  }
  throw std::invalid_argument("unknown frame tag");
}

inline unsigned id_bits_for(std::size_t n) { return std::max(1U, ceil_log2(n)); }

inline std::size_t length_field_bits(std::size_t count, unsigned id_bits) {
  return count < kLenEscape ? kLenBits : kLenBits + id_bits + 1;
}

// Bits of a set frame: tag + length + count ids.
inline std::size_t set_frame_bits(std::size_t count, unsigned id_bits) {
  return kTagBits + length_field_bits(count, id_bits) + count * id_bits;
}

inline constexpr std::size_t flag_frame_bits() { return kTagBits + 1; }

inline std::size_t hash_frame_bits(const HashFamily& fam, unsigned k) {
  return kTagBits + HashFn::kHeaderBits + static_cast<std::size_t>(k) * fam.q_bits();
}

inline BitString make_set_frame(Tag tag, std::span<const VertexId> ids, unsigned id_bits) {
  if (frame_kind(tag) != FrameKind::Set) throw std::invalid_argument("not a set tag");
  BitString b;
  b.reserve(set_frame_bits(ids.size(), id_bits));
  b.push(static_cast<std::uint8_t>(tag), kTagBits);
  if (ids.size() < kLenEscape) {
    b.push(ids.size(), kLenBits);
  } else {
    b.push(kLenEscape, kLenBits);
    b.push(ids.size(), id_bits + 1);
  }
  for (VertexId v : ids) b.push(v, id_bits);
  return b;
}

inline BitString make_flag_frame(Tag tag, bool value) {
  if (frame_kind(tag) != FrameKind::Flag) throw std::invalid_argument("not a flag tag");
  BitString b;
  b.push(static_cast<std::uint8_t>(tag), kTagBits);
  b.push_bit(value);
  return b;
}

inline BitString make_hash_frame(const HashFn& h) {
  BitString b;
  b.push(static_cast<std::uint8_t>(Tag::Hash), kTagBits);
  b.append(h.encode());
  return b;
}

inline Tag frame_tag(const BitString& frame) {
  if (frame.size() < kTagBits) throw std::invalid_argument("frame shorter than its tag");
  const auto t = frame.extract(0, kTagBits);
  if (t > static_cast<std::uint64_t>(Tag::NeighborhoodX)) throw std::invalid_argument("unknown frame tag");
  return static_cast<Tag>(t);
}

inline std::vector<VertexId> parse_set_frame(const BitString& frame, unsigned id_bits) {
  if (frame_kind(frame_tag(frame)) != FrameKind::Set) throw std::invalid_argument("not a set frame");
  BitReader r(frame, kTagBits);
  std::uint64_t count = r.read(kLenBits);
  if (count == kLenEscape) count = r.read(id_bits + 1);
  if (r.remaining() != count * id_bits) throw std::invalid_argument("set frame length mismatch");
  std::vector<VertexId> ids(count);
  for (auto& v : ids) v = static_cast<VertexId>(r.read(id_bits));
  return ids;
}

inline bool parse_flag_frame(const BitString& frame) {
  if (frame_kind(frame_tag(frame)) != FrameKind::Flag || frame.size() != flag_frame_bits())
    throw std::invalid_argument("not a flag frame");
  return frame.bit(kTagBits);
}

inline HashFn parse_hash_frame(const BitString& frame, const HashFamily& fam) {
  if (frame_tag(frame) != Tag::Hash) throw std::invalid_argument("not a hash frame");
  BitString body;
  BitReader r(frame, kTagBits);
  while (r.remaining() > 0) {
    const unsigned w = static_cast<unsigned>(std::min<std::size_t>(64, r.remaining()));
    body.push(r.read(w), w);
  }
  return HashFn::decode(body, fam);
}

// Splits a concatenation of frames back into frames using only the
// self-describing headers.
inline std::vector<BitString> split_frames(const BitString& stream, unsigned id_bits) {
  std::vector<BitString> out;
  BitReader r(stream);
  while (r.remaining() > 0) {
    const std::size_t start = r.position();
    const auto tag_value = r.read(kTagBits);
    if (tag_value > static_cast<std::uint64_t>(Tag::NeighborhoodX))
      throw std::invalid_argument("unknown frame tag in stream");
    std::size_t body = 0;
    switch (frame_kind(static_cast<Tag>(tag_value))) {
      case FrameKind::Flag: body = 1; break;
      case FrameKind::Set: {
        std::uint64_t count = r.read(kLenBits);
        if (count == kLenEscape) count = r.read(id_bits + 1);
        body = count * id_bits;
        break;
      }
      case FrameKind::Hash: {
        const auto k = r.read(4);
        const auto qb = r.read(6);
        r.read(6);
        body = k * qb;
        break;
      }
    }
    if (r.remaining() < body) throw std::invalid_argument("truncated frame in stream");
    const std::size_t end = r.position() + body;
    BitString f;
    BitReader copy(stream, start);
    while (copy.position() < end) {
      const unsigned w = static_cast<unsigned>(std::min<std::size_t>(64, end - copy.position()));
      f.push(copy.read(w), w);
    }
    out.push_back(std::move(f));
    r = BitReader(stream, end);
  }
  return out;
}

}  // namespace ctri
