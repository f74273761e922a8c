#pragma once

// Bit-exact wire format (.dwf) for all compressed messages.
//
//   offset  size  field
//   0       1     magic 0x44
//   1       1     version 0x01
//   2       1     algorithm id: 0 Drive, 1 DrivePlus, 2 HadamardSQ, 3 TernGrad
//   3       1     rotation id: 0 Hadamard, 1 Uniform, 255 none
//   4       1     flags (bit 0: zero vector)
//   5       4     original_len, u32 little-endian
//   9       8     rotation seed, u64 little-endian (0 when rotation id is 255)
//   17      2     reserved, must be zero
//   19      ...   scales: f64 little-endian, count fixed by algorithm
//                 (Drive 1, DrivePlus 2, HadamardSQ 2, TernGrad 1),
//                 then payload bits packed LSB-first, trailing bits zero.
//
// A set zero-vector flag ends the frame at byte 19: no scales, no payload.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "drive/baselines.hpp"
#include "drive/quantizers.hpp"

namespace drive::codec {

inline constexpr std::uint8_t kMagic = 0x44;
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderBytes = 19;
inline constexpr std::uint8_t kRotationNone = 255;

enum class CodecError : std::uint8_t {
  BadMagic = 0,
  BadVersion = 1,
  BadAlgorithm = 2,
  BadRotation = 3,
  Truncated = 4,
  TrailingGarbage = 5,
  Malformed = 6,
};

class CodecParseError : public std::runtime_error {
 public:
  CodecParseError(CodecError kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  CodecError kind() const { return kind_; }

 private:
  CodecError kind_;
};

using Message = std::variant<quantizers::EncodedVector, baselines::BaselineMessage>;

std::vector<std::uint8_t> serialize(const quantizers::EncodedVector& msg);
std::vector<std::uint8_t> serialize(const baselines::BaselineMessage& msg);
std::vector<std::uint8_t> serialize(const Message& msg);

// Exact inverse of serialize; throws CodecParseError on malformed input.
Message deserialize(std::span<const std::uint8_t> bytes);

// Serialized length in bits.
std::size_t bit_budget(const Message& msg);

std::vector<double> decode_message(const Message& msg);

}  // namespace drive::codec
