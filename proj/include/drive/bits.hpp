#pragma once

// Packed bit array, LSB-first within each byte; unused trailing bits are
// kept zero so serialized payloads are canonical.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace drive {

class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t nbits) : nbits_(nbits), bytes_((nbits + 7) / 8, 0) {}

  std::size_t size() const { return nbits_; }
  bool empty() const { return nbits_ == 0; }

  bool get(std::size_t i) const { return (bytes_[i >> 3] >> (i & 7)) & 1u; }
  void set(std::size_t i, bool b) {
    const std::uint8_t mask = static_cast<std::uint8_t>(1u << (i & 7));
    if (b)
      bytes_[i >> 3] |= mask;
    else
      bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
  }

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  static BitVec from_bytes(std::vector<std::uint8_t> bytes, std::size_t nbits) {
    BitVec v;
    v.nbits_ = nbits;
    v.bytes_ = std::move(bytes);
    return v;
  }

  friend bool operator==(const BitVec&, const BitVec&) = default;

 private:
  std::size_t nbits_ = 0;
  std::vector<std::uint8_t> bytes_;
};

}  // namespace drive
