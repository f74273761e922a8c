#pragma once

// Comparison compressors at the same bit budget: Hadamard rotation followed
// by 1-bit stochastic quantization to the rotated min/max, and a
// TernGrad-style ternary quantizer with 2.5-sigma clipping.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "drive/bits.hpp"
#include "drive/transforms.hpp"

namespace drive::baselines {

using transforms::RotationSpec;
using transforms::Rotator;

enum class BaselineAlgorithm : std::uint8_t { HadamardSQ = 0, TernGrad = 1 };

struct BaselineMessage {
  BaselineAlgorithm algorithm = BaselineAlgorithm::HadamardSQ;
  RotationSpec rotation;      // HadamardSQ only (Hadamard family)
  std::array<double, 2> aux;  // HadamardSQ: (min, max); TernGrad: (clip scale s, 0)
  BitVec bits;  // HadamardSQ: D_pad bits; TernGrad: 2d bits, magnitude plane then sign plane
  std::uint32_t original_len = 0;
  bool zero_vector = false;

  friend bool operator==(const BaselineMessage&, const BaselineMessage&) = default;
};

// Rotate, then round each coordinate to max with probability
// (v - min) / (max - min) and to min otherwise. sq_seed feeds the rounding
// stream; it stays on the encoder side and is not needed to decode.
BaselineMessage hadamard_sq_encode(std::span<const double> x, const RotationSpec& rotation,
                                   std::uint64_t sq_seed);
std::vector<double> hadamard_sq_decode(const BaselineMessage& msg);

// Clip to magnitude <= 2.5 sigma (population std of the coordinates), set
// s = max |clipped|, send a magnitude bit (1 with probability |clipped|/s)
// and a sign bit per coordinate; decoded_i = sign_i * s * bit_i.
BaselineMessage terngrad_encode(std::span<const double> x, std::uint64_t sq_seed);
std::vector<double> terngrad_decode(const BaselineMessage& msg);

std::vector<double> baseline_decode(const BaselineMessage& msg);

BaselineMessage make_zero_baseline(BaselineAlgorithm alg, std::uint32_t original_len);

}  // namespace drive::baselines
