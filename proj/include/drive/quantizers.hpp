#pragma once

// DRIVE and DRIVE+ encoders/decoders and their scale policies. DRIVE sends
// (S, sign(R(x))) and reconstructs R^-1(S * sign); DRIVE+ replaces the
// symmetric levels with the two exact 2-means centroids of the rotated
// vector.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "drive/bits.hpp"
#include "drive/transforms.hpp"

namespace drive::quantizers {

using transforms::RotationFamily;
using transforms::RotationSpec;
using transforms::Rotator;

enum class ScalePolicy : std::uint8_t {
  MinSSE = 0,               // S = |R(x)|_1 / D
  Unbiased = 1,             // S = |x|_2^2 / |R(x)|_1 ; DRIVE+: scale = |x|_2^2 / |c|_2^2
  ConstantExpectation = 2,  // S = |x|_2 (D-1) B(1/2,(D-1)/2) / (2D), Uniform only
  ErrorFeedbackClipped = 3  // S = min{2 |R(x)|_1 / D, |x|_2^2 / |R(x)|_1}
};

enum class Algorithm : std::uint8_t { Drive = 0, DrivePlus = 1 };

struct EncodedVector {
  Algorithm algorithm = Algorithm::Drive;
  RotationSpec rotation;
  double scale0 = 0.0;  // Drive: S. DrivePlus: scaled low centroid (scale0 <= scale1)
  double scale1 = 0.0;  // DrivePlus only
  BitVec bits;          // one bit per padded coordinate
  std::uint32_t original_len = 0;
  bool zero_vector = false;

  friend bool operator==(const EncodedVector&, const EncodedVector&) = default;
};

// Rejects x = 0 (the wire codec's zero flag handles that case) and
// ConstantExpectation with a Hadamard rotation.
EncodedVector drive_encode(std::span<const double> x, const RotationSpec& spec, ScalePolicy policy);
EncodedVector drive_encode(std::span<const double> x, const Rotator& rot, ScalePolicy policy);

std::vector<double> drive_decode(const EncodedVector& msg);
std::vector<double> drive_decode(const EncodedVector& msg, const Rotator& rot);

// policy must be MinSSE (centroid scale 1) or Unbiased.
EncodedVector drive_plus_encode(std::span<const double> x, const RotationSpec& spec,
                                ScalePolicy policy);
EncodedVector drive_plus_encode(std::span<const double> x, const Rotator& rot, ScalePolicy policy);

std::vector<double> drive_plus_decode(const EncodedVector& msg);
std::vector<double> drive_plus_decode(const EncodedVector& msg, const Rotator& rot);

// Decodes either algorithm, truncated to original_len.
std::vector<double> decode(const EncodedVector& msg);
std::vector<double> decode(const EncodedVector& msg, const Rotator& rot);

// Reconstruction in the padded space (no truncation); used by error audits.
std::vector<double> decode_padded(const EncodedVector& msg, const Rotator& rot);

// Returns (measured, closed-form) SSE for a Drive message produced from x:
// lhs = |x_pad - xhat_pad|_2^2, rhs = |x|_2^2 - 2 S |R(x)|_1 + D S^2.
std::pair<double, double> sse_identity(std::span<const double> x, const EncodedVector& msg);

EncodedVector make_zero_message(Algorithm alg, std::uint32_t original_len);

}  // namespace drive::quantizers
