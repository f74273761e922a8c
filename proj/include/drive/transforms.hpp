#pragma once

// Random rotations and their inverses: in-place fast Walsh-Hadamard with a
// Rademacher pre-conditioner, and Haar-uniform rotations for low dimensions.

#include <cstdint>
#include <span>
#include <vector>

namespace drive::transforms {

enum class RotationFamily : std::uint8_t { Hadamard = 0, Uniform = 1 };

struct RotationSpec {
  RotationFamily family = RotationFamily::Hadamard;
  std::uint64_t seed = 0;
  std::uint32_t dim = 0;  // padded (power-of-two) dimension

  friend bool operator==(const RotationSpec&, const RotationSpec&) = default;
};

// Dense payload padded with zeros up to the next power of two.
struct PaddedVector {
  std::vector<double> data;
  std::uint32_t original_len = 0;

  std::uint32_t padded_len() const { return static_cast<std::uint32_t>(data.size()); }
};

std::uint32_t next_pow2(std::uint32_t n);

// Appends zeros up to the next power of two. Rejects empty input.
PaddedVector pad(std::span<const double> x);

// v <- (1 / sqrt(len)) * H * v. Length must be a power of two. Applying the
// transform twice returns the original vector.
void fwht_in_place(std::span<double> v);
void fwht_in_place(PaddedVector& v);

// v <- (1 / sqrt(D)) * H * (v o diag(D)) with the Rademacher diagonal derived
// from spec.seed.
PaddedVector randomized_hadamard(const PaddedVector& v, const RotationSpec& spec);
PaddedVector randomized_hadamard_inverse(const PaddedVector& v, const RotationSpec& spec);

struct HaarMatrix {
  std::uint32_t dim = 0;
  std::vector<double> entries;  // row-major dim x dim

  double at(std::uint32_t r, std::uint32_t c) const { return entries[std::size_t{r} * dim + c]; }
};

// Orthonormal matrix distributed per Haar measure: QR of an i.i.d. normal
// matrix with each column of Q multiplied by the sign of the matching
// diagonal entry of the triangular factor. Deterministic per seed.
// Guarded to dim <= 16384.
HaarMatrix sample_haar(const RotationSpec& spec);

std::vector<double> apply_haar(const HaarMatrix& m, std::span<const double> v);
std::vector<double> apply_haar_inverse(const HaarMatrix& m, std::span<const double> v);

// Canonical rotation action shared by encoders and decoders. For the
// Hadamard family this is the randomized Hadamard transform. For the
// Uniform family the matrix is sampled per Haar measure as a product of
// Householder reflectors (one uniform sphere direction per nested
// dimension, plus a final sign), which applies in O(dim^2) without ever
// materializing the matrix. Identical (family, seed, dim) produce a
// bitwise-identical action on either side of the wire.
class Rotator {
 public:
  explicit Rotator(const RotationSpec& spec);

  const RotationSpec& spec() const { return spec_; }

  void forward(std::span<double> v) const;  // v <- R v
  void inverse(std::span<double> v) const;  // v <- R^T v

 private:
  RotationSpec spec_;
  // Uniform family: reflector l occupies coordinates [l, dim) and is stored
  // as a unit vector w with H_l = I - 2 w w^T; degenerate reflectors (sphere
  // direction numerically equal to e1) collapse to the identity and are
  // stored as all-zero blocks.
  std::vector<double> reflectors_;
  double last_sign_ = 1.0;
};

}  // namespace drive::transforms
