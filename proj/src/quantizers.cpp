#include "drive/quantizers.hpp"

#include <cmath>
#include <stdexcept>

#include "drive/analytics.hpp"
#include "drive/kmeans1d.hpp"

namespace drive::quantizers {

namespace {

double l1_norm(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += std::abs(e);
  return s;
}

double sq_norm(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return s;
}

void require_nonzero(double sq) {
  if (sq == 0.0) throw std::invalid_argument("encode: zero vector (use the codec zero flag)");
}

double drive_scale(ScalePolicy policy, RotationFamily family, std::uint32_t dpad, double l1_rot,
                   double sq_orig) {
  const double d = static_cast<double>(dpad);
  switch (policy) {
    case ScalePolicy::MinSSE:
      return l1_rot / d;
    case ScalePolicy::Unbiased:
      return sq_orig / l1_rot;
    case ScalePolicy::ConstantExpectation: {
      if (family != RotationFamily::Uniform)
        throw std::invalid_argument("encode: ConstantExpectation requires the Uniform rotation");
      // |x|_2 / E|T|_1 with T uniform on the unit sphere.
      return std::sqrt(sq_orig) / analytics::expected_l1_on_sphere(dpad);
    }
    case ScalePolicy::ErrorFeedbackClipped:
      return std::min(2.0 * l1_rot / d, sq_orig / l1_rot);
  }
  throw std::invalid_argument("encode: unknown scale policy");
}

}  // namespace

EncodedVector drive_encode(std::span<const double> x, const Rotator& rot, ScalePolicy policy) {
  auto padded = transforms::pad(x);
  if (padded.padded_len() != rot.spec().dim)
    throw std::invalid_argument("drive_encode: rotation dim does not match padded input");
  const double sq = sq_norm(padded.data);
  require_nonzero(sq);

  rot.forward(padded.data);
  const double l1 = l1_norm(padded.data);

  EncodedVector msg;
  msg.algorithm = Algorithm::Drive;
  msg.rotation = rot.spec();
  msg.original_len = padded.original_len;
  msg.scale0 = drive_scale(policy, rot.spec().family, padded.padded_len(), l1, sq);
  msg.bits = BitVec(padded.padded_len());
  for (std::size_t i = 0; i < padded.data.size(); ++i) msg.bits.set(i, padded.data[i] >= 0.0);
  return msg;
}

EncodedVector drive_encode(std::span<const double> x, const RotationSpec& spec,
                           ScalePolicy policy) {
  return drive_encode(x, Rotator(spec), policy);
}

EncodedVector drive_plus_encode(std::span<const double> x, const Rotator& rot,
                                ScalePolicy policy) {
  if (policy != ScalePolicy::MinSSE && policy != ScalePolicy::Unbiased)
    throw std::invalid_argument("drive_plus_encode: policy must be MinSSE or Unbiased");
  auto padded = transforms::pad(x);
  if (padded.padded_len() != rot.spec().dim)
    throw std::invalid_argument("drive_plus_encode: rotation dim does not match padded input");
  const double sq = sq_norm(padded.data);
  require_nonzero(sq);

  rot.forward(padded.data);
  const auto km = kmeans1d::two_means_exact(padded.data);

  double centroid_scale = 1.0;
  if (policy == ScalePolicy::Unbiased) {
    double c_sq = 0.0;
    for (std::size_t i = 0; i < padded.data.size(); ++i) {
      const double c = km.assignment[i] ? km.c1 : km.c0;
      c_sq += c * c;
    }
    centroid_scale = sq / c_sq;
  }

  EncodedVector msg;
  msg.algorithm = Algorithm::DrivePlus;
  msg.rotation = rot.spec();
  msg.original_len = padded.original_len;
  msg.scale0 = centroid_scale * km.c0;
  msg.scale1 = centroid_scale * km.c1;
  msg.bits = BitVec(padded.padded_len());
  for (std::size_t i = 0; i < km.assignment.size(); ++i) msg.bits.set(i, km.assignment[i] != 0);
  return msg;
}

EncodedVector drive_plus_encode(std::span<const double> x, const RotationSpec& spec,
                                ScalePolicy policy) {
  return drive_plus_encode(x, Rotator(spec), policy);
}

std::vector<double> decode_padded(const EncodedVector& msg, const Rotator& rot) {
  const std::uint32_t dpad = transforms::next_pow2(msg.original_len);
  if (msg.zero_vector) return std::vector<double>(dpad, 0.0);
  if (msg.bits.size() != dpad) throw std::invalid_argument("decode: malformed bit-array length");
  if (rot.spec() != msg.rotation) throw std::invalid_argument("decode: rotation spec mismatch");

  std::vector<double> v(dpad);
  if (msg.algorithm == Algorithm::Drive) {
    for (std::uint32_t i = 0; i < dpad; ++i) v[i] = msg.bits.get(i) ? msg.scale0 : -msg.scale0;
  } else {
    for (std::uint32_t i = 0; i < dpad; ++i) v[i] = msg.bits.get(i) ? msg.scale1 : msg.scale0;
  }
  rot.inverse(v);
  return v;
}

std::vector<double> decode(const EncodedVector& msg, const Rotator& rot) {
  if (msg.zero_vector) return std::vector<double>(msg.original_len, 0.0);
  auto v = decode_padded(msg, rot);
  v.resize(msg.original_len);
  return v;
}

std::vector<double> decode(const EncodedVector& msg) {
  if (msg.zero_vector) return std::vector<double>(msg.original_len, 0.0);
  return decode(msg, Rotator(msg.rotation));
}

std::vector<double> drive_decode(const EncodedVector& msg) { return decode(msg); }
std::vector<double> drive_decode(const EncodedVector& msg, const Rotator& rot) {
  return decode(msg, rot);
}
std::vector<double> drive_plus_decode(const EncodedVector& msg) { return decode(msg); }
std::vector<double> drive_plus_decode(const EncodedVector& msg, const Rotator& rot) {
  return decode(msg, rot);
}

std::pair<double, double> sse_identity(std::span<const double> x, const EncodedVector& msg) {
  if (msg.algorithm != Algorithm::Drive)
    throw std::invalid_argument("sse_identity: expects a Drive message");
  const Rotator rot(msg.rotation);

  auto padded = transforms::pad(x);
  const double sq = sq_norm(padded.data);
  auto rotated = padded;
  rot.forward(rotated.data);
  const double l1 = l1_norm(rotated.data);

  const auto xhat = decode_padded(msg, rot);
  double lhs = 0.0;
  for (std::size_t i = 0; i < padded.data.size(); ++i) {
    const double e = padded.data[i] - xhat[i];
    lhs += e * e;
  }
  const double d = static_cast<double>(padded.padded_len());
  const double s = msg.scale0;
  const double rhs = sq - 2.0 * s * l1 + d * s * s;
  return {lhs, rhs};
}

EncodedVector make_zero_message(Algorithm alg, std::uint32_t original_len) {
  EncodedVector msg;
  msg.algorithm = alg;
  msg.rotation = RotationSpec{RotationFamily::Hadamard, 0, 0};
  msg.original_len = original_len;
  msg.zero_vector = true;
  return msg;
}

}  // namespace drive::quantizers
