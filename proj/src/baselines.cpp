#include "drive/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "drive/prng.hpp"

namespace drive::baselines {

namespace {

void require_nonzero(std::span<const double> x) {
  for (double v : x)
    if (v != 0.0) return;
  throw std::invalid_argument("encode: zero vector (use the codec zero flag)");
}

}  // namespace

BaselineMessage hadamard_sq_encode(std::span<const double> x, const RotationSpec& rotation,
                                   std::uint64_t sq_seed) {
  require_nonzero(x);
  auto padded = transforms::pad(x);
  if (padded.padded_len() != rotation.dim)
    throw std::invalid_argument("hadamard_sq_encode: rotation dim does not match padded input");
  const Rotator rot(rotation);
  rot.forward(padded.data);

  const auto [lo_it, hi_it] = std::minmax_element(padded.data.begin(), padded.data.end());
  const double lo = *lo_it, hi = *hi_it;

  BaselineMessage msg;
  msg.algorithm = BaselineAlgorithm::HadamardSQ;
  msg.rotation = rotation;
  msg.aux = {lo, hi};
  msg.original_len = padded.original_len;
  msg.bits = BitVec(padded.padded_len());
  if (hi > lo) {
    const double span = hi - lo;
    for (std::size_t i = 0; i < padded.data.size(); ++i) {
      const double p = (padded.data[i] - lo) / span;
      msg.bits.set(i, prng::uniform_at(sq_seed, i) < p);
    }
  }
  return msg;
}

std::vector<double> hadamard_sq_decode(const BaselineMessage& msg) {
  if (msg.algorithm != BaselineAlgorithm::HadamardSQ)
    throw std::invalid_argument("hadamard_sq_decode: wrong algorithm");
  if (msg.zero_vector) return std::vector<double>(msg.original_len, 0.0);
  const std::uint32_t dpad = transforms::next_pow2(msg.original_len);
  if (msg.bits.size() != dpad)
    throw std::invalid_argument("hadamard_sq_decode: malformed bit-array length");

  std::vector<double> v(dpad);
  for (std::uint32_t i = 0; i < dpad; ++i) v[i] = msg.bits.get(i) ? msg.aux[1] : msg.aux[0];
  const Rotator rot(msg.rotation);
  rot.inverse(v);
  v.resize(msg.original_len);
  return v;
}

BaselineMessage terngrad_encode(std::span<const double> x, std::uint64_t sq_seed) {
  require_nonzero(x);
  const std::size_t d = x.size();

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(d);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(d);
  double clip = 2.5 * std::sqrt(var);
  if (clip == 0.0) {
    // Constant nonzero vector: nothing exceeds the typical deviation, so
    // clipping is a no-op rather than an annihilation.
    clip = std::abs(x[0]);
  }

  std::vector<double> clipped(d);
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    clipped[i] = std::clamp(x[i], -clip, clip);
    s = std::max(s, std::abs(clipped[i]));
  }

  BaselineMessage msg;
  msg.algorithm = BaselineAlgorithm::TernGrad;
  msg.rotation = RotationSpec{transforms::RotationFamily::Hadamard, 0, 0};
  msg.aux = {s, 0.0};
  msg.original_len = static_cast<std::uint32_t>(d);
  msg.bits = BitVec(2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    const double p = std::abs(clipped[i]) / s;
    msg.bits.set(i, prng::uniform_at(sq_seed, i) < p);   // magnitude plane
    msg.bits.set(d + i, clipped[i] >= 0.0);               // sign plane
  }
  return msg;
}

std::vector<double> terngrad_decode(const BaselineMessage& msg) {
  if (msg.algorithm != BaselineAlgorithm::TernGrad)
    throw std::invalid_argument("terngrad_decode: wrong algorithm");
  if (msg.zero_vector) return std::vector<double>(msg.original_len, 0.0);
  const std::size_t d = msg.original_len;
  if (msg.bits.size() != 2 * d)
    throw std::invalid_argument("terngrad_decode: malformed bit-array length");

  std::vector<double> v(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double sign = msg.bits.get(d + i) ? 1.0 : -1.0;
    v[i] = msg.bits.get(i) ? sign * msg.aux[0] : 0.0;
  }
  return v;
}

std::vector<double> baseline_decode(const BaselineMessage& msg) {
  return msg.algorithm == BaselineAlgorithm::HadamardSQ ? hadamard_sq_decode(msg)
                                                        : terngrad_decode(msg);
}

BaselineMessage make_zero_baseline(BaselineAlgorithm alg, std::uint32_t original_len) {
  BaselineMessage msg;
  msg.algorithm = alg;
  msg.rotation = RotationSpec{transforms::RotationFamily::Hadamard, 0, 0};
  msg.aux = {0.0, 0.0};
  msg.original_len = original_len;
  msg.zero_vector = true;
  return msg;
}

}  // namespace drive::baselines
