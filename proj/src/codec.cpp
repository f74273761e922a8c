#include "drive/codec.hpp"

#include <bit>
#include <cstring>

namespace drive::codec {

namespace {

using baselines::BaselineAlgorithm;
using baselines::BaselineMessage;
using quantizers::Algorithm;
using quantizers::EncodedVector;
using transforms::RotationFamily;
using transforms::RotationSpec;

static_assert(std::endian::native == std::endian::little,
              "wire codec assumes a little-endian host");

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u64(out, bits);
}

std::uint32_t get_u32(std::span<const std::uint8_t> b) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::span<const std::uint8_t> b) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::span<const std::uint8_t> b) {
  const std::uint64_t bits = get_u64(b);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

struct FrameInfo {
  std::uint8_t algorithm_id;
  std::uint8_t rotation_id;
  std::uint64_t seed;
  bool zero;
  std::uint32_t original_len;
};

void write_header(std::vector<std::uint8_t>& out, const FrameInfo& f) {
  out.push_back(kMagic);
  out.push_back(kVersion);
  out.push_back(f.algorithm_id);
  out.push_back(f.rotation_id);
  out.push_back(f.zero ? 0x01 : 0x00);
  put_u32(out, f.original_len);
  put_u64(out, f.seed);
  put_u16(out, 0);  // reserved
}

std::uint8_t rotation_id_of(const RotationSpec& spec) {
  return spec.family == RotationFamily::Hadamard ? 0 : 1;
}

std::size_t scale_count(std::uint8_t algorithm_id) {
  switch (algorithm_id) {
    case 0:
      return 1;  // Drive
    case 1:
      return 2;  // DrivePlus
    case 2:
      return 2;  // HadamardSQ
    case 3:
      return 1;  // TernGrad
    default:
      return 0;
  }
}

std::size_t payload_bits(std::uint8_t algorithm_id, std::uint32_t original_len) {
  if (algorithm_id == 3) return 2 * std::size_t{original_len};
  return transforms::next_pow2(original_len);
}

}  // namespace

std::vector<std::uint8_t> serialize(const EncodedVector& msg) {
  std::vector<std::uint8_t> out;
  FrameInfo f;
  f.algorithm_id = msg.algorithm == Algorithm::Drive ? 0 : 1;
  f.zero = msg.zero_vector;
  f.original_len = msg.original_len;
  f.rotation_id = f.zero ? kRotationNone : rotation_id_of(msg.rotation);
  f.seed = f.zero ? 0 : msg.rotation.seed;
  write_header(out, f);
  if (f.zero) return out;
  put_f64(out, msg.scale0);
  if (f.algorithm_id == 1) put_f64(out, msg.scale1);
  out.insert(out.end(), msg.bits.bytes().begin(), msg.bits.bytes().end());
  return out;
}

std::vector<std::uint8_t> serialize(const BaselineMessage& msg) {
  std::vector<std::uint8_t> out;
  FrameInfo f;
  f.algorithm_id = msg.algorithm == BaselineAlgorithm::HadamardSQ ? 2 : 3;
  f.zero = msg.zero_vector;
  f.original_len = msg.original_len;
  const bool has_rotation = !f.zero && msg.algorithm == BaselineAlgorithm::HadamardSQ;
  f.rotation_id = has_rotation ? rotation_id_of(msg.rotation) : kRotationNone;
  f.seed = has_rotation ? msg.rotation.seed : 0;
  write_header(out, f);
  if (f.zero) return out;
  put_f64(out, msg.aux[0]);
  if (f.algorithm_id == 2) put_f64(out, msg.aux[1]);
  out.insert(out.end(), msg.bits.bytes().begin(), msg.bits.bytes().end());
  return out;
}

std::vector<std::uint8_t> serialize(const Message& msg) {
  return std::visit([](const auto& m) { return serialize(m); }, msg);
}

Message deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes)
    throw CodecParseError(CodecError::Truncated, "frame shorter than header");
  if (bytes[0] != kMagic) throw CodecParseError(CodecError::BadMagic, "bad magic byte");
  if (bytes[1] != kVersion) throw CodecParseError(CodecError::BadVersion, "unknown version");
  const std::uint8_t algorithm_id = bytes[2];
  if (algorithm_id > 3) throw CodecParseError(CodecError::BadAlgorithm, "unknown algorithm id");
  const std::uint8_t rotation_id = bytes[3];
  const std::uint8_t flags = bytes[4];
  if (flags & ~0x01u) throw CodecParseError(CodecError::Malformed, "unknown flag bits");
  const std::uint32_t original_len = get_u32(bytes.subspan(5));
  const std::uint64_t seed = get_u64(bytes.subspan(9));
  if (bytes[17] != 0 || bytes[18] != 0)
    throw CodecParseError(CodecError::Malformed, "nonzero reserved field");
  if (original_len == 0) throw CodecParseError(CodecError::Malformed, "zero original_len");
  const bool zero = flags & 0x01;

  if (zero) {
    if (rotation_id != kRotationNone)
      throw CodecParseError(CodecError::BadRotation, "zero-vector frame carries a rotation");
    if (seed != 0) throw CodecParseError(CodecError::Malformed, "zero-vector frame carries a seed");
    if (bytes.size() != kHeaderBytes)
      throw CodecParseError(CodecError::TrailingGarbage, "zero-vector frame too long");
    switch (algorithm_id) {
      case 0:
        return quantizers::make_zero_message(Algorithm::Drive, original_len);
      case 1:
        return quantizers::make_zero_message(Algorithm::DrivePlus, original_len);
      case 2:
        return baselines::make_zero_baseline(BaselineAlgorithm::HadamardSQ, original_len);
      default:
        return baselines::make_zero_baseline(BaselineAlgorithm::TernGrad, original_len);
    }
  }

  const bool wants_rotation = algorithm_id <= 2;
  if (wants_rotation) {
    const bool valid = algorithm_id == 2 ? rotation_id == 0 : rotation_id <= 1;
    if (!valid) throw CodecParseError(CodecError::BadRotation, "invalid rotation id");
  } else if (rotation_id != kRotationNone) {
    throw CodecParseError(CodecError::BadRotation, "TernGrad frame carries a rotation");
  }

  const std::size_t nscales = scale_count(algorithm_id);
  const std::size_t nbits = payload_bits(algorithm_id, original_len);
  const std::size_t expect = kHeaderBytes + 8 * nscales + (nbits + 7) / 8;
  if (bytes.size() < expect) throw CodecParseError(CodecError::Truncated, "truncated payload");
  if (bytes.size() > expect) throw CodecParseError(CodecError::TrailingGarbage, "trailing garbage");

  double scales[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < nscales; ++i) scales[i] = get_f64(bytes.subspan(kHeaderBytes + 8 * i));
  std::vector<std::uint8_t> payload(bytes.begin() + static_cast<std::ptrdiff_t>(kHeaderBytes + 8 * nscales),
                                    bytes.end());
  if (nbits % 8 != 0) {
    const std::uint8_t mask = static_cast<std::uint8_t>(0xFFu << (nbits % 8));
    if (payload.back() & mask)
      throw CodecParseError(CodecError::Malformed, "nonzero trailing payload bits");
  }
  BitVec bits = BitVec::from_bytes(std::move(payload), nbits);

  if (algorithm_id <= 1) {
    EncodedVector msg;
    msg.algorithm = algorithm_id == 0 ? Algorithm::Drive : Algorithm::DrivePlus;
    msg.rotation = RotationSpec{rotation_id == 0 ? RotationFamily::Hadamard : RotationFamily::Uniform,
                                seed, transforms::next_pow2(original_len)};
    msg.scale0 = scales[0];
    msg.scale1 = algorithm_id == 1 ? scales[1] : 0.0;
    msg.bits = std::move(bits);
    msg.original_len = original_len;
    return msg;
  }

  BaselineMessage msg;
  msg.algorithm = algorithm_id == 2 ? BaselineAlgorithm::HadamardSQ : BaselineAlgorithm::TernGrad;
  msg.rotation = algorithm_id == 2
                     ? RotationSpec{RotationFamily::Hadamard, seed, transforms::next_pow2(original_len)}
                     : RotationSpec{RotationFamily::Hadamard, 0, 0};
  msg.aux = {scales[0], algorithm_id == 2 ? scales[1] : 0.0};
  msg.bits = std::move(bits);
  msg.original_len = original_len;
  return msg;
}

std::size_t bit_budget(const Message& msg) { return serialize(msg).size() * 8; }

std::vector<double> decode_message(const Message& msg) {
  if (const auto* q = std::get_if<EncodedVector>(&msg)) return quantizers::decode(*q);
  return baselines::baseline_decode(std::get<BaselineMessage>(msg));
}

}  // namespace drive::codec
