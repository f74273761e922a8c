// Regenerates the committed golden fixtures under tests/fixtures/ and
// prints the frame contents for manual auditing. Run from the repo root:
//   build/tools/gen_fixtures tests/fixtures

#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "drive/codec.hpp"
#include "drive/quantizers.hpp"

using namespace drive;

namespace {

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  std::printf("wrote %-34s %zu bytes\n", path.c_str(), bytes.size());
}

void dump(const char* name, std::span<const std::uint8_t> bytes) {
  std::printf("%s:", name);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (i % 16 == 0) std::printf("\n  %04zx ", i);
    std::printf("%02x ", bytes[i]);
  }
  std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "tests/fixtures";

  // Fixture 1: Drive, unit basis vector, d = 8, MinSSE, Hadamard seed 3.
  // The rotated vector is (D_0 / sqrt(8)) * (1, ..., 1), so the sign bits are
  // all equal to the sign of the first Rademacher draw and S = 1/sqrt(8).
  {
    std::vector<double> x{1, 0, 0, 0, 0, 0, 0, 0};
    const transforms::RotationSpec spec{transforms::RotationFamily::Hadamard, 3, 8};
    const auto msg = quantizers::drive_encode(x, spec, quantizers::ScalePolicy::MinSSE);
    const auto bytes = codec::serialize(msg);
    std::printf("drive_e1_d8: S=%.17g bits0=%d\n", msg.scale0, (int)msg.bits.get(0));
    dump("drive_e1_d8", bytes);
    write_file(dir + "/drive_e1_d8.dwf", bytes);

    const auto decoded = quantizers::decode(msg);
    std::vector<std::uint8_t> raw(decoded.size() * 8);
    std::memcpy(raw.data(), decoded.data(), raw.size());
    std::printf("decoded[0]=%.17g decoded[1]=%.17g\n", decoded[0], decoded[1]);
    write_file(dir + "/drive_e1_d8_decoded.f64", raw);
  }

  // Fixture 2: DrivePlus, d = 3 (pads to 4), unbiased centroid scale.
  {
    std::vector<double> x{1.0, -2.0, 3.0};
    const transforms::RotationSpec spec{transforms::RotationFamily::Hadamard, 7, 4};
    const auto msg = quantizers::drive_plus_encode(x, spec, quantizers::ScalePolicy::Unbiased);
    const auto bytes = codec::serialize(msg);
    std::printf("driveplus_d3: c0*s=%.17g c1*s=%.17g bits=%d%d%d%d\n", msg.scale0, msg.scale1,
                (int)msg.bits.get(0), (int)msg.bits.get(1), (int)msg.bits.get(2),
                (int)msg.bits.get(3));
    dump("driveplus_d3", bytes);
    write_file(dir + "/driveplus_d3.dwf", bytes);
  }

  // Fixture 3: zero-vector frame (Drive, d = 5): exactly the 19 header bytes.
  {
    const auto msg = quantizers::make_zero_message(quantizers::Algorithm::Drive, 5);
    const auto bytes = codec::serialize(msg);
    dump("zero_d5", bytes);
    write_file(dir + "/zero_d5.dwf", bytes);
  }

  return 0;
}
