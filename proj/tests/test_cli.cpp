#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "drive/quantizers.hpp"

using namespace drive;

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout only
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(CLI_BINARY) + " " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof(buf), pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string tmp_path(const std::string& name) {
  return std::string("cli_test_") + name;
}

// Drops the trailing encode_ms column, which carries wall-clock timing.
std::string strip_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.rfind(',');
    out << (pos == std::string::npos ? line : line.substr(0, pos)) << '\n';
  }
  return out.str();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("bounds prints the closed-form values") {
  const auto r = run("bounds --dim 4096");
  CHECK(r.exit_code == 0);
  // (1 - 2/pi)(1 - 1/4096) and pi/2 - 1
  CHECK(r.output.find("biased_vnmse_exact") != std::string::npos);
  CHECK(r.output.find("0.363292") != std::string::npos);
  CHECK(r.output.find("unbiased_vnmse_asymptote") != std::string::npos);
  CHECK(r.output.find("0.570796") != std::string::npos);
  CHECK(r.output.find("2.920000") != std::string::npos);
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run("dme --no-such-flag 2>/dev/null").exit_code == 1);
  CHECK(run("dme --scale const --rot hadamard --trials 10 2>/dev/null").exit_code == 1);
  CHECK(run("bounds 2>/dev/null").exit_code == 1);  // missing required --dim
}

TEST_CASE("encode then decode matches the library roundtrip bitwise") {
  const std::string vec_path = tmp_path("x.f64");
  const std::string msg_path = tmp_path("x.dwf");
  const std::string out_path = tmp_path("xhat.f64");

  std::vector<double> x{0.5, -1.25, 3.0, 2.0, -0.75};
  {
    std::ofstream out(vec_path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(x.data()),
              static_cast<std::streamsize>(x.size() * sizeof(double)));
  }

  const auto enc = run("encode --in " + vec_path + " --out " + msg_path +
                       " --alg drive --rot hadamard --scale min --seed 12");
  CHECK(enc.exit_code == 0);
  const auto dec = run("decode --in " + msg_path + " --out " + out_path);
  CHECK(dec.exit_code == 0);

  std::ifstream in(out_path, std::ios::binary);
  REQUIRE(in.good());
  std::vector<double> xhat(x.size());
  in.read(reinterpret_cast<char*>(xhat.data()),
          static_cast<std::streamsize>(x.size() * sizeof(double)));

  const transforms::RotationSpec spec{transforms::RotationFamily::Hadamard, 12, 8};
  const auto expect =
      quantizers::decode(quantizers::drive_encode(x, spec, quantizers::ScalePolicy::MinSSE));
  CHECK(xhat == expect);

  std::remove(vec_path.c_str());
  std::remove(msg_path.c_str());
  std::remove(out_path.c_str());
}

TEST_CASE("dme output matches the golden csv modulo the timing column") {
  const std::string out_path = tmp_path("dme.csv");
  const auto r = run(
      "dme --alg drive --rot hadamard --scale unbiased --dim 32 --clients 4 "
      "--dist lognormal --mode same --trials 50 --seed 7 --out " +
      out_path);
  CHECK(r.exit_code == 0);
  CHECK(strip_timing(read_text(out_path)) ==
        strip_timing(read_text(std::string(FIXTURE_DIR) + "/golden_dme_drive.csv")));
  std::remove(out_path.c_str());
}

TEST_CASE("terngrad dme output matches its golden csv") {
  const std::string out_path = tmp_path("dme2.csv");
  const auto r = run(
      "dme --alg terngrad --dim 16 --clients 2 --dist normal --mode indep "
      "--trials 50 --seed 9 --out " +
      out_path);
  CHECK(r.exit_code == 0);
  CHECK(strip_timing(read_text(out_path)) ==
        strip_timing(read_text(std::string(FIXTURE_DIR) + "/golden_dme_terngrad.csv")));
  std::remove(out_path.c_str());
}

TEST_CASE("identical seeds give identical csv modulo timing") {
  const std::string a = tmp_path("a.csv"), b = tmp_path("b.csv");
  const std::string flags =
      "dme --alg drive+ --rot uniform --scale unbiased --dim 16 --clients 2 "
      "--dist exp --mode indep --trials 20 --seed 3 --out ";
  CHECK(run(flags + a).exit_code == 0);
  CHECK(run(flags + b + " --threads 2").exit_code == 0);
  CHECK(strip_timing(read_text(a)) == strip_timing(read_text(b)));
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("sgd subcommand emits a loss trajectory") {
  const auto r = run("sgd --clients 2 --dim 16 --rounds 5 --alg drive --scale unbiased --lr 0.02");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("round,loss,mean_compression_vnmse") != std::string::npos);
  CHECK(std::count(r.output.begin(), r.output.end(), '\n') == 6);  // header + 5 rounds
}
