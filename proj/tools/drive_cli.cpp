// Experiment runner: distributed mean-estimation sweeps, single-vector
// encode/decode against the wire format, the least-squares SGD harness and
// the closed-form bound table.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "drive/codec.hpp"
#include "drive/dme.hpp"
#include "drive/sgd.hpp"

namespace {

using namespace drive;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

dme::DmeAlgorithm parse_algorithm(const std::string& s) {
  if (s == "drive") return dme::DmeAlgorithm::Drive;
  if (s == "drive+") return dme::DmeAlgorithm::DrivePlus;
  if (s == "hsq") return dme::DmeAlgorithm::HadamardSQ;
  if (s == "terngrad") return dme::DmeAlgorithm::TernGrad;
  throw UsageError("unknown algorithm '" + s + "' (drive, drive+, hsq, terngrad)");
}

transforms::RotationFamily parse_rotation(const std::string& s) {
  if (s == "hadamard") return transforms::RotationFamily::Hadamard;
  if (s == "uniform") return transforms::RotationFamily::Uniform;
  throw UsageError("unknown rotation '" + s + "' (hadamard, uniform)");
}

quantizers::ScalePolicy parse_policy(const std::string& s) {
  if (s == "min") return quantizers::ScalePolicy::MinSSE;
  if (s == "unbiased") return quantizers::ScalePolicy::Unbiased;
  if (s == "const") return quantizers::ScalePolicy::ConstantExpectation;
  if (s == "ef") return quantizers::ScalePolicy::ErrorFeedbackClipped;
  throw UsageError("unknown scale '" + s + "' (min, unbiased, const, ef)");
}

analytics::Distribution parse_distribution(const std::string& s) {
  if (s == "lognormal") return analytics::Distribution::LogNormal01;
  if (s == "normal") return analytics::Distribution::Normal01;
  if (s == "exp") return analytics::Distribution::Exponential1;
  throw UsageError("unknown distribution '" + s + "' (lognormal, normal, exp)");
}

dme::InputMode parse_mode(const std::string& s) {
  if (s == "same") return dme::InputMode::SameVector;
  if (s == "indep") return dme::InputMode::IndependentVectors;
  throw UsageError("unknown mode '" + s + "' (same, indep)");
}

std::vector<double> read_f64(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file " + path);
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  if (bytes % 8 != 0) throw std::runtime_error("input is not a sequence of 64-bit reals: " + path);
  std::vector<double> v(bytes / 8);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw std::runtime_error("short read on " + path);
  return v;
}

void write_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write on " + path);
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file " + path);
  in.seekg(0, std::ios::end);
  const auto n = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::uint8_t> b(n);
  in.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("short read on " + path);
  return b;
}

void write_rows(const std::string& out_path, const std::vector<std::string>& rows) {
  if (out_path.empty()) {
    for (const auto& r : rows) std::cout << r << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file " + out_path);
  for (const auto& r : rows) out << r << '\n';
}

struct DmeFlags {
  std::string alg = "drive";
  std::string rot = "hadamard";
  std::string scale = "unbiased";
  std::string dist = "lognormal";
  std::string mode = "same";
  std::uint32_t dim = 128;
  std::uint32_t clients = 10;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
};

void add_dme_flags(CLI::App* cmd, DmeFlags& f) {
  cmd->add_option("--alg", f.alg, "drive, drive+, hsq, terngrad");
  cmd->add_option("--rot", f.rot, "hadamard, uniform");
  cmd->add_option("--scale", f.scale, "min, unbiased, const, ef");
  cmd->add_option("--dim", f.dim, "vector dimension d");
  cmd->add_option("--clients", f.clients, "number of clients n");
  cmd->add_option("--dist", f.dist, "lognormal, normal, exp");
  cmd->add_option("--mode", f.mode, "same, indep");
  cmd->add_option("--trials", f.trials, "Monte-Carlo trials");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--threads", f.threads, "trial-level parallelism");
  cmd->add_option("--out", f.out, "output CSV path (stdout when omitted)");
}

dme::DmeConfig to_config(const DmeFlags& f) {
  dme::DmeConfig cfg;
  cfg.algorithm = parse_algorithm(f.alg);
  cfg.rotation = parse_rotation(f.rot);
  cfg.policy = parse_policy(f.scale);
  cfg.distribution = parse_distribution(f.dist);
  cfg.input_mode = parse_mode(f.mode);
  cfg.dim = f.dim;
  cfg.n_clients = f.clients;
  cfg.trials = f.trials;
  cfg.master_seed = f.seed;
  cfg.threads = f.threads;
  dme::validate(cfg);
  return cfg;
}

int run_dme(const DmeFlags& f) {
  const auto cfg = to_config(f);
  const auto report = dme::run_experiment(cfg);
  write_rows(f.out, {dme::csv_header(), dme::csv_row(cfg, report)});
  return 0;
}

struct SweepFlags {
  DmeFlags base;
  std::string algs = "drive,drive+,hsq,terngrad";
  std::string rots = "hadamard";
  std::string dims = "128,8192";
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  return parts;
}

int run_sweep(const SweepFlags& f) {
  std::vector<std::string> rows{dme::csv_header()};
  for (const auto& dim_s : split_csv(f.dims)) {
    for (const auto& rot : split_csv(f.rots)) {
      for (const auto& alg : split_csv(f.algs)) {
        DmeFlags one = f.base;
        one.alg = alg;
        one.rot = rot;
        one.dim = static_cast<std::uint32_t>(std::stoul(dim_s));
        if (parse_algorithm(alg) == dme::DmeAlgorithm::HadamardSQ ||
            parse_algorithm(alg) == dme::DmeAlgorithm::TernGrad)
          one.rot = "hadamard";
        const auto cfg = to_config(one);
        rows.push_back(dme::csv_row(cfg, dme::run_experiment(cfg)));
      }
    }
  }
  write_rows(f.base.out, rows);
  return 0;
}

struct CodecFlags {
  std::string in;
  std::string out;
  std::string alg = "drive";
  std::string rot = "hadamard";
  std::string scale = "unbiased";
  std::uint64_t seed = 1;
};

int run_encode(const CodecFlags& f) {
  const auto x = read_f64(f.in);
  if (x.empty()) throw std::runtime_error("input vector is empty");
  const auto alg = parse_algorithm(f.alg);
  const std::uint32_t len = static_cast<std::uint32_t>(x.size());
  const std::uint32_t dpad = transforms::next_pow2(len);

  bool all_zero = true;
  for (double v : x)
    if (v != 0.0) all_zero = false;

  codec::Message msg;
  if (all_zero) {
    switch (alg) {
      case dme::DmeAlgorithm::Drive:
        msg = quantizers::make_zero_message(quantizers::Algorithm::Drive, len);
        break;
      case dme::DmeAlgorithm::DrivePlus:
        msg = quantizers::make_zero_message(quantizers::Algorithm::DrivePlus, len);
        break;
      case dme::DmeAlgorithm::HadamardSQ:
        msg = baselines::make_zero_baseline(baselines::BaselineAlgorithm::HadamardSQ, len);
        break;
      case dme::DmeAlgorithm::TernGrad:
        msg = baselines::make_zero_baseline(baselines::BaselineAlgorithm::TernGrad, len);
        break;
    }
  } else {
    const transforms::RotationSpec spec{parse_rotation(f.rot), f.seed, dpad};
    switch (alg) {
      case dme::DmeAlgorithm::Drive:
        msg = quantizers::drive_encode(x, spec, parse_policy(f.scale));
        break;
      case dme::DmeAlgorithm::DrivePlus:
        msg = quantizers::drive_plus_encode(x, spec, parse_policy(f.scale));
        break;
      case dme::DmeAlgorithm::HadamardSQ:
        msg = baselines::hadamard_sq_encode(x, spec, f.seed + 1);
        break;
      case dme::DmeAlgorithm::TernGrad:
        msg = baselines::terngrad_encode(x, f.seed + 1);
        break;
    }
  }
  const auto bytes = codec::serialize(msg);
  write_bytes(f.out, bytes);
  std::cout << "wrote " << bytes.size() << " bytes (" << codec::bit_budget(msg) << " bits)\n";
  return 0;
}

int run_decode(const CodecFlags& f) {
  const auto bytes = read_bytes(f.in);
  const auto msg = codec::deserialize(bytes);
  const auto x = codec::decode_message(msg);
  std::ofstream out(f.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + f.out);
  out.write(reinterpret_cast<const char*>(x.data()),
            static_cast<std::streamsize>(x.size() * sizeof(double)));
  std::cout << "wrote " << x.size() << " reals\n";
  return 0;
}

struct SgdFlags {
  std::uint32_t clients = 4;
  std::uint32_t dim = 64;
  std::uint32_t rounds = 200;
  std::string alg = "drive";
  std::string rot = "hadamard";
  std::string scale = "unbiased";
  std::string ef = "off";
  double lr = 0.05;
  std::uint64_t seed = 1;
  std::string out;
};

int run_sgd(const SgdFlags& f) {
  sgd::TrainConfig cfg;
  cfg.n_clients = f.clients;
  cfg.dim = f.dim;
  cfg.rounds = f.rounds;
  cfg.learning_rate = f.lr;
  cfg.seed = f.seed;
  cfg.rotation = parse_rotation(f.rot);
  cfg.policy = parse_policy(f.scale);
  if (f.alg == "none")
    cfg.compressor = sgd::CompressorKind::None;
  else if (f.alg == "drive")
    cfg.compressor = sgd::CompressorKind::Drive;
  else if (f.alg == "drive+")
    cfg.compressor = sgd::CompressorKind::DrivePlus;
  else
    throw UsageError("sgd --alg must be none, drive or drive+");
  if (f.ef == "on")
    cfg.error_feedback = true;
  else if (f.ef == "off")
    cfg.error_feedback = false;
  else
    throw UsageError("--ef must be on or off");

  const auto shards = sgd::make_shards(cfg);
  const auto result = sgd::run_training(cfg, shards);

  std::vector<std::string> rows{"round,loss,mean_compression_vnmse"};
  for (std::size_t r = 0; r < result.rounds.size(); ++r) {
    std::ostringstream os;
    os.precision(10);
    os << (r + 1) << ',' << result.rounds[r].loss << ','
       << result.rounds[r].mean_compression_vnmse;
    rows.push_back(os.str());
  }
  write_rows(f.out, rows);
  return 0;
}

int run_bounds(std::uint32_t dim) {
  using analytics::AnalyticBound;
  std::printf("%-26s %d\n", "d", dim);
  for (auto b : {AnalyticBound::BiasedVnmseExact, AnalyticBound::UnbiasedVnmseCap292,
                 AnalyticBound::UnbiasedVnmseLargeD, AnalyticBound::HadamardVnmseCap,
                 AnalyticBound::UnbiasedVnmseAsymptote}) {
    if (b == AnalyticBound::UnbiasedVnmseLargeD && dim < 135) {
      std::printf("%-26s n/a (defined for d >= 135)\n", std::string(analytics::bound_name(b)).c_str());
      continue;
    }
    std::printf("%-26s %.6f\n", std::string(analytics::bound_name(b)).c_str(),
                analytics::bound_value(b, dim));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-bit vector compression experiments (DRIVE / DRIVE+ / baselines)"};
  app.require_subcommand(1);

  DmeFlags dme_flags;
  auto* dme_cmd = app.add_subcommand("dme", "distributed mean-estimation experiment");
  add_dme_flags(dme_cmd, dme_flags);

  SweepFlags sweep_flags;
  auto* sweep_cmd = app.add_subcommand("sweep", "grid of dme experiments");
  add_dme_flags(sweep_cmd, sweep_flags.base);
  sweep_cmd->add_option("--algs", sweep_flags.algs, "comma-separated algorithm list");
  sweep_cmd->add_option("--rots", sweep_flags.rots, "comma-separated rotation list");
  sweep_cmd->add_option("--dims", sweep_flags.dims, "comma-separated dimension list");

  CodecFlags enc_flags;
  auto* enc_cmd = app.add_subcommand("encode", "compress a raw f64 vector into a .dwf frame");
  enc_cmd->add_option("--in", enc_flags.in, "input: raw little-endian 64-bit reals")->required();
  enc_cmd->add_option("--out", enc_flags.out, "output .dwf frame")->required();
  enc_cmd->add_option("--alg", enc_flags.alg, "drive, drive+, hsq, terngrad");
  enc_cmd->add_option("--rot", enc_flags.rot, "hadamard, uniform");
  enc_cmd->add_option("--scale", enc_flags.scale, "min, unbiased, const, ef");
  enc_cmd->add_option("--seed", enc_flags.seed, "rotation seed");

  CodecFlags dec_flags;
  auto* dec_cmd = app.add_subcommand("decode", "reconstruct a vector from a .dwf frame");
  dec_cmd->add_option("--in", dec_flags.in, "input .dwf frame")->required();
  dec_cmd->add_option("--out", dec_flags.out, "output raw f64 vector")->required();

  SgdFlags sgd_flags;
  auto* sgd_cmd = app.add_subcommand("sgd", "distributed least-squares training loop");
  sgd_cmd->add_option("--clients", sgd_flags.clients, "number of clients");
  sgd_cmd->add_option("--dim", sgd_flags.dim, "model dimension p");
  sgd_cmd->add_option("--rounds", sgd_flags.rounds, "training rounds");
  sgd_cmd->add_option("--alg", sgd_flags.alg, "none, drive, drive+");
  sgd_cmd->add_option("--rot", sgd_flags.rot, "hadamard, uniform");
  sgd_cmd->add_option("--scale", sgd_flags.scale, "min, unbiased, const, ef");
  sgd_cmd->add_option("--ef", sgd_flags.ef, "on, off");
  sgd_cmd->add_option("--lr", sgd_flags.lr, "learning rate");
  sgd_cmd->add_option("--seed", sgd_flags.seed, "seed");
  sgd_cmd->add_option("--out", sgd_flags.out, "output CSV path (stdout when omitted)");

  std::uint32_t bounds_dim = 0;
  auto* bounds_cmd = app.add_subcommand("bounds", "closed-form error bounds at a dimension");
  bounds_cmd->add_option("--dim", bounds_dim, "dimension d")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*dme_cmd) return run_dme(dme_flags);
    if (*sweep_cmd) return run_sweep(sweep_flags);
    if (*enc_cmd) return run_encode(enc_flags);
    if (*dec_cmd) return run_decode(dec_flags);
    if (*sgd_cmd) return run_sgd(sgd_flags);
    if (*bounds_cmd) return run_bounds(bounds_dim);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
