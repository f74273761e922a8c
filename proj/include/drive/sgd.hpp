#pragma once

// Desk-scale distributed least-squares SGD loop exercising compression end
// to end, with optional error feedback.

#include <cstdint>
#include <optional>
#include <vector>

#include "drive/quantizers.hpp"

namespace drive::sgd {

enum class CompressorKind : std::uint8_t { None = 0, Drive = 1, DrivePlus = 2 };

struct LeastSquaresShard {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<double> design;   // row-major rows x cols
  std::vector<double> targets;  // rows
};

struct TrainConfig {
  std::uint32_t n_clients = 4;
  std::uint32_t dim = 64;            // model size p
  std::uint32_t rows_per_client = 128;
  std::uint32_t rounds = 100;
  double learning_rate = 0.05;
  double noise_std = 0.1;            // target noise when synthesizing shards
  CompressorKind compressor = CompressorKind::None;
  transforms::RotationFamily rotation = transforms::RotationFamily::Hadamard;
  quantizers::ScalePolicy policy = quantizers::ScalePolicy::Unbiased;
  bool error_feedback = false;
  std::uint64_t seed = 1;
};

struct RoundStat {
  double loss = 0.0;                  // global mean squared residual
  double mean_compression_vnmse = 0.0;  // 0 for the identity compressor
};

struct TrainResult {
  std::vector<RoundStat> rounds;
  std::vector<double> final_weights;
  // Smallest per-sample compression quality 1 - |v - vhat|^2 / |v|^2 seen
  // during the run; positive means the compressor contract held throughout.
  double min_delta = 1.0;
};

// Gaussian design with a planted minimizer; the stacked system has full
// column rank with overwhelming probability (rows_per_client * n > dim).
std::vector<LeastSquaresShard> make_shards(const TrainConfig& cfg);

// Exact minimizer of the stacked least-squares problem.
std::vector<double> solve_optimum(const std::vector<LeastSquaresShard>& shards);

double global_loss(const std::vector<LeastSquaresShard>& shards, std::span<const double> w);

// Synchronous rounds: each client computes its local gradient (plus the EF
// residual when enabled), compresses, the server averages decoded gradients
// and steps. Aborts if the loss exceeds 1e6 x the initial loss.
TrainResult run_training(const TrainConfig& cfg, const std::vector<LeastSquaresShard>& shards);

}  // namespace drive::sgd
