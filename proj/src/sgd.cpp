#include "drive/sgd.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "drive/prng.hpp"

namespace drive::sgd {

namespace {

constexpr std::uint64_t kDesignTag = 0x10;
constexpr std::uint64_t kTargetTag = 0x11;
constexpr std::uint64_t kTruthTag = 0x12;
constexpr std::uint64_t kRoundTag = 0x13;

// g = (1/m) A^T (A w - b)
void local_gradient(const LeastSquaresShard& s, std::span<const double> w,
                    std::span<double> out) {
  std::vector<double> resid(s.rows);
  for (std::uint32_t r = 0; r < s.rows; ++r) {
    const double* row = &s.design[std::size_t{r} * s.cols];
    double acc = -s.targets[r];
    for (std::uint32_t c = 0; c < s.cols; ++c) acc += row[c] * w[c];
    resid[r] = acc;
  }
  const double inv_m = 1.0 / static_cast<double>(s.rows);
  for (std::uint32_t c = 0; c < s.cols; ++c) out[c] = 0.0;
  for (std::uint32_t r = 0; r < s.rows; ++r) {
    const double* row = &s.design[std::size_t{r} * s.cols];
    const double f = resid[r] * inv_m;
    for (std::uint32_t c = 0; c < s.cols; ++c) out[c] += row[c] * f;
  }
}

}  // namespace

std::vector<LeastSquaresShard> make_shards(const TrainConfig& cfg) {
  std::vector<double> w_star(cfg.dim);
  prng::fill_normal(prng::hash_combine(cfg.seed, kTruthTag), 0, w_star);

  std::vector<LeastSquaresShard> shards(cfg.n_clients);
  for (std::uint32_t c = 0; c < cfg.n_clients; ++c) {
    LeastSquaresShard& s = shards[c];
    s.rows = cfg.rows_per_client;
    s.cols = cfg.dim;
    s.design.resize(std::size_t{s.rows} * s.cols);
    prng::fill_normal(prng::hash_combine(prng::hash_combine(cfg.seed, kDesignTag), c), 0,
                      s.design);
    s.targets.resize(s.rows);
    std::vector<double> noise(s.rows);
    prng::fill_normal(prng::hash_combine(prng::hash_combine(cfg.seed, kTargetTag), c), 0, noise);
    for (std::uint32_t r = 0; r < s.rows; ++r) {
      const double* row = &s.design[std::size_t{r} * s.cols];
      double acc = 0.0;
      for (std::uint32_t k = 0; k < s.cols; ++k) acc += row[k] * w_star[k];
      s.targets[r] = acc + cfg.noise_std * noise[r];
    }
  }
  return shards;
}

std::vector<double> solve_optimum(const std::vector<LeastSquaresShard>& shards) {
  if (shards.empty()) throw std::invalid_argument("solve_optimum: no shards");
  const std::uint32_t p = shards[0].cols;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  for (const auto& s : shards) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
        s.design.data(), s.rows, s.cols);
    Eigen::Map<const Eigen::VectorXd> b(s.targets.data(), s.rows);
    gram += a.transpose() * a;
    rhs += a.transpose() * b;
  }
  Eigen::VectorXd w = gram.ldlt().solve(rhs);
  return std::vector<double>(w.data(), w.data() + p);
}

double global_loss(const std::vector<LeastSquaresShard>& shards, std::span<const double> w) {
  double sse = 0.0;
  std::size_t rows = 0;
  for (const auto& s : shards) {
    for (std::uint32_t r = 0; r < s.rows; ++r) {
      const double* row = &s.design[std::size_t{r} * s.cols];
      double acc = -s.targets[r];
      for (std::uint32_t c = 0; c < s.cols; ++c) acc += row[c] * w[c];
      sse += acc * acc;
    }
    rows += s.rows;
  }
  return sse / static_cast<double>(rows);
}

TrainResult run_training(const TrainConfig& cfg, const std::vector<LeastSquaresShard>& shards) {
  if (shards.size() != cfg.n_clients)
    throw std::invalid_argument("run_training: shard count does not match n_clients");
  if (cfg.rounds == 0) throw std::invalid_argument("run_training: rounds must be >= 1");
  const std::uint32_t p = cfg.dim;
  const std::uint32_t dpad = transforms::next_pow2(p);

  std::vector<double> w(p, 0.0);
  std::vector<std::vector<double>> residual(
      cfg.n_clients, std::vector<double>(cfg.error_feedback ? p : 0, 0.0));

  TrainResult result;
  result.rounds.reserve(cfg.rounds);
  const double initial_loss = global_loss(shards, w);

  std::vector<double> g(p), v(p), mean_g(p);
  for (std::uint32_t round = 0; round < cfg.rounds; ++round) {
    std::fill(mean_g.begin(), mean_g.end(), 0.0);
    double vnmse_sum = 0.0;
    for (std::uint32_t c = 0; c < cfg.n_clients; ++c) {
      local_gradient(shards[c], w, g);
      if (cfg.error_feedback)
        for (std::uint32_t i = 0; i < p; ++i) g[i] += residual[c][i];

      if (cfg.compressor == CompressorKind::None) {
        for (std::uint32_t i = 0; i < p; ++i) mean_g[i] += g[i];
        continue;
      }

      const std::uint64_t rseed = prng::hash_combine(
          prng::hash_combine(prng::hash_combine(cfg.seed, kRoundTag), round), c);
      const transforms::RotationSpec spec{cfg.rotation, rseed, dpad};
      const transforms::Rotator rot(spec);
      const auto msg = cfg.compressor == CompressorKind::Drive
                           ? quantizers::drive_encode(g, rot, cfg.policy)
                           : quantizers::drive_plus_encode(g, rot, cfg.policy);
      v = quantizers::decode(msg, rot);

      double err = 0.0, sq = 0.0;
      for (std::uint32_t i = 0; i < p; ++i) {
        err += (g[i] - v[i]) * (g[i] - v[i]);
        sq += g[i] * g[i];
      }
      if (sq > 0.0) {
        vnmse_sum += err / sq;
        result.min_delta = std::min(result.min_delta, 1.0 - err / sq);
      }
      if (cfg.error_feedback)
        for (std::uint32_t i = 0; i < p; ++i) residual[c][i] = g[i] - v[i];
      for (std::uint32_t i = 0; i < p; ++i) mean_g[i] += v[i];
    }

    const double inv_n = 1.0 / static_cast<double>(cfg.n_clients);
    for (std::uint32_t i = 0; i < p; ++i) w[i] -= cfg.learning_rate * mean_g[i] * inv_n;

    RoundStat stat;
    stat.loss = global_loss(shards, w);
    stat.mean_compression_vnmse =
        cfg.compressor == CompressorKind::None ? 0.0 : vnmse_sum / cfg.n_clients;
    result.rounds.push_back(stat);
    if (stat.loss > 1e6 * initial_loss)
      throw std::runtime_error("run_training: diverged (loss exceeded 1e6 x initial)");
  }
  result.final_weights = w;
  return result;
}

}  // namespace drive::sgd
