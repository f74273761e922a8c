#include "drive/dme.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "drive/prng.hpp"

namespace drive::dme {

namespace {

constexpr std::uint64_t kDataTag = 0x01;
constexpr std::uint64_t kRotationTag = 0x02;
constexpr std::uint64_t kSqTag = 0x03;

// Pairwise summation keeps aggregation independent of the trial schedule
// and bounds accumulation error on long runs.
double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double e : v) s += e;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

struct MeanStderr {
  double mean;
  double stderr_mean;
};

MeanStderr mean_stderr(std::span<const double> samples) {
  const double n = static_cast<double>(samples.size());
  const double mean = pairwise_sum(samples) / n;
  if (samples.size() < 2) return {mean, 0.0};
  std::vector<double> sq(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    sq[i] = (samples[i] - mean) * (samples[i] - mean);
  const double var = pairwise_sum(sq) / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

std::vector<double> draw_vector(const DmeConfig& cfg, std::uint64_t seed) {
  std::vector<double> x = analytics::sample(cfg.distribution, seed, cfg.dim);
  for (std::uint64_t redraw = 0; redraw < 10; ++redraw) {
    if (redraw > 0) {  // continue the same stream; identical to the bulk draw
      for (std::uint32_t i = 0; i < cfg.dim; ++i)
        x[i] = analytics::sample_at(cfg.distribution, seed, redraw * cfg.dim + i);
    }
    for (double v : x)
      if (v != 0.0) return x;
  }
  throw std::runtime_error("run_trial: drew a zero vector 10 times in a row");
}

// Per-client streams must stay pairwise distinct within a trial; a collision
// is astronomically unlikely but cheap to repair deterministically.
std::vector<std::uint64_t> client_seeds(const DmeConfig& cfg, std::uint64_t trial) {
  const std::uint64_t trial_seed = prng::hash_combine(cfg.master_seed, trial);
  std::vector<std::uint64_t> seeds(cfg.n_clients);
  for (std::uint32_t c = 0; c < cfg.n_clients; ++c) {
    std::uint64_t s = prng::hash_combine(trial_seed, c);
    bool collided = true;
    while (collided) {
      collided = false;
      for (std::uint32_t p = 0; p < c; ++p) {
        if (seeds[p] == s) {
          s = prng::mix64(s + 1);
          collided = true;
          break;
        }
      }
    }
    seeds[c] = s;
  }
  return seeds;
}

}  // namespace

void validate(const DmeConfig& cfg) {
  if (cfg.n_clients == 0) throw std::invalid_argument("config: n_clients must be positive");
  if (cfg.dim == 0) throw std::invalid_argument("config: dim must be positive");
  if (cfg.trials == 0) throw std::invalid_argument("config: trials must be positive");
  if (cfg.policy == quantizers::ScalePolicy::ConstantExpectation &&
      cfg.rotation != transforms::RotationFamily::Uniform)
    throw std::invalid_argument("config: the constant-expectation scale requires --rot uniform");
  if (cfg.algorithm == DmeAlgorithm::DrivePlus &&
      cfg.policy != quantizers::ScalePolicy::MinSSE &&
      cfg.policy != quantizers::ScalePolicy::Unbiased)
    throw std::invalid_argument("config: drive+ supports only the min or unbiased scales");
  if (cfg.algorithm == DmeAlgorithm::HadamardSQ &&
      cfg.rotation != transforms::RotationFamily::Hadamard)
    throw std::invalid_argument("config: hsq uses the Hadamard rotation only");
}

TrialSample run_trial(const DmeConfig& cfg, std::uint64_t trial_index) {
  const std::uint32_t d = cfg.dim;
  const std::uint32_t dpad = transforms::next_pow2(d);
  const auto seeds = client_seeds(cfg, trial_index);

  std::vector<double> shared;
  if (cfg.input_mode == InputMode::SameVector) {
    shared = draw_vector(cfg, prng::hash_combine(prng::hash_combine(cfg.master_seed, trial_index),
                                                 0xD000 + kDataTag));
  }

  std::vector<double> sum_hat(d, 0.0), sum_x(d, 0.0);
  double sum_sq_norm = 0.0;
  TrialSample out;
  out.vnmse.reserve(cfg.n_clients);

  std::vector<double> own;
  for (std::uint32_t c = 0; c < cfg.n_clients; ++c) {
    const std::uint64_t cseed = seeds[c];
    if (cfg.input_mode == InputMode::IndependentVectors)
      own = draw_vector(cfg, prng::hash_combine(cseed, kDataTag));
    const std::vector<double>& x = cfg.input_mode == InputMode::SameVector ? shared : own;

    std::vector<double> xhat;
    const auto enc_start = std::chrono::steady_clock::now();
    if (cfg.algorithm == DmeAlgorithm::Drive || cfg.algorithm == DmeAlgorithm::DrivePlus) {
      const transforms::RotationSpec spec{cfg.rotation, prng::hash_combine(cseed, kRotationTag),
                                          dpad};
      const transforms::Rotator rot(spec);
      const auto msg = cfg.algorithm == DmeAlgorithm::Drive
                           ? quantizers::drive_encode(x, rot, cfg.policy)
                           : quantizers::drive_plus_encode(x, rot, cfg.policy);
      out.encode_seconds +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - enc_start).count();
      xhat = quantizers::decode(msg, rot);
    } else if (cfg.algorithm == DmeAlgorithm::HadamardSQ) {
      const transforms::RotationSpec spec{transforms::RotationFamily::Hadamard,
                                          prng::hash_combine(cseed, kRotationTag), dpad};
      const auto msg = baselines::hadamard_sq_encode(x, spec, prng::hash_combine(cseed, kSqTag));
      out.encode_seconds +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - enc_start).count();
      xhat = baselines::hadamard_sq_decode(msg);
    } else {
      const auto msg = baselines::terngrad_encode(x, prng::hash_combine(cseed, kSqTag));
      out.encode_seconds +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - enc_start).count();
      xhat = baselines::terngrad_decode(msg);
    }

    double err = 0.0, sq = 0.0;
    for (std::uint32_t i = 0; i < d; ++i) {
      err += (x[i] - xhat[i]) * (x[i] - xhat[i]);
      sq += x[i] * x[i];
      sum_hat[i] += xhat[i];
      sum_x[i] += x[i];
    }
    out.vnmse.push_back(err / sq);
    sum_sq_norm += sq;
  }

  const double n = static_cast<double>(cfg.n_clients);
  double avg_err = 0.0;
  for (std::uint32_t i = 0; i < d; ++i) {
    const double e = (sum_x[i] - sum_hat[i]) / n;
    avg_err += e * e;
  }
  out.nmse = avg_err / (sum_sq_norm / n);
  return out;
}

TrialReport run_experiment(const DmeConfig& cfg) {
  validate(cfg);
  const std::uint64_t trials = cfg.trials;
  std::vector<double> nmse(trials), vnmse(trials);
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::int64_t> encode_ns{0};

  const unsigned nthreads = std::max(1u, cfg.threads);
  auto worker = [&]() {
    std::int64_t local_ns = 0;
    for (;;) {
      const std::uint64_t t = next.fetch_add(1);
      if (t >= trials) break;
      const TrialSample s = run_trial(cfg, t);
      local_ns += static_cast<std::int64_t>(s.encode_seconds * 1e9);
      nmse[t] = s.nmse;
      vnmse[t] = pairwise_sum(s.vnmse) / static_cast<double>(s.vnmse.size());
    }
    encode_ns.fetch_add(local_ns);
  };

  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  TrialReport r;
  r.trials = trials;
  const auto [mn, sn] = mean_stderr(nmse);
  const auto [mv, sv] = mean_stderr(vnmse);
  r.mean_nmse = mn;
  r.stderr_nmse = trials > 1 ? sn : 0.0;
  r.mean_vnmse = mv;
  r.stderr_vnmse = trials > 1 ? sv : 0.0;
  r.wall_time_per_encode = static_cast<double>(encode_ns.load()) * 1e-9 /
                           (static_cast<double>(trials) * cfg.n_clients);
  return r;
}

std::vector<ScalingRow> nmse_scaling_check(const DmeConfig& cfg,
                                           const std::vector<std::uint32_t>& n_values) {
  std::vector<ScalingRow> rows;
  rows.reserve(n_values.size());
  for (std::uint32_t n : n_values) {
    DmeConfig c = cfg;
    c.n_clients = n;
    const TrialReport r = run_experiment(c);
    rows.push_back({n, r.mean_nmse, r.stderr_nmse, r.mean_vnmse, r.stderr_vnmse});
  }
  return rows;
}

std::string algorithm_name(DmeAlgorithm a) {
  switch (a) {
    case DmeAlgorithm::Drive:
      return "drive";
    case DmeAlgorithm::DrivePlus:
      return "drive+";
    case DmeAlgorithm::HadamardSQ:
      return "hsq";
    case DmeAlgorithm::TernGrad:
      return "terngrad";
  }
  return "?";
}

std::string rotation_name(transforms::RotationFamily f) {
  return f == transforms::RotationFamily::Hadamard ? "hadamard" : "uniform";
}

std::string policy_name(quantizers::ScalePolicy p) {
  switch (p) {
    case quantizers::ScalePolicy::MinSSE:
      return "min";
    case quantizers::ScalePolicy::Unbiased:
      return "unbiased";
    case quantizers::ScalePolicy::ConstantExpectation:
      return "const";
    case quantizers::ScalePolicy::ErrorFeedbackClipped:
      return "ef";
  }
  return "?";
}

std::string distribution_name(analytics::Distribution d) {
  switch (d) {
    case analytics::Distribution::LogNormal01:
      return "lognormal";
    case analytics::Distribution::Normal01:
      return "normal";
    case analytics::Distribution::Exponential1:
      return "exp";
  }
  return "?";
}

std::string mode_name(InputMode m) {
  return m == InputMode::SameVector ? "same" : "indep";
}

std::string csv_header() {
  return "algorithm,rotation,policy,d,n,distribution,mode,trials,mean_nmse,stderr_nmse,"
         "mean_vnmse,stderr_vnmse,encode_ms";
}

std::string csv_row(const DmeConfig& cfg, const TrialReport& report) {
  std::ostringstream os;
  os.precision(10);
  os << algorithm_name(cfg.algorithm) << ',' << rotation_name(cfg.rotation) << ','
     << policy_name(cfg.policy) << ',' << cfg.dim << ',' << cfg.n_clients << ','
     << distribution_name(cfg.distribution) << ',' << mode_name(cfg.input_mode) << ','
     << cfg.trials << ',' << report.mean_nmse << ',' << report.stderr_nmse << ','
     << report.mean_vnmse << ',' << report.stderr_vnmse << ','
     << report.wall_time_per_encode * 1e3;
  return os.str();
}

}  // namespace drive::dme
