#include "drive/analytics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "drive/prng.hpp"

namespace drive::analytics {

double sample_at(Distribution dist, std::uint64_t seed, std::uint64_t index) {
  switch (dist) {
    case Distribution::LogNormal01:
      return std::exp(prng::normal_at(seed, index));
    case Distribution::Normal01:
      return prng::normal_at(seed, index);
    case Distribution::Exponential1:
      return prng::exponential_at(seed, index);
  }
  throw std::invalid_argument("sample: unknown distribution");
}

std::vector<double> sample(Distribution dist, std::uint64_t seed, std::size_t count) {
  if (count == 0) throw std::invalid_argument("sample: count must be positive");
  std::vector<double> out(count);
  if (dist == Distribution::Exponential1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = prng::exponential_at(seed, i);
    return out;
  }
  prng::fill_normal(seed, 0, out);
  if (dist == Distribution::LogNormal01) {
    for (double& v : out) v = std::exp(v);
  }
  return out;
}

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("log_beta: arguments must be positive");
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double expected_l1_on_sphere(std::uint32_t d) {
  if (d < 2) throw std::invalid_argument("expected_l1_on_sphere: d must be >= 2");
  const double dd = static_cast<double>(d);
  return 2.0 * dd / (dd - 1.0) * std::exp(-log_beta(0.5, (dd - 1.0) / 2.0));
}

double bound_value(AnalyticBound name, std::uint32_t d) {
  using std::numbers::pi;
  const double dd = static_cast<double>(d);
  switch (name) {
    case AnalyticBound::BiasedVnmseExact:
      if (d < 2) throw std::invalid_argument("BiasedVnmseExact: d must be >= 2");
      return (1.0 - 2.0 / pi) * (1.0 - 1.0 / dd);
    case AnalyticBound::UnbiasedVnmseCap292:
      if (d < 2) throw std::invalid_argument("UnbiasedVnmseCap292: d must be >= 2");
      return 2.92;
    case AnalyticBound::UnbiasedVnmseLargeD:
      if (d < 135) throw std::invalid_argument("UnbiasedVnmseLargeD: d must be >= 135");
      return pi / 2.0 - 1.0 +
             std::sqrt(((6.0 * pi * pi * pi - 12.0 * pi * pi) * std::log(dd) + 1.0) / dd);
    case AnalyticBound::HadamardVnmseCap:
      return 0.5;
    case AnalyticBound::UnbiasedVnmseAsymptote:
      return pi / 2.0 - 1.0;
  }
  throw std::invalid_argument("bound_value: unknown bound");
}

std::string_view bound_name(AnalyticBound name) {
  switch (name) {
    case AnalyticBound::BiasedVnmseExact:
      return "biased_vnmse_exact";
    case AnalyticBound::UnbiasedVnmseCap292:
      return "unbiased_vnmse_cap_292";
    case AnalyticBound::UnbiasedVnmseLargeD:
      return "unbiased_vnmse_large_d";
    case AnalyticBound::HadamardVnmseCap:
      return "hadamard_vnmse_cap";
    case AnalyticBound::UnbiasedVnmseAsymptote:
      return "unbiased_vnmse_asymptote";
  }
  return "unknown";
}

McEstimate mc_vnmse(quantizers::Algorithm alg, transforms::RotationFamily family,
                    quantizers::ScalePolicy policy, std::uint32_t d, std::size_t trials,
                    std::uint64_t seed, Distribution input, unsigned threads) {
  if (trials < 100) throw std::invalid_argument("mc_vnmse: trials must be >= 100");
  std::vector<double> samples(trials);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    std::vector<double> x(d);
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= trials) break;
      const std::uint64_t trial_seed = prng::hash_combine(seed, t);
      for (std::uint32_t i = 0; i < d; ++i)
        x[i] = sample_at(input, prng::hash_combine(trial_seed, 1), i);
      const transforms::RotationSpec spec{family, prng::hash_combine(trial_seed, 2),
                                          transforms::next_pow2(d)};
      const transforms::Rotator rot(spec);
      const auto msg = (alg == quantizers::Algorithm::Drive)
                           ? quantizers::drive_encode(x, rot, policy)
                           : quantizers::drive_plus_encode(x, rot, policy);
      const auto xhat = quantizers::decode(msg, rot);
      double err = 0.0, sq = 0.0;
      for (std::uint32_t i = 0; i < d; ++i) {
        err += (x[i] - xhat[i]) * (x[i] - xhat[i]);
        sq += x[i] * x[i];
      }
      samples[t] = err / sq;
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  McEstimate e;
  e.trials = trials;
  double sum = 0.0, sum_sq = 0.0;
  for (double v : samples) {
    sum += v;
    sum_sq += v * v;
  }
  e.mean = sum / static_cast<double>(trials);
  const double var = std::max(0.0, sum_sq / static_cast<double>(trials) - e.mean * e.mean);
  e.stderr_mean = std::sqrt(var / static_cast<double>(trials));
  return e;
}

double ks_statistic(std::span<const double> samples, double (*cdf)(double)) {
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return ks;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace drive::analytics
