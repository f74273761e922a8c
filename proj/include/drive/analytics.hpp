#pragma once

// Distribution samplers, special functions and the closed-form error
// expressions used by the statistical checks.

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "drive/quantizers.hpp"

namespace drive::analytics {

enum class Distribution : std::uint8_t { LogNormal01 = 0, Normal01 = 1, Exponential1 = 2 };

// i.i.d. draws, deterministic per (distribution, seed); draw k of a stream
// is addressable as sample_at(distribution, seed, k).
double sample_at(Distribution dist, std::uint64_t seed, std::uint64_t index);
std::vector<double> sample(Distribution dist, std::uint64_t seed, std::size_t count);

// ln B(a, b) via log-gamma; a, b > 0.
double log_beta(double a, double b);

// E|T|_1 for T uniform on the unit sphere in R^d: 2d / ((d-1) B(1/2,(d-1)/2)).
// Defined for d >= 2.
double expected_l1_on_sphere(std::uint32_t d);

enum class AnalyticBound : std::uint8_t {
  BiasedVnmseExact = 0,     // (1 - 2/pi)(1 - 1/d)
  UnbiasedVnmseCap292 = 1,  // 2.92, any d >= 2
  UnbiasedVnmseLargeD = 2,  // pi/2 - 1 + sqrt(((6 pi^3 - 12 pi^2) ln d + 1) / d), d >= 135
  HadamardVnmseCap = 3,     // 1/2
  UnbiasedVnmseAsymptote = 4  // pi/2 - 1
};

double bound_value(AnalyticBound name, std::uint32_t d);
std::string_view bound_name(AnalyticBound name);

struct McEstimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::size_t trials = 0;
};

// Monte-Carlo vNMSE: mean of |x - xhat|^2 / |x|^2 over fresh (x, rotation
// seed) pairs, inputs drawn i.i.d. from `input`. Trials may run on several
// threads; the estimate is independent of the thread count.
McEstimate mc_vnmse(quantizers::Algorithm alg, transforms::RotationFamily family,
                    quantizers::ScalePolicy policy, std::uint32_t d, std::size_t trials,
                    std::uint64_t seed, Distribution input = Distribution::Normal01,
                    unsigned threads = 1);

// Two-sided Kolmogorov-Smirnov statistic of `samples` against a reference
// CDF evaluated by `cdf`. Sorts a copy of the samples.
double ks_statistic(std::span<const double> samples, double (*cdf)(double));

double normal_cdf(double z);

}  // namespace drive::analytics
