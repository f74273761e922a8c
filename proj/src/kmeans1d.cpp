#include "drive/kmeans1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace drive::kmeans1d {

namespace {

TwoMeansResult degenerate(std::span<const double> values, double v) {
  TwoMeansResult r;
  r.c0 = r.c1 = v;
  r.assignment.assign(values.size(), 0);
  r.sse = 0.0;
  for (double x : values) r.sse += (x - v) * (x - v);
  return r;
}

std::vector<std::uint32_t> sorted_order(std::span<const double> values) {
  std::vector<std::uint32_t> order(values.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });
  return order;
}

TwoMeansResult finalize(std::span<const double> values, const std::vector<std::uint32_t>& order,
                        std::size_t split) {
  const std::size_t n = values.size();
  double sum0 = 0.0, sum1 = 0.0;
  for (std::size_t i = 0; i < split; ++i) sum0 += values[order[i]];
  for (std::size_t i = split; i < n; ++i) sum1 += values[order[i]];

  TwoMeansResult r;
  r.c0 = sum0 / static_cast<double>(split);
  r.c1 = sum1 / static_cast<double>(n - split);
  r.assignment.assign(n, 0);
  for (std::size_t i = split; i < n; ++i) r.assignment[order[i]] = 1;
  r.sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = r.assignment[i] ? r.c1 : r.c0;
    r.sse += (values[i] - c) * (values[i] - c);
  }
  return r;
}

}  // namespace

TwoMeansResult two_means_exact(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw std::invalid_argument("two_means_exact: empty input");
  if (n == 1) return degenerate(values, values[0]);

  const auto order = sorted_order(values);
  if (values[order.front()] == values[order.back()]) return degenerate(values, values[0]);

  std::vector<double> prefix(n + 1, 0.0), prefix_sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = values[order[i]];
    prefix[i + 1] = prefix[i] + v;
    prefix_sq[i + 1] = prefix_sq[i] + v * v;
  }
  const auto range_sse = [&](std::size_t lo, std::size_t hi) {  // [lo, hi)
    const double s = prefix[hi] - prefix[lo];
    const double sq = prefix_sq[hi] - prefix_sq[lo];
    const double cnt = static_cast<double>(hi - lo);
    return std::max(0.0, sq - s * s / cnt);
  };

  std::size_t best_split = 1;
  double best_sse = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < n; ++k) {
    const double sse = range_sse(0, k) + range_sse(k, n);
    if (sse < best_sse) {
      best_sse = sse;
      best_split = k;
    }
  }
  return finalize(values, order, best_split);
}

TwoMeansResult two_means_brute(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw std::invalid_argument("two_means_brute: empty input");
  if (n > 24) throw std::invalid_argument("two_means_brute: length guard exceeded");
  if (n == 1) return degenerate(values, values[0]);

  const auto order = sorted_order(values);
  if (values[order.front()] == values[order.back()]) return degenerate(values, values[0]);

  std::size_t best_split = 1;
  double best_sse = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < n; ++k) {
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < k; ++i) m0 += values[order[i]];
    for (std::size_t i = k; i < n; ++i) m1 += values[order[i]];
    m0 /= static_cast<double>(k);
    m1 /= static_cast<double>(n - k);
    double sse = 0.0;
    for (std::size_t i = 0; i < k; ++i) sse += (values[order[i]] - m0) * (values[order[i]] - m0);
    for (std::size_t i = k; i < n; ++i) sse += (values[order[i]] - m1) * (values[order[i]] - m1);
    if (sse < best_sse) {
      best_sse = sse;
      best_split = k;
    }
  }
  return finalize(values, order, best_split);
}

}  // namespace drive::kmeans1d
