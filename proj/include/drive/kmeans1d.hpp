#pragma once

// Exact 2-means clustering of a 1-D multiset.

#include <cstdint>
#include <span>
#include <vector>

namespace drive::kmeans1d {

struct TwoMeansResult {
  double c0 = 0.0;  // c0 <= c1
  double c1 = 0.0;
  std::vector<std::uint8_t> assignment;  // 0 -> nearer c0, 1 -> nearer c1
  double sse = 0.0;
};

// Globally SSE-optimal 2-means of `values` in O(n log n): sort, prefix sums,
// evaluate every contiguous split boundary, keep the smallest split index
// among SSE ties. Degenerate inputs (all equal, or length 1) collapse to
// c0 = c1 = value with an all-zero assignment.
TwoMeansResult two_means_exact(std::span<const double> values);

// Independent oracle: the same split enumeration with per-split means and
// SSE recomputed by direct summation. Guarded to length <= 24.
TwoMeansResult two_means_brute(std::span<const double> values);

}  // namespace drive::kmeans1d
