#include "drive/prng.hpp"

#include <cassert>

namespace drive::prng {

void fill_normal(std::uint64_t seed, std::uint64_t first_index, std::span<double> out) {
  assert((first_index & 1) == 0 && "pair alignment requires an even start index");
  std::size_t k = 0;
  std::uint64_t j = first_index >> 1;
  for (; k + 2 <= out.size(); k += 2, ++j) {
    const double u1 = unit_open_zero(word_at(seed, 2 * j));
    const double u2 = unit_half_open(word_at(seed, 2 * j + 1));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    out[k] = r * std::cos(theta);
    out[k + 1] = r * std::sin(theta);
  }
  if (k < out.size()) {
    out[k] = normal_at(seed, first_index + k);
  }
}

}  // namespace drive::prng
