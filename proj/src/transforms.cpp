#include "drive/transforms.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "drive/prng.hpp"

namespace drive::transforms {

std::uint32_t next_pow2(std::uint32_t n) {
  std::uint32_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

PaddedVector pad(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("pad: empty input");
  PaddedVector out;
  out.original_len = static_cast<std::uint32_t>(x.size());
  out.data.assign(x.begin(), x.end());
  out.data.resize(next_pow2(out.original_len), 0.0);
  return out;
}

void fwht_in_place(std::span<double> v) {
  const std::size_t n = v.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fwht: length not a power of two");
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j];
        const double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& e : v) e *= inv_sqrt_n;
}

void fwht_in_place(PaddedVector& v) { fwht_in_place(std::span<double>(v.data)); }

namespace {

void check_spec(const RotationSpec& spec, std::size_t len, RotationFamily want) {
  if (spec.family != want) throw std::invalid_argument("rotation: wrong family for this operation");
  if (spec.dim != len) throw std::invalid_argument("rotation: dimension mismatch");
}

void apply_rademacher(std::span<double> v, std::uint64_t seed) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= prng::rademacher_at(seed, i);
}

}  // namespace

PaddedVector randomized_hadamard(const PaddedVector& v, const RotationSpec& spec) {
  check_spec(spec, v.data.size(), RotationFamily::Hadamard);
  PaddedVector out = v;
  apply_rademacher(out.data, spec.seed);
  fwht_in_place(out);
  return out;
}

PaddedVector randomized_hadamard_inverse(const PaddedVector& v, const RotationSpec& spec) {
  check_spec(spec, v.data.size(), RotationFamily::Hadamard);
  PaddedVector out = v;
  fwht_in_place(out);
  apply_rademacher(out.data, spec.seed);
  return out;
}

HaarMatrix sample_haar(const RotationSpec& spec) {
  if (spec.family != RotationFamily::Uniform)
    throw std::invalid_argument("sample_haar: spec.family must be Uniform");
  const std::uint32_t d = spec.dim;
  if (d == 0 || d > 16384) throw std::invalid_argument("sample_haar: dim out of range (1..16384)");

  Eigen::MatrixXd g(d, d);
  {
    std::vector<double> draws(std::size_t{d} * d);
    prng::fill_normal(spec.seed, 0, draws);
    for (std::uint32_t r = 0; r < d; ++r)
      for (std::uint32_t c = 0; c < d; ++c) g(r, c) = draws[std::size_t{r} * d + c];
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (std::uint32_t c = 0; c < d; ++c) {
    if (r(c, c) < 0.0) q.col(c) = -q.col(c);  // zero keeps +1
  }

  HaarMatrix out;
  out.dim = d;
  out.entries.resize(std::size_t{d} * d);
  for (std::uint32_t i = 0; i < d; ++i)
    for (std::uint32_t j = 0; j < d; ++j) out.entries[std::size_t{i} * d + j] = q(i, j);
  return out;
}

std::vector<double> apply_haar(const HaarMatrix& m, std::span<const double> v) {
  if (v.size() != m.dim) throw std::invalid_argument("apply_haar: dimension mismatch");
  std::vector<double> out(m.dim, 0.0);
  for (std::uint32_t i = 0; i < m.dim; ++i) {
    const double* row = &m.entries[std::size_t{i} * m.dim];
    double acc = 0.0;
    for (std::uint32_t j = 0; j < m.dim; ++j) acc += row[j] * v[j];
    out[i] = acc;
  }
  return out;
}

std::vector<double> apply_haar_inverse(const HaarMatrix& m, std::span<const double> v) {
  if (v.size() != m.dim) throw std::invalid_argument("apply_haar_inverse: dimension mismatch");
  std::vector<double> out(m.dim, 0.0);
  for (std::uint32_t j = 0; j < m.dim; ++j) {
    const double* row = &m.entries[std::size_t{j} * m.dim];
    const double vj = v[j];
    for (std::uint32_t i = 0; i < m.dim; ++i) out[i] += row[i] * vj;
  }
  return out;
}

namespace {

// Reflector block l spans coordinates [l, dim); its unit direction is drawn
// from the sub-stream hash_combine(seed, l).
inline std::size_t reflector_offset(std::uint32_t dim, std::uint32_t l) {
  // sum_{k=0}^{l-1} (dim - k)
  return std::size_t{l} * dim - (std::size_t{l} * (l - 1)) / 2;
}

inline void reflect(std::span<double> block, const double* w) {
  double dot = 0.0;
  for (std::size_t i = 0; i < block.size(); ++i) dot += w[i] * block[i];
  const double twice = 2.0 * dot;
  for (std::size_t i = 0; i < block.size(); ++i) block[i] -= twice * w[i];
}

}  // namespace

Rotator::Rotator(const RotationSpec& spec) : spec_(spec) {
  if (spec.dim == 0) throw std::invalid_argument("Rotator: dim must be positive");
  if (spec.family == RotationFamily::Hadamard) {
    if ((spec.dim & (spec.dim - 1)) != 0)
      throw std::invalid_argument("Rotator: Hadamard dim must be a power of two");
    return;
  }

  const std::uint32_t d = spec.dim;
  if (d > 16384)
    throw std::invalid_argument("Rotator: Uniform family is guarded to dim <= 16384");
  last_sign_ = (prng::word_at(prng::hash_combine(spec.seed, d - 1), 0) >> 63) ? 1.0 : -1.0;
  if (d == 1) return;

  reflectors_.resize(reflector_offset(d, d - 1));
  std::vector<double> g;
  for (std::uint32_t l = 0; l + 1 < d; ++l) {
    const std::uint32_t m = d - l;
    g.resize(m);
    prng::fill_normal(prng::hash_combine(spec.seed, l), 0, g);
    double norm = 0.0;
    for (double e : g) norm += e * e;
    norm = std::sqrt(norm);
    double* w = &reflectors_[reflector_offset(d, l)];
    if (norm == 0.0) {  // probability zero; identity block
      for (std::uint32_t i = 0; i < m; ++i) w[i] = 0.0;
      continue;
    }
    // w = normalize(e1 - u) with u = g / |g|, so that H maps e1 to u.
    double wnorm2 = 0.0;
    for (std::uint32_t i = 0; i < m; ++i) {
      const double u = g[i] / norm;
      w[i] = (i == 0 ? 1.0 - u : -u);
      wnorm2 += w[i] * w[i];
    }
    const double wnorm = std::sqrt(wnorm2);
    if (wnorm < 1e-150) {  // u numerically equal to e1: identity block
      for (std::uint32_t i = 0; i < m; ++i) w[i] = 0.0;
      continue;
    }
    for (std::uint32_t i = 0; i < m; ++i) w[i] /= wnorm;
  }
}

void Rotator::forward(std::span<double> v) const {
  if (v.size() != spec_.dim) throw std::invalid_argument("Rotator::forward: dimension mismatch");
  if (spec_.family == RotationFamily::Hadamard) {
    apply_rademacher(v, spec_.seed);
    fwht_in_place(v);
    return;
  }
  const std::uint32_t d = spec_.dim;
  v[d - 1] *= last_sign_;
  for (std::uint32_t l = d - 1; l-- > 0;) {
    reflect(v.subspan(l), &reflectors_[reflector_offset(d, l)]);
  }
}

void Rotator::inverse(std::span<double> v) const {
  if (v.size() != spec_.dim) throw std::invalid_argument("Rotator::inverse: dimension mismatch");
  if (spec_.family == RotationFamily::Hadamard) {
    fwht_in_place(v);
    apply_rademacher(v, spec_.seed);
    return;
  }
  const std::uint32_t d = spec_.dim;
  for (std::uint32_t l = 0; l + 1 < d; ++l) {
    reflect(v.subspan(l), &reflectors_[reflector_offset(d, l)]);
  }
  v[d - 1] *= last_sign_;
}

}  // namespace drive::transforms
