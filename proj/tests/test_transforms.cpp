#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "drive/analytics.hpp"
#include "drive/prng.hpp"
#include "drive/transforms.hpp"

using namespace drive;
using transforms::RotationFamily;
using transforms::RotationSpec;
using transforms::Rotator;

namespace {

double l2(std::span<const double> v) {
  double s = 0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

std::vector<double> random_vec(std::uint64_t seed, std::size_t n) {
  std::vector<double> v(n);
  prng::fill_normal(seed, 0, v);
  return v;
}

}  // namespace

TEST_CASE("pad appends zeros to the next power of two") {
  std::vector<double> x{1, 2, 3};
  auto p = transforms::pad(x);
  CHECK(p.original_len == 3);
  REQUIRE(p.data.size() == 4);
  CHECK(p.data[0] == 1);
  CHECK(p.data[2] == 3);
  CHECK(p.data[3] == 0);

  std::vector<double> single{5};
  auto q = transforms::pad(single);
  CHECK(q.data.size() == 1);

  std::vector<double> long_v(129, 1.0);
  CHECK(transforms::pad(long_v).data.size() == 256);

  CHECK(l2(p.data) == doctest::Approx(l2(x)).epsilon(1e-15));
  CHECK_THROWS_AS(transforms::pad(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("fwht matches the 2x2 matrix and is an involution") {
  std::vector<double> a{1, 0};
  transforms::fwht_in_place(a);
  CHECK(a[0] == doctest::Approx(1 / std::numbers::sqrt2).epsilon(1e-15));
  CHECK(a[1] == doctest::Approx(1 / std::numbers::sqrt2).epsilon(1e-15));

  std::vector<double> b{1, 1};
  transforms::fwht_in_place(b);
  CHECK(b[0] == doctest::Approx(std::numbers::sqrt2).epsilon(1e-15));
  CHECK(b[1] == doctest::Approx(0.0));

  auto v = random_vec(10, 64);
  auto twice = v;
  transforms::fwht_in_place(twice);
  transforms::fwht_in_place(twice);
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(twice[i] == doctest::Approx(v[i]).epsilon(1e-12));

  std::vector<double> odd{1, 2, 3};
  CHECK_THROWS_AS(transforms::fwht_in_place(std::span<double>(odd)), std::invalid_argument);
}

TEST_CASE("randomized hadamard with identity diagonal matches 2x2 evaluation") {
  // fwht is exactly H D x / sqrt(d) with D = I.
  std::vector<double> x{2.0 / 3.0, 1.0 / 3.0};
  transforms::fwht_in_place(x);
  CHECK(x[0] == doctest::Approx(1 / std::numbers::sqrt2).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(1.0 / 3.0 / std::numbers::sqrt2).epsilon(1e-15));

  std::vector<double> y{3, 4};
  transforms::fwht_in_place(y);
  CHECK(y[0] == doctest::Approx(7 / std::numbers::sqrt2).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(-1 / std::numbers::sqrt2).epsilon(1e-15));
}

TEST_CASE("randomized hadamard preserves norms and inverts exactly") {
  for (std::uint32_t dim : {2u, 8u, 128u, 4096u}) {
    const RotationSpec spec{RotationFamily::Hadamard, 77 + dim, dim};
    auto x = transforms::pad(random_vec(dim, dim));
    auto rotated = transforms::randomized_hadamard(x, spec);
    CHECK(l2(rotated.data) == doctest::Approx(l2(x.data)).epsilon(1e-9));
    auto back = transforms::randomized_hadamard_inverse(rotated, spec);
    for (std::size_t i = 0; i < x.data.size(); ++i)
      CHECK(back.data[i] == doctest::Approx(x.data[i]).epsilon(1e-9));
  }

  auto zero = transforms::pad(std::vector<double>(8, 0.0));
  const RotationSpec spec{RotationFamily::Hadamard, 1, 8};
  auto rot = transforms::randomized_hadamard(zero, spec);
  for (double v : rot.data) CHECK(v == 0.0);

  const RotationSpec bad{RotationFamily::Hadamard, 1, 16};
  CHECK_THROWS_AS(transforms::randomized_hadamard(zero, bad), std::invalid_argument);
}

TEST_CASE("hadamard row products close under xor indexing") {
  for (std::uint32_t d : {4u, 8u, 16u}) {
    // Build H rows by transforming unit vectors: column j of H/sqrt(d).
    std::vector<std::vector<double>> h(d, std::vector<double>(d));
    for (std::uint32_t j = 0; j < d; ++j) {
      std::vector<double> e(d, 0.0);
      e[j] = std::sqrt(static_cast<double>(d));  // undo normalization
      transforms::fwht_in_place(e);
      for (std::uint32_t i = 0; i < d; ++i) h[i][j] = e[i];
    }
    for (std::uint32_t i = 0; i < d; ++i)
      for (std::uint32_t l = 0; l < d; ++l) {
        const std::uint32_t k = i ^ l;
        for (std::uint32_t j = 0; j < d; ++j)
          CHECK(h[i][j] * h[l][j] == doctest::Approx(h[k][j]).epsilon(1e-12));
      }
  }
}

TEST_CASE("rotated coordinates are uncorrelated with unit second moment") {
  const std::uint32_t d = 8;
  const std::size_t trials = 100000;
  double sum_cross[8][8] = {};
  double sum_diag[8] = {};
  std::vector<double> x(d);
  for (std::size_t t = 0; t < trials; ++t) {
    prng::fill_normal(prng::hash_combine(404, t), 0, x);
    const RotationSpec spec{RotationFamily::Hadamard, prng::hash_combine(405, t), d};
    auto rotated = transforms::randomized_hadamard(transforms::pad(x), spec);
    for (std::uint32_t i = 0; i < d; ++i) {
      sum_diag[i] += rotated.data[i] * rotated.data[i];
      for (std::uint32_t l = i + 1; l < d; ++l) sum_cross[i][l] += rotated.data[i] * rotated.data[l];
    }
  }
  const double n = static_cast<double>(trials);
  // Var of a product of two approximately independent unit normals is ~1,
  // and Var(z^2) = 2; allow 4 standard errors on each moment.
  for (std::uint32_t i = 0; i < d; ++i) {
    CHECK(std::abs(sum_diag[i] / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
    for (std::uint32_t l = i + 1; l < d; ++l)
      CHECK(std::abs(sum_cross[i][l] / n) < 4.0 * std::sqrt(1.0 / n) * 1.5);
  }
}

TEST_CASE("sample_haar yields orthonormal deterministic matrices") {
  const RotationSpec spec{RotationFamily::Uniform, 9, 8};
  const auto m = transforms::sample_haar(spec);
  for (std::uint32_t i = 0; i < 8; ++i)
    for (std::uint32_t j = 0; j < 8; ++j) {
      double dot = 0;
      for (std::uint32_t k = 0; k < 8; ++k) dot += m.at(k, i) * m.at(k, j);
      CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
    }

  const auto m2 = transforms::sample_haar(spec);
  CHECK(m.entries == m2.entries);

  const RotationSpec one{RotationFamily::Uniform, 5, 1};
  const auto tiny = transforms::sample_haar(one);
  CHECK(std::abs(std::abs(tiny.at(0, 0)) - 1.0) < 1e-12);

  CHECK_THROWS_AS(transforms::sample_haar(RotationSpec{RotationFamily::Uniform, 1, 20000}),
                  std::invalid_argument);
  CHECK_THROWS_AS(transforms::sample_haar(RotationSpec{RotationFamily::Hadamard, 1, 8}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Rotator(RotationSpec{RotationFamily::Uniform, 1, 32768}),
                  std::invalid_argument);
}

TEST_CASE("apply_haar is an isometry with an exact inverse") {
  const RotationSpec spec{RotationFamily::Uniform, 31, 16};
  const auto m = transforms::sample_haar(spec);
  auto x = random_vec(3, 16);
  auto y = transforms::apply_haar(m, x);
  CHECK(l2(y) == doctest::Approx(l2(x)).epsilon(1e-9));
  auto back = transforms::apply_haar_inverse(m, y);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-9));

  for (int rep = 0; rep < 100; ++rep) {
    auto v = random_vec(1000 + rep, 16);
    auto w = transforms::apply_haar_inverse(m, transforms::apply_haar(m, v));
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(w[i] == doctest::Approx(v[i]).epsilon(1e-9));
  }

  std::vector<double> small{1, 2, 3, 4};
  CHECK_THROWS_AS(transforms::apply_haar(m, small), std::invalid_argument);
}

namespace {

// CDF of |T_1| for T uniform on S^3 (d = 4): (2/pi)(t sqrt(1-t^2) + asin t).
double abs_coord_cdf_d4(double t) {
  if (t <= 0) return 0;
  if (t >= 1) return 1;
  return (2.0 / std::numbers::pi) * (t * std::sqrt(1 - t * t) + std::asin(t));
}

}  // namespace

TEST_CASE("haar first coordinate follows the sphere marginal (QR sampler)") {
  const std::size_t trials = 100000;
  std::vector<double> samples(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto m = transforms::sample_haar(RotationSpec{RotationFamily::Uniform, 50000 + t, 4});
    samples[t] = std::abs(m.at(0, 0));  // first coordinate of R e_1
  }
  CHECK(analytics::ks_statistic(samples, &abs_coord_cdf_d4) < 0.01);
}

TEST_CASE("haar first coordinate follows the sphere marginal (rotation action)") {
  const std::size_t trials = 100000;
  std::vector<double> samples(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const Rotator rot(RotationSpec{RotationFamily::Uniform, 90000 + t, 4});
    std::vector<double> e1{1, 0, 0, 0};
    rot.forward(e1);
    samples[t] = std::abs(e1[0]);
  }
  CHECK(analytics::ks_statistic(samples, &abs_coord_cdf_d4) < 0.01);
}

TEST_CASE("uniform rotation action inverts and preserves norms across dims") {
  for (std::uint32_t dim : {1u, 2u, 8u, 128u}) {
    const Rotator rot(RotationSpec{RotationFamily::Uniform, 1234 + dim, dim});
    for (int rep = 0; rep < 250; ++rep) {
      auto x = random_vec(dim * 7 + rep, dim);
      auto y = x;
      rot.forward(y);
      CHECK(l2(y) == doctest::Approx(l2(x)).epsilon(1e-9));
      rot.inverse(y);
      for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-9));
    }
  }
  // Large-dimension spot check; the chain is built once.
  const Rotator rot(RotationSpec{RotationFamily::Uniform, 5555, 4096});
  for (int rep = 0; rep < 8; ++rep) {
    auto x = random_vec(rep, 4096);
    auto y = x;
    rot.forward(y);
    CHECK(l2(y) == doctest::Approx(l2(x)).epsilon(1e-9));
    rot.inverse(y);
    double max_dev = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
      max_dev = std::max(max_dev, std::abs(y[i] - x[i]) / std::max(1.0, std::abs(x[i])));
    CHECK(max_dev < 1e-9);
  }
}

TEST_CASE("hadamard roundtrip across 1000 vectors per dimension") {
  for (std::uint32_t dim : {2u, 8u, 128u, 4096u}) {
    const RotationSpec spec{RotationFamily::Hadamard, 7000 + dim, dim};
    const Rotator rot(spec);
    for (int rep = 0; rep < 1000; ++rep) {
      auto x = random_vec(prng::hash_combine(dim, rep), dim);
      auto y = x;
      rot.forward(y);
      rot.inverse(y);
      double max_dev = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        max_dev = std::max(max_dev, std::abs(y[i] - x[i]) / std::max(1.0, std::abs(x[i])));
      CHECK(max_dev < 1e-9);
    }
  }
}

TEST_CASE("dimension-one haar samples are balanced signs") {
  int plus = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto m = transforms::sample_haar(RotationSpec{RotationFamily::Uniform, seed, 1});
    CHECK(std::abs(std::abs(m.at(0, 0)) - 1.0) < 1e-12);
    if (m.at(0, 0) > 0) ++plus;
  }
  CHECK(plus > 400);
  CHECK(plus < 600);
}

TEST_CASE("identical rotation specs act bitwise identically") {
  for (auto family : {RotationFamily::Hadamard, RotationFamily::Uniform}) {
    const RotationSpec spec{family, 88, 64};
    auto x = random_vec(42, 64);
    auto a = x, b = x;
    const Rotator r1(spec), r2(spec);
    r1.forward(a);
    r2.forward(b);
    CHECK(a == b);
  }
}
