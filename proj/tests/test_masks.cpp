// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stn/masks.hpp"
#include "test_signals.hpp"

using namespace stn;
namespace t = stn::testing;

namespace {

TonalnessMaps single(double rs) {
  return {RealGrid(1, 1, rs), RealGrid(1, 1, 1.0 - rs)};
}

TonalnessMaps sweep(std::size_t points) {
  TonalnessMaps m{RealGrid(1, points), RealGrid(1, points)};
  for (std::size_t i = 0; i < points; ++i) {
    m.tonal(0, i) = static_cast<double>(i) / static_cast<double>(points - 1);
    m.transient(0, i) = 1.0 - m.tonal(0, i);
  }
  return m;
}

void check_triple(MaskTriple m, double s, double tr, double n) {
  CHECK(m.s == doctest::Approx(s).epsilon(1e-12).scale(1.0));
  CHECK(m.t == doctest::Approx(tr).epsilon(1e-12).scale(1.0));
  CHECK(m.n == doctest::Approx(n).epsilon(1e-12).scale(1.0));
}

void check_partition(const MaskSet& m) {
  for (std::size_t i = 0; i < m.sines.size(); ++i) {
    const double s = m.sines.values()[i], tr = m.transients.values()[i], n = m.noise.values()[i];
    CHECK(std::abs(s + tr + n - 1.0) <= 1e-15);
    CHECK(s >= 0.0);
    CHECK(tr >= 0.0);
    CHECK(n >= 0.0);
    CHECK(s <= 1.0);
    CHECK(tr <= 1.0);
    CHECK(n <= 1.0);
  }
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(HprBeta{1.0}.validate(), ParameterError);
  CHECK_NOTHROW(HprBeta{}.validate());
  CHECK_NOTHROW(kStage1Bounds.validate());
  CHECK_NOTHROW(kStage2Bounds.validate());
  CHECK_THROWS_AS((TransitionBounds{0.8, 0.45}).validate(), ParameterError);
  CHECK_THROWS_AS((TransitionBounds{0.7, 0.7}).validate(), ParameterError);
  CHECK_THROWS_AS((TransitionBounds{1.2, 0.7}).validate(), ParameterError);
  CHECK_THROWS_AS(masks_enhanced(single(0.5), TransitionBounds{0.8, 0.4}), ParameterError);
}

TEST_CASE("hard masks") {
  check_triple(hard_hpr_point(0.75, 0.25, 2.5), 1, 0, 0);
  check_triple(hard_hpr_point(0.5, 0.5, 2.5), 0, 0, 1);
  check_triple(hard_hpr_point(0.2, 0.8, 2.5), 0, 1, 0);
  // R_s/R_t = 2.5 exactly at R_s = 5/7 (with R_t = 2/7); the tie is noise
  check_triple(hard_hpr_point(5.0, 2.0, 2.5), 0, 0, 1);
}

TEST_CASE("hard mask threshold sits at beta/(1+beta)") {
  const double beta = 2.5;
  const auto m = masks_hard_hpr(sweep(10001), HprBeta{beta});
  double first_on = -1.0;
  for (std::size_t i = 0; i < 10001; ++i)
    if (m.sines(0, i) == 1.0) {
      first_on = static_cast<double>(i) / 10000.0;
      break;
    }
  CHECK(first_on == doctest::Approx(beta / (1.0 + beta)).epsilon(2e-4));
  check_partition(m);
}

TEST_CASE("fuzzy masks") {
  check_triple(fuzzy_point(0.5, 0.5), 0, 0, 1);
  check_triple(fuzzy_point(1.0, 0.0), 1, 0, 0);
  check_triple(fuzzy_point(0.0, 1.0), 0, 1, 0);
  check_triple(fuzzy_point(0.625, 0.375), 0.375, 0.125, 0.5);
}

TEST_CASE("fuzzy secondary lobe peaks at 0.125 for R_s = 0.625") {
  const auto m = masks_fuzzy_fz(sweep(10001));
  std::size_t arg = 5000;
  for (std::size_t i = 5000; i < 10001; ++i)
    if (m.transients(0, i) > m.transients(0, arg)) arg = i;
  CHECK(m.transients(0, arg) == doctest::Approx(0.125).epsilon(1e-6));
  CHECK(static_cast<double>(arg) / 10000.0 == doctest::Approx(0.625).epsilon(1e-3));
  check_partition(m);
}

TEST_CASE("fuzzy masks match their closed form") {
  for (int i = 0; i <= 1000; ++i) {
    const double rs = i / 1000.0, rt = 1.0 - rs, d = std::abs(rs - rt);
    const auto m = fuzzy_point(rs, rt);
    const double big = (d + std::sqrt(d)) / 2, small = (std::sqrt(d) - d) / 2;
    CHECK(m.s == doctest::Approx(rs >= 0.5 ? big : small).epsilon(1e-12).scale(1.0));
    CHECK(m.t == doctest::Approx(rs >= 0.5 ? small : big).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("prototype masks") {
  check_triple(prototype_point(0.5), 0, 0, 1);
  check_triple(prototype_point(1.0), 1, 0, 0);
  check_triple(prototype_point(0.0), 0, 1, 0);
  check_triple(prototype_point(0.75), 0.5, 0, 0.5);
  check_triple(prototype_point(0.25), 0, 0.5, 0.5);
  check_partition(masks_prototype(sweep(10001)));
}

TEST_CASE("enhanced masks at the stage-1 bounds") {
  check_triple(enhanced_point(0.8, 0.2, kStage1Bounds), 1, 0, 0);
  check_triple(enhanced_point(0.75, 0.25, kStage1Bounds), 0.5, 0, 0.5);
  check_triple(enhanced_point(0.65, 0.35, kStage1Bounds), 0, 0, 1);
  check_triple(enhanced_point(0.25, 0.75, kStage1Bounds), 0, 0.5, 0.5);
}

TEST_CASE("enhanced transfer anchors are exact") {
  for (const auto& b : {kStage1Bounds, kStage2Bounds, TransitionBounds{0.9, 0.6}}) {
    CHECK(enhanced_transfer(b.lower, b) == 0.0);
    CHECK(enhanced_transfer(b.upper, b) == 1.0);
    CHECK(enhanced_transfer(0.5 * (b.lower + b.upper), b) == 0.5);
  }
}

TEST_CASE("enhanced transfer matches the squared sine and is monotone") {
  const TransitionBounds b{0.85, 0.75};
  double prev = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double a = i / 10000.0;
    const double f = enhanced_transfer(a, b);
    double expect = 0.0;
    if (a >= b.upper) expect = 1.0;
    else if (a >= b.lower) expect = std::pow(std::sin(0.5 * std::numbers::pi * (a - b.lower) / (b.upper - b.lower)), 2);
    CHECK(f == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
    CHECK(f >= prev);
    prev = f;
  }
}

TEST_CASE("enhanced masks never overlap S and T") {
  for (const auto& b : {kStage1Bounds, kStage2Bounds, TransitionBounds{0.6, 0.5}}) {
    const auto m = masks_enhanced(sweep(10001), b);
    check_partition(m);
    for (std::size_t i = 0; i < 10001; ++i) CHECK(m.sines(0, i) * m.transients(0, i) == 0.0);
  }
}

TEST_CASE("narrow transition approaches a hard threshold") {
  const double th = 0.7;
  const TransitionBounds b{th + 1e-9, th - 1e-9};
  for (int i = 0; i <= 1000; ++i) {
    const double rs = i / 1000.0;
    if (std::abs(rs - th) < 1e-6) continue;
    CHECK(enhanced_transfer(rs, b) == (rs > th ? 1.0 : 0.0));
  }
}

TEST_CASE("applying masks") {
  const double fs = 44100.0;
  const Signal x = t::white_noise(20000, 3);
  const auto spec = stft(x, StftConfig::with_length(1024, fs));
  const std::size_t K = spec.bins(), M = spec.frames();

  SUBCASE("all-sines mask") {
    MaskSet m{RealGrid(K, M, 1.0), RealGrid(K, M, 0.0), RealGrid(K, M, 0.0)};
    const auto parts = apply_masks(spec, m);
    CHECK(parts[0].data == spec.data);
    for (const auto& v : parts[1].data.values()) CHECK(v == std::complex<double>(0.0));
  }
  SUBCASE("soft partition sums back") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RealGrid rs(K, M);
    for (auto& v : rs.values()) v = u(rng);
    TonalnessMaps maps{rs, RealGrid(K, M)};
    for (std::size_t i = 0; i < rs.size(); ++i) maps.transient.values()[i] = 1.0 - rs.values()[i];
    const auto parts = apply_masks(spec, masks_fuzzy_fz(maps));
    double worst = 0.0;
    for (std::size_t i = 0; i < spec.data.size(); ++i)
      worst = std::max(worst, std::abs(parts[0].data.values()[i] + parts[1].data.values()[i] +
                                       parts[2].data.values()[i] - spec.data.values()[i]));
    CHECK(worst < 1e-15 * 100);
    const Signal sum = t::add(t::add(istft(parts[0]), istft(parts[1])), istft(parts[2]));
    CHECK(t::rel_l2(sum, istft(spec)) < 1e-10);

    const auto hard = apply_masks(spec, masks_hard_hpr(maps, HprBeta{}));
    for (std::size_t i = 0; i < spec.data.size(); ++i) {
      int nonzero = 0;
      for (const auto& p : hard) nonzero += p.data.values()[i] != std::complex<double>(0.0) ? 1 : 0;
      CHECK(nonzero <= 1);
    }
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(apply_mask(spec, RealGrid(K, M + 1)), ParameterError);
  }
}
