// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stn/decomposer.hpp"
#include "stn/structure_tensor.hpp"
#include "test_signals.hpp"

using namespace stn;
namespace t = stn::testing;

namespace {

constexpr double kPi = std::numbers::pi;

// dB surface holding a Gaussian ridge along the line k = k0 + slope * (m - m0).
RealGrid ridge(std::size_t K, std::size_t M, double slope, bool vertical = false,
              double width = 8.0) {
  RealGrid g(K, M);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t m = 0; m < M; ++m) {
      const double dk = static_cast<double>(k) - 64.0, dm = static_cast<double>(m) - 64.0;
      const double dist = vertical ? dm : dk - slope * dm;
      g(k, m) = -80.0 + 80.0 * std::exp(-dist * dist / width);
    }
  return g;
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(StConfig{}.validate());
  StConfig c;
  c.anisotropy_threshold = 1.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = {};
  c.rate_sines = 2e4;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = {};
  c.sigma_time = 0.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
}

TEST_CASE("rate factor converts bins per frame to Hz per second") {
  const auto cfg = StftConfig::with_length(1024, 44100.0);
  CHECK(frequency_rate_factor(cfg) == doctest::Approx(44100.0 * 44100.0 / (256.0 * 1024.0)));
}

TEST_CASE("horizontal ridge reads as a steady sinusoid") {
  const auto f = structure_tensor_features(ridge(129, 129, 0.0), StConfig{}, 1000.0);
  for (std::size_t m = 20; m < 109; ++m) {
    CHECK(std::abs(f.alpha(64, m)) < 1e-6);
    CHECK(std::abs(f.rate(64, m)) < 1e-3);
    CHECK(f.anisotropy(64, m) > 0.95);
  }
}

TEST_CASE("vertical ridge reads as a click") {
  const StConfig cfg;
  const auto f = structure_tensor_features(ridge(129, 129, 0.0, true), cfg, 7441.4);
  for (std::size_t k = 20; k < 109; ++k) {
    CHECK(std::abs(f.alpha(k, 64)) == doctest::Approx(kPi / 2).epsilon(1e-6));
    CHECK(std::abs(f.rate(k, 64)) > 100.0 * cfg.rate_transients);
    CHECK(f.anisotropy(k, 64) > 0.95);
  }
}

TEST_CASE("sloped ridge recovers its rate") {
  // a ridge rising 0.5 bins per frame moves 0.5 * fs^2 / (H L) Hz per second;
  // a wide ridge keeps the central-difference error small
  const auto cfg = StftConfig::with_length(1024, 44100.0);
  const double factor = frequency_rate_factor(cfg);
  for (double slope : {0.25, 0.5, -1.0, 2.0}) {
    const auto f = structure_tensor_features(ridge(129, 129, slope, false, 800.0), StConfig{}, factor);
    CHECK(f.alpha(64, 64) == doctest::Approx(std::atan(slope)).epsilon(1e-3));
    CHECK(f.rate(64, 64) == doctest::Approx(slope * factor).epsilon(5e-3));
  }
}

TEST_CASE("transposing swaps horizontal and vertical orientation") {
  const auto h = ridge(129, 129, 0.0);
  const auto a = structure_tensor_features(h, StConfig{}, 1.0);
  const auto b = structure_tensor_features(transpose(h), StConfig{}, 1.0);
  for (std::size_t i = 20; i < 109; ++i) {
    CHECK(std::abs(a.alpha(64, i)) < 1e-6);
    CHECK(std::abs(b.alpha(i, 64)) == doctest::Approx(kPi / 2).epsilon(1e-6));
    CHECK(a.anisotropy(64, i) == doctest::Approx(b.anisotropy(i, 64)).epsilon(1e-9));
  }
}

TEST_CASE("anisotropy ignores a constant offset") {
  RealGrid g = ridge(64, 80, 0.3);
  for (std::size_t i = 0; i < g.size(); ++i) g.values()[i] += std::sin(0.37 * static_cast<double>(i));
  RealGrid shifted = g;
  for (auto& v : shifted.values()) v += 42.0;
  const auto a = structure_tensor_features(g, StConfig{}, 1.0);
  const auto b = structure_tensor_features(shifted, StConfig{}, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(a.anisotropy.values()[i] == doctest::Approx(b.anisotropy.values()[i]).epsilon(1e-9));
}

TEST_CASE("flat surface has zero anisotropy") {
  const auto f = structure_tensor_features(RealGrid(10, 10, -20.0), StConfig{}, 1.0);
  for (double v : f.anisotropy.values()) CHECK(v == 0.0);
}

TEST_CASE("white noise has no dominant orientation") {
  const auto cfg = StftConfig::with_length(1024, 44100.0);
  std::vector<double> medians;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = st_features(stft(t::white_noise(44100, 900 + s), cfg), StConfig{});
    medians.push_back(median(f.anisotropy.values()));
    for (double c : f.anisotropy.values()) {
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
    }
  }
  CHECK(median(medians) < 0.5);
}

TEST_CASE("degenerate spectrograms are rejected") {
  CHECK_THROWS_AS(structure_tensor_features(RealGrid(2, 10), StConfig{}, 1.0), ParameterError);
  CHECK_THROWS_AS(structure_tensor_features(RealGrid(10, 2), StConfig{}, 1.0), ParameterError);
}

TEST_CASE("mask rules") {
  StConfig cfg;
  cfg.rate_sines = 1000.0;
  cfg.rate_transients = 5000.0;
  StFeatures f{RealGrid(4, 1), RealGrid(4, 1), RealGrid(4, 1)};
  f.rate(0, 0) = 0.0;     f.anisotropy(0, 0) = 0.9;  // sine
  f.rate(1, 0) = -9000.0; f.anisotropy(1, 0) = 0.9;  // transient
  f.rate(2, 0) = 3000.0;  f.anisotropy(2, 0) = 0.9;  // between thresholds
  f.rate(3, 0) = 0.0;     f.anisotropy(3, 0) = 0.1;  // incoherent
  const auto m = masks_from_structure_tensor(f, cfg);
  CHECK(m.sines(0, 0) == 1.0);
  CHECK(m.transients(1, 0) == 1.0);
  CHECK(m.noise(2, 0) == 1.0);
  CHECK(m.noise(3, 0) == 1.0);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(m.sines(k, 0) + m.transients(k, 0) + m.noise(k, 0) == 1.0);
    CHECK(m.sines(k, 0) * m.transients(k, 0) == 0.0);
  }
}

TEST_CASE("low anisotropy is noise whatever the rate") {
  StFeatures f{RealGrid(5, 5), RealGrid(5, 5, 0.1), RealGrid(5, 5)};
  for (std::size_t i = 0; i < 25; ++i) f.rate.values()[i] = 1e3 * static_cast<double>(i) - 1e4;
  const auto m = masks_from_structure_tensor(f, StConfig{});
  for (double v : m.noise.values()) CHECK(v == 1.0);
}

TEST_CASE("equal thresholds: a bin on both sides goes to sines") {
  StFeatures f{RealGrid(1, 1), RealGrid(1, 1, 0.9), RealGrid(1, 1, 10000.0)};
  const auto m = masks_from_structure_tensor(f, StConfig{});
  CHECK(m.sines(0, 0) == 1.0);
  CHECK(m.transients(0, 0) == 0.0);
}

TEST_CASE("moderate vibrato stays sinusoidal") {
  const double fs = 44100.0;
  const std::size_t n = 3 * 44100;
  Signal x(n);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double inst = 1000.0 + 50.0 * std::sin(2.0 * kPi * 5.0 * static_cast<double>(i) / fs);
    phase += 2.0 * kPi * inst / fs;
    x[i] = 0.5 * std::sin(phase);
  }
  // default thresholds and smoothing, with a 2048-sample window that resolves a 5 Hz wobble
  auto params = default_plan(MaskMethod::StructureTensor).stage1;
  params.stft = StftConfig::with_length(2048, fs);
  const auto spec = stft(x, params.stft);
  const auto masks = compute_masks(spec, MaskMethod::StructureTensor, params);
  double s = 0.0, total = 0.0;
  for (std::size_t i = 0; i < spec.data.size(); ++i) {
    const double e = std::norm(spec.data.values()[i]);
    s += e * masks.sines.values()[i];
    total += e;
  }
  CHECK(s / total > 0.5);
}
