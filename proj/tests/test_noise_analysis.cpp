// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <numeric>

#include "stn/noise_analysis.hpp"

using namespace stn;

namespace {

double total(const TonalnessHistogram& h) {
  return std::accumulate(h.normalized_counts.begin(), h.normalized_counts.end(), 0.0);
}

}  // namespace

TEST_CASE("histogram layout") {
  const auto h = tonalness_histogram(Signal(4000, 0.0), StftConfig::with_length(512), MedianConfig{}, 100);
  CHECK(h.bin_edges.size() == 101);
  CHECK(h.bin_edges.front() == 0.0);
  CHECK(h.bin_edges.back() == 1.0);
  CHECK(h.bin_centers().size() == 100);
  CHECK(h.bin_centers()[0] == doctest::Approx(0.005));
  CHECK(h.window_length == 512);
}

TEST_CASE("silence puts all mass at one half") {
  const auto h = tonalness_histogram(Signal(4000, 0.0), StftConfig::with_length(512), MedianConfig{}, 100);
  CHECK(h.normalized_counts[50] == 1.0);
  CHECK(h.peak_center() == doctest::Approx(0.505));
  CHECK(h.mass_between(0.5, 0.51) == 1.0);
}

TEST_CASE("accumulation clamps R_s = 1 into the last bin") {
  TonalnessMaps maps{RealGrid(1, 3), RealGrid(1, 3)};
  maps.tonal(0, 0) = 0.0;
  maps.tonal(0, 1) = 1.0;
  maps.tonal(0, 2) = 0.999;
  std::vector<double> counts(10, 0.0);
  accumulate_tonalness(maps, counts);
  CHECK(counts[0] == 1.0);
  CHECK(counts[9] == 2.0);
}

TEST_CASE("white-noise tonalness concentrates around one half") {
  for (std::size_t L : {8192u, 512u}) {
    const auto h = noise_tonalness_histogram(12, 1.0, StftConfig::with_length(L), MedianConfig{}, 100, 1);
    CHECK(h.instance_count == 12);
    CHECK(total(h) == doctest::Approx(1.0).epsilon(1e-12));
    for (double c : h.normalized_counts) CHECK(c >= 0.0);
    CHECK(h.mass_between(0.25, 0.75) >= 0.8);
    CHECK(h.peak_center() > 0.4);
    CHECK(h.peak_center() < 0.6);
    // the tails thin out toward both extremes
    CHECK(h.mass_between(0.0, 0.1) < 0.05);
    CHECK(h.mass_between(0.9, 1.0) < 0.05);
  }
}

TEST_CASE("seeded and converged") {
  const auto cfg = StftConfig::with_length(512);
  const auto a = noise_tonalness_histogram(20, 1.0, cfg, MedianConfig{}, 100, 7);
  const auto b = noise_tonalness_histogram(20, 1.0, cfg, MedianConfig{}, 100, 7);
  CHECK(a.normalized_counts == b.normalized_counts);
  const auto c = noise_tonalness_histogram(40, 1.0, cfg, MedianConfig{}, 100, 7);
  for (std::size_t i = 0; i < 100; ++i)
    CHECK(std::abs(a.normalized_counts[i] - c.normalized_counts[i]) < 0.01);
}

TEST_CASE("invalid requests") {
  const auto cfg = StftConfig::with_length(512);
  CHECK_THROWS_AS(noise_tonalness_histogram(0, 1.0, cfg, MedianConfig{}, 100, 1), ParameterError);
  CHECK_THROWS_AS(noise_tonalness_histogram(1, 0.0, cfg, MedianConfig{}, 100, 1), ParameterError);
  CHECK_THROWS_AS(noise_tonalness_histogram(1, 1.0, cfg, MedianConfig{}, 0, 1), ParameterError);
}
