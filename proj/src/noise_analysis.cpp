// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "stn/noise_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>
#include <thread>

namespace stn {

std::vector<double> TonalnessHistogram::bin_centers() const {
  std::vector<double> c(normalized_counts.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (bin_edges[i] + bin_edges[i + 1]);
  return c;
}

double TonalnessHistogram::mass_between(double lo, double hi) const {
  const auto centers = bin_centers();
  double mass = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i)
    if (centers[i] >= lo && centers[i] <= hi) mass += normalized_counts[i];
  return mass;
}

double TonalnessHistogram::peak_center() const {
  const auto it = std::max_element(normalized_counts.begin(), normalized_counts.end());
  return bin_centers()[static_cast<std::size_t>(it - normalized_counts.begin())];
}

void accumulate_tonalness(const TonalnessMaps& maps, std::span<double> counts) {
  const auto bins = counts.size();
  for (double rs : maps.tonal.values()) {
    auto idx = static_cast<std::size_t>(rs * static_cast<double>(bins));
    counts[std::min(idx, bins - 1)] += 1.0;
  }
}

namespace {

TonalnessHistogram finish(std::vector<double> counts, std::size_t window_length,
                          std::size_t instances) {
  TonalnessHistogram h;
  const std::size_t bins = counts.size();
  h.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    h.bin_edges[i] = static_cast<double>(i) / static_cast<double>(bins);
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  for (double& c : counts) c /= total;
  h.normalized_counts = std::move(counts);
  h.window_length = window_length;
  h.instance_count = instances;
  return h;
}

std::vector<double> instance_counts(std::uint64_t seed, std::size_t samples, const StftConfig& cfg,
                                    const MedianConfig& median_cfg, std::size_t bins) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Signal noise(samples);
  for (double& v : noise) v = gauss(rng);
  std::vector<double> counts(bins, 0.0);
  accumulate_tonalness(tonalness(magnitude(stft(noise, cfg).data), median_cfg), counts);
  return counts;
}

}  // namespace

TonalnessHistogram tonalness_histogram(std::span<const double> signal, const StftConfig& cfg,
                                       const MedianConfig& median_cfg, std::size_t bins) {
  if (bins == 0) throw ParameterError("histogram needs at least one bin");
  std::vector<double> counts(bins, 0.0);
  accumulate_tonalness(tonalness(magnitude(stft(signal, cfg).data), median_cfg), counts);
  return finish(std::move(counts), cfg.window_length, 1);
}

TonalnessHistogram noise_tonalness_histogram(std::size_t instances, double length_seconds,
                                             const StftConfig& cfg, const MedianConfig& median_cfg,
                                             std::size_t bins, std::uint64_t seed) {
  if (instances < 1) throw ParameterError("need at least one noise instance");
  if (bins == 0) throw ParameterError("histogram needs at least one bin");
  if (!(length_seconds > 0.0)) throw ParameterError("instance length must be positive");
  cfg.validate();
  median_cfg.validate();
  const auto samples = static_cast<std::size_t>(std::llround(length_seconds * cfg.sample_rate));

  // Per-instance counts are merged in index order, so the result is independent
  // of the number of workers.
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), instances));
  std::vector<std::vector<double>> per_instance(instances);
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < instances; i += workers)
        per_instance[i] = instance_counts(seed + i, samples, cfg, median_cfg, bins);
    }));
  for (auto& j : jobs) j.get();

  std::vector<double> counts(bins, 0.0);
  for (const auto& c : per_instance)
    for (std::size_t b = 0; b < bins; ++b) counts[b] += c[b];
  return finish(std::move(counts), cfg.window_length, instances);
}

}  // namespace stn
