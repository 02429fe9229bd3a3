// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stn/median.hpp"
#include "stn/stft.hpp"

namespace stn {

/// Normalised distribution of tonalness values over [0, 1].
struct TonalnessHistogram {
  std::vector<double> bin_edges;          ///< bins + 1 entries, 0 .. 1
  std::vector<double> normalized_counts;  ///< sums to 1
  std::size_t window_length = 0;
  std::size_t instance_count = 0;

  std::vector<double> bin_centers() const;
  /// Mass of the bins whose centres fall inside [lo, hi].
  double mass_between(double lo, double hi) const;
  /// Centre of the fullest bin.
  double peak_center() const;
};

/// Accumulates every R_s value of `maps` into `counts` (bins equal-width on [0, 1]).
void accumulate_tonalness(const TonalnessMaps& maps, std::span<double> counts);

/// Builds the histogram for one signal (used for deterministic inputs).
TonalnessHistogram tonalness_histogram(std::span<const double> signal, const StftConfig& cfg,
                                       const MedianConfig& median_cfg, std::size_t bins);

/// Tonalness distribution of `instances` seeded Gaussian white-noise signals,
/// each `length_seconds` long. Instance i uses seed + i, so results do not
/// depend on how instances are scheduled.
TonalnessHistogram noise_tonalness_histogram(std::size_t instances, double length_seconds,
                                             const StftConfig& cfg, const MedianConfig& median_cfg,
                                             std::size_t bins, std::uint64_t seed);

}  // namespace stn
