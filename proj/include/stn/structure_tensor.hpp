// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>

#include "stn/masks.hpp"
#include "stn/stft.hpp"

namespace stn {

struct StConfig {
  std::size_t derivative_scale = 1;  ///< central-difference half-width, bins/frames
  double sigma_time = 8.0;           ///< Gaussian smoothing, frames
  double sigma_freq = 8.0;           ///< Gaussian smoothing, bins
  double anisotropy_threshold = 0.2;
  double rate_sines = 10000.0;       ///< Hz/s
  double rate_transients = 10000.0;  ///< Hz/s
  double log_floor = 1e-10;

  void validate() const;
};

/// Local orientation, anisotropy and frequency change rate per bin.
struct StFeatures {
  RealGrid alpha;       ///< radians in (-pi/2, pi/2], measured from the time axis
  RealGrid anisotropy;  ///< in [0, 1]
  RealGrid rate;        ///< Hz/s
};

/// Hz/s per unit tan(alpha): bin spacing fs/L over frame spacing H/fs.
double frequency_rate_factor(const StftConfig& config) noexcept;

/// Features of an arbitrary (log-magnitude) surface indexed (bin, frame).
StFeatures structure_tensor_features(const RealGrid& surface, const StConfig& cfg,
                                     double rate_factor);

/// Features of 20 log10(|X| + floor).
StFeatures st_features(const Spectrogram& spec, const StConfig& cfg);

/// S where |R| <= r_s and C > c; T where |R| >= r_t and C > c and the bin is
/// not already S (matters only when r_s == r_t); N is the complement.
MaskSet masks_from_structure_tensor(const StFeatures& feat, const StConfig& cfg);

}  // namespace stn
