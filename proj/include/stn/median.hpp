// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>

#include "stn/grid.hpp"

namespace stn {

struct MedianConfig {
  std::size_t horizontal_length = 17;  ///< frames
  std::size_t vertical_length = 17;    ///< bins

  void validate() const;
  friend bool operator==(const MedianConfig&, const MedianConfig&) = default;
};

/// Per-bin tonalness R_s and transientness R_t = 1 - R_s.
struct TonalnessMaps {
  RealGrid tonal;
  RealGrid transient;
};

// Sliding medians with zero padding outside the grid. A window of length n at
// position i covers i - ceil(n/2) + 1 .. i + floor(n/2); even-length medians
// average the two central order statistics.
RealGrid median_filter_h(const RealGrid& mag, std::size_t length);
RealGrid median_filter_v(const RealGrid& mag, std::size_t length);

/// R_s = X_h / (X_h + X_v). Where both medians vanish R_s = R_t = 0.5.
TonalnessMaps tonalness(const RealGrid& mag, const MedianConfig& cfg);
TonalnessMaps tonalness_from_medians(const RealGrid& horizontal, const RealGrid& vertical);

}  // namespace stn
