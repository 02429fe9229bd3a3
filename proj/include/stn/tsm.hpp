// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stn/decomposer.hpp"

namespace stn {

/// Output length for a stretch factor: round(factor * input_length).
std::size_t stretched_length(std::size_t input_length, double factor);

/// Phase vocoder with identity phase locking. The synthesis hop is cfg.hop;
/// frames are read from the input every hop/factor samples. Peaks are local
/// maxima over three bins; every other bin keeps its analysed phase offset
/// from the peak whose region (split halfway between peaks) it falls in.
/// Output has exactly stretched_length() samples.
Signal pv_stretch_locked(std::span<const double> signal, double factor, const StftConfig& cfg);

/// Same framing, but each synthesis bin gets a uniformly random phase.
/// Normalised for incoherent overlap so stationary noise keeps its level.
Signal pv_stretch_randomized(std::span<const double> signal, double factor, const StftConfig& cfg,
                             std::uint64_t seed);

struct TransientDetectParams {
  double envelope_ms = 1.0;        ///< moving-average length of the energy envelope
  double threshold_db = 20.0;      ///< above the median envelope level
  double range_db = 50.0;          ///< never look further than this below the peak
  double absolute_floor_db = -100.0;
  double min_separation_ms = 50.0;
  double pre_pad_ms = 5.0;
  double post_pad_ms = 30.0;
};

struct TransientEvent {
  std::size_t start = 0;   ///< first sample, inclusive
  std::size_t anchor = 0;  ///< sample of peak energy
  std::size_t end = 0;     ///< one past the last sample
};

std::vector<TransientEvent> detect_transients(std::span<const double> transients,
                                              const TransientDetectParams& params,
                                              double sample_rate);

/// Copies each event's samples unmodified so that its anchor lands at
/// round(factor * anchor), with raised-cosine fades of `fade_ms` at both ends.
Signal reposition_transients(std::span<const double> transients,
                             const std::vector<TransientEvent>& events, double factor,
                             std::size_t output_length, double sample_rate, double fade_ms = 5.0);

struct TsmRequest {
  double factor = 1.0;
  DecompositionPlan plan = default_plan(MaskMethod::Enhanced);
  StftConfig pv_stft = StftConfig::with_length(2048);
  TransientDetectParams detect;
  double fade_ms = 5.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct TsmResult {
  Signal output;
  StnComponents stretched;  ///< the three stretched parts; they sum to output
  std::vector<TransientEvent> events;
};

/// Decomposes, stretches sines (phase locked) and noise (random phase), and
/// repositions detected transients without stretching them.
TsmResult tsm_stretch_detailed(std::span<const double> signal, const TsmRequest& req);
Signal tsm_stretch(std::span<const double> signal, const TsmRequest& req);

}  // namespace stn
