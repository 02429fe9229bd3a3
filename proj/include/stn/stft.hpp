// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "stn/grid.hpp"

namespace stn {

using Signal = std::vector<double>;
using ComplexGrid = TfGrid<std::complex<double>>;

enum class WindowKind {
  Hann,         ///< periodic raised cosine, sin^2(pi n / L)
  Rectangular,
};

WindowKind parse_window_kind(std::string_view name);
std::string_view to_string(WindowKind kind);

struct StftConfig {
  std::size_t window_length = 4096;
  std::size_t hop = 1024;
  double sample_rate = 44100.0;
  WindowKind window = WindowKind::Hann;

  /// Hann window of length L with the default hop L/4.
  static StftConfig with_length(std::size_t window_length, double sample_rate = 44100.0);

  /// Throws ParameterError unless L is even, 0 < H <= L/2, H divides L and fs > 0.
  void validate() const;
  std::size_t bins() const noexcept { return window_length / 2 + 1; }

  friend bool operator==(const StftConfig&, const StftConfig&) = default;
};

/// One-sided STFT together with the parameters that produced it.
///
/// Frame m is centred on input sample m*H: the signal is zero-padded by L/2
/// on both ends (and up to a whole hop at the tail), giving
/// M = ceil(N / H) + 1 frames for N input samples.
struct Spectrogram {
  ComplexGrid data;
  StftConfig config;
  std::size_t original_length = 0;

  std::size_t bins() const noexcept { return data.bins(); }
  std::size_t frames() const noexcept { return data.frames(); }
};

std::vector<double> make_window(WindowKind kind, std::size_t length);

std::size_t frame_count(std::size_t signal_length, const StftConfig& config);

Spectrogram stft(std::span<const double> signal, const StftConfig& config);

/// Weighted overlap-add inverse, normalised by the summed squared window and
/// trimmed to the original length. Exact inverse of stft() for unmodified input.
Signal istft(const Spectrogram& spec);

/// Sum of squared windows sum_m w^2(n - mH) sampled over one hop period.
/// Accepts hops that do not divide L, so the diagnostic can show why they fail.
std::vector<double> overlap_add_profile(const StftConfig& config);

/// True when the profile is constant to within `tolerance` (relative).
bool overlap_add_is_constant(const StftConfig& config, double tolerance = 1e-12);

RealGrid magnitude(const ComplexGrid& data);

}  // namespace stn
