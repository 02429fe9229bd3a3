// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "stn/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"

namespace stn {

WindowKind parse_window_kind(std::string_view name) {
  if (name == "hann") return WindowKind::Hann;
  if (name == "rect" || name == "rectangular") return WindowKind::Rectangular;
  throw ParameterError("unknown window kind: " + std::string(name));
}

std::string_view to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::Hann: return "hann";
    case WindowKind::Rectangular: return "rectangular";
  }
  return "?";
}

StftConfig StftConfig::with_length(std::size_t window_length, double sample_rate) {
  StftConfig c;
  c.window_length = window_length;
  c.hop = window_length / 4;
  c.sample_rate = sample_rate;
  return c;
}

void StftConfig::validate() const {
  if (window_length < 4 || window_length % 2 != 0)
    throw ParameterError("window length must be even and >= 4, got " +
                         std::to_string(window_length));
  if (hop == 0 || hop > window_length / 2)
    throw ParameterError("hop must satisfy 0 < H <= L/2, got H=" + std::to_string(hop));
  if (window_length % hop != 0)
    throw ParameterError("hop must divide the window length");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
    throw ParameterError("sample rate must be positive");
}

std::vector<double> make_window(WindowKind kind, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (kind == WindowKind::Hann) {
    for (std::size_t n = 0; n < length; ++n) {
      const double s = std::sin(std::numbers::pi * static_cast<double>(n) /
                                static_cast<double>(length));
      w[n] = s * s;
    }
  }
  return w;
}

std::size_t frame_count(std::size_t signal_length, const StftConfig& config) {
  return (signal_length + config.hop - 1) / config.hop + 1;
}

Spectrogram stft(std::span<const double> signal, const StftConfig& config) {
  config.validate();
  if (signal.empty()) throw ParameterError("stft: empty signal");

  const std::size_t L = config.window_length;
  const std::size_t H = config.hop;
  const std::size_t M = frame_count(signal.size(), config);
  const auto window = make_window(config.window, L);

  Spectrogram spec{ComplexGrid(config.bins(), M), config, signal.size()};
  detail::RealFft fft(L);
  std::vector<double> frame(L);
  const auto half = static_cast<std::ptrdiff_t>(L / 2);
  const auto N = static_cast<std::ptrdiff_t>(signal.size());

  for (std::size_t m = 0; m < M; ++m) {
    const auto start = static_cast<std::ptrdiff_t>(m * H) - half;
    for (std::size_t n = 0; n < L; ++n) {
      const auto idx = start + static_cast<std::ptrdiff_t>(n);
      frame[n] = (idx >= 0 && idx < N) ? signal[static_cast<std::size_t>(idx)] * window[n] : 0.0;
    }
    fft.forward(frame, spec.data.frame(m));
  }
  return spec;
}

Signal istft(const Spectrogram& spec) {
  const StftConfig& config = spec.config;
  config.validate();
  const std::size_t L = config.window_length;
  const std::size_t H = config.hop;
  if (spec.bins() != config.bins())
    throw ParameterError("istft: bin count does not match window length");
  if (spec.frames() != frame_count(spec.original_length, config))
    throw ParameterError("istft: frame count does not match original length");

  const auto profile = overlap_add_profile(config);
  if (*std::min_element(profile.begin(), profile.end()) <= 1e-9)
    throw ParameterError("istft: window/hop pair does not cover every sample");

  const auto window = make_window(config.window, L);
  const std::size_t M = spec.frames();
  const std::size_t padded = (M - 1) * H + L;
  std::vector<double> acc(padded, 0.0);
  std::vector<double> norm(padded, 0.0);
  detail::RealFft fft(L);
  std::vector<double> frame(L);
  const double scale = 1.0 / static_cast<double>(L);

  for (std::size_t m = 0; m < M; ++m) {
    fft.inverse(spec.data.frame(m), frame);
    const std::size_t start = m * H;
    for (std::size_t n = 0; n < L; ++n) {
      acc[start + n] += frame[n] * scale * window[n];
      norm[start + n] += window[n] * window[n];
    }
  }

  Signal out(spec.original_length);
  const std::size_t offset = L / 2;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = norm[i + offset];
    out[i] = d > 0.0 ? acc[i + offset] / d : 0.0;
  }
  return out;
}

std::vector<double> overlap_add_profile(const StftConfig& config) {
  const std::size_t L = config.window_length;
  const std::size_t H = config.hop;
  if (L < 2 || L % 2 != 0 || H == 0 || H > L)
    throw ParameterError("overlap_add_profile: need even L and 0 < H <= L");
  const auto window = make_window(config.window, L);
  std::vector<double> profile(H, 0.0);
  // Sample n in [0, H) receives every shift n + jH that lands inside the window.
  for (std::size_t n = 0; n < H; ++n)
    for (std::size_t pos = n; pos < L; pos += H) profile[n] += window[pos] * window[pos];
  return profile;
}

bool overlap_add_is_constant(const StftConfig& config, double tolerance) {
  const auto profile = overlap_add_profile(config);
  const auto [lo, hi] = std::minmax_element(profile.begin(), profile.end());
  return *hi > 0.0 && (*hi - *lo) <= tolerance * *hi;
}

RealGrid magnitude(const ComplexGrid& data) {
  RealGrid out(data.bins(), data.frames());
  for (std::size_t i = 0; i < data.size(); ++i) out.values()[i] = std::abs(data.values()[i]);
  return out;
}

}  // namespace stn
