// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "stn/stft.hpp"

namespace stn {

enum class SampleFormat { Pcm16, Pcm24, Float32 };

SampleFormat parse_sample_format(std::string_view name);

struct AudioBuffer {
  std::vector<Signal> channels;
  double sample_rate = 44100.0;
  SampleFormat source_format = SampleFormat::Float32;

  std::size_t frames() const noexcept { return channels.empty() ? 0 : channels.front().size(); }
  /// Throws ParameterError unless there is at least one channel, all channels
  /// have equal length and the rate is positive.
  void validate() const;
};

/// Reads RIFF/WAVE PCM16, PCM24 or IEEE float32 (plain or extensible format
/// chunk). PCM is scaled by 1/32768 or 1/8388608. Throws IoError with the byte
/// offset of the offending field.
AudioBuffer read_wav(const std::filesystem::path& path);

/// Writes `buffer` in the requested format. PCM rounds half away from zero and
/// clips to the representable range.
void write_wav(const std::filesystem::path& path, const AudioBuffer& buffer,
               SampleFormat format = SampleFormat::Float32);

std::int32_t quantize_pcm16(double v) noexcept;
std::int32_t quantize_pcm24(double v) noexcept;

}  // namespace stn
