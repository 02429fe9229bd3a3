// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "stn/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace stn {

SampleFormat parse_sample_format(std::string_view name) {
  if (name == "pcm16") return SampleFormat::Pcm16;
  if (name == "pcm24") return SampleFormat::Pcm24;
  if (name == "float32") return SampleFormat::Float32;
  throw ParameterError("unknown sample format: " + std::string(name));
}

void AudioBuffer::validate() const {
  if (channels.empty()) throw ParameterError("audio buffer has no channels");
  for (const auto& c : channels)
    if (c.size() != channels.front().size())
      throw ParameterError("audio channels differ in length");
  if (!(sample_rate > 0.0)) throw ParameterError("sample rate must be positive");
}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t u32(const std::vector<unsigned char>& b, std::size_t at) {
  if (at + 4 > b.size()) throw IoError("unexpected end of file", static_cast<std::int64_t>(at));
  return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}

std::uint16_t u16(const std::vector<unsigned char>& b, std::size_t at) {
  if (at + 2 > b.size()) throw IoError("unexpected end of file", static_cast<std::int64_t>(at));
  return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

bool tag(const std::vector<unsigned char>& b, std::size_t at, const char* id) {
  return at + 4 <= b.size() && std::memcmp(b.data() + at, id, 4) == 0;
}

void put16(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put32(std::string& out, std::uint32_t v) {
  put16(out, v & 0xFFFF);
  put16(out, v >> 16);
}

}  // namespace

std::int32_t quantize_pcm16(double v) noexcept {
  const double s = std::round(v * 32768.0);
  return static_cast<std::int32_t>(std::clamp(s, -32768.0, 32767.0));
}

std::int32_t quantize_pcm24(double v) noexcept {
  const double s = std::round(v * 8388608.0);
  return static_cast<std::int32_t>(std::clamp(s, -8388608.0, 8388607.0));
}

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<unsigned char> b((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
  if (!tag(b, 0, "RIFF")) throw IoError("missing RIFF tag", 0);
  if (!tag(b, 8, "WAVE")) throw IoError("missing WAVE tag", 8);

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t fmt_at = 0, data_at = 0, data_len = 0;
  bool have_fmt = false, have_data = false;
  for (std::size_t at = 12; at + 8 <= b.size();) {
    const std::uint32_t len = u32(b, at + 4);
    if (tag(b, at, "fmt ")) {
      if (len < 16) throw IoError("format chunk too short", static_cast<std::int64_t>(at + 4));
      fmt_at = at + 8;
      format = u16(b, fmt_at);
      channels = u16(b, fmt_at + 2);
      rate = u32(b, fmt_at + 4);
      bits = u16(b, fmt_at + 14);
      if (format == kFormatExtensible) {
        if (len < 40) throw IoError("extensible format chunk too short", static_cast<std::int64_t>(at + 4));
        format = u16(b, fmt_at + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (tag(b, at, "data")) {
      data_at = at + 8;
      data_len = std::min<std::size_t>(len, b.size() - data_at);
      have_data = true;
    }
    at += 8 + len + (len & 1u);
  }
  if (!have_fmt) throw IoError("no fmt chunk", 12);
  if (!have_data) throw IoError("no data chunk", 12);
  if (channels == 0) throw IoError("zero channels", static_cast<std::int64_t>(fmt_at + 2));
  if (rate == 0) throw IoError("zero sample rate", static_cast<std::int64_t>(fmt_at + 4));

  AudioBuffer buf;
  buf.sample_rate = rate;
  if (format == kFormatPcm && bits == 16) buf.source_format = SampleFormat::Pcm16;
  else if (format == kFormatPcm && bits == 24) buf.source_format = SampleFormat::Pcm24;
  else if (format == kFormatFloat && bits == 32) buf.source_format = SampleFormat::Float32;
  else
    throw IoError("unsupported codec (format " + std::to_string(format) + ", " +
                      std::to_string(bits) + " bits)",
                  static_cast<std::int64_t>(fmt_at));

  const std::size_t width = bits / 8;
  const std::size_t frames = data_len / (width * channels);
  buf.channels.assign(channels, Signal(frames));
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = b.data() + data_at + (f * channels + c) * width;
      double v = 0.0;
      switch (buf.source_format) {
        case SampleFormat::Pcm16:
          v = static_cast<std::int16_t>(p[0] | p[1] << 8) / 32768.0;
          break;
        case SampleFormat::Pcm24: {
          std::int32_t s = p[0] | p[1] << 8 | p[2] << 16;
          if (s & 0x800000) s -= 0x1000000;
          v = s / 8388608.0;
          break;
        }
        case SampleFormat::Float32: {
          const std::uint32_t raw = static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
                                    static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
          v = std::bit_cast<float>(raw);
          break;
        }
      }
      buf.channels[c][f] = v;
    }
  }
  return buf;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& buffer, SampleFormat format) {
  buffer.validate();
  const auto channels = static_cast<std::uint32_t>(buffer.channels.size());
  const std::uint32_t bits = format == SampleFormat::Pcm16 ? 16 : format == SampleFormat::Pcm24 ? 24 : 32;
  const std::uint32_t width = bits / 8;
  const auto frames = static_cast<std::uint32_t>(buffer.frames());
  const std::uint32_t data_len = frames * channels * width;
  const auto rate = static_cast<std::uint32_t>(std::lround(buffer.sample_rate));

  std::string out;
  out.reserve(44 + data_len + 1);
  out += "RIFF";
  put32(out, 36 + data_len + (data_len & 1u));
  out += "WAVEfmt ";
  put32(out, 16);
  put16(out, format == SampleFormat::Float32 ? kFormatFloat : kFormatPcm);
  put16(out, channels);
  put32(out, rate);
  put32(out, rate * channels * width);
  put16(out, channels * width);
  put16(out, bits);
  out += "data";
  put32(out, data_len);
  for (std::uint32_t f = 0; f < frames; ++f) {
    for (std::uint32_t c = 0; c < channels; ++c) {
      const double v = buffer.channels[c][f];
      switch (format) {
        case SampleFormat::Pcm16:
          put16(out, static_cast<std::uint32_t>(quantize_pcm16(v)) & 0xFFFF);
          break;
        case SampleFormat::Pcm24: {
          const auto s = static_cast<std::uint32_t>(quantize_pcm24(v));
          put16(out, s & 0xFFFF);
          out.push_back(static_cast<char>((s >> 16) & 0xFF));
          break;
        }
        case SampleFormat::Float32:
          put32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
          break;
      }
    }
  }
  if (data_len & 1u) out.push_back('\0');

  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for " + path.string());
}

}  // namespace stn
