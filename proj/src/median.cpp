// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "stn/median.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace stn {

void MedianConfig::validate() const {
  if (horizontal_length < 2 || vertical_length < 2)
    throw ParameterError("median filter lengths must be >= 2");
}

namespace {

void check_length(std::size_t length) {
  if (length < 2)
    throw ParameterError("median filter length must be >= 2, got " + std::to_string(length));
}

double median_in_place(std::vector<double>& w) {
  const std::size_t n = w.size();
  const auto mid = w.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(w.begin(), mid, w.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(w.begin(), mid);
  return 0.5 * (lower + upper);
}

// Median filter of a strided 1-D line: line[i] = base[i * stride], count entries.
void filter_line(const double* base, std::size_t stride, std::size_t count, std::size_t length,
                 double* out, std::size_t out_stride, std::vector<double>& scratch) {
  const auto n = static_cast<std::ptrdiff_t>(count);
  const auto before = static_cast<std::ptrdiff_t>((length + 1) / 2) - 1;
  const auto after = static_cast<std::ptrdiff_t>(length / 2);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    scratch.clear();
    for (std::ptrdiff_t j = i - before; j <= i + after; ++j)
      scratch.push_back(j >= 0 && j < n ? base[static_cast<std::size_t>(j) * stride] : 0.0);
    out[static_cast<std::size_t>(i) * out_stride] = median_in_place(scratch);
  }
}

}  // namespace

RealGrid median_filter_h(const RealGrid& mag, std::size_t length) {
  check_length(length);
  RealGrid out(mag.bins(), mag.frames());
  std::vector<double> scratch;
  scratch.reserve(length);
  const std::size_t K = mag.bins();
  for (std::size_t k = 0; k < K; ++k)
    filter_line(mag.values().data() + k, K, mag.frames(), length, out.values().data() + k, K,
                scratch);
  return out;
}

RealGrid median_filter_v(const RealGrid& mag, std::size_t length) {
  check_length(length);
  RealGrid out(mag.bins(), mag.frames());
  std::vector<double> scratch;
  scratch.reserve(length);
  const std::size_t K = mag.bins();
  for (std::size_t m = 0; m < mag.frames(); ++m)
    filter_line(mag.values().data() + m * K, 1, K, length, out.values().data() + m * K, 1,
                scratch);
  return out;
}

TonalnessMaps tonalness_from_medians(const RealGrid& horizontal, const RealGrid& vertical) {
  require_same_shape(horizontal, vertical, "tonalness");
  TonalnessMaps maps{RealGrid(horizontal.bins(), horizontal.frames()),
                     RealGrid(horizontal.bins(), horizontal.frames())};
  for (std::size_t i = 0; i < horizontal.size(); ++i) {
    const double h = horizontal.values()[i];
    const double v = vertical.values()[i];
    const double sum = h + v;
    const double rs = sum > 0.0 ? h / sum : 0.5;
    maps.tonal.values()[i] = rs;
    maps.transient.values()[i] = 1.0 - rs;
  }
  return maps;
}

TonalnessMaps tonalness(const RealGrid& mag, const MedianConfig& cfg) {
  cfg.validate();
  return tonalness_from_medians(median_filter_h(mag, cfg.horizontal_length),
                                median_filter_v(mag, cfg.vertical_length));
}

}  // namespace stn
