// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stn/error.hpp"

namespace stn {

/// Dense time-frequency matrix of K bins by M frames. Storage is frame-major,
/// so one frame's bins are contiguous (the layout the FFT produces).
template <typename T>
class TfGrid {
 public:
  TfGrid() = default;
  TfGrid(std::size_t bins, std::size_t frames, T fill = T{})
      : bins_(bins), frames_(frames), data_(bins * frames, fill) {}

  std::size_t bins() const noexcept { return bins_; }
  std::size_t frames() const noexcept { return frames_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t k, std::size_t m) { return data_[m * bins_ + k]; }
  const T& operator()(std::size_t k, std::size_t m) const { return data_[m * bins_ + k]; }

  std::span<T> frame(std::size_t m) { return {data_.data() + m * bins_, bins_}; }
  std::span<const T> frame(std::size_t m) const { return {data_.data() + m * bins_, bins_}; }

  std::vector<T>& values() noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  template <typename U>
  bool same_shape(const TfGrid<U>& other) const noexcept {
    return bins_ == other.bins() && frames_ == other.frames();
  }

  friend bool operator==(const TfGrid&, const TfGrid&) = default;

 private:
  std::size_t bins_ = 0;
  std::size_t frames_ = 0;
  std::vector<T> data_;
};

using RealGrid = TfGrid<double>;

template <typename T, typename U>
void require_same_shape(const TfGrid<T>& a, const TfGrid<U>& b, const char* what) {
  if (!a.same_shape(b)) throw ParameterError(std::string(what) + ": shape mismatch");
}

/// Swaps the bin and frame axes.
template <typename T>
TfGrid<T> transpose(const TfGrid<T>& g) {
  TfGrid<T> out(g.frames(), g.bins());
  for (std::size_t m = 0; m < g.frames(); ++m)
    for (std::size_t k = 0; k < g.bins(); ++k) out(m, k) = g(k, m);
  return out;
}

}  // namespace stn
