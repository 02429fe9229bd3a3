// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>

#include "stn/error.hpp"

namespace stn::detail {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2 || n % 2 != 0) throw ParameterError("FFT length must be even and >= 2");
  std::lock_guard<std::mutex> lock(planner_mutex());
  real_ = fftw_alloc_real(n_);
  spec_ = fftw_alloc_complex(bins());
  fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_, spec_, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), spec_, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(inv_);
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(fwd_);
  std::memcpy(static_cast<void*>(out.data()), spec_, bins() * sizeof(fftw_complex));
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  std::memcpy(spec_, static_cast<const void*>(in.data()), bins() * sizeof(fftw_complex));
  // The DC and Nyquist imaginary parts are ignored by c2r; zero them so the
  // result is the Hermitian extension of the real part there.
  spec_[0][1] = 0.0;
  spec_[bins() - 1][1] = 0.0;
  fftw_execute(inv_);
  std::copy(real_, real_ + n_, out.begin());
}

}  // namespace stn::detail
