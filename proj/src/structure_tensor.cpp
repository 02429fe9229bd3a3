// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "stn/structure_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace stn {

void StConfig::validate() const {
  if (derivative_scale == 0) throw ParameterError("derivative scale must be >= 1");
  if (!(sigma_time > 0.0) || !(sigma_freq > 0.0))
    throw ParameterError("smoothing sigmas must be positive");
  if (!(anisotropy_threshold >= 0.0 && anisotropy_threshold < 1.0))
    throw ParameterError("anisotropy threshold must lie in [0, 1)");
  if (!(rate_sines > 0.0) || !(rate_sines <= rate_transients))
    throw ParameterError("rate thresholds must satisfy 0 < r_s <= r_t");
  if (!(log_floor > 0.0)) throw ParameterError("log floor must be positive");
}

double frequency_rate_factor(const StftConfig& config) noexcept {
  const double fs = config.sample_rate;
  return fs * fs / (static_cast<double>(config.hop) * static_cast<double>(config.window_length));
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  for (std::ptrdiff_t j = -radius; j <= radius; ++j)
    k[static_cast<std::size_t>(j + radius)] =
        std::exp(-0.5 * static_cast<double>(j * j) / (sigma * sigma));
  return k;
}

// Convolution along one axis; the kernel is renormalised where it overhangs
// the border so constants pass through unchanged.
void smooth_line(const double* in, std::size_t stride, std::size_t count,
                 const std::vector<double>& kernel, double* out, std::vector<double>& line) {
  const auto n = static_cast<std::ptrdiff_t>(count);
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  line.assign(count, 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    double wsum = 0.0;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - radius);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + radius);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      const double w = kernel[static_cast<std::size_t>(j - i + radius)];
      acc += w * in[static_cast<std::size_t>(j) * stride];
      wsum += w;
    }
    line[static_cast<std::size_t>(i)] = acc / wsum;
  }
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i) * stride] = line[static_cast<std::size_t>(i)];
}

void smooth(RealGrid& g, const std::vector<double>& time_kernel,
            const std::vector<double>& freq_kernel) {
  const std::size_t K = g.bins();
  const std::size_t M = g.frames();
  std::vector<double> line;
  double* data = g.values().data();
  for (std::size_t k = 0; k < K; ++k) smooth_line(data + k, K, M, time_kernel, data + k, line);
  for (std::size_t m = 0; m < M; ++m)
    smooth_line(data + m * K, 1, K, freq_kernel, data + m * K, line);
}

}  // namespace

StFeatures structure_tensor_features(const RealGrid& surface, const StConfig& cfg,
                                     double rate_factor) {
  cfg.validate();
  const std::size_t K = surface.bins();
  const std::size_t M = surface.frames();
  if (K < 3 || M < 3)
    throw ParameterError("structure tensor needs at least 3 bins and 3 frames");

  const auto d = static_cast<std::ptrdiff_t>(cfg.derivative_scale);
  const double inv_span = 1.0 / (2.0 * static_cast<double>(d));
  auto clamp_k = [K](std::ptrdiff_t k) {
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(K) - 1));
  };
  auto clamp_m = [M](std::ptrdiff_t m) {
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(m, 0, static_cast<std::ptrdiff_t>(M) - 1));
  };

  RealGrid tt(K, M), tf(K, M), ff(K, M);
  for (std::size_t m = 0; m < M; ++m) {
    const auto mi = static_cast<std::ptrdiff_t>(m);
    for (std::size_t k = 0; k < K; ++k) {
      const auto ki = static_cast<std::ptrdiff_t>(k);
      const double dt = (surface(k, clamp_m(mi + d)) - surface(k, clamp_m(mi - d))) * inv_span;
      const double df = (surface(clamp_k(ki + d), m) - surface(clamp_k(ki - d), m)) * inv_span;
      tt(k, m) = dt * dt;
      tf(k, m) = dt * df;
      ff(k, m) = df * df;
    }
  }

  const auto time_kernel = gaussian_kernel(cfg.sigma_time);
  const auto freq_kernel = gaussian_kernel(cfg.sigma_freq);
  smooth(tt, time_kernel, freq_kernel);
  smooth(tf, time_kernel, freq_kernel);
  smooth(ff, time_kernel, freq_kernel);

  StFeatures feat{RealGrid(K, M), RealGrid(K, M), RealGrid(K, M)};
  constexpr double pi = std::numbers::pi;
  for (std::size_t i = 0; i < tt.size(); ++i) {
    const double a = tt.values()[i];
    const double b = tf.values()[i];
    const double c = ff.values()[i];
    const double trace = a + c;
    const double spread = std::sqrt((a - c) * (a - c) + 4.0 * b * b);  // lambda_big - lambda_small
    feat.anisotropy.values()[i] = trace > 0.0 ? std::min(1.0, (spread / trace) * (spread / trace)) : 0.0;

    // Dominant gradient direction, then rotate a quarter turn to get the
    // direction of least change, i.e. the orientation of the local structure.
    double alpha = 0.5 * std::atan2(2.0 * b, a - c) + 0.5 * pi;
    while (alpha > 0.5 * pi) alpha -= pi;
    while (alpha <= -0.5 * pi) alpha += pi;
    feat.alpha.values()[i] = alpha;
    feat.rate.values()[i] = rate_factor * std::tan(alpha);
  }
  return feat;
}

StFeatures st_features(const Spectrogram& spec, const StConfig& cfg) {
  cfg.validate();
  RealGrid surface(spec.bins(), spec.frames());
  for (std::size_t i = 0; i < surface.size(); ++i)
    surface.values()[i] = 20.0 * std::log10(std::abs(spec.data.values()[i]) + cfg.log_floor);
  return structure_tensor_features(surface, cfg, frequency_rate_factor(spec.config));
}

MaskSet masks_from_structure_tensor(const StFeatures& feat, const StConfig& cfg) {
  cfg.validate();
  require_same_shape(feat.rate, feat.anisotropy, "masks_from_structure_tensor");
  const std::size_t K = feat.rate.bins();
  const std::size_t M = feat.rate.frames();
  MaskSet out{RealGrid(K, M), RealGrid(K, M), RealGrid(K, M)};
  for (std::size_t i = 0; i < feat.rate.size(); ++i) {
    const double r = std::abs(feat.rate.values()[i]);
    const bool coherent = feat.anisotropy.values()[i] > cfg.anisotropy_threshold;
    const bool sine = coherent && r <= cfg.rate_sines;
    const bool transient = coherent && !sine && r >= cfg.rate_transients;
    out.sines.values()[i] = sine ? 1.0 : 0.0;
    out.transients.values()[i] = transient ? 1.0 : 0.0;
    out.noise.values()[i] = (sine || transient) ? 0.0 : 1.0;
  }
  return out;
}

}  // namespace stn
