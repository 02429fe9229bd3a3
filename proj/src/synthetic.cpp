// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "stn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace stn {

double gaussian_monopulse_value(double t, double fc) noexcept {
  constexpr double pi = std::numbers::pi;
  const double x = pi * fc * t;
  return std::sqrt(std::numbers::e) * 2.0 * x * std::exp(-2.0 * x * x);
}

Signal gaussian_monopulse(double fc, double fs, double duration) {
  if (!(fs > 0.0)) throw ParameterError("sample rate must be positive");
  if (!(fc > 0.0 && fc < 0.5 * fs))
    throw ParameterError("monopulse centre frequency must lie in (0, fs/2)");
  if (!(duration > 0.0)) throw ParameterError("monopulse duration must be positive");
  const auto half = static_cast<std::ptrdiff_t>(std::floor(0.5 * duration * fs));
  Signal out(static_cast<std::size_t>(2 * half + 1));
  for (std::ptrdiff_t n = -half; n <= half; ++n)
    out[static_cast<std::size_t>(n + half)] =
        gaussian_monopulse_value(static_cast<double>(n) / fs, fc);
  return out;
}

namespace {

double rms(const Signal& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return std::sqrt(e / static_cast<double>(x.size()));
}

void scale(Signal& x, double g) {
  for (double& v : x) v *= g;
}

}  // namespace

SyntheticMixture make_synthetic_mixture(std::uint64_t seed, double fs, const MixtureRecipe& r) {
  if (!(fs > 0.0)) throw ParameterError("sample rate must be positive");
  const auto n = static_cast<std::size_t>(std::llround(r.duration * fs));
  std::mt19937_64 rng(seed);
  constexpr double two_pi = 2.0 * std::numbers::pi;

  SyntheticMixture mix;
  mix.sample_rate = fs;
  mix.sines.assign(n, 0.0);
  mix.transients.assign(n, 0.0);
  mix.noise.assign(n, 0.0);

  std::uniform_real_distribution<double> freq(r.sine_min_hz, r.sine_max_hz);
  std::uniform_real_distribution<double> phase(0.0, two_pi);
  for (int i = 0; i < r.sine_count; ++i) {
    const double f = freq(rng);
    const double p = phase(rng);
    for (std::size_t t = 0; t < n; ++t)
      mix.sines[t] += std::sin(two_pi * f * static_cast<double>(t) / fs + p);
  }

  // Pulse centres: rejection sampling keeps them min_spacing apart and clear
  // of the signal edges.
  const auto spacing = static_cast<std::size_t>(r.pulse_min_spacing * fs);
  std::uniform_int_distribution<std::size_t> where(spacing, n - spacing - 1);
  for (int tries = 0; mix.pulse_positions.size() < static_cast<std::size_t>(r.pulse_count);
       ++tries) {
    if (tries > 100000) throw ParameterError("mixture too short for the requested pulse train");
    const std::size_t c = where(rng);
    const bool clear = std::all_of(mix.pulse_positions.begin(), mix.pulse_positions.end(),
                                   [&](std::size_t p) { return (c > p ? c - p : p - c) >= spacing; });
    if (clear) mix.pulse_positions.push_back(c);
  }
  std::sort(mix.pulse_positions.begin(), mix.pulse_positions.end());
  const Signal pulse = gaussian_monopulse(r.pulse_center_hz, fs, 0.002);
  const std::size_t half = pulse.size() / 2;
  for (std::size_t c : mix.pulse_positions)
    for (std::size_t j = 0; j < pulse.size(); ++j) mix.transients[c - half + j] += pulse[j];

  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : mix.noise) v = gauss(rng);

  scale(mix.sines, r.component_rms / rms(mix.sines));
  scale(mix.transients, r.component_rms / rms(mix.transients));
  scale(mix.noise, r.component_rms / rms(mix.noise));

  mix.mixture.resize(n);
  for (std::size_t t = 0; t < n; ++t)
    mix.mixture[t] = mix.sines[t] + mix.transients[t] + mix.noise[t];

  double peak = 0.0;
  for (double v : mix.mixture) peak = std::max(peak, std::abs(v));
  if (peak > r.peak_limit) {
    const double g = r.peak_limit / peak;
    scale(mix.sines, g);
    scale(mix.transients, g);
    scale(mix.noise, g);
    for (std::size_t t = 0; t < n; ++t)
      mix.mixture[t] = mix.sines[t] + mix.transients[t] + mix.noise[t];
  }
  return mix;
}

double relative_error(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size()) throw ParameterError("relative_error: length mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = estimate[i] - truth[i];
    num += d * d;
    den += truth[i] * truth[i];
  }
  if (den == 0.0) throw ParameterError("relative_error: reference has zero energy");
  return std::sqrt(num / den);
}

double decomposition_error(const StnComponents& c, const SyntheticMixture& truth, StnClass which) {
  switch (which) {
    case StnClass::Sines: return relative_error(c.sines, truth.sines);
    case StnClass::Transients: return relative_error(c.transients, truth.transients);
    case StnClass::Noise: return relative_error(c.noise, truth.noise);
  }
  return 0.0;
}

}  // namespace stn
