// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stn/decomposer.hpp"

namespace stn {

/// sqrt(e) * 2 pi fc t * exp(-2 (pi fc t)^2); unit peak at t = 1 / (2 pi fc).
double gaussian_monopulse_value(double t, double center_frequency) noexcept;

/// Samples the monopulse on an odd number of points centred on t = 0,
/// spanning [-duration/2, duration/2]. Requires 0 < fc < fs/2.
Signal gaussian_monopulse(double center_frequency, double sample_rate, double duration);

/// Test mixture whose three parts each belong (almost) entirely to one class.
struct SyntheticMixture {
  Signal sines;
  Signal transients;
  Signal noise;
  Signal mixture;
  double sample_rate = 44100.0;
  std::vector<std::size_t> pulse_positions;  ///< sample index of each monopulse centre
};

struct MixtureRecipe {
  double duration = 4.0;                 ///< seconds
  int sine_count = 5;
  double sine_min_hz = 200.0;
  double sine_max_hz = 4000.0;
  int pulse_count = 8;
  double pulse_center_hz = 4000.0;
  double pulse_min_spacing = 0.1;        ///< seconds
  double component_rms = 0.1;
  double peak_limit = 0.9;               ///< whole mixture rescaled if it would exceed this
};

/// Sum of sinusoids, monopulse train and white noise at equal RMS, built
/// deterministically from `seed`. mixture == sines + transients + noise exactly.
SyntheticMixture make_synthetic_mixture(std::uint64_t seed, double sample_rate,
                                        const MixtureRecipe& recipe = {});

enum class StnClass { Sines, Transients, Noise };

/// ||estimate - truth|| / ||truth||; throws ParameterError for a silent truth.
double relative_error(std::span<const double> estimate, std::span<const double> truth);

double decomposition_error(const StnComponents& components, const SyntheticMixture& truth,
                           StnClass which);

}  // namespace stn
