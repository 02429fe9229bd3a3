// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "stn/masks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace stn {

namespace {

constexpr double kFuzzyClamp = 1e-12;

template <typename PointFn>
MaskSet build(const TonalnessMaps& maps, PointFn&& point) {
  require_same_shape(maps.tonal, maps.transient, "masks");
  const std::size_t K = maps.tonal.bins();
  const std::size_t M = maps.tonal.frames();
  MaskSet out{RealGrid(K, M), RealGrid(K, M), RealGrid(K, M)};
  for (std::size_t i = 0; i < maps.tonal.size(); ++i) {
    const MaskTriple v = point(maps.tonal.values()[i], maps.transient.values()[i]);
    out.sines.values()[i] = v.s;
    out.transients.values()[i] = v.t;
    out.noise.values()[i] = v.n;
  }
  return out;
}

double sin_squared(double x) noexcept {
  const double s = std::sin(x);
  return s * s;
}

}  // namespace

void HprBeta::validate() const {
  if (!(beta > 1.0)) throw ParameterError("separation factor beta must be > 1");
}

void TransitionBounds::validate() const {
  if (!(upper > 0.0 && upper <= 1.0)) throw ParameterError("beta_U must lie in (0, 1]");
  if (!(lower >= 0.0 && lower < 1.0)) throw ParameterError("beta_L must lie in [0, 1)");
  if (!(lower < upper)) throw ParameterError("beta_L must be below beta_U");
  if (lower < 0.5)
    throw ParameterError("beta_L must be >= 0.5 so that the noise mask stays non-negative, got " +
                         std::to_string(lower));
}

double enhanced_transfer(double a, const TransitionBounds& b) noexcept {
  if (a >= b.upper) return 1.0;
  if (a <= b.lower) return 0.0;
  // sin^2(pi/2 u) == (1 + sin(pi/2 v)) / 2 with v in (-1, 1) measured from the
  // centre of the transition, so the midpoint lands on 0.5 without rounding.
  const double centre = 0.5 * (b.lower + b.upper);
  const double half = 0.5 * (b.upper - b.lower);
  const double v = std::clamp((a - centre) / half, -1.0, 1.0);
  return 0.5 * (1.0 + std::sin(0.5 * std::numbers::pi * v));
}

MaskTriple hard_hpr_point(double rs, double rt, double beta) noexcept {
  // Multiplicative form of R_s / R_t > beta; ties go to noise.
  const double s = rs > beta * rt ? 1.0 : 0.0;
  const double t = rt > beta * rs ? 1.0 : 0.0;
  return {s, t, 1.0 - s - t};
}

MaskTriple fuzzy_point(double rs, double rt) noexcept {
  const double rn = 1.0 - std::sqrt(std::abs(rs - rt));
  double s = rs - 0.5 * rn;
  double t = rt - 0.5 * rn;
  // Analytically non-negative; only rounding can push these below zero.
  if (s < 0.0 && s > -kFuzzyClamp) s = 0.0;
  if (t < 0.0 && t > -kFuzzyClamp) t = 0.0;
  return {s, t, 1.0 - s - t};
}

MaskTriple prototype_point(double rs) noexcept {
  const double s = rs >= 0.5 ? sin_squared(std::numbers::pi * (rs + 0.5)) : 0.0;
  const double t = rs <= 0.5 ? sin_squared(std::numbers::pi * (rs - 0.5)) : 0.0;
  return {s, t, 1.0 - s - t};
}

MaskTriple enhanced_point(double rs, double rt, const TransitionBounds& bounds) noexcept {
  const double s = enhanced_transfer(rs, bounds);
  const double t = enhanced_transfer(rt, bounds);
  return {s, t, 1.0 - s - t};
}

MaskSet masks_hard_hpr(const TonalnessMaps& maps, HprBeta beta) {
  beta.validate();
  return build(maps, [b = beta.beta](double rs, double rt) { return hard_hpr_point(rs, rt, b); });
}

MaskSet masks_fuzzy_fz(const TonalnessMaps& maps) {
  return build(maps, [](double rs, double rt) { return fuzzy_point(rs, rt); });
}

MaskSet masks_prototype(const TonalnessMaps& maps) {
  return build(maps, [](double rs, double) { return prototype_point(rs); });
}

MaskSet masks_enhanced(const TonalnessMaps& maps, const TransitionBounds& bounds) {
  bounds.validate();
  return build(maps, [&bounds](double rs, double rt) { return enhanced_point(rs, rt, bounds); });
}

Spectrogram apply_mask(const Spectrogram& spec, const RealGrid& gain) {
  require_same_shape(spec.data, gain, "apply_mask");
  Spectrogram out = spec;
  for (std::size_t i = 0; i < gain.size(); ++i) out.data.values()[i] *= gain.values()[i];
  return out;
}

std::array<Spectrogram, 3> apply_masks(const Spectrogram& spec, const MaskSet& masks) {
  return {apply_mask(spec, masks.sines), apply_mask(spec, masks.transients),
          apply_mask(spec, masks.noise)};
}

}  // namespace stn
