// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <array>

#include "stn/median.hpp"
#include "stn/stft.hpp"

namespace stn {

/// Sines / transients / noise masks with S + T + N = 1 per bin.
struct MaskSet {
  RealGrid sines;
  RealGrid transients;
  RealGrid noise;
};

/// Separation factor of the hard harmonic/percussive/residual masks.
struct HprBeta {
  double beta = 2.5;
  void validate() const;
};

/// Transition region of the enhanced raised-cosine masks: a membership value
/// maps to 1 at or above `upper`, to 0 below `lower`, and follows a quarter
/// period of sin^2 in between.
struct TransitionBounds {
  double upper = 0.8;
  double lower = 0.7;
  void validate() const;
  friend bool operator==(const TransitionBounds&, const TransitionBounds&) = default;
};

inline constexpr TransitionBounds kStage1Bounds{0.8, 0.7};
inline constexpr TransitionBounds kStage2Bounds{0.85, 0.75};

/// Transfer function of the enhanced masks. Assumes validated bounds.
double enhanced_transfer(double membership, const TransitionBounds& bounds) noexcept;

/// Single-bin mask values as functions of tonalness; these are what the grid
/// versions below apply elementwise (with R_t = 1 - R_s).
struct MaskTriple {
  double s, t, n;
};
MaskTriple hard_hpr_point(double rs, double rt, double beta) noexcept;
MaskTriple fuzzy_point(double rs, double rt) noexcept;
MaskTriple prototype_point(double rs) noexcept;
MaskTriple enhanced_point(double rs, double rt, const TransitionBounds& bounds) noexcept;

MaskSet masks_hard_hpr(const TonalnessMaps& maps, HprBeta beta);
MaskSet masks_fuzzy_fz(const TonalnessMaps& maps);
MaskSet masks_prototype(const TonalnessMaps& maps);
MaskSet masks_enhanced(const TonalnessMaps& maps, const TransitionBounds& bounds);

/// Elementwise S*X, T*X, N*X.
std::array<Spectrogram, 3> apply_masks(const Spectrogram& spec, const MaskSet& masks);

/// Multiplies every bin of `spec` by `gain`.
Spectrogram apply_mask(const Spectrogram& spec, const RealGrid& gain);

}  // namespace stn
