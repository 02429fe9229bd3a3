// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "stn/masks.hpp"
#include "stn/median.hpp"
#include "stn/stft.hpp"
#include "stn/structure_tensor.hpp"

namespace stn {

enum class MaskMethod { Hpr, StructureTensor, Fuzzy, Prototype, Enhanced };

MaskMethod parse_mask_method(std::string_view name);
std::string_view to_string(MaskMethod method);

/// Everything one analysis stage needs. Only the parameter block belonging to
/// the plan's method is consulted.
struct StageParams {
  StftConfig stft;
  MedianConfig median;
  HprBeta hpr;
  StConfig st;
  TransitionBounds bounds = kStage1Bounds;
};

struct DecompositionPlan {
  MaskMethod method = MaskMethod::Enhanced;
  int stages = 2;
  StageParams stage1;
  StageParams stage2;

  /// Throws ParameterError on invalid stage count, invalid per-stage
  /// parameters, or a stage-2 window that is not shorter than stage 1.
  void validate() const;
};

DecompositionPlan default_plan(MaskMethod method);

struct StnComponents {
  Signal sines;
  Signal transients;
  Signal noise;
};

/// Masks used by a decomposition run, kept so other signals can be routed
/// through the identical (then linear) filtering.
struct DecompositionTrace {
  MaskSet stage1;
  std::optional<MaskSet> stage2;
};

struct TracedDecomposition {
  StnComponents components;
  DecompositionTrace trace;
};

MaskSet compute_masks(const Spectrogram& spec, MaskMethod method, const StageParams& params);
MaskSet masks_from_tonalness(const TonalnessMaps& maps, MaskMethod method,
                             const StageParams& params);

StnComponents decompose_single(std::span<const double> signal, const DecompositionPlan& plan);
StnComponents decompose_two_stage(std::span<const double> signal, const DecompositionPlan& plan);

/// Dispatches on plan.stages.
StnComponents decompose(std::span<const double> signal, const DecompositionPlan& plan);
TracedDecomposition decompose_traced(std::span<const double> signal,
                                     const DecompositionPlan& plan);

/// Applies the masks recorded in `trace` to `signal` without recomputing them.
/// The result is linear in `signal`; routing each ground-truth source of a
/// mixture shows where that source ended up.
StnComponents route_through(std::span<const double> signal, const DecompositionPlan& plan,
                            const DecompositionTrace& trace);

/// Decomposes each channel independently with a shared plan.
std::vector<StnComponents> decompose_channels(const std::vector<Signal>& channels,
                                              const DecompositionPlan& plan);

}  // namespace stn
