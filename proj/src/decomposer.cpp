// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "stn/decomposer.hpp"

#include <future>
#include <string>

namespace stn {

MaskMethod parse_mask_method(std::string_view name) {
  if (name == "hpr") return MaskMethod::Hpr;
  if (name == "st") return MaskMethod::StructureTensor;
  if (name == "fz") return MaskMethod::Fuzzy;
  if (name == "prototype") return MaskMethod::Prototype;
  if (name == "enhanced") return MaskMethod::Enhanced;
  throw ParameterError("unknown mask method: " + std::string(name));
}

std::string_view to_string(MaskMethod method) {
  switch (method) {
    case MaskMethod::Hpr: return "hpr";
    case MaskMethod::StructureTensor: return "st";
    case MaskMethod::Fuzzy: return "fz";
    case MaskMethod::Prototype: return "prototype";
    case MaskMethod::Enhanced: return "enhanced";
  }
  return "?";
}

namespace {

void validate_stage(const StageParams& p, MaskMethod method) {
  p.stft.validate();
  switch (method) {
    case MaskMethod::Hpr: p.median.validate(); p.hpr.validate(); break;
    case MaskMethod::StructureTensor: p.st.validate(); break;
    case MaskMethod::Enhanced: p.median.validate(); p.bounds.validate(); break;
    case MaskMethod::Fuzzy:
    case MaskMethod::Prototype: p.median.validate(); break;
  }
}

Signal masked_istft(const Spectrogram& spec, const RealGrid& gain) {
  return istft(apply_mask(spec, gain));
}

RealGrid sum(const RealGrid& a, const RealGrid& b) {
  RealGrid out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] += b.values()[i];
  return out;
}

StnComponents single_from_masks(const Spectrogram& spec, const MaskSet& masks) {
  return {masked_istft(spec, masks.sines), masked_istft(spec, masks.transients),
          masked_istft(spec, masks.noise)};
}

}  // namespace

void DecompositionPlan::validate() const {
  if (stages != 1 && stages != 2) throw ParameterError("stages must be 1 or 2");
  validate_stage(stage1, method);
  if (stages == 2) {
    validate_stage(stage2, method);
    if (stage2.stft.window_length >= stage1.stft.window_length)
      throw ParameterError("two-stage plan needs a stage-2 window shorter than stage 1");
    if (stage2.stft.sample_rate != stage1.stft.sample_rate)
      throw ParameterError("both stages must share one sample rate");
  }
}

DecompositionPlan default_plan(MaskMethod method) {
  DecompositionPlan plan;
  plan.method = method;
  switch (method) {
    case MaskMethod::Enhanced:
    case MaskMethod::Hpr:
      plan.stages = 2;
      plan.stage1.stft = StftConfig::with_length(8192);
      plan.stage2.stft = StftConfig::with_length(512);
      break;
    case MaskMethod::Fuzzy:
    case MaskMethod::Prototype:
    case MaskMethod::StructureTensor:
      plan.stages = 1;
      plan.stage1.stft = StftConfig::with_length(4096);
      plan.stage2.stft = StftConfig::with_length(512);
      break;
  }
  plan.stage1.bounds = kStage1Bounds;
  plan.stage2.bounds = kStage2Bounds;
  return plan;
}

MaskSet masks_from_tonalness(const TonalnessMaps& maps, MaskMethod method,
                             const StageParams& params) {
  switch (method) {
    case MaskMethod::Hpr: return masks_hard_hpr(maps, params.hpr);
    case MaskMethod::Fuzzy: return masks_fuzzy_fz(maps);
    case MaskMethod::Prototype: return masks_prototype(maps);
    case MaskMethod::Enhanced: return masks_enhanced(maps, params.bounds);
    case MaskMethod::StructureTensor: break;
  }
  throw ParameterError("structure-tensor masks are not derived from tonalness");
}

MaskSet compute_masks(const Spectrogram& spec, MaskMethod method, const StageParams& params) {
  if (method == MaskMethod::StructureTensor)
    return masks_from_structure_tensor(st_features(spec, params.st), params.st);
  return masks_from_tonalness(tonalness(magnitude(spec.data), params.median), method, params);
}

TracedDecomposition decompose_traced(std::span<const double> signal,
                                     const DecompositionPlan& plan) {
  plan.validate();
  const Spectrogram spec = stft(signal, plan.stage1.stft);
  MaskSet first = compute_masks(spec, plan.method, plan.stage1);

  if (plan.stages == 1) {
    StnComponents c = single_from_masks(spec, first);
    return {std::move(c), {std::move(first), std::nullopt}};
  }

  StnComponents c;
  c.sines = masked_istft(spec, first.sines);
  const Signal residual = masked_istft(spec, sum(first.transients, first.noise));
  const Spectrogram res_spec = stft(residual, plan.stage2.stft);
  MaskSet second = compute_masks(res_spec, plan.method, plan.stage2);
  c.transients = masked_istft(res_spec, second.transients);
  // Sinusoidal residue left by stage 1 is routed to noise.
  c.noise = masked_istft(res_spec, sum(second.sines, second.noise));
  return {std::move(c), {std::move(first), std::move(second)}};
}

StnComponents decompose_single(std::span<const double> signal, const DecompositionPlan& plan) {
  if (plan.stages != 1) throw ParameterError("decompose_single needs a one-stage plan");
  return decompose_traced(signal, plan).components;
}

StnComponents decompose_two_stage(std::span<const double> signal, const DecompositionPlan& plan) {
  if (plan.stages != 2) throw ParameterError("decompose_two_stage needs a two-stage plan");
  return decompose_traced(signal, plan).components;
}

StnComponents decompose(std::span<const double> signal, const DecompositionPlan& plan) {
  return decompose_traced(signal, plan).components;
}

StnComponents route_through(std::span<const double> signal, const DecompositionPlan& plan,
                            const DecompositionTrace& trace) {
  plan.validate();
  const Spectrogram spec = stft(signal, plan.stage1.stft);
  if (plan.stages == 1) return single_from_masks(spec, trace.stage1);
  if (!trace.stage2) throw ParameterError("route_through: trace lacks stage-2 masks");

  StnComponents c;
  c.sines = masked_istft(spec, trace.stage1.sines);
  const Signal residual = masked_istft(spec, sum(trace.stage1.transients, trace.stage1.noise));
  const Spectrogram res_spec = stft(residual, plan.stage2.stft);
  c.transients = masked_istft(res_spec, trace.stage2->transients);
  c.noise = masked_istft(res_spec, sum(trace.stage2->sines, trace.stage2->noise));
  return c;
}

std::vector<StnComponents> decompose_channels(const std::vector<Signal>& channels,
                                              const DecompositionPlan& plan) {
  plan.validate();
  std::vector<std::future<StnComponents>> jobs;
  jobs.reserve(channels.size());
  for (const auto& ch : channels)
    jobs.push_back(std::async(std::launch::async, [&ch, &plan] { return decompose(ch, plan); }));
  std::vector<StnComponents> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace stn
