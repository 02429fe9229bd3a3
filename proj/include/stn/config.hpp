// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "stn/bound_optimizer.hpp"
#include "stn/decomposer.hpp"
#include "stn/tsm.hpp"
#include "stn/wav.hpp"

namespace stn {

/// Flat `key = value` document. Later assignments of a key win.
using KeyValues = std::map<std::string, std::string>;

/// Parses UTF-8 `key = value` lines; `#` starts a comment, blank lines are
/// ignored. Throws ParameterError naming the offending line.
KeyValues parse_config_text(std::string_view text);
KeyValues load_config_file(const std::filesystem::path& path);

struct TsmSettings {
  double factor = 1.0;
  std::size_t window_length = 2048;
  std::size_t hop = 512;
  std::uint64_t seed = 1;
  double fade_ms = 5.0;
  TransientDetectParams detect;
};

/// Every tunable of the tool. Defaults follow default_plan() for the method.
struct RunConfig {
  DecompositionPlan plan = default_plan(MaskMethod::Enhanced);
  GaConfig ga;
  TsmSettings tsm;
  SampleFormat output_format = SampleFormat::Float32;

  /// Sets the rate on every STFT configuration.
  void set_sample_rate(double fs);
  TsmRequest tsm_request() const;
};

/// Applies `file` then `cli` on top of the defaults (a CLI value beats the
/// file, the file beats the default) and validates the result. Unknown keys
/// and malformed values throw ParameterError.
RunConfig resolve_run_config(const KeyValues& file, const KeyValues& cli);

/// Key names accepted by resolve_run_config().
const std::vector<std::string>& known_config_keys();

/// `stage1.beta_u = ...` lines describing a bound pair per stage.
std::string bounds_fragment(const TransitionBounds& stage1, const TransitionBounds& stage2);

}  // namespace stn
