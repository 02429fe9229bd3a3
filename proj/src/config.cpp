// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "stn/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace stn {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ParameterError("config key '" + key + "': expected a number, got '" + v + "'");
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ParameterError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <typename F>
Setter num(F f) {
  return [f](RunConfig& c, const std::string& k, const std::string& v) { f(c, to_double(k, v)); };
}

template <typename F>
Setter integer(F f) {
  return [f](RunConfig& c, const std::string& k, const std::string& v) { f(c, to_uint(k, v)); };
}

void add_stage_keys(std::map<std::string, Setter>& t, const std::string& prefix,
                    StageParams DecompositionPlan::*stage) {
  auto st = [stage](RunConfig& c) -> StageParams& { return c.plan.*stage; };
  t[prefix + "window"] = integer([st](RunConfig& c, std::uint64_t v) { st(c).stft.window_length = v; });
  t[prefix + "hop"] = integer([st](RunConfig& c, std::uint64_t v) { st(c).stft.hop = v; });
  t[prefix + "window_kind"] = [st](RunConfig& c, const std::string&, const std::string& v) {
    st(c).stft.window = parse_window_kind(v);
  };
  t[prefix + "median_h"] = integer([st](RunConfig& c, std::uint64_t v) { st(c).median.horizontal_length = v; });
  t[prefix + "median_v"] = integer([st](RunConfig& c, std::uint64_t v) { st(c).median.vertical_length = v; });
  t[prefix + "beta_u"] = num([st](RunConfig& c, double v) { st(c).bounds.upper = v; });
  t[prefix + "beta_l"] = num([st](RunConfig& c, double v) { st(c).bounds.lower = v; });
  t[prefix + "hpr_beta"] = num([st](RunConfig& c, double v) { st(c).hpr.beta = v; });
  t[prefix + "st.derivative_scale"] = integer([st](RunConfig& c, std::uint64_t v) { st(c).st.derivative_scale = v; });
  t[prefix + "st.sigma_time"] = num([st](RunConfig& c, double v) { st(c).st.sigma_time = v; });
  t[prefix + "st.sigma_freq"] = num([st](RunConfig& c, double v) { st(c).st.sigma_freq = v; });
  t[prefix + "st.anisotropy"] = num([st](RunConfig& c, double v) { st(c).st.anisotropy_threshold = v; });
  t[prefix + "st.rate_sines"] = num([st](RunConfig& c, double v) { st(c).st.rate_sines = v; });
  t[prefix + "st.rate_transients"] = num([st](RunConfig& c, double v) { st(c).st.rate_transients = v; });
  t[prefix + "st.log_floor"] = num([st](RunConfig& c, double v) { st(c).st.log_floor = v; });
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    // method and stages are applied first (see resolve_run_config)
    t["method"] = [](RunConfig&, const std::string&, const std::string&) {};
    t["stages"] = integer([](RunConfig& c, std::uint64_t v) { c.plan.stages = static_cast<int>(v); });
    add_stage_keys(t, "stage1.", &DecompositionPlan::stage1);
    add_stage_keys(t, "stage2.", &DecompositionPlan::stage2);

    t["ga.population"] = integer([](RunConfig& c, std::uint64_t v) { c.ga.population = static_cast<int>(v); });
    t["ga.generations"] = integer([](RunConfig& c, std::uint64_t v) { c.ga.generations = static_cast<int>(v); });
    t["ga.mutation_rate"] = num([](RunConfig& c, double v) { c.ga.mutation_rate = v; });
    t["ga.crossover_rate"] = num([](RunConfig& c, double v) { c.ga.crossover_rate = v; });
    t["ga.mutation_sigma"] = num([](RunConfig& c, double v) { c.ga.mutation_sigma = v; });
    t["ga.tournament"] = integer([](RunConfig& c, std::uint64_t v) { c.ga.tournament_size = static_cast<int>(v); });
    t["ga.elitism"] = integer([](RunConfig& c, std::uint64_t v) { c.ga.elitism = static_cast<int>(v); });
    t["ga.seed"] = integer([](RunConfig& c, std::uint64_t v) { c.ga.seed = v; });
    t["ga.threads"] = integer([](RunConfig& c, std::uint64_t v) { c.ga.threads = static_cast<int>(v); });
    t["ga.upper_min"] = num([](RunConfig& c, double v) { c.ga.box.upper_min = v; });
    t["ga.upper_max"] = num([](RunConfig& c, double v) { c.ga.box.upper_max = v; });
    t["ga.lower_min"] = num([](RunConfig& c, double v) { c.ga.box.lower_min = v; });
    t["ga.lower_max"] = num([](RunConfig& c, double v) { c.ga.box.lower_max = v; });

    t["tsm.factor"] = num([](RunConfig& c, double v) { c.tsm.factor = v; });
    t["tsm.window"] = integer([](RunConfig& c, std::uint64_t v) { c.tsm.window_length = v; });
    t["tsm.hop"] = integer([](RunConfig& c, std::uint64_t v) { c.tsm.hop = v; });
    t["tsm.seed"] = integer([](RunConfig& c, std::uint64_t v) { c.tsm.seed = v; });
    t["tsm.fade_ms"] = num([](RunConfig& c, double v) { c.tsm.fade_ms = v; });
    t["tsm.threshold_db"] = num([](RunConfig& c, double v) { c.tsm.detect.threshold_db = v; });
    t["tsm.range_db"] = num([](RunConfig& c, double v) { c.tsm.detect.range_db = v; });
    t["tsm.min_separation_ms"] = num([](RunConfig& c, double v) { c.tsm.detect.min_separation_ms = v; });
    t["tsm.pre_pad_ms"] = num([](RunConfig& c, double v) { c.tsm.detect.pre_pad_ms = v; });
    t["tsm.post_pad_ms"] = num([](RunConfig& c, double v) { c.tsm.detect.post_pad_ms = v; });

    t["output.format"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.output_format = parse_sample_format(v);
    };
    return t;
  }();
  return table;
}

}  // namespace

KeyValues parse_config_text(std::string_view text) {
  KeyValues kv;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ParameterError("config line " + std::to_string(number) + ": expected key = value");
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty())
      throw ParameterError("config line " + std::to_string(number) + ": empty key");
    kv[std::move(key)] = std::move(value);
  }
  return kv;
}

KeyValues load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void RunConfig::set_sample_rate(double fs) {
  plan.stage1.stft.sample_rate = fs;
  plan.stage2.stft.sample_rate = fs;
}

TsmRequest RunConfig::tsm_request() const {
  TsmRequest r;
  r.factor = tsm.factor;
  r.plan = plan;
  r.pv_stft.window_length = tsm.window_length;
  r.pv_stft.hop = tsm.hop;
  r.pv_stft.sample_rate = plan.stage1.stft.sample_rate;
  r.detect = tsm.detect;
  r.fade_ms = tsm.fade_ms;
  r.seed = tsm.seed;
  return r;
}

RunConfig resolve_run_config(const KeyValues& file, const KeyValues& cli) {
  KeyValues merged = file;
  for (const auto& [k, v] : cli) merged[k] = v;

  for (const auto& [k, v] : merged)
    if (!setters().count(k)) throw ParameterError("unknown config key '" + k + "'");

  RunConfig cfg;
  if (const auto it = merged.find("method"); it != merged.end())
    cfg.plan = default_plan(parse_mask_method(it->second));
  for (const auto& [k, v] : merged) setters().at(k)(cfg, k, v);

  cfg.plan.validate();
  cfg.ga.validate();
  if (!(cfg.tsm.factor > 0.0)) throw ParameterError("tsm.factor must be positive");
  StftConfig pv;
  pv.window_length = cfg.tsm.window_length;
  pv.hop = cfg.tsm.hop;
  pv.validate();
  return cfg;
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, setter] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

std::string bounds_fragment(const TransitionBounds& s1, const TransitionBounds& s2) {
  std::ostringstream o;
  o.precision(6);
  o << "method = enhanced\n"
    << "stages = 2\n"
    << "stage1.beta_u = " << s1.upper << "\n"
    << "stage1.beta_l = " << s1.lower << "\n"
    << "stage2.beta_u = " << s2.upper << "\n"
    << "stage2.beta_l = " << s2.lower << "\n";
  return o.str();
}

}  // namespace stn
