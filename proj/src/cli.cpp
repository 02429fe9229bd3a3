// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "stn/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "stn/bound_optimizer.hpp"
#include "stn/config.hpp"
#include "stn/decomposer.hpp"
#include "stn/noise_analysis.hpp"
#include "stn/structure_tensor.hpp"
#include "stn/synthetic.hpp"
#include "stn/tsm.hpp"
#include "stn/wav.hpp"

namespace stn {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::vector<std::string> sets;

  std::string input;
  std::optional<std::string> output;
  std::optional<std::string> method;
  std::optional<int> stages;
  std::optional<std::string> format;

  std::optional<double> factor;
  std::optional<std::uint64_t> seed;

  std::vector<std::size_t> windows;
  std::size_t instances = 100;
  double length = 1.0;
  std::size_t bins = 100;
  double rate = 44100.0;

  std::string stage = "1";
  std::uint64_t mixture_seed = 1;
  std::optional<int> population;
  std::optional<int> generations;
  std::string stage1_bounds = "0.8,0.7";
  std::optional<std::string> fragment;

  int dump_stage = 1;
  bool features = false;
  bool curves = false;
};

void check_finite(const Signal& s, const char* what) {
  for (double v : s)
    if (!std::isfinite(v)) throw NumericError(std::string(what) + " contains non-finite samples");
}

RunConfig resolve(const Options& o, KeyValues cli) {
  KeyValues file;
  if (!o.config_path.empty()) file = load_config_file(o.config_path);
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParameterError("--set expects key=value, got '" + s + "'");
    cli[s.substr(0, eq)] = s.substr(eq + 1);
  }
  if (o.method) cli["method"] = *o.method;
  if (o.stages) cli["stages"] = std::to_string(*o.stages);
  if (o.format) cli["output.format"] = *o.format;
  // A method given only in the file still decides the defaults; re-resolve
  // stage counts etc. through the shared resolver.
  return resolve_run_config(file, cli);
}

std::string stem_of(const std::string& path) {
  const fs::path p(path);
  return (p.parent_path() / p.stem()).string();
}

template <typename Fn>
void with_output(const std::optional<std::string>& path, std::ostream& fallback, Fn&& fn) {
  if (!path) {
    fn(fallback);
    return;
  }
  std::ofstream f(*path);
  if (!f) throw IoError("cannot open " + *path + " for writing");
  fn(f);
  if (!f) throw IoError("write failed for " + *path);
}

void write_grid_csv(const fs::path& path, const RealGrid& g) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.precision(9);
  f << "bin";
  for (std::size_t m = 0; m < g.frames(); ++m) f << ",frame_" << m;
  f << "\n";
  for (std::size_t k = 0; k < g.bins(); ++k) {
    f << k;
    for (std::size_t m = 0; m < g.frames(); ++m) f << ',' << g(k, m);
    f << "\n";
  }
  if (!f) throw IoError("write failed for " + path.string());
}

int cmd_decompose(const Options& o, std::ostream& out) {
  RunConfig cfg = resolve(o, {});
  const AudioBuffer in = read_wav(o.input);
  in.validate();
  for (const auto& ch : in.channels) check_finite(ch, "input");
  cfg.set_sample_rate(in.sample_rate);
  cfg.plan.validate();

  const auto parts = decompose_channels(in.channels, cfg.plan);
  AudioBuffer sines{{}, in.sample_rate, cfg.output_format};
  AudioBuffer transients = sines;
  AudioBuffer noise = sines;
  for (const auto& p : parts) {
    check_finite(p.sines, "sines");
    check_finite(p.transients, "transients");
    check_finite(p.noise, "noise");
    sines.channels.push_back(p.sines);
    transients.channels.push_back(p.transients);
    noise.channels.push_back(p.noise);
  }
  const std::string prefix = o.output.value_or(stem_of(o.input));
  write_wav(prefix + "_sines.wav", sines, cfg.output_format);
  write_wav(prefix + "_transients.wav", transients, cfg.output_format);
  write_wav(prefix + "_noise.wav", noise, cfg.output_format);
  out << "wrote " << prefix << "_{sines,transients,noise}.wav (" << to_string(cfg.plan.method)
      << ", " << cfg.plan.stages << " stage" << (cfg.plan.stages == 2 ? "s" : "") << ")\n";
  return kExitOk;
}

int cmd_tsm(const Options& o, std::ostream& out) {
  KeyValues cli;
  if (o.factor) cli["tsm.factor"] = std::to_string(*o.factor);
  if (o.seed) cli["tsm.seed"] = std::to_string(*o.seed);
  RunConfig cfg = resolve(o, cli);
  const AudioBuffer in = read_wav(o.input);
  in.validate();
  for (const auto& ch : in.channels) check_finite(ch, "input");
  cfg.set_sample_rate(in.sample_rate);
  const TsmRequest req = cfg.tsm_request();

  AudioBuffer result{{}, in.sample_rate, cfg.output_format};
  for (const auto& ch : in.channels) {
    Signal y = tsm_stretch(ch, req);
    check_finite(y, "stretched output");
    result.channels.push_back(std::move(y));
  }
  const std::string path = o.output.value_or(stem_of(o.input) + "_tsm.wav");
  write_wav(path, result, cfg.output_format);
  out << "wrote " << path << " (factor " << req.factor << ")\n";
  return kExitOk;
}

int cmd_noise_hist(const Options& o, std::ostream& out) {
  const RunConfig cfg = resolve(o, {});
  const std::vector<std::size_t> windows = o.windows.empty() ? std::vector<std::size_t>{8192} : o.windows;
  const std::uint64_t seed = o.seed.value_or(1);
  with_output(o.output, out, [&](std::ostream& s) {
    s.precision(9);
    s << "window_length,bin_center,normalized_count\n";
    for (std::size_t L : windows) {
      const StftConfig stft_cfg = StftConfig::with_length(L, o.rate);
      const auto h = noise_tonalness_histogram(o.instances, o.length, stft_cfg, cfg.plan.stage1.median,
                                               o.bins, seed);
      const auto centers = h.bin_centers();
      for (std::size_t i = 0; i < centers.size(); ++i)
        s << L << ',' << centers[i] << ',' << h.normalized_counts[i] << "\n";
    }
  });
  return kExitOk;
}

TransitionBounds parse_bounds(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ParameterError("bounds must be given as U,L");
  TransitionBounds b{std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  b.validate();
  return b;
}

void write_history(std::ostream& s, const GaResult& run) {
  s.precision(10);
  s << "generation,best_fitness,beta_u,beta_l\n";
  for (const auto& h : run.history)
    s << h.generation << ',' << h.best_fitness << ',' << h.best.upper << ',' << h.best.lower << "\n";
}

int cmd_optimize(const Options& o, std::ostream& out) {
  KeyValues cli;
  if (o.seed) cli["ga.seed"] = std::to_string(*o.seed);
  if (o.population) cli["ga.population"] = std::to_string(*o.population);
  if (o.generations) cli["ga.generations"] = std::to_string(*o.generations);
  const RunConfig cfg = resolve(o, cli);
  const SyntheticMixture mix = make_synthetic_mixture(o.mixture_seed, o.rate);

  GaResult run;
  TransitionBounds s1 = kStage1Bounds;
  TransitionBounds s2 = kStage2Bounds;
  if (o.stage == "1") {
    const auto set = optimize_stage1(mix, cfg.ga);
    run = set.run;
    s1 = set.stage1;
  } else if (o.stage == "2") {
    s1 = parse_bounds(o.stage1_bounds);
    const auto set = optimize_stage2(mix, s1, cfg.ga);
    run = set.run;
    s2 = set.stage2;
  } else if (o.stage == "all") {
    const auto set = optimize_stage1(mix, cfg.ga);
    run = set.run;
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 5; ++i) seeds.push_back(o.mixture_seed + 1 + i);
    const FinalBounds fin = select_final_bounds(mix, set.stage1_candidates, cfg.ga, seeds);
    s1 = fin.stage1;
    s2 = fin.stage2;
  } else {
    throw ParameterError("--stage must be 1, 2 or all");
  }

  with_output(o.output, out, [&](std::ostream& s) { write_history(s, run); });
  const std::string fragment = bounds_fragment(s1, s2);
  if (o.fragment) {
    with_output(o.fragment, out, [&](std::ostream& s) { s << fragment; });
  } else {
    out << "\n# final bounds\n" << fragment;
  }
  return kExitOk;
}

int cmd_masks_dump(const Options& o, std::ostream& out) {
  const RunConfig cfg = resolve(o, {});
  const DecompositionPlan& plan = cfg.plan;

  if (o.curves) {
    if (plan.method == MaskMethod::StructureTensor)
      throw ParameterError("structure-tensor masks have no tonalness transfer curve");
    const StageParams& params = o.dump_stage == 2 ? plan.stage2 : plan.stage1;
    constexpr std::size_t kPoints = 1001;
    TonalnessMaps maps{RealGrid(1, kPoints), RealGrid(1, kPoints)};
    for (std::size_t i = 0; i < kPoints; ++i) {
      const double rs = static_cast<double>(i) / static_cast<double>(kPoints - 1);
      maps.tonal(0, i) = rs;
      maps.transient(0, i) = 1.0 - rs;
    }
    const MaskSet m = masks_from_tonalness(maps, plan.method, params);
    with_output(o.output, out, [&](std::ostream& s) {
      s.precision(12);
      s << "r_s,S,T,N\n";
      for (std::size_t i = 0; i < kPoints; ++i)
        s << maps.tonal(0, i) << ',' << m.sines(0, i) << ',' << m.transients(0, i) << ','
          << m.noise(0, i) << "\n";
    });
    return kExitOk;
  }

  if (o.input.empty()) throw ParameterError("masks-dump needs an input file unless --curves is given");
  if (o.dump_stage == 2 && plan.stages != 2)
    throw ParameterError("--stage 2 needs a two-stage plan");
  RunConfig local = cfg;
  const AudioBuffer in = read_wav(o.input);
  in.validate();
  for (const auto& ch : in.channels) check_finite(ch, "input");
  local.set_sample_rate(in.sample_rate);
  const Signal& x = in.channels.front();
  const TracedDecomposition traced = decompose_traced(x, local.plan);
  const MaskSet& masks = o.dump_stage == 2 ? *traced.trace.stage2 : traced.trace.stage1;
  const std::string prefix = o.output.value_or(stem_of(o.input) + "_masks");
  write_grid_csv(prefix + "_S.csv", masks.sines);
  write_grid_csv(prefix + "_T.csv", masks.transients);
  write_grid_csv(prefix + "_N.csv", masks.noise);

  if (o.features) {
    if (local.plan.method != MaskMethod::StructureTensor)
      throw ParameterError("--features requires --method st");
    Signal source = x;
    if (o.dump_stage == 2)
      for (std::size_t i = 0; i < source.size(); ++i)
        source[i] = traced.components.transients[i] + traced.components.noise[i];
    const StageParams& params = o.dump_stage == 2 ? local.plan.stage2 : local.plan.stage1;
    const StFeatures f = st_features(stft(source, params.stft), params.st);
    write_grid_csv(prefix + "_alpha.csv", f.alpha);
    write_grid_csv(prefix + "_C.csv", f.anisotropy);
    write_grid_csv(prefix + "_R.csv", f.rate);
  }
  out << "wrote " << prefix << "_*.csv\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Sines/transients/noise decomposition with fuzzy spectral masks", "stnsep"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config_path, "key = value configuration file");
  app.add_option("--set", o.sets, "override one configuration key (key=value)");

  const std::vector<std::string> methods{"hpr", "st", "fz", "prototype", "enhanced"};

  auto* dec = app.add_subcommand("decompose", "split a WAV file into sines, transients and noise");
  dec->add_option("input", o.input, "input WAV")->required();
  dec->add_option("--method", o.method, "mask family")->check(CLI::IsMember(methods));
  dec->add_option("--stages", o.stages, "1 or 2")->check(CLI::Range(1, 2));
  dec->add_option("-o,--output", o.output, "output prefix");
  dec->add_option("--format", o.format, "float32, pcm24 or pcm16");

  auto* tsm = app.add_subcommand("tsm", "time-stretch a WAV file, keeping transients sharp");
  tsm->add_option("input", o.input, "input WAV")->required();
  tsm->add_option("--factor", o.factor, "output duration / input duration")->required();
  tsm->add_option("-o,--output", o.output, "output WAV");
  tsm->add_option("--method", o.method, "mask family")->check(CLI::IsMember(methods));
  tsm->add_option("--seed", o.seed, "phase randomisation seed");
  tsm->add_option("--format", o.format, "float32, pcm24 or pcm16");

  auto* hist = app.add_subcommand("noise-hist", "tonalness histogram of white noise");
  hist->add_option("--window", o.windows, "analysis window length (repeatable)");
  hist->add_option("--instances", o.instances, "noise instances");
  hist->add_option("--length", o.length, "seconds per instance");
  hist->add_option("--bins", o.bins, "histogram bins");
  hist->add_option("--rate", o.rate, "sample rate");
  hist->add_option("--seed", o.seed, "seed of the first instance");
  hist->add_option("-o,--output", o.output, "CSV path (default stdout)");

  auto* opt = app.add_subcommand("optimize-bounds", "GA search for transition bounds");
  opt->add_option("--stage", o.stage, "1, 2 or all")->check(CLI::IsMember({"1", "2", "all"}));
  opt->add_option("--seed", o.seed, "GA seed");
  opt->add_option("--mixture-seed", o.mixture_seed, "synthetic mixture seed");
  opt->add_option("--population", o.population, "GA population");
  opt->add_option("--generations", o.generations, "GA generations");
  opt->add_option("--stage1-bounds", o.stage1_bounds, "frozen stage-1 pair U,L for --stage 2");
  opt->add_option("--rate", o.rate, "sample rate of the synthetic mixture");
  opt->add_option("-o,--output", o.output, "CSV path (default stdout)");
  opt->add_option("--fragment", o.fragment, "write the final bounds config here");

  auto* dump = app.add_subcommand("masks-dump", "export masks (and ST features) as CSV");
  dump->add_option("input", o.input, "input WAV");
  dump->add_option("--method", o.method, "mask family")->check(CLI::IsMember(methods));
  dump->add_option("--stages", o.stages, "1 or 2")->check(CLI::Range(1, 2));
  dump->add_option("--stage", o.dump_stage, "which stage's masks")->check(CLI::Range(1, 2));
  dump->add_flag("--features", o.features, "also write alpha/C/R (method st)");
  dump->add_flag("--curves", o.curves, "mask transfer curves over R_s instead of matrices");
  dump->add_option("-o,--output", o.output, "output prefix (or CSV path with --curves)");

  try {
    std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rev.begin(), rev.end());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*dec) return cmd_decompose(o, out);
    if (*tsm) return cmd_tsm(o, out);
    if (*hist) return cmd_noise_hist(o, out);
    if (*opt) return cmd_optimize(o, out);
    if (*dump) return cmd_masks_dump(o, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace stn
