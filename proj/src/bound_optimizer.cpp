// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "stn/bound_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <thread>
#include <utility>

namespace stn {

void SearchBox::validate() const {
  if (!(lower_min >= 0.5)) throw ParameterError("search box: beta_L must stay >= 0.5");
  if (!(upper_max <= 1.0)) throw ParameterError("search box: beta_U must stay <= 1");
  if (!(upper_min <= upper_max) || !(lower_min <= lower_max))
    throw ParameterError("search box: empty interval");
  if (!(lower_min < upper_max))
    throw ParameterError("search box admits no pair with beta_L < beta_U");
}

void GaConfig::validate() const {
  if (population < 4) throw ParameterError("GA population must be >= 4");
  if (generations < 0) throw ParameterError("GA generations must be >= 0");
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(mutation_rate) || !prob(crossover_rate))
    throw ParameterError("GA rates must lie in [0, 1]");
  if (!(mutation_sigma >= 0.0)) throw ParameterError("GA mutation sigma must be >= 0");
  if (tournament_size < 1) throw ParameterError("GA tournament size must be >= 1");
  if (elitism < 0 || elitism >= population) throw ParameterError("GA elitism out of range");
  box.validate();
}

TransitionBounds repair(TransitionBounds b, const SearchBox& box) {
  constexpr double kGap = 1e-3;
  b.upper = std::clamp(b.upper, box.upper_min, box.upper_max);
  b.lower = std::clamp(b.lower, box.lower_min, box.lower_max);
  if (b.lower > b.upper) {
    // Swapping keeps both genes informative when both sides of the box allow it.
    const TransitionBounds swapped{std::clamp(b.lower, box.upper_min, box.upper_max),
                                   std::clamp(b.upper, box.lower_min, box.lower_max)};
    b = swapped;
  }
  if (b.lower >= b.upper) {
    if (b.upper + kGap <= box.upper_max)
      b.upper += kGap;
    else if (b.lower - kGap >= box.lower_min)
      b.lower -= kGap;
  }
  if (b.lower >= b.upper) {
    b.lower = box.lower_min;
    b.upper = box.upper_max;
  }
  return b;
}

namespace {

using Key = std::pair<double, double>;

void evaluate_parallel(const BoundsFitness& fitness, const std::vector<TransitionBounds>& todo,
                       std::vector<double>& out, int threads) {
  out.assign(todo.size(), 0.0);
  unsigned n = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
  n = std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(todo.size())));
  if (n <= 1) {
    for (std::size_t i = 0; i < todo.size(); ++i) out[i] = fitness(todo[i]);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < todo.size(); i += n) out[i] = fitness(todo[i]);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

GaResult run_ga(const BoundsFitness& fitness, const GaConfig& ga) {
  ga.validate();
  std::mt19937_64 rng(ga.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, ga.mutation_sigma);
  const SearchBox& box = ga.box;

  std::map<Key, double> cache;
  auto score_all = [&](const std::vector<TransitionBounds>& pop) {
    std::vector<TransitionBounds> todo;
    for (const auto& b : pop)
      if (!cache.count({b.upper, b.lower}) &&
          std::none_of(todo.begin(), todo.end(), [&](const auto& o) { return o == b; }))
        todo.push_back(b);
    std::vector<double> values;
    evaluate_parallel(fitness, todo, values, ga.threads);
    for (std::size_t i = 0; i < todo.size(); ++i) {
      if (!std::isfinite(values[i])) throw NumericError("GA fitness is not finite");
      cache[{todo[i].upper, todo[i].lower}] = values[i];
    }
    std::vector<ScoredBounds> scored;
    for (const auto& b : pop) scored.push_back({b, cache.at({b.upper, b.lower})});
    // Stable order on ties keeps the run reproducible.
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.fitness < b.fitness; });
    return scored;
  };

  std::vector<TransitionBounds> pop;
  for (int i = 0; i < ga.population; ++i) {
    const double u = box.upper_min + unit(rng) * (box.upper_max - box.upper_min);
    const double l = box.lower_min + unit(rng) * (box.lower_max - box.lower_min);
    pop.push_back(repair({u, l}, box));
  }

  GaResult result;
  auto scored = score_all(pop);
  result.history.push_back({0, scored.front().fitness, scored.front().bounds});

  auto tournament = [&]() -> const TransitionBounds& {
    std::uniform_int_distribution<std::size_t> pick(0, scored.size() - 1);
    std::size_t best = pick(rng);
    for (int i = 1; i < ga.tournament_size; ++i) best = std::min(best, pick(rng));
    return scored[best].bounds;  // scored is sorted, so lower index = fitter
  };
  auto mutate = [&](TransitionBounds b) {
    if (unit(rng) < ga.mutation_rate) b.upper += jitter(rng);
    if (unit(rng) < ga.mutation_rate) b.lower += jitter(rng);
    return repair(b, box);
  };

  for (int g = 1; g <= ga.generations; ++g) {
    std::vector<TransitionBounds> next;
    for (int e = 0; e < ga.elitism; ++e) next.push_back(scored[static_cast<std::size_t>(e)].bounds);
    while (next.size() < static_cast<std::size_t>(ga.population)) {
      TransitionBounds a = tournament();
      TransitionBounds b = tournament();
      if (unit(rng) < ga.crossover_rate) std::swap(a.lower, b.lower);  // one cut between the genes
      next.push_back(mutate(a));
      if (next.size() < static_cast<std::size_t>(ga.population)) next.push_back(mutate(b));
    }
    pop = std::move(next);
    scored = score_all(pop);
    result.history.push_back({g, scored.front().fitness, scored.front().bounds});
  }

  for (const auto& [key, value] : cache) result.evaluated.push_back({{key.first, key.second}, value});
  std::stable_sort(result.evaluated.begin(), result.evaluated.end(),
                   [](const auto& a, const auto& b) { return a.fitness < b.fitness; });
  result.best = result.evaluated.front();
  return result;
}

DecompositionPlan optimizer_plan(double sample_rate) {
  DecompositionPlan plan = default_plan(MaskMethod::Enhanced);
  plan.stage1.stft.sample_rate = sample_rate;
  plan.stage2.stft.sample_rate = sample_rate;
  return plan;
}

Stage1Objective::Stage1Objective(const SyntheticMixture& mix, const DecompositionPlan& plan)
    : mix_(mix),
      spec_(stft(mix.mixture, plan.stage1.stft)),
      maps_(tonalness(magnitude(spec_.data), plan.stage1.median)) {}

double Stage1Objective::operator()(const TransitionBounds& b) const {
  const MaskSet masks = masks_enhanced(maps_, b);
  return relative_error(istft(apply_mask(spec_, masks.sines)), mix_.sines);
}

Stage2Objective::Stage2Objective(const SyntheticMixture& mix, const DecompositionPlan& plan,
                                 const TransitionBounds& stage1)
    : mix_(mix) {
  const Spectrogram spec = stft(mix.mixture, plan.stage1.stft);
  const MaskSet first = masks_enhanced(tonalness(magnitude(spec.data), plan.stage1.median), stage1);
  RealGrid keep = first.transients;
  for (std::size_t i = 0; i < keep.size(); ++i) keep.values()[i] += first.noise.values()[i];
  const Signal residual = istft(apply_mask(spec, keep));
  residual_spec_ = stft(residual, plan.stage2.stft);
  maps_ = tonalness(magnitude(residual_spec_.data), plan.stage2.median);
}

double Stage2Objective::operator()(const TransitionBounds& b) const {
  const MaskSet masks = masks_enhanced(maps_, b);
  return relative_error(istft(apply_mask(residual_spec_, masks.transients)), mix_.transients);
}

namespace {

constexpr double kCandidateMargin = 1.05;

std::vector<ScoredBounds> near_best(const GaResult& run) {
  std::vector<ScoredBounds> out;
  for (const auto& s : run.evaluated)
    if (s.fitness <= kCandidateMargin * run.best.fitness) out.push_back(s);
  return out;
}

}  // namespace

BoundCandidateSet optimize_stage1(const SyntheticMixture& mix, const GaConfig& ga) {
  const Stage1Objective objective(mix, optimizer_plan(mix.sample_rate));
  BoundCandidateSet set;
  set.run = run_ga([&](const TransitionBounds& b) { return objective(b); }, ga);
  set.stage1_candidates = near_best(set.run);
  set.stage1 = set.run.best.bounds;
  set.stage2 = kStage2Bounds;
  return set;
}

BoundCandidateSet optimize_stage2(const SyntheticMixture& mix, const TransitionBounds& stage1,
                                  const GaConfig& ga) {
  stage1.validate();
  const Stage2Objective objective(mix, optimizer_plan(mix.sample_rate), stage1);
  BoundCandidateSet set;
  set.run = run_ga([&](const TransitionBounds& b) { return objective(b); }, ga);
  set.stage1_candidates = {{stage1, 0.0}};
  set.stage1 = stage1;
  set.stage2 = set.run.best.bounds;
  return set;
}

double summed_class_error(const SyntheticMixture& mix, const TransitionBounds& stage1,
                          const TransitionBounds& stage2) {
  DecompositionPlan plan = optimizer_plan(mix.sample_rate);
  plan.stage1.bounds = stage1;
  plan.stage2.bounds = stage2;
  const StnComponents c = decompose(mix.mixture, plan);
  return decomposition_error(c, mix, StnClass::Sines) +
         decomposition_error(c, mix, StnClass::Transients) +
         decomposition_error(c, mix, StnClass::Noise);
}

FinalBounds select_final_bounds(const SyntheticMixture& mix,
                                const std::vector<ScoredBounds>& stage1_candidates,
                                const GaConfig& ga, const std::vector<std::uint64_t>& seeds,
                                std::size_t max_candidates) {
  if (stage1_candidates.empty()) throw ParameterError("no stage-1 candidates to choose from");
  if (seeds.empty()) throw ParameterError("need at least one evaluation seed");

  std::vector<SyntheticMixture> held_out;
  for (auto s : seeds) held_out.push_back(make_synthetic_mixture(s, mix.sample_rate));

  FinalBounds best;
  best.mean_summed_error = std::numeric_limits<double>::infinity();
  const std::size_t n = std::min(max_candidates, stage1_candidates.size());
  for (std::size_t i = 0; i < n; ++i) {
    const TransitionBounds s1 = stage1_candidates[i].bounds;
    const TransitionBounds s2 = optimize_stage2(mix, s1, ga).stage2;
    double total = 0.0;
    for (const auto& m : held_out) total += summed_class_error(m, s1, s2);
    const double mean = total / static_cast<double>(held_out.size());
    if (mean < best.mean_summed_error) best = {s1, s2, mean};
  }
  return best;
}

}  // namespace stn
