// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "stn/decomposer.hpp"
#include "stn/synthetic.hpp"

namespace stn {

/// Axis-aligned search region for (beta_U, beta_L).
struct SearchBox {
  double upper_min = 0.55;
  double upper_max = 1.0;
  double lower_min = 0.5;
  double lower_max = 0.95;

  void validate() const;
  static SearchBox point(const TransitionBounds& b) {
    return {b.upper, b.upper, b.lower, b.lower};
  }
};

struct GaConfig {
  int population = 50;
  int generations = 100;
  double mutation_rate = 0.3;    ///< per-gene probability
  double crossover_rate = 0.8;
  double mutation_sigma = 0.02;
  int tournament_size = 3;
  int elitism = 2;
  std::uint64_t seed = 1;
  SearchBox box;
  int threads = 0;               ///< 0 = hardware concurrency

  void validate() const;
};

struct ScoredBounds {
  TransitionBounds bounds;
  double fitness = 0.0;
};

struct GenerationRecord {
  int generation = 0;
  double best_fitness = 0.0;
  TransitionBounds best;
};

struct GaResult {
  std::vector<GenerationRecord> history;
  std::vector<ScoredBounds> evaluated;  ///< every distinct candidate, by fitness
  ScoredBounds best;
};

/// Clamps into the box and restores beta_L < beta_U.
TransitionBounds repair(TransitionBounds b, const SearchBox& box);

using BoundsFitness = std::function<double(const TransitionBounds&)>;

/// Real-coded elitist GA minimising `fitness`. Fitness must be thread-safe;
/// evaluations run in parallel but results depend only on the seed.
GaResult run_ga(const BoundsFitness& fitness, const GaConfig& ga);

/// Relative sines error of stage 1 alone (x_s = ISTFT[S1 X]) as a function of
/// the stage-1 bounds. Spectrogram and tonalness are computed once.
class Stage1Objective {
 public:
  Stage1Objective(const SyntheticMixture& mix, const DecompositionPlan& plan);
  double operator()(const TransitionBounds& b) const;

 private:
  const SyntheticMixture& mix_;
  Spectrogram spec_;
  TonalnessMaps maps_;
};

/// Relative transients error of the two-stage pipeline with stage 1 frozen.
class Stage2Objective {
 public:
  Stage2Objective(const SyntheticMixture& mix, const DecompositionPlan& plan,
                  const TransitionBounds& stage1);
  double operator()(const TransitionBounds& b) const;

 private:
  const SyntheticMixture& mix_;
  Spectrogram residual_spec_;
  TonalnessMaps maps_;
};

struct BoundCandidateSet {
  std::vector<ScoredBounds> stage1_candidates;  ///< B1: within 5% of the best
  TransitionBounds stage1;                      ///< final pair per stage
  TransitionBounds stage2;
  GaResult run;                                 ///< the GA run that produced this set
};

/// Plan used by the optimiser: enhanced two-stage defaults at the mixture rate.
DecompositionPlan optimizer_plan(double sample_rate);

BoundCandidateSet optimize_stage1(const SyntheticMixture& mix, const GaConfig& ga);
BoundCandidateSet optimize_stage2(const SyntheticMixture& mix, const TransitionBounds& stage1,
                                  const GaConfig& ga);

/// Sum of the three per-class errors of a full two-stage run.
double summed_class_error(const SyntheticMixture& mix, const TransitionBounds& stage1,
                          const TransitionBounds& stage2);

struct FinalBounds {
  TransitionBounds stage1;
  TransitionBounds stage2;
  double mean_summed_error = 0.0;
};

/// Picks the final set: each of the best `max_candidates` stage-1 pairs gets
/// its own stage-2 optimisation, and the combination with the lowest summed
/// per-class error averaged over `seeds` fresh mixtures wins.
FinalBounds select_final_bounds(const SyntheticMixture& mix,
                                const std::vector<ScoredBounds>& stage1_candidates,
                                const GaConfig& ga, const std::vector<std::uint64_t>& seeds,
                                std::size_t max_candidates = 3);

}  // namespace stn
