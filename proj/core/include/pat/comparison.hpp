// Copyright 2026 The PatTree Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Comparison harness: the tree model against a parameter-matched flat
// network, per-attribute-combination flat networks routed by ground truth,
// and the tree with one-hot (argmax) routing; plus the sweep over the share
// of attribute-labeled training samples.

#ifndef PAT_COMPARISON_HPP_
#define PAT_COMPARISON_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "pat/dataset.hpp"
#include "pat/metrics.hpp"
#include "pat/synth.hpp"
#include "pat/trainer.hpp"

namespace pat {

enum class Method { flat, attribute_specific, hard_at, pat };

const char* to_string(Method m);

inline const std::vector<Method> kAllMethods = {
    Method::flat, Method::attribute_specific, Method::hard_at, Method::pat};

inline const std::vector<double> kDefaultFractions = {0.0,  0.1,  0.2, 0.35,
                                                      0.5,  0.75, 1.0};

inline const std::vector<std::uint64_t> kBenchSeeds = {1, 2, 3, 4, 5};

struct ComparisonOptions {
  // Hidden layers of the flat baselines; widths are matched to the tree
  // model's parameter count.
  int flat_layers = 1;
  // When set, every attribute-specific model trains for the full iteration
  // budget; otherwise the budget is split in proportion to subset size.
  bool full_subset_budget = false;
};

std::vector<int> flat_baseline_widths(const TrainConfig& config,
                                      const ComparisonOptions& options);

// Trains one method on `train` with config.seed and scores it on `test`.
MetricsReport run_method(Method method, const Dataset& train,
                         const Dataset& test, const TrainConfig& config,
                         const ComparisonOptions& options = {});

std::vector<MetricsReport> run_comparison(
    const Dataset& train, const Dataset& test, const TrainConfig& config,
    const std::vector<Method>& methods = kAllMethods,
    const ComparisonOptions& options = {});

struct SweepPoint {
  double fraction = 0.0;
  double accuracy = 0.0;
  double root_purity = 0.0;
};

// `observer` sees every loss record of every training run.
std::vector<SweepPoint> label_fraction_sweep(
    const Dataset& train, const Dataset& test, const TrainConfig& config,
    const std::vector<double>& fractions, const LossObserver& observer = {});

struct SweepRow {
  double fraction = 0.0;
  double mean_accuracy = 0.0;
  double stddev = 0.0;
  std::vector<double> per_seed;
};

// For each seed s: generate data with synth seed s, train with seed s.
std::vector<SweepRow> sweep_over_seeds(const SynthConfig& synth,
                                       const TrainConfig& config,
                                       const std::vector<double>& fractions,
                                       const std::vector<std::uint64_t>& seeds,
                                       const LossObserver& observer = {});

// reports[seed index][method index]
std::vector<std::vector<MetricsReport>> compare_over_seeds(
    const SynthConfig& synth, const TrainConfig& config,
    const std::vector<std::uint64_t>& seeds,
    const std::vector<Method>& methods = kAllMethods,
    const ComparisonOptions& options = {});

// Tab-separated tables with a header line.
std::string comparison_table(
    const std::vector<std::vector<MetricsReport>>& per_seed);
std::string sweep_table(const std::vector<SweepRow>& rows);

}  // namespace pat

#endif  // PAT_COMPARISON_HPP_
