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

#ifndef PAT_METRICS_HPP_
#define PAT_METRICS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pat/dataset.hpp"
#include "pat/model.hpp"
#include "pat/trainer.hpp"

namespace pat {

struct PurityEntry {
  int level = 0;
  int index = 0;
  double purity = 0.0;  // 0 when no sample reaches the node
  double weight = 0.0;  // total membership mass of the evaluated samples
};

struct MetricsReport {
  std::string method;
  double accuracy = 0.0;
  // confusion[true][predicted]
  std::vector<std::vector<std::int64_t>> confusion;
  std::vector<PurityEntry> purity;
  std::vector<LossRecord> loss_curve;
  nlohmann::json config;
  std::uint64_t seed = 0;
  int model_version = 0;
  std::size_t parameters = 0;
};

// Per non-leaf node: the share of membership mass, over samples labeled
// through the node's level, whose argmax cluster equals their attribute
// state at that level.
std::vector<PurityEntry> cluster_purity(const PatTree& tree,
                                        const Dataset& data);

double root_purity(const PatTree& tree, const Dataset& data);

// Accuracy and confusion over samples with a class label.
struct Accuracy {
  double accuracy = 0.0;
  std::vector<std::vector<std::int64_t>> confusion;
};

Accuracy score_predictions(const std::vector<int>& truth,
                           const std::vector<int>& predicted, int classes);

std::vector<int> predict_classes(const PatModel& model, const Dataset& data,
                                 Routing routing);

// Accuracy, confusion and purity of a trained model.
MetricsReport evaluate_model(const PatModel& model, const Dataset& data,
                             Routing routing);

nlohmann::json report_to_json(const MetricsReport& report);

}  // namespace pat

#endif  // PAT_METRICS_HPP_
