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

// Joint training: marginal softmax loss plus lambda times the clustering loss.
//
// One step forwards the whole batch with the current parameters, computes
// every update from that state, then applies them: classifier SGD with rate
// mu, the center rule with rate alpha, and node weight SGD with rate mu on
// the combined feature error. Centers never receive weight-optimizer updates.

#ifndef PAT_TRAINER_HPP_
#define PAT_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "pat/attribute_tree.hpp"
#include "pat/dataset.hpp"
#include "pat/model.hpp"

namespace pat {

struct TrainConfig {
  double lambda = 0.1;
  double alpha = 1.0;
  double mu = 0.2;
  int iterations = 3000;
  int batch_size = 32;
  std::uint64_t seed = 1;
  AttributeSchema schema{{{"gender", 2}, {"race", 3}}};
  std::vector<int> widths{16, 64, 64, 64};
  int classes = 7;
  double attribute_label_fraction = 1.0;
  Routing routing = Routing::soft;

  // Throws InvalidConfig.
  void validate() const;
};

struct LossRecord {
  int iteration = 0;
  double total = 0.0;
  double marginal = 0.0;
  double pat = 0.0;

  friend bool operator==(const LossRecord&, const LossRecord&) = default;
};

struct TrainState {
  PatModel model;
  int iteration = 0;
  std::vector<LossRecord> history;
};

using Batch = std::vector<std::size_t>;

// Seeded shuffle into fixed-size batches, the last short batch kept. When the
// dataset holds both sources every batch takes floor(batch_size / 2) samples
// from the auxiliary (attribute-labeled) source, cycling through it, and the
// rest from the primary source.
std::vector<Batch> make_batches(const Dataset& data, int batch_size,
                                std::uint64_t seed, int epoch);

TrainState init_state(const TrainConfig& config);

// One iteration. Recorded losses are batch means: the marginal loss over
// samples with a class label, the clustering loss over samples with at least
// one attribute label. Throws NonFiniteLoss.
LossRecord train_step(TrainState& state, const Dataset& data,
                      const Batch& batch, const TrainConfig& config);

using LossObserver = std::function<void(const LossRecord&)>;

// config.iterations steps over cycling epochs, after stripping attribute
// labels down to config.attribute_label_fraction.
TrainState run_training(const Dataset& data, const TrainConfig& config,
                        const LossObserver& observer = {});

// Plain SGD on node weights/biases and classifier parameters.
void apply_weight_update(PatModel& model, const ModelGradient& grad,
                         double mu);

}  // namespace pat

#endif  // PAT_TRAINER_HPP_
