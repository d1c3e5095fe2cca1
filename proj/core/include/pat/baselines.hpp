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

// Baselines without an attribute tree: a plain rectifier network with a
// softmax cross-entropy head, trained with the same batching, initializer
// draw order and SGD arithmetic as the tree model. A one-hidden-layer net of
// width w is the same function as a root-only tree of widths {d, w}, which is
// what the degenerate-equivalence check relies on.

#ifndef PAT_BASELINES_HPP_
#define PAT_BASELINES_HPP_

#include <cstdint>
#include <vector>

#include "pat/dataset.hpp"
#include "pat/math.hpp"
#include "pat/trainer.hpp"

namespace pat {

struct FlatNet {
  std::vector<Matrix> weights;  // hidden layers, then the output layer
  std::vector<Vector> biases;

  int classes() const { return static_cast<int>(weights.back().rows()); }
  std::size_t parameter_count() const;
};

FlatNet make_flat_net(int input_width, const std::vector<int>& hidden,
                      int classes, std::uint64_t seed);

Vector flat_predict(const FlatNet& net, std::span<const double> input);

struct FlatTrainResult {
  FlatNet net;
  std::vector<LossRecord> history;
};

// Trains with config.mu, iterations, batch_size, seed and classes; the tree
// fields of the config are ignored.
FlatTrainResult train_flat(const Dataset& data, const std::vector<int>& hidden,
                           const TrainConfig& config);

std::size_t flat_parameter_count(int input_width, const std::vector<int>& hidden,
                                 int classes);

// `layers` equal hidden widths, widened until the parameter count is as close
// as possible to `target` (within 2% when reachable).
std::vector<int> matched_hidden_widths(int input_width, std::size_t target,
                                       int classes, int layers);

}  // namespace pat

#endif  // PAT_BASELINES_HPP_
