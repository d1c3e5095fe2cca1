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

#include "pat/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pat/errors.hpp"
#include "pat/expression_head.hpp"
#include "pat/random.hpp"

namespace pat {

std::size_t FlatNet::parameter_count() const {
  std::size_t total = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    total += weights[l].size() + biases[l].size();
  }
  return total;
}

FlatNet make_flat_net(int input_width, const std::vector<int>& hidden,
                      int classes, std::uint64_t seed) {
  Rng rng(seed);
  FlatNet net;
  int fan_in = input_width;
  for (int w : hidden) {
    net.weights.push_back(rng.glorot(static_cast<std::size_t>(w),
                                     static_cast<std::size_t>(fan_in)));
    net.biases.emplace_back(static_cast<std::size_t>(w), 0.0);
    fan_in = w;
  }
  net.weights.push_back(rng.glorot(static_cast<std::size_t>(classes),
                                   static_cast<std::size_t>(fan_in)));
  net.biases.emplace_back(static_cast<std::size_t>(classes), 0.0);
  return net;
}

namespace {

struct FlatForward {
  std::vector<Vector> activations;  // input, hidden..., logits
  Vector probabilities;
};

FlatForward forward(const FlatNet& net, std::span<const double> input) {
  FlatForward f;
  f.activations.emplace_back(input.begin(), input.end());
  const std::size_t last = net.weights.size() - 1;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    f.activations.push_back(affine_forward(
        net.weights[l], net.biases[l], f.activations.back(),
        l == last ? Activation::identity : Activation::rectifier));
  }
  f.probabilities = softmax(f.activations.back());
  return f;
}

}  // namespace

Vector flat_predict(const FlatNet& net, std::span<const double> input) {
  return forward(net, input).probabilities;
}

FlatTrainResult train_flat(const Dataset& data, const std::vector<int>& hidden,
                           const TrainConfig& config) {
  if (data.empty()) throw EmptyDataset("training dataset is empty");
  FlatTrainResult r{make_flat_net(data.input_width, hidden, config.classes,
                                  config.seed),
                    {}};
  FlatNet& net = r.net;
  const std::size_t layers = net.weights.size();
  const std::size_t last = layers - 1;

  int epoch = 0;
  std::vector<Batch> batches =
      make_batches(data, config.batch_size, config.seed, epoch);
  std::size_t next = 0;
  for (int t = 0; t < config.iterations; ++t) {
    if (next == batches.size()) {
      batches = make_batches(data, config.batch_size, config.seed, ++epoch);
      next = 0;
    }
    const Batch& batch = batches[next++];
    std::size_t n_class = 0;
    for (std::size_t i : batch) {
      if (data.samples[i].label) ++n_class;
    }
    const double scale = n_class ? 1.0 / static_cast<double>(n_class) : 0.0;

    std::vector<Matrix> gw;
    std::vector<Vector> gb;
    for (std::size_t l = 0; l < layers; ++l) {
      gw.emplace_back(net.weights[l].rows(), net.weights[l].cols());
      gb.emplace_back(net.biases[l].size(), 0.0);
    }
    double loss_sum = 0.0;
    for (std::size_t i : batch) {
      const Sample& s = data.samples[i];
      if (!s.label) continue;
      const int y = *s.label;
      if (y < 0 || y >= config.classes) {
        throw InvalidLabel("class label out of range");
      }
      const FlatForward f = forward(net, s.features);
      const double py = f.probabilities[y];
      loss_sum += -std::log(std::max(py, kMarginalFloor));
      if (!(py > kMarginalFloor)) continue;

      Vector err(f.probabilities.size());
      for (std::size_t e = 0; e < err.size(); ++e) {
        err[e] = scale * (f.probabilities[e] -
                          (static_cast<int>(e) == y ? 1.0 : 0.0));
      }
      for (std::size_t l = layers; l-- > 0;) {
        Vector below(l == 0 ? 0 : net.weights[l].cols(), 0.0);
        affine_backward_accumulate(
            net.weights[l], f.activations[l], f.activations[l + 1], err,
            l == last ? Activation::identity : Activation::rectifier, gw[l],
            gb[l], below);
        err = std::move(below);
      }
    }
    LossRecord rec;
    rec.iteration = t + 1;
    rec.marginal = loss_sum * scale;
    rec.pat = 0.0;
    rec.total = rec.marginal + config.lambda * rec.pat;
    if (!std::isfinite(rec.total)) {
      throw NonFiniteLoss("flat baseline: non-finite loss at iteration " +
                          std::to_string(t + 1));
    }
    r.history.push_back(rec);

    for (std::size_t l = 0; l < layers; ++l) {
      auto w = net.weights[l].values();
      const auto g = gw[l].values();
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= config.mu * g[i];
      for (std::size_t i = 0; i < gb[l].size(); ++i) {
        net.biases[l][i] -= config.mu * gb[l][i];
      }
    }
  }
  return r;
}

std::size_t flat_parameter_count(int input_width, const std::vector<int>& hidden,
                                 int classes) {
  std::size_t total = 0;
  std::size_t fan_in = static_cast<std::size_t>(input_width);
  for (int w : hidden) {
    total += fan_in * static_cast<std::size_t>(w) + static_cast<std::size_t>(w);
    fan_in = static_cast<std::size_t>(w);
  }
  return total + fan_in * static_cast<std::size_t>(classes) +
         static_cast<std::size_t>(classes);
}

std::vector<int> matched_hidden_widths(int input_width, std::size_t target,
                                       int classes, int layers) {
  if (layers < 1) throw InvalidConfig("flat baseline needs a hidden layer");
  std::vector<int> best(static_cast<std::size_t>(layers), 1);
  double best_gap = std::numeric_limits<double>::infinity();
  for (int w = 1;; ++w) {
    const std::vector<int> hidden(static_cast<std::size_t>(layers), w);
    const auto count = flat_parameter_count(input_width, hidden, classes);
    const double gap = std::abs(static_cast<double>(count) -
                                static_cast<double>(target));
    if (gap < best_gap) {
      best_gap = gap;
      best = hidden;
    }
    if (count > target) break;
  }
  return best;
}

}  // namespace pat
