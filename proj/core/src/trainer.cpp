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

#include "pat/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "pat/errors.hpp"
#include "pat/random.hpp"

namespace pat {

void TrainConfig::validate() const {
  if (!(lambda >= 0.0)) throw InvalidConfig("lambda must be >= 0");
  if (!(alpha >= 0.0)) throw InvalidConfig("alpha must be >= 0");
  if (!(mu > 0.0)) throw InvalidConfig("mu must be > 0");
  if (iterations < 1) throw InvalidConfig("iterations must be >= 1");
  if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
  if (classes < 2) throw InvalidConfig("classes must be >= 2");
  if (!(attribute_label_fraction >= 0.0 && attribute_label_fraction <= 1.0)) {
    throw InvalidConfig("attribute_label_fraction must lie in [0, 1]");
  }
  if (static_cast<int>(widths.size()) != schema.depth() + 1) {
    throw InvalidConfig("widths must hold the input width plus one width per "
                        "tree level (" +
                        std::to_string(schema.depth() + 1) + " values)");
  }
  for (int w : widths) {
    if (w < 1) throw InvalidConfig("widths must be positive");
  }
}

std::vector<Batch> make_batches(const Dataset& data, int batch_size,
                                std::uint64_t seed, int epoch) {
  if (data.empty()) throw EmptyDataset("cannot batch an empty dataset");
  if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
  Rng rng{seed, static_cast<std::uint64_t>(epoch), 0xBA7C4ULL};
  const auto size = static_cast<std::size_t>(batch_size);
  std::vector<Batch> batches;

  if (!data.has_two_sources()) {
    Batch order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (std::size_t start = 0; start < order.size(); start += size) {
      const std::size_t end = std::min(order.size(), start + size);
      batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                           order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return batches;
  }

  Batch primary;
  Batch auxiliary;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (data.samples[i].source == Source::primary ? primary : auxiliary)
        .push_back(i);
  }
  std::shuffle(primary.begin(), primary.end(), rng.engine());
  std::shuffle(auxiliary.begin(), auxiliary.end(), rng.engine());

  // A batch of n samples takes floor(n / 2) from the auxiliary source.
  const std::size_t aux_full = size / 2;
  const std::size_t primary_full = size - aux_full;
  const std::size_t odd = size % 2;
  std::size_t aux_pos = 0;
  for (std::size_t start = 0; start < primary.size(); start += primary_full) {
    const std::size_t end = std::min(primary.size(), start + primary_full);
    Batch b(primary.begin() + static_cast<std::ptrdiff_t>(start),
            primary.begin() + static_cast<std::ptrdiff_t>(end));
    const std::size_t taken = end - start;
    const std::size_t aux_n = taken == primary_full ? aux_full : taken - odd;
    for (std::size_t a = 0; a < aux_n; ++a) {
      b.push_back(auxiliary[aux_pos]);
      aux_pos = (aux_pos + 1) % auxiliary.size();
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

TrainState init_state(const TrainConfig& config) {
  TrainState s;
  s.model =
      make_model(config.schema, config.widths, config.classes, config.seed);
  return s;
}

void apply_weight_update(PatModel& model, const ModelGradient& grad,
                         double mu) {
  auto step = [mu](std::span<double> p, std::span<const double> g) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= mu * g[i];
  };
  for (int j = 0; j < model.tree.depth(); ++j) {
    for (PatNode& n : model.tree.level(j)) {
      const NodeGradient& g = grad.tree[j][n.index];
      step(n.weight.values(), g.weight.values());
      step(n.bias, g.bias);
    }
  }
  for (int k = 0; k < model.head.leaf_count(); ++k) {
    step(model.head.leaf(k).weight.values(), grad.head[k].weight.values());
    step(model.head.leaf(k).bias, grad.head[k].bias);
  }
}

namespace {

[[noreturn]] void fail_non_finite(const TrainState& state, const Batch& batch,
                                  const LossRecord& rec) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "non-finite loss at iteration " << state.iteration + 1
      << ": L=" << rec.total << " L_MS=" << rec.marginal
      << " L_PAT=" << rec.pat << "\nbatch sample indices:";
  for (std::size_t i : batch) msg << ' ' << i;
  msg << "\nparameter norms:";
  for (int j = 0; j < state.model.tree.depth(); ++j) {
    for (const PatNode& n : state.model.tree.level(j)) {
      msg << "\n  node(" << j << "," << n.index
          << ") |W|=" << norm(n.weight.values()) << " |b|=" << norm(n.bias);
      if (!n.is_leaf()) msg << " |C|=" << norm(n.centers.values());
    }
  }
  for (int k = 0; k < state.model.head.leaf_count(); ++k) {
    msg << "\n  classifier(" << k
        << ") |W|=" << norm(state.model.head.leaf(k).weight.values());
  }
  throw NonFiniteLoss(msg.str());
}

}  // namespace

LossRecord train_step(TrainState& state, const Dataset& data,
                      const Batch& batch, const TrainConfig& config) {
  PatModel& model = state.model;
  const PatTree& tree = model.tree;

  // (1) Forward with the pre-step parameters.
  std::vector<MembershipTrace> traces;
  std::vector<AttributePath> paths;
  traces.reserve(batch.size());
  paths.reserve(batch.size());
  std::size_t n_class = 0;
  std::size_t n_attr = 0;
  for (std::size_t i : batch) {
    const Sample& s = data.samples.at(i);
    traces.push_back(propagate(tree, s.features, config.routing));
    paths.push_back(s.attributes);
    if (s.label) ++n_class;
    if (labeled_depth(s.attributes) > 0) ++n_attr;
  }
  const double class_scale = n_class ? 1.0 / static_cast<double>(n_class) : 0.0;
  const double attr_scale = n_attr ? 1.0 / static_cast<double>(n_attr) : 0.0;
  const bool clustered = tree.depth() > 1;

  // (2)-(5) Losses and every gradient, all from the pre-step state.
  ModelGradient grad = zero_gradient(model);
  double marginal_sum = 0.0;
  double pat_sum = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Sample& s = data.samples[batch[b]];
    const MembershipTrace& t = traces[b];
    NodeVectors errors = zero_feature_errors(tree);
    if (s.label) {
      NodeScalars mass_errors = zero_mass_errors(tree);
      marginal_sum += marginal_backward_sample(model.head, t, *s.label,
                                               class_scale, grad.head, errors,
                                               mass_errors);
      if (clustered) mass_backward(tree, t, mass_errors, errors, nullptr);
    }
    if (clustered && labeled_depth(paths[b]) > 0) {
      pat_sum += sample_pat_loss(tree, t, paths[b]);
      if (config.lambda != 0.0) {
        add_pat_feature_errors(tree, t, paths[b], config.lambda * attr_scale,
                               errors);
      }
    }
    feature_backward(tree, t, errors, grad.tree);
  }

  LossRecord rec;
  rec.iteration = state.iteration + 1;
  rec.marginal = marginal_sum * class_scale;
  rec.pat = pat_sum * attr_scale;
  rec.total = rec.marginal + config.lambda * rec.pat;
  if (!std::isfinite(rec.total) || !std::isfinite(rec.marginal) ||
      !std::isfinite(rec.pat)) {
    fail_non_finite(state, batch, rec);
  }

  std::vector<std::vector<Matrix>> deltas(tree.leaf_level());
  for (int j = 0; j < tree.leaf_level(); ++j) {
    for (const PatNode& n : tree.level(j)) {
      deltas[j].push_back(center_delta(n, traces, paths));
    }
  }

  // Apply: classifiers and node weights with mu, centers with alpha.
  apply_weight_update(model, grad, config.mu);
  for (int j = 0; j < model.tree.leaf_level(); ++j) {
    for (PatNode& n : model.tree.level(j)) {
      apply_center_update(n, deltas[j][n.index], config.alpha);
    }
  }

  state.iteration = rec.iteration;
  state.history.push_back(rec);
  return rec;
}

TrainState run_training(const Dataset& data, const TrainConfig& config,
                        const LossObserver& observer) {
  config.validate();
  if (data.empty()) throw EmptyDataset("training dataset is empty");
  if (data.input_width != config.widths.front()) {
    throw SchemaMismatch("dataset feature width " +
                         std::to_string(data.input_width) +
                         " differs from configured input width " +
                         std::to_string(config.widths.front()));
  }
  validate_dataset(data, config.schema, config.classes);

  const Dataset stripped =
      config.attribute_label_fraction < 1.0
          ? strip_attribute_labels(data, config.attribute_label_fraction,
                                   config.seed)
          : Dataset{};
  const Dataset& train = config.attribute_label_fraction < 1.0 ? stripped : data;

  TrainState state = init_state(config);
  int epoch = 0;
  std::vector<Batch> batches =
      make_batches(train, config.batch_size, config.seed, epoch);
  std::size_t next = 0;
  for (int t = 0; t < config.iterations; ++t) {
    if (next == batches.size()) {
      batches = make_batches(train, config.batch_size, config.seed, ++epoch);
      next = 0;
    }
    const LossRecord rec = train_step(state, train, batches[next++], config);
    if (observer) observer(rec);
  }
  return state;
}

}  // namespace pat
