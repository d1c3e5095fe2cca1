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

#include "pat/model.hpp"

#include <string>

#include "pat/errors.hpp"
#include "pat/random.hpp"

namespace pat {

PatModel make_model(const AttributeSchema& schema, std::vector<int> widths,
                    int classes, std::uint64_t seed) {
  Rng rng(seed);
  PatModel m;
  m.tree = build_tree(schema, std::move(widths), rng);
  m.head = make_leaf_classifiers(schema.leaf_count(),
                                 m.tree.width(m.tree.leaf_level()), classes,
                                 rng);
  return m;
}

ModelGradient zero_gradient(const PatModel& model) {
  return {zero_gradient(model.tree), zero_gradient(model.head)};
}

namespace {

std::string node_name(int j, int k) {
  return "node(" + std::to_string(j) + "," + std::to_string(k) + ")";
}

}  // namespace

std::vector<ParameterBlock> parameter_blocks(PatModel& model) {
  std::vector<ParameterBlock> blocks;
  for (int j = 0; j < model.tree.depth(); ++j) {
    for (PatNode& n : model.tree.level(j)) {
      const std::string base = node_name(j, n.index);
      blocks.push_back({base + ".weight", n.weight.values()});
      blocks.push_back({base + ".bias", n.bias});
      if (!n.is_leaf()) blocks.push_back({base + ".centers", n.centers.values()});
    }
  }
  for (int k = 0; k < model.head.leaf_count(); ++k) {
    LeafClassifier& c = model.head.leaf(k);
    const std::string base = "classifier(" + std::to_string(k) + ")";
    blocks.push_back({base + ".weight", c.weight.values()});
    blocks.push_back({base + ".bias", c.bias});
  }
  return blocks;
}

std::vector<ParameterBlock> gradient_blocks(ModelGradient& grad) {
  std::vector<ParameterBlock> blocks;
  for (std::size_t j = 0; j < grad.tree.size(); ++j) {
    for (std::size_t k = 0; k < grad.tree[j].size(); ++k) {
      NodeGradient& n = grad.tree[j][k];
      const std::string base =
          node_name(static_cast<int>(j), static_cast<int>(k));
      blocks.push_back({base + ".weight", n.weight.values()});
      blocks.push_back({base + ".bias", n.bias});
      if (!n.centers.empty()) {
        blocks.push_back({base + ".centers", n.centers.values()});
      }
    }
  }
  for (std::size_t k = 0; k < grad.head.size(); ++k) {
    const std::string base = "classifier(" + std::to_string(k) + ")";
    blocks.push_back({base + ".weight", grad.head[k].weight.values()});
    blocks.push_back({base + ".bias", grad.head[k].bias});
  }
  return blocks;
}

double marginal_loss(const PatModel& model, std::span<const Vector> inputs,
                     std::span<const int> labels, Routing routing) {
  if (inputs.size() != labels.size()) {
    throw ShapeMismatch("marginal_loss: inputs and labels differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const MembershipTrace t = propagate(model.tree, inputs[i], routing);
    total += sample_marginal_loss(model.head, t, labels[i]);
  }
  return total;
}

ModelGradient marginal_gradient(const PatModel& model,
                                std::span<const Vector> inputs,
                                std::span<const int> labels, Routing routing) {
  if (inputs.size() != labels.size()) {
    throw ShapeMismatch("marginal_gradient: inputs and labels differ");
  }
  ModelGradient g = zero_gradient(model);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const MembershipTrace t = propagate(model.tree, inputs[i], routing);
    NodeVectors fe = zero_feature_errors(model.tree);
    NodeScalars me = zero_mass_errors(model.tree);
    marginal_backward_sample(model.head, t, labels[i], 1.0, g.head, fe, me);
    mass_backward(model.tree, t, me, fe, &g.tree);
    feature_backward(model.tree, t, fe, g.tree);
  }
  return g;
}

}  // namespace pat
