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

#ifndef PAT_MODEL_HPP_
#define PAT_MODEL_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pat/attribute_tree.hpp"
#include "pat/expression_head.hpp"

namespace pat {

// Attribute tree plus leaf classifiers.
struct PatModel {
  PatTree tree;
  LeafClassifiers head;

  int classes() const noexcept { return head.classes(); }
  std::size_t parameter_count() const {
    return tree.parameter_count() + head.parameter_count();
  }

  friend bool operator==(const PatModel&, const PatModel&) = default;
};

// Tree first, then the classifiers, from one seeded stream.
PatModel make_model(const AttributeSchema& schema, std::vector<int> widths,
                    int classes, std::uint64_t seed);

struct ModelGradient {
  TreeGradient tree;
  HeadGradient head;
};

ModelGradient zero_gradient(const PatModel& model);

struct ParameterBlock {
  std::string name;
  std::span<double> values;
};

// Every parameter array of the model in a fixed order; gradient_blocks
// yields the matching arrays of a gradient in the same order.
std::vector<ParameterBlock> parameter_blocks(PatModel& model);
std::vector<ParameterBlock> gradient_blocks(ModelGradient& grad);

// Summed marginal softmax loss over the given samples.
double marginal_loss(const PatModel& model,
                     std::span<const Vector> inputs, std::span<const int> labels,
                     Routing routing = Routing::soft);

// Full analytic gradient of marginal_loss: classifier parameters, node
// weights and biases, and cluster centers (through the soft posteriors).
ModelGradient marginal_gradient(const PatModel& model,
                                std::span<const Vector> inputs,
                                std::span<const int> labels,
                                Routing routing = Routing::soft);

}  // namespace pat

#endif  // PAT_MODEL_HPP_
