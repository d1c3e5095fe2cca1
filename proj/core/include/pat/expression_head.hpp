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

// Leaf classifiers and the marginal softmax loss.
//
// Each leaf of the attribute tree carries its own linear classifier over the
// leaf features. The model's class distribution is the membership-weighted
// mixture sum_k q_k p(. | x_k), and the loss is the negative log of the
// mixture probability of the true class.

#ifndef PAT_EXPRESSION_HEAD_HPP_
#define PAT_EXPRESSION_HEAD_HPP_

#include <span>
#include <vector>

#include "pat/attribute_tree.hpp"
#include "pat/math.hpp"
#include "pat/random.hpp"

namespace pat {

// Floor applied to the mixture probability before the log.
inline constexpr double kMarginalFloor = 1e-30;

struct LeafClassifier {
  Matrix weight;  // classes x leaf width
  Vector bias;

  friend bool operator==(const LeafClassifier&,
                         const LeafClassifier&) = default;
};

class LeafClassifiers {
 public:
  LeafClassifiers() = default;
  LeafClassifiers(int leaf_count, int width, int classes);

  int classes() const noexcept { return classes_; }
  int leaf_count() const noexcept { return static_cast<int>(leaves_.size()); }
  int width() const noexcept { return width_; }
  LeafClassifier& leaf(int k) { return leaves_.at(k); }
  const LeafClassifier& leaf(int k) const { return leaves_.at(k); }
  std::span<LeafClassifier> leaves() noexcept { return leaves_; }
  std::span<const LeafClassifier> leaves() const noexcept { return leaves_; }

  std::size_t parameter_count() const;

  friend bool operator==(const LeafClassifiers&,
                         const LeafClassifiers&) = default;

 private:
  int classes_ = 0;
  int width_ = 0;
  std::vector<LeafClassifier> leaves_;
};

// Glorot-uniform weights and zero biases, leaf by leaf.
LeafClassifiers make_leaf_classifiers(int leaf_count, int width, int classes,
                                      Rng& rng);

std::vector<Vector> leaf_predict(const LeafClassifiers& head,
                                 const MembershipTrace& trace);

Vector predict(const LeafClassifiers& head, const MembershipTrace& trace);

double sample_marginal_loss(const LeafClassifiers& head,
                            const MembershipTrace& trace, int label);

// Sum over samples (not the mean).
double marginal_softmax_loss(const LeafClassifiers& head,
                             std::span<const MembershipTrace> traces,
                             std::span<const int> labels);

using HeadGradient = std::vector<LeafClassifier>;

HeadGradient zero_gradient(const LeafClassifiers& head);

// Per-sample backward of scale * loss. Accumulates into `grad`, and adds the
// gradients with respect to each leaf feature and each leaf mass into
// `feature_errors` / `mass_errors` (tree-shaped, leaf level used). Returns the
// unscaled sample loss.
double marginal_backward_sample(const LeafClassifiers& head,
                                const MembershipTrace& trace, int label,
                                double scale, HeadGradient& grad,
                                NodeVectors& feature_errors,
                                NodeScalars& mass_errors);

struct MarginalGradient {
  HeadGradient head;
  // [sample][leaf]
  std::vector<std::vector<Vector>> leaf_features;
  std::vector<std::vector<double>> leaf_mass;
};

// Gradient of the summed loss with respect to the classifier parameters,
// every leaf feature and every leaf mass.
MarginalGradient marginal_softmax_backward(
    const LeafClassifiers& head, std::span<const MembershipTrace> traces,
    std::span<const int> labels);

}  // namespace pat

#endif  // PAT_EXPRESSION_HEAD_HPP_
