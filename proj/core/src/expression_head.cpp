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

#include "pat/expression_head.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pat/errors.hpp"

namespace pat {
namespace {

void check_label(const LeafClassifiers& head, int label) {
  if (label < 0 || label >= head.classes()) {
    throw InvalidLabel("class label " + std::to_string(label) +
                       " outside [0, " + std::to_string(head.classes()) + ")");
  }
}

const std::vector<Vector>& leaf_features(const MembershipTrace& trace,
                                         const LeafClassifiers& head) {
  const auto& leaves = trace.features.back();
  if (static_cast<int>(leaves.size()) != head.leaf_count()) {
    throw ShapeMismatch("trace has " + std::to_string(leaves.size()) +
                        " leaves, head has " +
                        std::to_string(head.leaf_count()));
  }
  return leaves;
}

}  // namespace

LeafClassifiers::LeafClassifiers(int leaf_count, int width, int classes)
    : classes_(classes), width_(width) {
  if (leaf_count < 1 || width < 1 || classes < 2) {
    throw InvalidConfig("leaf classifiers need >= 1 leaf, width >= 1 and "
                        ">= 2 classes");
  }
  leaves_.assign(leaf_count,
                 {Matrix(static_cast<std::size_t>(classes),
                         static_cast<std::size_t>(width)),
                  Vector(static_cast<std::size_t>(classes), 0.0)});
}

std::size_t LeafClassifiers::parameter_count() const {
  std::size_t total = 0;
  for (const auto& l : leaves_) total += l.weight.size() + l.bias.size();
  return total;
}

LeafClassifiers make_leaf_classifiers(int leaf_count, int width, int classes,
                                      Rng& rng) {
  LeafClassifiers head(leaf_count, width, classes);
  for (LeafClassifier& l : head.leaves()) {
    l.weight = rng.glorot(l.weight.rows(), l.weight.cols());
  }
  return head;
}

std::vector<Vector> leaf_predict(const LeafClassifiers& head,
                                 const MembershipTrace& trace) {
  const auto& x = leaf_features(trace, head);
  std::vector<Vector> out;
  out.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const LeafClassifier& c = head.leaf(static_cast<int>(k));
    out.push_back(
        softmax(affine_forward(c.weight, c.bias, x[k], Activation::identity)));
  }
  return out;
}

Vector predict(const LeafClassifiers& head, const MembershipTrace& trace) {
  const std::vector<Vector> per_leaf = leaf_predict(head, trace);
  const std::vector<double>& q = trace.mass.back();
  Vector out(static_cast<std::size_t>(head.classes()), 0.0);
  for (std::size_t k = 0; k < per_leaf.size(); ++k) {
    if (q[k] == 0.0) continue;
    for (std::size_t e = 0; e < out.size(); ++e) out[e] += q[k] * per_leaf[k][e];
  }
  return out;
}

double sample_marginal_loss(const LeafClassifiers& head,
                            const MembershipTrace& trace, int label) {
  check_label(head, label);
  const std::vector<Vector> per_leaf = leaf_predict(head, trace);
  const std::vector<double>& q = trace.mass.back();
  double marginal = 0.0;
  for (std::size_t k = 0; k < per_leaf.size(); ++k) {
    marginal += per_leaf[k][label] * q[k];
  }
  return -std::log(std::max(marginal, kMarginalFloor));
}

double marginal_softmax_loss(const LeafClassifiers& head,
                             std::span<const MembershipTrace> traces,
                             std::span<const int> labels) {
  if (traces.size() != labels.size()) {
    throw ShapeMismatch("marginal_softmax_loss: traces and labels differ");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    total += sample_marginal_loss(head, traces[i], labels[i]);
  }
  return total;
}

HeadGradient zero_gradient(const LeafClassifiers& head) {
  HeadGradient g;
  g.reserve(head.leaves().size());
  for (const LeafClassifier& l : head.leaves()) {
    g.push_back({Matrix(l.weight.rows(), l.weight.cols()),
                 Vector(l.bias.size(), 0.0)});
  }
  return g;
}

double marginal_backward_sample(const LeafClassifiers& head,
                                const MembershipTrace& trace, int label,
                                double scale, HeadGradient& grad,
                                NodeVectors& feature_errors,
                                NodeScalars& mass_errors) {
  check_label(head, label);
  const auto& x = leaf_features(trace, head);
  std::vector<Vector> logits;
  std::vector<Vector> per_leaf;
  logits.reserve(x.size());
  per_leaf.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const LeafClassifier& c = head.leaf(static_cast<int>(k));
    logits.push_back(
        affine_forward(c.weight, c.bias, x[k], Activation::identity));
    per_leaf.push_back(softmax(logits.back()));
  }
  const std::vector<double>& q = trace.mass.back();
  double marginal = 0.0;
  for (std::size_t k = 0; k < per_leaf.size(); ++k) {
    marginal += per_leaf[k][label] * q[k];
  }
  const double loss = -std::log(std::max(marginal, kMarginalFloor));
  // Below the floor the loss is constant.
  if (!(marginal > kMarginalFloor)) return loss;

  auto& leaf_errors = feature_errors.back();
  auto& leaf_mass = mass_errors.back();
  const std::size_t classes = static_cast<std::size_t>(head.classes());
  Vector dz(classes);
  for (std::size_t k = 0; k < per_leaf.size(); ++k) {
    const Vector& p = per_leaf[k];
    leaf_mass[k] += -scale * p[label] / marginal;
    if (q[k] == 0.0) continue;
    // dL/dz_e = (q_k p_k(y) / M) (p_k(e) - [e == y]).
    const double coeff = scale * (q[k] * p[label] / marginal);
    for (std::size_t e = 0; e < classes; ++e) {
      dz[e] = coeff * (p[e] - (static_cast<int>(e) == label ? 1.0 : 0.0));
    }
    const LeafClassifier& c = head.leaf(static_cast<int>(k));
    affine_backward_accumulate(c.weight, x[k], logits[k], dz,
                               Activation::identity, grad[k].weight,
                               grad[k].bias, leaf_errors[k]);
  }
  return loss;
}

MarginalGradient marginal_softmax_backward(
    const LeafClassifiers& head, std::span<const MembershipTrace> traces,
    std::span<const int> labels) {
  if (traces.size() != labels.size()) {
    throw ShapeMismatch("marginal_softmax_backward: traces and labels differ");
  }
  MarginalGradient out;
  out.head = zero_gradient(head);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    NodeVectors fx(1, std::vector<Vector>(
                          static_cast<std::size_t>(head.leaf_count()),
                          Vector(static_cast<std::size_t>(head.width()), 0.0)));
    NodeScalars qx(1, std::vector<double>(
                          static_cast<std::size_t>(head.leaf_count()), 0.0));
    marginal_backward_sample(head, traces[i], labels[i], 1.0, out.head, fx, qx);
    out.leaf_features.push_back(std::move(fx.back()));
    out.leaf_mass.push_back(std::move(qx.back()));
  }
  return out;
}

}  // namespace pat
