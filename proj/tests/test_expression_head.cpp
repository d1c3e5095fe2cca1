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

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "pat/errors.hpp"
#include "pat/expression_head.hpp"
#include "pat/model.hpp"
#include "pat/random.hpp"
#include "pat/verify.hpp"
#include "support.hpp"

namespace pat {
namespace {

using testing::gender_race;
using testing::worked_example_tree;

// Two-leaf head over the worked example tree with chosen logits.
LeafClassifiers two_leaf_head(double leaf0_logit0, double leaf1_logit0) {
  LeafClassifiers head(2, 2, 2);
  head.leaf(0).bias = {leaf0_logit0, 0.0};
  head.leaf(1).bias = {leaf1_logit0, 0.0};
  return head;
}

TEST(LeafPredict, ZeroLogitsAreUniform) {
  const PatTree tree = build_tree(gender_race(), {3, 4, 4, 4}, 1);
  const LeafClassifiers head(6, 4, 5);
  const auto per_leaf = leaf_predict(head, propagate(tree, Vector{1, 2, 3}));
  ASSERT_EQ(per_leaf.size(), 6u);
  for (const Vector& d : per_leaf) {
    for (double p : d) EXPECT_DOUBLE_EQ(p, 0.2);
  }
}

TEST(LeafPredict, DistributionsSumToOne) {
  Rng rng(3);
  const PatTree tree = build_tree(gender_race(), {3, 4, 4, 4}, 1);
  const LeafClassifiers head = make_leaf_classifiers(6, 4, 7, rng);
  for (const Vector& d : leaf_predict(head, propagate(tree, Vector{1, 2, 3}))) {
    EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(LeafPredict, WidthMismatchThrows) {
  const PatTree tree = build_tree(gender_race(), {3, 4, 4, 4}, 1);
  const LeafClassifiers head(6, 5, 3);
  EXPECT_THROW(leaf_predict(head, propagate(tree, Vector{1, 2, 3})), ShapeMismatch);
}

TEST(Predict, MixesLeavesByMass) {
  const PatTree tree = worked_example_tree();
  const MembershipTrace tr = propagate(tree, Vector{1.0, 0.0});
  const LeafClassifiers head = two_leaf_head(std::log(4.0), -std::log(4.0));
  const Vector out = predict(head, tr);
  const double q0 = 0.7310585786300049;
  EXPECT_NEAR(out[0], q0 * 0.8 + (1 - q0) * 0.2, 1e-12);
  EXPECT_NEAR(out[0] + out[1], 1.0, 1e-12);
}

TEST(Predict, SymmetricMixIsUniform) {
  PatTree tree = worked_example_tree();
  tree.node(0, 0).centers(0, 0) = 0.0;
  tree.node(0, 0).centers(0, 1) = -1.0;  // [0, -1] and [0, 1] vs x = [1, 0]
  const MembershipTrace tr = propagate(tree, Vector{1.0, 0.0});
  const Vector out = predict(two_leaf_head(std::log(4.0), -std::log(4.0)), tr);
  EXPECT_NEAR(out[0], 0.5, 1e-12);
}

TEST(Predict, AgreeingLeavesIgnoreMass) {
  const PatTree tree = worked_example_tree();
  const Vector out =
      predict(two_leaf_head(1.0, 1.0), propagate(tree, Vector{1.0, 0.3}));
  const Vector ref = softmax(Vector{1.0, 0.0});
  EXPECT_NEAR(out[0], ref[0], 1e-12);
}

TEST(MarginalLoss, WorkedValue) {
  const PatTree tree = build_tree(AttributeSchema{}, {2, 2}, 1);
  const LeafClassifiers head(1, 2, 2);
  const MembershipTrace tr = propagate(tree, Vector{1.0, 0.5});
  EXPECT_NEAR(sample_marginal_loss(head, tr, 0), 0.6931471805599453, 1e-12);
}

TEST(MarginalLoss, CertainPredictionCostsNothing) {
  const PatTree tree = build_tree(AttributeSchema{}, {2, 2}, 1);
  LeafClassifiers head(1, 2, 2);
  head.leaf(0).bias = {0.0, -1e4};
  const MembershipTrace tr = propagate(tree, Vector{1.0, 0.5});
  EXPECT_EQ(sample_marginal_loss(head, tr, 0), 0.0);
  const std::vector<MembershipTrace> traces = {tr};
  const std::vector<int> labels = {0};
  const MarginalGradient g = marginal_softmax_backward(head, traces, labels);
  for (double v : g.head[0].weight.values()) EXPECT_EQ(v, 0.0);
}

TEST(MarginalLoss, RejectsBadLabel) {
  const PatTree tree = build_tree(AttributeSchema{}, {2, 2}, 1);
  const LeafClassifiers head(1, 2, 2);
  const MembershipTrace tr = propagate(tree, Vector{1.0, 0.5});
  EXPECT_THROW(sample_marginal_loss(head, tr, 2), InvalidLabel);
  EXPECT_THROW(sample_marginal_loss(head, tr, -1), InvalidLabel);
}

TEST(MarginalLoss, AdditiveAndNonnegative) {
  Rng rng(2);
  const PatTree tree = build_tree(gender_race(), {3, 16, 16, 16}, 5);
  const LeafClassifiers head = make_leaf_classifiers(6, 16, 3, rng);
  const std::vector<MembershipTrace> traces = {propagate(tree, Vector{1, 2, 3}),
                                               propagate(tree, Vector{3, -1, 1})};
  const std::vector<int> labels = {2, 0};
  const double total = marginal_softmax_loss(head, traces, labels);
  EXPECT_NEAR(total,
              sample_marginal_loss(head, traces[0], 2) +
                  sample_marginal_loss(head, traces[1], 0),
              1e-14);
  EXPECT_GE(total, 0.0);
}

TEST(MarginalBackward, OneHotMassReducesToCrossEntropy) {
  const PatTree tree = worked_example_tree();
  const MembershipTrace tr = propagate(tree, Vector{1.0, 0.0}, Routing::hard);
  Rng rng(6);
  const LeafClassifiers head = make_leaf_classifiers(2, 2, 3, rng);
  const std::vector<MembershipTrace> traces = {tr};
  const std::vector<int> labels = {1};
  const MarginalGradient g = marginal_softmax_backward(head, traces, labels);
  const Vector x = tr.features[1][0];
  Vector p = softmax(affine_forward(head.leaf(0).weight, head.leaf(0).bias, x,
                                    Activation::identity));
  p[1] -= 1.0;
  for (int e = 0; e < 3; ++e) {
    EXPECT_NEAR(g.head[0].bias[e], p[e], 1e-14);
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(g.head[0].weight(e, i), p[e] * x[i], 1e-14);
    }
  }
  for (double v : g.head[1].weight.values()) EXPECT_EQ(v, 0.0);
}

TEST(MarginalBackward, LeafFeatureAndMassGradientsMatchFiniteDifferences) {
  Rng rng(9);
  const PatTree tree = build_tree(gender_race(), {3, 4, 4, 4}, 5);
  const LeafClassifiers head = make_leaf_classifiers(6, 4, 3, rng);
  MembershipTrace tr = propagate(tree, Vector{1, 2, 3});
  const std::vector<int> labels = {1};
  const MarginalGradient g =
      marginal_softmax_backward(head, std::span(&tr, 1), labels);
  const double h = 1e-6;
  for (int k = 0; k < 6; ++k) {
    const double q = tr.mass[2][k];
    tr.mass[2][k] = q + h;
    const double up = sample_marginal_loss(head, tr, 1);
    tr.mass[2][k] = q - h;
    const double down = sample_marginal_loss(head, tr, 1);
    tr.mass[2][k] = q;
    EXPECT_NEAR(g.leaf_mass[0][k], (up - down) / (2 * h), 1e-7);
    for (int i = 0; i < 4; ++i) {
      double& x = tr.features[2][k][i];
      const double x0 = x;
      x = x0 + h;
      const double fu = sample_marginal_loss(head, tr, 1);
      x = x0 - h;
      const double fd = sample_marginal_loss(head, tr, 1);
      x = x0;
      EXPECT_NEAR(g.leaf_features[0][k][i], (fu - fd) / (2 * h), 1e-7);
    }
  }
}

TEST(MarginalGradient, FullModelMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const GradCheckResult r = run_gradcheck(seed);
    EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_parameter << "[" << r.worst_index
                                     << "]";
    EXPECT_GT(r.coordinates, 0u);
  }
}

TEST(MarginalGradient, RootOnlyTreeMatchesSoftmaxRegression) {
  const PatModel model = make_model(AttributeSchema{}, {3, 4}, 3, 12);
  const std::vector<Vector> inputs = {{1, 2, 3}, {0.5, -1, 2}};
  const std::vector<int> labels = {0, 2};
  double ce = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const PatNode& root = model.tree.node(0, 0);
    const Vector x = affine_forward(root.weight, root.bias, inputs[i]);
    const Vector p = softmax(affine_forward(model.head.leaf(0).weight,
                                            model.head.leaf(0).bias, x,
                                            Activation::identity));
    ce -= std::log(p[labels[i]]);
  }
  EXPECT_NEAR(marginal_loss(model, inputs, labels), ce, 1e-12);
}

}  // namespace
}  // namespace pat
