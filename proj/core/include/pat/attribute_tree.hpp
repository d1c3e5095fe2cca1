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

// The probabilistic attribute tree.
//
// Levels are numbered from 0 (root) to depth() - 1 (leaves). Every non-leaf
// level clusters its node features by one attribute: a node at level j owns
// one cluster center per state of attribute j, and cluster m of node k is
// bound to child node k * states(j) + m at level j + 1. A sample's membership
// mass starts at 1 on the root and is split among children by a softmax over
// cosine similarities to the node's centers.
//
// The clustering loss (node_loss / pat_loss), its feature error
// (pat_backward_features) and the center rule (center_delta /
// apply_center_update) follow the printed formulas literally; in particular
// the feature error is not the analytic derivative of node_loss.

#ifndef PAT_ATTRIBUTE_TREE_HPP_
#define PAT_ATTRIBUTE_TREE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pat/math.hpp"
#include "pat/random.hpp"

namespace pat {

struct Attribute {
  std::string name;
  int states = 0;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

class AttributeSchema {
 public:
  AttributeSchema() = default;
  // Throws InvalidSchema if any attribute has fewer than two states.
  explicit AttributeSchema(std::vector<Attribute> attributes);

  const std::vector<Attribute>& attributes() const noexcept {
    return attributes_;
  }
  int attribute_count() const noexcept {
    return static_cast<int>(attributes_.size());
  }
  // Number of tree levels, attribute_count() + 1.
  int depth() const noexcept { return attribute_count() + 1; }
  // States of the attribute clustered at `level` (level < depth() - 1).
  int states_at(int level) const;
  // Node count at `level`: product of the state counts above it.
  int nodes_at(int level) const;
  int leaf_count() const { return nodes_at(depth() - 1); }

  friend bool operator==(const AttributeSchema&,
                         const AttributeSchema&) = default;

 private:
  std::vector<Attribute> attributes_;
};

// Ground-truth attribute state per non-leaf level; nullopt marks a missing
// label.
using AttributePath = std::vector<std::optional<int>>;

// Number of leading levels that carry a label. A sample contributes to the
// clustering loss and the center rule only at levels below this depth.
int labeled_depth(const AttributePath& path);

enum class Routing {
  soft,  // posteriors from the cosine softmax
  hard,  // one-hot argmax posteriors, ties toward the lowest index
};

struct PatNode {
  int level = 0;
  int index = 0;
  Matrix weight;   // width(level) x width(level - 1)
  Vector bias;
  Matrix centers;  // states(level) x width(level); empty at leaves

  bool is_leaf() const noexcept { return centers.empty(); }
  int cluster_count() const noexcept {
    return static_cast<int>(centers.rows());
  }

  friend bool operator==(const PatNode&, const PatNode&) = default;
};

class PatTree {
 public:
  PatTree() = default;
  // Zero-initialised parameters. `widths` holds the input width followed by
  // one feature width per level, so widths.size() == schema.depth() + 1.
  PatTree(AttributeSchema schema, std::vector<int> widths);

  const AttributeSchema& schema() const noexcept { return schema_; }
  const std::vector<int>& widths() const noexcept { return widths_; }
  int depth() const noexcept { return schema_.depth(); }
  int input_width() const noexcept { return widths_.front(); }
  // Feature width produced by nodes at `level`.
  int width(int level) const { return widths_.at(level + 1); }
  int leaf_level() const noexcept { return depth() - 1; }

  std::span<PatNode> level(int j) { return levels_.at(j); }
  std::span<const PatNode> level(int j) const { return levels_.at(j); }
  PatNode& node(int j, int k) { return levels_.at(j).at(k); }
  const PatNode& node(int j, int k) const { return levels_.at(j).at(k); }

  int child_index(int j, int k, int m) const {
    return k * schema_.states_at(j) + m;
  }
  int parent_index(int j, int k) const {
    return k / schema_.states_at(j - 1);
  }

  std::size_t parameter_count() const;

  friend bool operator==(const PatTree&, const PatTree&) = default;

 private:
  AttributeSchema schema_;
  std::vector<int> widths_;
  std::vector<std::vector<PatNode>> levels_;
};

// Glorot-uniform weights, zero biases, random unit-vector centers, drawn
// level by level and node by node.
PatTree build_tree(const AttributeSchema& schema, std::vector<int> widths,
                   std::uint64_t seed);
PatTree build_tree(const AttributeSchema& schema, std::vector<int> widths,
                   Rng& rng);

// Per-sample forward state. Outer index is the level, inner the node.
struct MembershipTrace {
  Routing routing = Routing::soft;
  Vector input;
  std::vector<std::vector<Vector>> features;
  std::vector<std::vector<double>> mass;
  // Non-leaf levels only: cosine similarity to each center, and the
  // posterior p(c_m | x) which already includes the node mass.
  std::vector<std::vector<Vector>> similarity;
  std::vector<std::vector<Vector>> posterior;
};

MembershipTrace propagate(const PatTree& tree, std::span<const double> input,
                          Routing routing = Routing::soft);

// Node index per level, levels 0..through_level, of the path selected by the
// labels. Throws MissingLabel when a required label is absent.
std::vector<int> gt_path_nodes(const PatTree& tree, const AttributePath& path,
                               int through_level);
// Full path to the leaves.
std::vector<int> gt_path_nodes(const PatTree& tree, const AttributePath& path);

// Clustering loss of one sample at one node. `gt` is the ground-truth
// cluster when the node lies on the sample's labeled path, nullopt otherwise.
double node_loss(const PatNode& node, const MembershipTrace& trace,
                 std::optional<int> gt);

// Clustering loss of one sample summed over every node of every labeled
// non-leaf level.
double sample_pat_loss(const PatTree& tree, const MembershipTrace& trace,
                       const AttributePath& path);

double pat_loss(const PatTree& tree, std::span<const MembershipTrace> traces,
                std::span<const AttributePath> paths);

// Feature error of one sample at one node (literal form, posteriors held
// constant, with the 1/(|C|-1) and 1/|C| normalizers).
Vector pat_backward_features(const PatNode& node, const MembershipTrace& trace,
                             std::optional<int> gt);

// Center displacement for a batch; one row per center. Samples not labeled
// through the node's level contribute nothing.
Matrix center_delta(const PatNode& node,
                    std::span<const MembershipTrace> traces,
                    std::span<const AttributePath> paths);

// c <- c - alpha * delta. Throws DegenerateVector if a row collapses.
void apply_center_update(PatNode& node, const Matrix& delta, double alpha);

// --- Backward plumbing -----------------------------------------------------

// Per-node vectors shaped like the tree: [level][node].
using NodeVectors = std::vector<std::vector<Vector>>;
using NodeScalars = std::vector<std::vector<double>>;

NodeVectors zero_feature_errors(const PatTree& tree);
NodeScalars zero_mass_errors(const PatTree& tree);

struct NodeGradient {
  Matrix weight;
  Vector bias;
  Matrix centers;
};

using TreeGradient = std::vector<std::vector<NodeGradient>>;

TreeGradient zero_gradient(const PatTree& tree);

// Adds scale * pat_backward_features to feature_errors for every node of
// every labeled non-leaf level.
void add_pat_feature_errors(const PatTree& tree, const MembershipTrace& trace,
                            const AttributePath& path, double scale,
                            NodeVectors& feature_errors);

// Chains dL/dq through the soft posteriors. `mass_errors` must hold dL/dq
// for the leaves on entry; it is filled for the inner levels on exit. Adds
// the resulting feature errors of non-leaf nodes into `feature_errors` and,
// when `grad` is given, center gradients. Hard routing has no such path.
void mass_backward(const PatTree& tree, const MembershipTrace& trace,
                   NodeScalars& mass_errors, NodeVectors& feature_errors,
                   TreeGradient* grad);

// Back-propagates per-node feature errors through the node affine chain,
// leaves first, accumulating weight and bias gradients. `feature_errors` is
// consumed (parents receive their children's input gradients in place).
void feature_backward(const PatTree& tree, const MembershipTrace& trace,
                      NodeVectors& feature_errors, TreeGradient& grad);

}  // namespace pat

#endif  // PAT_ATTRIBUTE_TREE_HPP_
