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

#include "pat/attribute_tree.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "pat/errors.hpp"

namespace pat {

AttributeSchema::AttributeSchema(std::vector<Attribute> attributes)
    : attributes_(std::move(attributes)) {
  for (const Attribute& a : attributes_) {
    if (a.states < 2) {
      throw InvalidSchema("attribute '" + a.name + "' has " +
                          std::to_string(a.states) +
                          " states; at least 2 are required");
    }
  }
}

int AttributeSchema::states_at(int level) const {
  if (level < 0 || level >= attribute_count()) {
    throw InvalidSchema("level " + std::to_string(level) +
                        " has no attribute");
  }
  return attributes_[level].states;
}

int AttributeSchema::nodes_at(int level) const {
  if (level < 0 || level >= depth()) {
    throw InvalidSchema("level " + std::to_string(level) + " out of range");
  }
  int count = 1;
  for (int r = 0; r < level; ++r) count *= attributes_[r].states;
  return count;
}

int labeled_depth(const AttributePath& path) {
  int d = 0;
  while (d < static_cast<int>(path.size()) && path[d].has_value()) ++d;
  return d;
}

PatTree::PatTree(AttributeSchema schema, std::vector<int> widths)
    : schema_(std::move(schema)), widths_(std::move(widths)) {
  if (static_cast<int>(widths_.size()) != schema_.depth() + 1) {
    throw InvalidSchema("expected " + std::to_string(schema_.depth() + 1) +
                        " widths (input plus one per level), got " +
                        std::to_string(widths_.size()));
  }
  for (int w : widths_) {
    if (w <= 0) throw InvalidSchema("widths must be positive");
  }
  levels_.resize(schema_.depth());
  for (int j = 0; j < schema_.depth(); ++j) {
    const int count = schema_.nodes_at(j);
    const auto rows = static_cast<std::size_t>(width(j));
    const auto cols = static_cast<std::size_t>(widths_[j]);
    levels_[j].reserve(count);
    for (int k = 0; k < count; ++k) {
      PatNode n;
      n.level = j;
      n.index = k;
      n.weight = Matrix(rows, cols);
      n.bias = Vector(rows, 0.0);
      if (j + 1 < schema_.depth()) {
        n.centers = Matrix(static_cast<std::size_t>(schema_.states_at(j)),
                           rows);
      }
      levels_[j].push_back(std::move(n));
    }
  }
}

std::size_t PatTree::parameter_count() const {
  std::size_t total = 0;
  for (const auto& lvl : levels_) {
    for (const PatNode& n : lvl) {
      total += n.weight.size() + n.bias.size() + n.centers.size();
    }
  }
  return total;
}

PatTree build_tree(const AttributeSchema& schema, std::vector<int> widths,
                   std::uint64_t seed) {
  Rng rng(seed);
  return build_tree(schema, std::move(widths), rng);
}

PatTree build_tree(const AttributeSchema& schema, std::vector<int> widths,
                   Rng& rng) {
  PatTree tree(schema, std::move(widths));
  for (int j = 0; j < tree.depth(); ++j) {
    for (PatNode& n : tree.level(j)) {
      n.weight = rng.glorot(n.weight.rows(), n.weight.cols());
      for (std::size_t m = 0; m < n.centers.rows(); ++m) {
        const Vector u = rng.unit_vector(n.centers.cols());
        std::copy(u.begin(), u.end(), n.centers.row(m).begin());
      }
    }
  }
  return tree;
}

MembershipTrace propagate(const PatTree& tree, std::span<const double> input,
                          Routing routing) {
  if (static_cast<int>(input.size()) != tree.input_width()) {
    throw ShapeMismatch("propagate: input width " +
                        std::to_string(input.size()) + ", tree expects " +
                        std::to_string(tree.input_width()));
  }
  if (!(norm(input) > kNormFloor)) {
    throw DegenerateVector("propagate: input norm is below the floor");
  }
  const int depth = tree.depth();
  MembershipTrace t;
  t.routing = routing;
  t.input.assign(input.begin(), input.end());
  t.features.resize(depth);
  t.mass.resize(depth);
  t.similarity.resize(depth - 1);
  t.posterior.resize(depth - 1);

  for (int j = 0; j < depth; ++j) {
    const auto nodes = tree.level(j);
    t.features[j].resize(nodes.size());
    t.mass[j].assign(nodes.size(), 0.0);
    if (j == 0) t.mass[0][0] = 1.0;
    if (j + 1 < depth) {
      t.similarity[j].resize(nodes.size());
      t.posterior[j].resize(nodes.size());
    }
  }

  for (int j = 0; j < depth; ++j) {
    const auto nodes = tree.level(j);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const PatNode& n = nodes[k];
      const Vector& parent =
          j == 0 ? t.input
                 : t.features[j - 1][tree.parent_index(j, static_cast<int>(k))];
      t.features[j][k] = affine_forward(n.weight, n.bias, parent);
      if (n.is_leaf()) continue;

      const Vector& x = t.features[j][k];
      const double q = t.mass[j][k];
      Vector& sim = t.similarity[j][k];
      sim.resize(n.centers.rows());
      for (std::size_t m = 0; m < sim.size(); ++m) {
        sim[m] = cosine_sim(n.centers.row(m), x);
      }
      Vector p;
      if (routing == Routing::soft) {
        p = softmax(sim);
        for (double& v : p) v *= q;
      } else {
        p.assign(sim.size(), 0.0);
        p[argmax(sim)] = q;
      }
      for (std::size_t m = 0; m < p.size(); ++m) {
        t.mass[j + 1][tree.child_index(j, static_cast<int>(k),
                                       static_cast<int>(m))] = p[m];
      }
      t.posterior[j][k] = std::move(p);
    }
  }
  return t;
}

std::vector<int> gt_path_nodes(const PatTree& tree, const AttributePath& path,
                               int through_level) {
  if (through_level < 0 || through_level >= tree.depth()) {
    throw InvalidSchema("gt_path_nodes: level " +
                        std::to_string(through_level) + " out of range");
  }
  std::vector<int> nodes{0};
  int index = 0;
  for (int j = 0; j < through_level; ++j) {
    if (j >= static_cast<int>(path.size()) || !path[j].has_value()) {
      throw MissingLabel("attribute label missing at level " +
                         std::to_string(j));
    }
    const int states = tree.schema().states_at(j);
    const int y = *path[j];
    if (y < 0 || y >= states) {
      throw InvalidLabel("attribute label " + std::to_string(y) +
                         " out of range at level " + std::to_string(j));
    }
    index = index * states + y;
    nodes.push_back(index);
  }
  return nodes;
}

std::vector<int> gt_path_nodes(const PatTree& tree,
                               const AttributePath& path) {
  return gt_path_nodes(tree, path, tree.leaf_level());
}

namespace {

void check_cluster(const PatNode& node, std::optional<int> gt) {
  if (gt && (*gt < 0 || *gt >= node.cluster_count())) {
    throw InvalidLabel("cluster " + std::to_string(*gt) + " out of range");
  }
}

// Levels at which the sample takes part in the clustering terms.
int supervised_levels(const PatTree& tree, const AttributePath& path) {
  return std::min(labeled_depth(path), tree.leaf_level());
}

}  // namespace

double node_loss(const PatNode& node, const MembershipTrace& trace,
                 std::optional<int> gt) {
  if (node.is_leaf()) return 0.0;
  check_cluster(node, gt);
  const Vector& p = trace.posterior.at(node.level).at(node.index);
  const Vector& d = trace.similarity.at(node.level).at(node.index);
  double loss = 0.0;
  for (std::size_t m = 0; m < p.size(); ++m) {
    const bool pulled = gt && static_cast<std::size_t>(*gt) == m;
    loss += p[m] * (pulled ? 1.0 - d[m] : 1.0 + d[m]);
  }
  return loss;
}

double sample_pat_loss(const PatTree& tree, const MembershipTrace& trace,
                       const AttributePath& path) {
  const int levels = supervised_levels(tree, path);
  if (levels == 0) return 0.0;
  const std::vector<int> on_path = gt_path_nodes(tree, path, levels - 1);
  double loss = 0.0;
  for (int j = 0; j < levels; ++j) {
    for (const PatNode& n : tree.level(j)) {
      const std::optional<int> gt =
          n.index == on_path[j] ? path[j] : std::nullopt;
      loss += node_loss(n, trace, gt);
    }
  }
  return loss;
}

double pat_loss(const PatTree& tree, std::span<const MembershipTrace> traces,
                std::span<const AttributePath> paths) {
  if (traces.size() != paths.size()) {
    throw ShapeMismatch("pat_loss: traces and paths differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    total += sample_pat_loss(tree, traces[i], paths[i]);
  }
  return total;
}

Vector pat_backward_features(const PatNode& node, const MembershipTrace& trace,
                             std::optional<int> gt) {
  Vector out(node.weight.rows(), 0.0);
  if (node.is_leaf()) return out;
  check_cluster(node, gt);
  const Vector& p = trace.posterior.at(node.level).at(node.index);
  const Vector& x = trace.features.at(node.level).at(node.index);
  const double clusters = static_cast<double>(p.size());
  const double spread = gt ? 1.0 / (clusters - 1.0) : 1.0 / clusters;
  for (std::size_t m = 0; m < p.size(); ++m) {
    if (p[m] == 0.0) continue;
    const Vector dx = cosine_sim_grad_x(x, node.centers.row(m));
    const bool pulled = gt && static_cast<std::size_t>(*gt) == m;
    const double w = pulled ? -p[m] : spread * p[m];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * dx[i];
  }
  return out;
}

Matrix center_delta(const PatNode& node,
                    std::span<const MembershipTrace> traces,
                    std::span<const AttributePath> paths) {
  if (traces.size() != paths.size()) {
    throw ShapeMismatch("center_delta: traces and paths differ in length");
  }
  const std::size_t clusters = node.centers.rows();
  const std::size_t width = node.centers.cols();
  Matrix pull(clusters, width);
  Matrix push(clusters, width);
  std::vector<double> pull_count(clusters, 0.0);
  std::vector<double> push_count(clusters, 0.0);

  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (labeled_depth(paths[i]) <= node.level) continue;
    const int y = *paths[i][node.level];
    check_cluster(node, y);
    const Vector& p = traces[i].posterior.at(node.level).at(node.index);
    const Vector& x = traces[i].features.at(node.level).at(node.index);
    for (std::size_t m = 0; m < clusters; ++m) {
      const bool same = static_cast<std::size_t>(y) == m;
      (same ? pull_count : push_count)[m] += 1.0;
      if (p[m] == 0.0) continue;
      const Vector dc = cosine_sim_grad_c(x, node.centers.row(m));
      auto row = (same ? pull : push).row(m);
      for (std::size_t c = 0; c < width; ++c) row[c] += p[m] * dc[c];
    }
  }

  Matrix delta(clusters, width);
  for (std::size_t m = 0; m < clusters; ++m) {
    const double pull_norm = 1.0 + pull_count[m];
    const double push_norm = 1.0 + push_count[m];
    for (std::size_t c = 0; c < width; ++c) {
      delta(m, c) = -pull(m, c) / pull_norm + push(m, c) / push_norm;
    }
  }
  return delta;
}

void apply_center_update(PatNode& node, const Matrix& delta, double alpha) {
  if (delta.rows() != node.centers.rows() ||
      delta.cols() != node.centers.cols()) {
    throw ShapeMismatch("apply_center_update: delta shape differs");
  }
  for (std::size_t m = 0; m < node.centers.rows(); ++m) {
    auto c = node.centers.row(m);
    const auto d = delta.row(m);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= alpha * d[i];
    if (!(norm(c) > kNormFloor)) {
      throw DegenerateVector("center " + std::to_string(m) + " of node (" +
                             std::to_string(node.level) + ", " +
                             std::to_string(node.index) + ") collapsed");
    }
  }
}

NodeVectors zero_feature_errors(const PatTree& tree) {
  NodeVectors v(tree.depth());
  for (int j = 0; j < tree.depth(); ++j) {
    v[j].assign(tree.level(j).size(),
                Vector(static_cast<std::size_t>(tree.width(j)), 0.0));
  }
  return v;
}

NodeScalars zero_mass_errors(const PatTree& tree) {
  NodeScalars v(tree.depth());
  for (int j = 0; j < tree.depth(); ++j) v[j].assign(tree.level(j).size(), 0.0);
  return v;
}

TreeGradient zero_gradient(const PatTree& tree) {
  TreeGradient g(tree.depth());
  for (int j = 0; j < tree.depth(); ++j) {
    for (const PatNode& n : tree.level(j)) {
      g[j].push_back({Matrix(n.weight.rows(), n.weight.cols()),
                      Vector(n.bias.size(), 0.0),
                      Matrix(n.centers.rows(), n.centers.cols())});
    }
  }
  return g;
}

void add_pat_feature_errors(const PatTree& tree, const MembershipTrace& trace,
                            const AttributePath& path, double scale,
                            NodeVectors& feature_errors) {
  const int levels = supervised_levels(tree, path);
  if (levels == 0) return;
  const std::vector<int> on_path = gt_path_nodes(tree, path, levels - 1);
  for (int j = 0; j < levels; ++j) {
    for (const PatNode& n : tree.level(j)) {
      const std::optional<int> gt =
          n.index == on_path[j] ? path[j] : std::nullopt;
      const Vector e = pat_backward_features(n, trace, gt);
      Vector& dst = feature_errors[j][n.index];
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * e[i];
    }
  }
}

void mass_backward(const PatTree& tree, const MembershipTrace& trace,
                   NodeScalars& mass_errors, NodeVectors& feature_errors,
                   TreeGradient* grad) {
  for (int j = tree.leaf_level() - 1; j >= 0; --j) {
    for (const PatNode& n : tree.level(j)) {
      const int k = n.index;
      if (trace.routing == Routing::hard) {
        mass_errors[j][k] = 0.0;
        continue;
      }
      const Vector& p = trace.posterior[j][k];
      const Vector s = softmax(trace.similarity[j][k]);
      const std::size_t clusters = p.size();
      Vector g(clusters);
      double mean = 0.0;
      for (std::size_t m = 0; m < clusters; ++m) {
        g[m] = mass_errors[j + 1][tree.child_index(j, k, static_cast<int>(m))];
        mean += s[m] * g[m];
      }
      // p_m = q s_m, so dL/dq = sum_m g_m s_m and dL/dD_m = p_m (g_m - mean).
      mass_errors[j][k] = mean;
      const Vector& x = trace.features[j][k];
      Vector& fx = feature_errors[j][k];
      for (std::size_t m = 0; m < clusters; ++m) {
        const double dd = p[m] * (g[m] - mean);
        if (dd == 0.0) continue;
        const auto c = n.centers.row(m);
        const Vector gx = cosine_sim_grad_x(x, c);
        for (std::size_t i = 0; i < fx.size(); ++i) fx[i] += dd * gx[i];
        if (grad != nullptr) {
          const Vector gc = cosine_sim_grad_c(x, c);
          auto dst = (*grad)[j][k].centers.row(m);
          for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += dd * gc[i];
        }
      }
    }
  }
}

void feature_backward(const PatTree& tree, const MembershipTrace& trace,
                      NodeVectors& feature_errors, TreeGradient& grad) {
  for (int j = tree.leaf_level(); j >= 0; --j) {
    for (const PatNode& n : tree.level(j)) {
      const int k = n.index;
      const int parent = j == 0 ? 0 : tree.parent_index(j, k);
      const Vector& input = j == 0 ? trace.input : trace.features[j - 1][parent];
      std::span<double> grad_input;
      if (j > 0) grad_input = feature_errors[j - 1][parent];
      affine_backward_accumulate(n.weight, input, trace.features[j][k],
                                 feature_errors[j][k], Activation::rectifier,
                                 grad[j][k].weight, grad[j][k].bias,
                                 grad_input);
    }
  }
}

}  // namespace pat
