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

#include "pat/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pat/errors.hpp"
#include "pat/expression_head.hpp"
#include "pat/random.hpp"

namespace pat {

Vector finite_diff_grad(const std::function<double()>& loss,
                        std::span<double> parameters, double h) {
  if (!(h > 0.0)) throw InvalidConfig("finite difference step must be > 0");
  Vector grad(parameters.size());
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    const double saved = parameters[i];
    parameters[i] = saved + h;
    const double up = loss();
    parameters[i] = saved - h;
    const double down = loss();
    parameters[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double relative_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

double relative_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  if (diff == 0.0) return 0.0;
  return diff / scale;
}

// --- Naive oracle ----------------------------------------------------------

namespace {

double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = s + a[i] * b[i];
  return s;
}

double naive_cos(const std::vector<double>& a, const std::vector<double>& b) {
  return naive_dot(a, b) /
         (std::sqrt(naive_dot(a, a)) * std::sqrt(naive_dot(b, b)));
}

// d/du of cos(u, v).
std::vector<double> naive_cos_grad(const std::vector<double>& u,
                                   const std::vector<double>& v) {
  const double nu = std::sqrt(naive_dot(u, u));
  const double nv = std::sqrt(naive_dot(v, v));
  const double uv = naive_dot(u, v);
  std::vector<double> g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    g[i] = v[i] / (nv * nu) - uv / (nv * nu * nu * nu) * u[i];
  }
  return g;
}

std::vector<double> center_row(const PatNode& n, int m) {
  std::vector<double> c(n.centers.cols());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = n.centers(m, i);
  return c;
}

// Soft posterior of sample at node, straight from exp without shifting.
std::vector<double> naive_posterior(const PatNode& n,
                                    const std::vector<double>& x, double q) {
  const int clusters = static_cast<int>(n.centers.rows());
  std::vector<double> e(clusters);
  double z = 0.0;
  for (int m = 0; m < clusters; ++m) {
    e[m] = std::exp(naive_cos(center_row(n, m), x));
    z = z + e[m];
  }
  for (int m = 0; m < clusters; ++m) e[m] = q * e[m] / z;
  return e;
}

int leading_labels(const AttributePath& path) {
  int d = 0;
  for (const auto& y : path) {
    if (!y) break;
    ++d;
  }
  return d;
}

}  // namespace

OracleResult oracle_pat_formulas(const PatTree& tree,
                                 std::span<const MembershipTrace> traces,
                                 std::span<const AttributePath> paths) {
  const int inner_levels = tree.depth() - 1;
  OracleResult r;
  r.feature_errors.resize(traces.size());
  r.center_deltas.resize(inner_levels);

  for (std::size_t i = 0; i < traces.size(); ++i) {
    const int levels = std::min(leading_labels(paths[i]), inner_levels);
    r.feature_errors[i].resize(inner_levels);
    int gt_node = 0;
    for (int j = 0; j < inner_levels; ++j) {
      const auto nodes = tree.level(j);
      r.feature_errors[i][j].assign(
          nodes.size(), Vector(static_cast<std::size_t>(tree.width(j)), 0.0));
      if (j >= levels) continue;
      if (j > 0) gt_node = gt_node * tree.schema().states_at(j - 1) + *paths[i][j - 1];
      const int y = *paths[i][j];
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const PatNode& n = nodes[k];
        const std::vector<double>& x = traces[i].features[j][k];
        const std::vector<double> p = naive_posterior(n, x, traces[i].mass[j][k]);
        const int clusters = static_cast<int>(p.size());
        const bool on_path = static_cast<int>(k) == gt_node;
        Vector& fe = r.feature_errors[i][j][k];
        for (int m = 0; m < clusters; ++m) {
          const std::vector<double> c = center_row(n, m);
          const double d = naive_cos(x, c);
          const std::vector<double> g = naive_cos_grad(x, c);
          double w;
          if (on_path && m == y) {
            r.loss = r.loss + p[m] * (1.0 - d);
            w = -p[m];
          } else if (on_path) {
            r.loss = r.loss + p[m] * (1.0 + d);
            w = p[m] / (clusters - 1);
          } else {
            r.loss = r.loss + p[m] * (1.0 + d);
            w = p[m] / clusters;
          }
          for (std::size_t t = 0; t < fe.size(); ++t) fe[t] = fe[t] + w * g[t];
        }
      }
    }
  }

  for (int j = 0; j < inner_levels; ++j) {
    for (const PatNode& n : tree.level(j)) {
      const int clusters = static_cast<int>(n.centers.rows());
      const std::size_t width = n.centers.cols();
      Matrix delta(static_cast<std::size_t>(clusters), width);
      for (int m = 0; m < clusters; ++m) {
        const std::vector<double> c = center_row(n, m);
        std::vector<double> pull(width, 0.0), push(width, 0.0);
        double n_pull = 0.0, n_push = 0.0;
        for (std::size_t i = 0; i < traces.size(); ++i) {
          if (leading_labels(paths[i]) <= j) continue;
          const std::vector<double>& x = traces[i].features[j][n.index];
          const double p =
              naive_posterior(n, x, traces[i].mass[j][n.index])[m];
          const std::vector<double> g = naive_cos_grad(c, x);
          if (*paths[i][j] == m) {
            n_pull = n_pull + 1.0;
            for (std::size_t t = 0; t < width; ++t) pull[t] = pull[t] + p * g[t];
          } else {
            n_push = n_push + 1.0;
            for (std::size_t t = 0; t < width; ++t) push[t] = push[t] + p * g[t];
          }
        }
        for (std::size_t t = 0; t < width; ++t) {
          delta(m, t) = -pull[t] / (1.0 + n_pull) + push[t] / (1.0 + n_push);
        }
      }
      r.center_deltas[j].push_back(std::move(delta));
    }
  }
  return r;
}

double OracleComparison::worst() const {
  return std::max({loss, feature_errors, center_deltas});
}

OracleComparison compare_with_oracle(const PatTree& tree,
                                     std::span<const MembershipTrace> traces,
                                     std::span<const AttributePath> paths) {
  const OracleResult o = oracle_pat_formulas(tree, traces, paths);
  OracleComparison c;
  const double loss = pat_loss(tree, traces, paths);
  c.loss = loss == o.loss ? 0.0 : relative_error(loss, o.loss, 0.0);

  for (std::size_t i = 0; i < traces.size(); ++i) {
    const int levels = std::min(labeled_depth(paths[i]), tree.leaf_level());
    std::vector<int> on_path;
    if (levels > 0) on_path = gt_path_nodes(tree, paths[i], levels - 1);
    for (int j = 0; j < tree.leaf_level(); ++j) {
      for (const PatNode& n : tree.level(j)) {
        Vector lib(static_cast<std::size_t>(tree.width(j)), 0.0);
        if (j < levels) {
          const std::optional<int> gt =
              n.index == on_path[j] ? paths[i][j] : std::nullopt;
          lib = pat_backward_features(n, traces[i], gt);
        }
        c.feature_errors =
            std::max(c.feature_errors,
                     relative_error(lib, o.feature_errors[i][j][n.index]));
      }
    }
  }
  for (int j = 0; j < tree.leaf_level(); ++j) {
    for (const PatNode& n : tree.level(j)) {
      const Matrix lib = center_delta(n, traces, paths);
      c.center_deltas =
          std::max(c.center_deltas,
                   relative_error(lib.values(),
                                  o.center_deltas[j][n.index].values()));
    }
  }
  return c;
}

OracleCase random_oracle_case(std::uint64_t seed) {
  Rng rng{seed, 0x0AC1EULL};
  static const std::vector<std::vector<int>> kShapes = {
      {2}, {3}, {2, 2}, {2, 3}, {3, 2}};
  const auto& shape = kShapes[rng.below(kShapes.size())];
  std::vector<Attribute> attrs;
  for (std::size_t j = 0; j < shape.size(); ++j) {
    attrs.push_back({"a" + std::to_string(j), shape[j]});
  }
  const AttributeSchema schema(attrs);
  std::vector<int> widths;
  for (int j = 0; j <= schema.depth(); ++j) {
    widths.push_back(2 + static_cast<int>(rng.below(15)));
  }
  OracleCase oc{build_tree(schema, widths, rng), {}, {}};
  // Nonzero biases so that every rectifier sees both signs.
  for (int j = 0; j < oc.tree.depth(); ++j) {
    for (PatNode& n : oc.tree.level(j)) {
      for (double& b : n.bias) b = rng.uniform(0.05, 0.5);
    }
  }
  const int batch = 1 + static_cast<int>(rng.below(8));
  for (int i = 0; i < batch; ++i) {
    // Narrow rectifier layers can switch off completely; such inputs have no
    // cosine geometry and are redrawn.
    for (int attempt = 0;; ++attempt) {
      Vector x(static_cast<std::size_t>(widths[0]));
      for (double& v : x) v = rng.normal();
      try {
        oc.traces.push_back(propagate(oc.tree, x));
        break;
      } catch (const DegenerateVector&) {
        if (attempt == 1000) throw;
      }
    }
    AttributePath path(shape.size());
    for (std::size_t j = 0; j < shape.size(); ++j) {
      if (rng.uniform(0.0, 1.0) < 0.15) continue;
      path[j] = static_cast<int>(rng.below(static_cast<std::uint64_t>(shape[j])));
    }
    oc.paths.push_back(std::move(path));
  }
  return oc;
}

// --- Gradient check --------------------------------------------------------

GradCheckResult check_marginal_gradient(PatModel model,
                                        std::span<const Vector> inputs,
                                        std::span<const int> labels,
                                        double h) {
  ModelGradient analytic = marginal_gradient(model, inputs, labels);
  auto params = parameter_blocks(model);
  auto grads = gradient_blocks(analytic);
  GradCheckResult r;
  for (std::size_t b = 0; b < params.size(); ++b) {
    const Vector numeric = finite_diff_grad(
        [&] { return marginal_loss(model, inputs, labels); },
        params[b].values, h);
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      ++r.coordinates;
      const double a = grads[b].values[i];
      const double err = relative_error(a, numeric[i], kGradCheckFloor);
      if (err > r.max_rel_error || r.worst_parameter.empty()) {
        r.max_rel_error = err;
        r.worst_parameter = params[b].name;
        r.worst_index = i;
        r.analytic = a;
        r.numeric = numeric[i];
      }
    }
  }
  return r;
}

GradCheckResult run_gradcheck(std::uint64_t seed, double h) {
  const AttributeSchema schema({{"a", 2}});
  PatModel model = make_model(schema, {4, 6, 5}, 3, seed);
  Rng rng{seed, 0x6C4ECULL};
  for (int j = 0; j < model.tree.depth(); ++j) {
    for (PatNode& n : model.tree.level(j)) {
      for (double& b : n.bias) b = rng.uniform(0.05, 0.3);
    }
  }
  for (LeafClassifier& c : model.head.leaves()) {
    for (double& b : c.bias) b = rng.uniform(-0.3, 0.3);
  }
  std::vector<Vector> inputs;
  std::vector<int> labels;
  while (inputs.size() < 6) {
    Vector x(4);
    for (double& v : x) v = rng.normal();
    try {
      propagate(model.tree, x);
    } catch (const DegenerateVector&) {
      continue;
    }
    inputs.push_back(std::move(x));
    labels.push_back(static_cast<int>(rng.below(3)));
  }
  return check_marginal_gradient(std::move(model), inputs, labels, h);
}

std::vector<FeatureErrorDiagnostic> feature_error_diagnostic(
    const PatTree& tree, const MembershipTrace& trace,
    const AttributePath& path, double h) {
  std::vector<FeatureErrorDiagnostic> out;
  const int levels = std::min(labeled_depth(path), tree.leaf_level());
  if (levels == 0) return out;
  const std::vector<int> on_path = gt_path_nodes(tree, path, levels - 1);
  for (int j = 0; j < levels; ++j) {
    for (const PatNode& n : tree.level(j)) {
      const std::optional<int> gt =
          n.index == on_path[j] ? path[j] : std::nullopt;
      const double q = trace.mass[j][n.index];
      Vector x = trace.features[j][n.index];
      auto local_loss = [&] {
        Vector sim(n.centers.rows());
        for (std::size_t m = 0; m < sim.size(); ++m) {
          sim[m] = cosine_sim(n.centers.row(m), x);
        }
        const Vector s = softmax(sim);
        double l = 0.0;
        for (std::size_t m = 0; m < sim.size(); ++m) {
          const bool pulled = gt && static_cast<std::size_t>(*gt) == m;
          l += q * s[m] * (pulled ? 1.0 - sim[m] : 1.0 + sim[m]);
        }
        return l;
      };
      const Vector numeric = finite_diff_grad(local_loss, x, h);
      const Vector literal = pat_backward_features(n, trace, gt);
      FeatureErrorDiagnostic d;
      d.level = j;
      d.index = n.index;
      d.relative_difference = relative_error(literal, numeric);
      const double nl = norm(literal);
      const double nn = norm(numeric);
      d.cosine = (nl > 0.0 && nn > 0.0) ? dot(literal, numeric) / (nl * nn) : 0.0;
      out.push_back(d);
    }
  }
  return out;
}

}  // namespace pat
