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

// Verification oracles.
//
// finite_diff_grad is the central-difference estimator used by the gradient
// checks. oracle_pat_formulas recomputes the clustering loss, its literal
// feature error and the center rule with deliberately naive nested loops and
// private helpers, sharing no arithmetic with attribute_tree.cpp, so the two
// routes can be compared against each other.

#ifndef PAT_VERIFY_HPP_
#define PAT_VERIFY_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pat/attribute_tree.hpp"
#include "pat/model.hpp"

namespace pat {

// (f(p + h) - f(p - h)) / 2h per coordinate. Parameters are perturbed in
// place and restored before returning.
Vector finite_diff_grad(const std::function<double()>& loss,
                        std::span<double> parameters, double h);

// |a - b| / max(|a|, |b|, floor).
double relative_error(double a, double b, double floor);

// max_i |a_i - b_i| / max(max_i |a_i|, max_i |b_i|), 0 when both are zero.
double relative_error(std::span<const double> a, std::span<const double> b);

struct OracleResult {
  double loss = 0.0;
  // [sample][level][node]; non-leaf levels only.
  std::vector<NodeVectors> feature_errors;
  // [level][node]; non-leaf levels only.
  std::vector<std::vector<Matrix>> center_deltas;
};

OracleResult oracle_pat_formulas(const PatTree& tree,
                                 std::span<const MembershipTrace> traces,
                                 std::span<const AttributePath> paths);

struct OracleComparison {
  double loss = 0.0;
  double feature_errors = 0.0;
  double center_deltas = 0.0;

  double worst() const;
};

// Library outputs against the oracle, as relative errors.
OracleComparison compare_with_oracle(const PatTree& tree,
                                     std::span<const MembershipTrace> traces,
                                     std::span<const AttributePath> paths);

// Random tree (schema up to [(2),(3)], widths <= 16), random inputs and
// partially labeled paths for batch sizes up to 8, all drawn from `seed`.
struct OracleCase {
  PatTree tree;
  std::vector<MembershipTrace> traces;
  std::vector<AttributePath> paths;
};
OracleCase random_oracle_case(std::uint64_t seed);

inline constexpr double kGradCheckFloor = 1e-6;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

// Analytic marginal softmax gradient against central differences over every
// parameter of the model (node weights, biases, centers, classifiers).
GradCheckResult check_marginal_gradient(PatModel model,
                                        std::span<const Vector> inputs,
                                        std::span<const int> labels, double h);

// The standard small check: input width 4, one two-state attribute, three
// classes, a handful of random samples.
GradCheckResult run_gradcheck(std::uint64_t seed, double h = 1e-5);

struct FeatureErrorDiagnostic {
  int level = 0;
  int index = 0;
  // Literal feature error vs. the finite-difference gradient of node_loss
  // with respect to the node features.
  double relative_difference = 0.0;
  double cosine = 0.0;
};

// Diagnostic only; training always uses the literal feature error.
std::vector<FeatureErrorDiagnostic> feature_error_diagnostic(
    const PatTree& tree, const MembershipTrace& trace,
    const AttributePath& path, double h = 1e-6);

}  // namespace pat

#endif  // PAT_VERIFY_HPP_
