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

#include "pat/math.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pat/errors.hpp"

namespace pat {
namespace {

void require_same_length(std::span<const double> a, std::span<const double> b,
                         const char* where) {
  if (a.size() != b.size()) {
    throw ShapeMismatch(std::string(where) + ": length " +
                        std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()));
  }
}

double checked_norm(std::span<const double> v, const char* where) {
  const double n = norm(v);
  if (!(n > kNormFloor)) {
    throw DegenerateVector(std::string(where) + ": vector norm " +
                           std::to_string(n) + " is below the floor");
  }
  return n;
}

// Shared body of the two gradient kernels: d/da of D(a, b).
Vector cosine_partial(std::span<const double> a, std::span<const double> b,
                      const char* where) {
  require_same_length(a, b, where);
  const double na = checked_norm(a, where);
  const double nb = checked_norm(b, where);
  const double inv = 1.0 / (nb * na);
  const double coeff = dot(b, a) / (nb * na * na * na);
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = b[i] * inv - coeff * a[i];
  }
  return out;
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(),
                     [](double v) { return std::isfinite(v); });
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b, "cosine_sim");
  const double na = checked_norm(a, "cosine_sim");
  const double nb = checked_norm(b, "cosine_sim");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

Vector cosine_sim_grad_x(std::span<const double> x,
                         std::span<const double> c) {
  return cosine_partial(x, c, "cosine_sim_grad_x");
}

Vector cosine_sim_grad_c(std::span<const double> x,
                         std::span<const double> c) {
  return cosine_partial(c, x, "cosine_sim_grad_c");
}

Vector affine_forward(const Matrix& weight, std::span<const double> bias,
                      std::span<const double> input, Activation act) {
  if (weight.cols() != input.size() || weight.rows() != bias.size()) {
    throw ShapeMismatch("affine_forward: weight " +
                        std::to_string(weight.rows()) + "x" +
                        std::to_string(weight.cols()) + ", bias " +
                        std::to_string(bias.size()) + ", input " +
                        std::to_string(input.size()));
  }
  Vector out(weight.rows());
  for (std::size_t r = 0; r < weight.rows(); ++r) {
    const auto w = weight.row(r);
    double s = bias[r];
    for (std::size_t c = 0; c < w.size(); ++c) s += w[c] * input[c];
    out[r] = (act == Activation::rectifier && !(s > 0.0)) ? 0.0 : s;
  }
  return out;
}

void affine_backward_accumulate(const Matrix& weight,
                                std::span<const double> input,
                                std::span<const double> output,
                                std::span<const double> grad_output,
                                Activation act, Matrix& grad_weight,
                                std::span<double> grad_bias,
                                std::span<double> grad_input) {
  const std::size_t rows = weight.rows();
  const std::size_t cols = weight.cols();
  if (input.size() != cols || output.size() != rows ||
      grad_output.size() != rows || grad_weight.rows() != rows ||
      grad_weight.cols() != cols || grad_bias.size() != rows ||
      (!grad_input.empty() && grad_input.size() != cols)) {
    throw ShapeMismatch("affine_backward: incompatible shapes");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    double g = grad_output[r];
    if (act == Activation::rectifier && !(output[r] > 0.0)) continue;
    if (g == 0.0) continue;
    grad_bias[r] += g;
    auto gw = grad_weight.row(r);
    for (std::size_t c = 0; c < cols; ++c) gw[c] += g * input[c];
    if (!grad_input.empty()) {
      const auto w = weight.row(r);
      for (std::size_t c = 0; c < cols; ++c) grad_input[c] += w[c] * g;
    }
  }
}

AffineGradient affine_backward(const Matrix& weight,
                               std::span<const double> input,
                               std::span<const double> output,
                               std::span<const double> grad_output,
                               Activation act) {
  AffineGradient g{Matrix(weight.rows(), weight.cols()),
                   Vector(weight.rows(), 0.0), Vector(weight.cols(), 0.0)};
  affine_backward_accumulate(weight, input, output, grad_output, act,
                             g.weight, g.bias, g.input);
  return g;
}

Vector softmax(std::span<const double> v) {
  Vector out(v.size());
  if (v.empty()) return out;
  const double top = *std::max_element(v.begin(), v.end());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - top);
    total += out[i];
  }
  for (double& o : out) o /= total;
  return out;
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(
      std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

}  // namespace pat
