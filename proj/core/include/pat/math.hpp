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

// Dense vector/matrix primitives shared by the tree, the classifier head and
// the baselines. Everything is 64-bit floating point and row-major.
//
// The cosine similarity D(a, b) = a.b / (|a| |b|) and its two partial
// derivatives are the geometric core of the clustering loss; the affine
// kernels realize the per-node fully connected layers.

#ifndef PAT_MATH_HPP_
#define PAT_MATH_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace pat {

using Vector = std::vector<double>;

// Norms at or below this floor are treated as degenerate.
inline constexpr double kNormFloor = 1e-12;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  std::span<double> values() & noexcept { return values_; }
  std::span<const double> values() const& noexcept { return values_; }
  // A span into a temporary would dangle.
  std::span<const double> values() && = delete;

  static Matrix identity(std::size_t n);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

enum class Activation { rectifier, identity };

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
bool all_finite(std::span<const double> a);

// D(a, b), clamped to [-1, 1]. Throws DegenerateVector when either norm is at
// or below kNormFloor and ShapeMismatch on length mismatch.
double cosine_sim(std::span<const double> a, std::span<const double> b);

// dD(x, c)/dx = c / (|c| |x|) - (c.x / (|c| |x|^3)) x.
Vector cosine_sim_grad_x(std::span<const double> x, std::span<const double> c);

// dD(x, c)/dc = x / (|x| |c|) - (x.c / (|x| |c|^3)) c.
Vector cosine_sim_grad_c(std::span<const double> x, std::span<const double> c);

// act(W x + b). Hidden layers use the rectifier, classifier logits identity.
Vector affine_forward(const Matrix& weight, std::span<const double> bias,
                      std::span<const double> input,
                      Activation act = Activation::rectifier);

struct AffineGradient {
  Matrix weight;
  Vector bias;
  Vector input;
};

// Exact partials of affine_forward given the upstream gradient with respect
// to its output. `output` is the forward result; the rectifier derivative is
// taken as 1 where output > 0 and 0 elsewhere.
AffineGradient affine_backward(const Matrix& weight,
                               std::span<const double> input,
                               std::span<const double> output,
                               std::span<const double> grad_output,
                               Activation act = Activation::rectifier);

// Accumulating form of affine_backward used inside batch loops. Adds into
// grad_weight/grad_bias; grad_input (may be empty to skip) is also added to.
void affine_backward_accumulate(const Matrix& weight,
                                std::span<const double> input,
                                std::span<const double> output,
                                std::span<const double> grad_output,
                                Activation act, Matrix& grad_weight,
                                std::span<double> grad_bias,
                                std::span<double> grad_input);

// Max-subtracted softmax.
Vector softmax(std::span<const double> v);

// Index of the largest element, ties toward the lowest index.
std::size_t argmax(std::span<const double> v);

}  // namespace pat

#endif  // PAT_MATH_HPP_
