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
#include <limits>

#include <gtest/gtest.h>

#include "pat/errors.hpp"
#include "pat/math.hpp"
#include "pat/random.hpp"

namespace pat {
namespace {

TEST(Math, CosineOfParallelAndOrthogonal) {
  EXPECT_DOUBLE_EQ(cosine_sim(Vector{1, 0}, Vector{3, 0}), 1.0);
  EXPECT_DOUBLE_EQ(cosine_sim(Vector{1, 0}, Vector{0, 2}), 0.0);
  EXPECT_DOUBLE_EQ(cosine_sim(Vector{1, 1}, Vector{-1, -1}), -1.0);
}

TEST(Math, CosineRejectsZeroAndMismatchedVectors) {
  EXPECT_THROW(cosine_sim(Vector{0, 0}, Vector{1, 0}), DegenerateVector);
  EXPECT_THROW(cosine_sim(Vector{1, 0}, Vector{1, 0, 0}), ShapeMismatch);
}

TEST(Math, CosineStaysInRange) {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    Vector a = rng.unit_vector(5), b = rng.unit_vector(5);
    for (double& v : a) v *= 1e6;
    const double c = cosine_sim(a, b);
    EXPECT_LE(c, 1.0);
    EXPECT_GE(c, -1.0);
  }
}

TEST(Math, CosineGradientsMatchFiniteDifferences) {
  Rng rng(5);
  const double h = 1e-6;
  for (int t = 0; t < 20; ++t) {
    Vector x = rng.unit_vector(4), c = rng.unit_vector(4);
    for (double& v : x) v *= 2.5;
    const Vector gx = cosine_sim_grad_x(x, c);
    const Vector gc = cosine_sim_grad_c(x, c);
    for (std::size_t i = 0; i < x.size(); ++i) {
      Vector xp = x, xm = x, cp = c, cm = c;
      xp[i] += h;
      xm[i] -= h;
      cp[i] += h;
      cm[i] -= h;
      EXPECT_NEAR(gx[i], (cosine_sim(xp, c) - cosine_sim(xm, c)) / (2 * h), 1e-8);
      EXPECT_NEAR(gc[i], (cosine_sim(x, cp) - cosine_sim(x, cm)) / (2 * h), 1e-8);
    }
  }
}

TEST(Math, CosineGradientVanishesWhenAligned) {
  const Vector g = cosine_sim_grad_c(Vector{1, 0}, Vector{1, 0});
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 0.0);
}

TEST(Math, SoftmaxWorkedValues) {
  const Vector p = softmax(Vector{1.0, 0.0});
  EXPECT_NEAR(p[0], 0.7310585786300049, 1e-15);
  EXPECT_NEAR(p[1], 0.2689414213699951, 1e-15);
}

TEST(Math, SoftmaxIsShiftInvariantAndStable) {
  const Vector a = softmax(Vector{1.0, 2.0, 3.0});
  const Vector b = softmax(Vector{1001.0, 1002.0, 1003.0});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-15);
  const Vector c = softmax(Vector{-1e300, 0.0});
  EXPECT_TRUE(all_finite(c));
  EXPECT_DOUBLE_EQ(c[1], 1.0);
}

TEST(Math, ArgmaxBreaksTiesLow) {
  EXPECT_EQ(argmax(Vector{0.2, 0.5, 0.5}), 1u);
  EXPECT_EQ(argmax(Vector{1.0, 1.0}), 0u);
}

TEST(Math, AffineForwardAppliesRectifier) {
  Matrix w(2, 2);
  w(0, 0) = 1.0;
  w(1, 1) = -1.0;
  const Vector y = affine_forward(w, Vector{0.5, 0.0}, Vector{2.0, 3.0});
  EXPECT_DOUBLE_EQ(y[0], 2.5);
  EXPECT_DOUBLE_EQ(y[1], 0.0);
  const Vector z =
      affine_forward(w, Vector{0.5, 0.0}, Vector{2.0, 3.0}, Activation::identity);
  EXPECT_DOUBLE_EQ(z[1], -3.0);
  EXPECT_THROW(affine_forward(w, Vector{0, 0}, Vector{1, 2, 3}), ShapeMismatch);
}

TEST(Math, AffineBackwardMatchesFiniteDifferences) {
  Rng rng(8);
  const Matrix w = rng.glorot(3, 4);
  const Vector b{0.1, -0.2, 0.3};
  const Vector x{0.5, -1.0, 2.0, 0.25};
  const Vector g{1.0, -2.0, 0.5};
  const Vector y = affine_forward(w, b, x);
  const AffineGradient grad = affine_backward(w, x, y, g);
  auto objective = [&](const Matrix& ww, const Vector& bb, const Vector& xx) {
    return dot(g, affine_forward(ww, bb, xx));
  };
  const double h = 1e-6;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    EXPECT_NEAR(grad.input[i], (objective(w, b, xp) - objective(w, b, xm)) / (2 * h),
                1e-8);
  }
  for (std::size_t r = 0; r < w.rows(); ++r) {
    for (std::size_t c = 0; c < w.cols(); ++c) {
      Matrix wp = w, wm = w;
      wp(r, c) += h;
      wm(r, c) -= h;
      EXPECT_NEAR(grad.weight(r, c),
                  (objective(wp, b, x) - objective(wm, b, x)) / (2 * h), 1e-8);
    }
  }
}

TEST(Math, BackwardAccumulateAddsToExisting) {
  const Matrix w = Matrix::identity(2);
  const Vector x{1.0, 2.0}, y = affine_forward(w, Vector{0, 0}, x);
  Matrix gw(2, 2, 1.0);
  Vector gb{1.0, 1.0}, gx{1.0, 1.0};
  affine_backward_accumulate(w, x, y, Vector{1.0, 0.0}, Activation::rectifier,
                             gw, gb, gx);
  EXPECT_DOUBLE_EQ(gw(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(gw(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(gw(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(gb[0], 2.0);
  EXPECT_DOUBLE_EQ(gx[0], 2.0);
  EXPECT_DOUBLE_EQ(gx[1], 1.0);
}

TEST(Random, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  EXPECT_EQ(a.uniform(0.0, 1.0), b.uniform(0.0, 1.0));
  EXPECT_NE(Rng(42).uniform(0.0, 1.0), c.uniform(0.0, 1.0));
  EXPECT_EQ(Rng({1, 2}).normal(), Rng({1, 2}).normal());
}

TEST(Random, GlorotBounds) {
  Rng rng(1);
  const Matrix m = rng.glorot(64, 16);
  const double s = std::sqrt(6.0 / 80.0);
  for (double v : m.values()) {
    EXPECT_LT(std::abs(v), s);
  }
  EXPECT_NEAR(norm(rng.unit_vector(7)), 1.0, 1e-15);
}

}  // namespace
}  // namespace pat
