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

#ifndef PAT_RANDOM_HPP_
#define PAT_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "pat/math.hpp"

namespace pat {

// Seeded source for every random draw in the library. All randomness flows
// from explicit seeds; nothing reads the clock or std::random_device.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::initializer_list<std::uint64_t> seeds) {
    std::seed_seq seq(seeds.begin(), seeds.end());
    engine_.seed(seq);
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  // Uniformly distributed direction on the unit sphere.
  Vector unit_vector(std::size_t dim) {
    Vector v(dim);
    double n = 0.0;
    do {
      for (double& x : v) x = normal();
      n = norm(v);
    } while (!(n > 1e-6));
    for (double& x : v) x /= n;
    return v;
  }

  // Glorot-uniform weights, U(-s, s) with s = sqrt(6 / (fan_in + fan_out)).
  Matrix glorot(std::size_t fan_out, std::size_t fan_in) {
    Matrix m(fan_out, fan_in);
    const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& x : m.values()) x = uniform(-s, s);
    return m;
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pat

#endif  // PAT_RANDOM_HPP_
