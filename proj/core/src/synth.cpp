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

#include "pat/synth.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <string>

#include "pat/errors.hpp"
#include "pat/math.hpp"
#include "pat/random.hpp"

namespace pat {

void SynthConfig::validate() const {
  if (classes < 2) throw InvalidConfig("classes must be >= 2");
  if (input_width < 1) throw InvalidConfig("input_width must be >= 1");
  if (!(attribute_separation > 0.0) || !(class_separation > 0.0)) {
    throw InvalidConfig("separations must be positive");
  }
  if (!(noise_sigma >= 0.0)) throw InvalidConfig("noise_sigma must be >= 0");
  if (!(class_sharing >= 0.0 && class_sharing <= 1.0)) {
    throw InvalidConfig("class_sharing must be in [0, 1]");
  }
  if (!(state_skew > 0.0)) throw InvalidConfig("state_skew must be positive");
  if (n_train < 1 || n_test < 1) {
    throw InvalidConfig("n_train and n_test must be >= 1");
  }
}

int combination_count(const AttributeSchema& schema) {
  return schema.leaf_count();
}

int combination_index(const AttributeSchema& schema,
                      const AttributePath& path) {
  int index = 0;
  for (int j = 0; j < schema.attribute_count(); ++j) {
    if (j >= static_cast<int>(path.size()) || !path[j]) {
      throw MissingLabel("combination_index needs every attribute label");
    }
    index = index * schema.states_at(j) + *path[j];
  }
  return index;
}

AttributePath combination_path(const AttributeSchema& schema, int index) {
  AttributePath path(static_cast<std::size_t>(schema.attribute_count()));
  for (int j = schema.attribute_count() - 1; j >= 0; --j) {
    const int s = schema.states_at(j);
    path[j] = index % s;
    index /= s;
  }
  return path;
}

SynthData generate(const SynthConfig& config) {
  config.validate();
  const AttributeSchema& schema = config.schema;
  const int levels = schema.attribute_count();
  const int combos = combination_count(schema);
  const auto dim = static_cast<std::size_t>(config.input_width);
  Rng rng(config.seed);

  // One direction per (level, prefix node). Scaling each by
  // sep / sqrt(2 L) puts combinations that differ at the top level about
  // `attribute_separation` apart.
  const double step =
      levels == 0 ? 0.0
                  : config.attribute_separation /
                        std::sqrt(2.0 * static_cast<double>(levels));
  std::vector<std::vector<Vector>> prefix_dirs(levels);
  for (int j = 0; j < levels; ++j) {
    const int prefixes = schema.nodes_at(j + 1);
    for (int p = 0; p < prefixes; ++p) {
      prefix_dirs[j].push_back(rng.unit_vector(dim));
    }
  }

  SynthData out;
  out.anchors.assign(combos, Vector(dim, 0.0));
  for (int a = 0; a < combos; ++a) {
    const AttributePath path = combination_path(schema, a);
    int prefix = 0;
    for (int j = 0; j < levels; ++j) {
      prefix = prefix * schema.states_at(j) + *path[j];
      const Vector& u = prefix_dirs[j][prefix];
      for (std::size_t i = 0; i < dim; ++i) out.anchors[a][i] += step * u[i];
    }
  }

  const double s = config.class_sharing;
  std::vector<Vector> shared;
  if (s > 0.0) {
    for (int e = 0; e < config.classes; ++e) shared.push_back(rng.unit_vector(dim));
  }
  std::vector<std::vector<Vector>> offsets(combos);
  for (int a = 0; a < combos; ++a) {
    for (int e = 0; e < config.classes; ++e) {
      Vector v = rng.unit_vector(dim);
      if (s > 0.0) {
        for (std::size_t i = 0; i < dim; ++i) {
          v[i] = s * shared[e][i] + (1.0 - s) * v[i];
        }
      }
      double n = norm(v);
      if (n < kNormFloor) {
        v = shared[e];
        n = 1.0;
      }
      for (double& x : v) x *= config.class_separation / n;
      offsets[a].push_back(std::move(v));
    }
  }

  std::vector<double> combo_weight(static_cast<std::size_t>(combos), 1.0);
  for (int a = 0; a < combos; ++a) {
    for (const std::optional<int>& state : combination_path(schema, a)) {
      combo_weight[a] *= std::pow(config.state_skew, *state);
    }
  }
  std::discrete_distribution<int> pick_combo(combo_weight.begin(),
                                             combo_weight.end());

  std::int64_t next_id = 0;
  auto draw = [&](int n) {
    Dataset d;
    d.input_width = config.input_width;
    d.attribute_levels = levels;
    d.samples.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const int a = pick_combo(rng.engine());
      const int e = static_cast<int>(
          rng.below(static_cast<std::uint64_t>(config.classes)));
      Sample s;
      s.id = next_id++;
      s.features.resize(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        const double noise =
            config.noise_sigma > 0.0 ? config.noise_sigma * rng.normal() : 0.0;
        s.features[k] = out.anchors[a][k] + offsets[a][e][k] + noise;
      }
      s.attributes = combination_path(schema, a);
      s.label = e;
      d.samples.push_back(std::move(s));
    }
    return d;
  };
  out.train = draw(config.n_train);
  out.test = draw(config.n_test);
  return out;
}

}  // namespace pat
