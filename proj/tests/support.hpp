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

// Small builders shared by the unit tests.

#ifndef PAT_TESTS_SUPPORT_HPP_
#define PAT_TESTS_SUPPORT_HPP_

#include <cstdint>
#include <vector>

#include "pat/attribute_tree.hpp"
#include "pat/dataset.hpp"
#include "pat/math.hpp"
#include "pat/model.hpp"

namespace pat::testing {

// Root with identity weights, centers c1 = [1, 0] and c2 = [0, 1], two
// identity leaves. Feeding [1, 0] puts the root feature on c1.
inline PatTree worked_example_tree() {
  PatTree tree(AttributeSchema({{"g", 2}}), {2, 2, 2});
  PatNode& root = tree.node(0, 0);
  root.weight = Matrix::identity(2);
  root.centers(0, 0) = 1.0;
  root.centers(1, 1) = 1.0;
  for (PatNode& leaf : tree.level(1)) leaf.weight = Matrix::identity(2);
  return tree;
}

inline AttributeSchema gender_race() {
  return AttributeSchema({{"gender", 2}, {"race", 3}});
}

inline Dataset tiny_dataset(int n, int width, int levels, int classes,
                            std::uint64_t seed = 3) {
  Rng rng(seed);
  Dataset d;
  d.input_width = width;
  d.attribute_levels = levels;
  for (int i = 0; i < n; ++i) {
    Sample s;
    s.id = i;
    for (int k = 0; k < width; ++k) s.features.push_back(rng.normal() + 0.5);
    for (int j = 0; j < levels; ++j) s.attributes.push_back(i % (j + 2));
    s.label = i % classes;
    d.samples.push_back(std::move(s));
  }
  return d;
}

}  // namespace pat::testing

#endif  // PAT_TESTS_SUPPORT_HPP_
