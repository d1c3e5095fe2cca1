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

// Synthetic attribute-confounded data.
//
// Every full attribute combination a gets an anchor mu_a built from one random
// direction per level of its attribute prefix, so samples that differ in an
// upper attribute sit further apart than samples that differ only in a lower
// one. Each (a, class) pair gets its own offset v_{a,e} of length
// class_separation, and features are mu_a + v_{a,e} + N(0, noise_sigma^2 I).

#ifndef PAT_SYNTH_HPP_
#define PAT_SYNTH_HPP_

#include <cstdint>
#include <vector>

#include "pat/attribute_tree.hpp"
#include "pat/dataset.hpp"

namespace pat {

struct SynthConfig {
  AttributeSchema schema{{{"gender", 2}, {"race", 3}}};
  int classes = 7;
  int input_width = 16;
  double attribute_separation = 6.0;
  double class_separation = 2.0;
  double noise_sigma = 1.0;
  // 0 draws every v_{a,e} independently. Otherwise v_{a,e} points along
  // class_sharing * u_e + (1 - class_sharing) * w_{a,e}, with u_e common to
  // all combinations.
  double class_sharing = 0.0;
  // State s of every attribute is drawn with probability proportional to
  // state_skew^s; 1 gives uniform combinations.
  double state_skew = 1.0;
  int n_train = 6000;
  int n_test = 2000;
  std::uint64_t seed = 1;

  // Throws InvalidConfig.
  void validate() const;
};

struct SynthData {
  Dataset train;
  Dataset test;
  // Anchor per attribute combination, indexed by combination_index.
  std::vector<Vector> anchors;
};

SynthData generate(const SynthConfig& config);

// Mixed-radix index of a fully labeled path (level 0 most significant). This
// equals the index of the leaf the path selects.
int combination_index(const AttributeSchema& schema, const AttributePath& path);
AttributePath combination_path(const AttributeSchema& schema, int index);
int combination_count(const AttributeSchema& schema);

}  // namespace pat

#endif  // PAT_SYNTH_HPP_
