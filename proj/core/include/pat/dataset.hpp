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

// Samples, datasets and the comma-separated dataset file.
//
// File layout (one header line, then one line per sample):
//
//   id,f0,...,f{d-1},attr_0,...,attr_{L-1},class,source
//
// Missing labels are written as -1, features with 17 significant digits so
// that a write/read round trip reproduces every bit. `source` is either
// `primary` or `auxiliary`.

#ifndef PAT_DATASET_HPP_
#define PAT_DATASET_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pat/attribute_tree.hpp"
#include "pat/math.hpp"

namespace pat {

inline constexpr int kMissingLabel = -1;

enum class Source { primary, auxiliary };

struct Sample {
  std::int64_t id = 0;
  Vector features;
  AttributePath attributes;
  std::optional<int> label;
  Source source = Source::primary;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Dataset {
  int input_width = 0;
  int attribute_levels = 0;
  std::vector<Sample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  bool has_two_sources() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Checks widths, attribute level count and label ranges against a schema and
// class count. Throws SchemaMismatch or InvalidLabel.
void validate_dataset(const Dataset& data, const AttributeSchema& schema,
                      int classes);

void write_dataset(std::ostream& out, const Dataset& data);
void write_dataset(const std::string& path, const Dataset& data);

// Throws ParseError (with the offending line number) on malformed input.
Dataset read_dataset(std::istream& in);
Dataset read_dataset(const std::string& path);
// Additionally throws SchemaMismatch when the header disagrees with the
// expected feature width or attribute level count.
Dataset read_dataset(const std::string& path, int input_width,
                     int attribute_levels);

// Keeps attribute labels on round(fraction * n) samples chosen uniformly at
// random (seeded) and clears them on the rest.
Dataset strip_attribute_labels(Dataset data, double fraction,
                               std::uint64_t seed);

// Concatenates two datasets, tagging the second one's samples auxiliary.
Dataset merge_sources(Dataset primary, const Dataset& auxiliary);

const char* to_string(Source s);

}  // namespace pat

#endif  // PAT_DATASET_HPP_
