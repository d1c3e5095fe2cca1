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

#include "pat/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string_view>
#include <system_error>

#include "pat/errors.hpp"
#include "pat/random.hpp"

namespace pat {
namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("invalid " + std::string(what) + " '" +
                         std::string(field) + "'",
                     line);
  }
  return value;
}

std::optional<int> parse_label(std::string_view field, std::size_t line) {
  const int v = parse_number<int>(field, line, "label");
  if (v == kMissingLabel) return std::nullopt;
  if (v < 0) throw ParseError("negative label " + std::to_string(v), line);
  return v;
}

std::string expected_header(int width, int levels) {
  std::string h = "id";
  for (int i = 0; i < width; ++i) h += ",f" + std::to_string(i);
  for (int i = 0; i < levels; ++i) h += ",attr_" + std::to_string(i);
  h += ",class,source";
  return h;
}

void format_double(std::string& out, double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

const char* to_string(Source s) {
  return s == Source::primary ? "primary" : "auxiliary";
}

bool Dataset::has_two_sources() const {
  bool primary = false;
  bool auxiliary = false;
  for (const Sample& s : samples) {
    (s.source == Source::primary ? primary : auxiliary) = true;
  }
  return primary && auxiliary;
}

void validate_dataset(const Dataset& data, const AttributeSchema& schema,
                      int classes) {
  if (data.attribute_levels != schema.attribute_count()) {
    throw SchemaMismatch("dataset has " +
                         std::to_string(data.attribute_levels) +
                         " attribute columns, schema has " +
                         std::to_string(schema.attribute_count()));
  }
  for (const Sample& s : data.samples) {
    if (static_cast<int>(s.features.size()) != data.input_width) {
      throw SchemaMismatch("sample " + std::to_string(s.id) +
                           " has the wrong feature width");
    }
    for (int j = 0; j < data.attribute_levels; ++j) {
      const auto& a = s.attributes.at(j);
      if (a && (*a < 0 || *a >= schema.states_at(j))) {
        throw InvalidLabel("sample " + std::to_string(s.id) +
                           ": attribute label " + std::to_string(*a) +
                           " out of range at level " + std::to_string(j));
      }
    }
    if (s.label && (*s.label < 0 || *s.label >= classes)) {
      throw InvalidLabel("sample " + std::to_string(s.id) + ": class " +
                         std::to_string(*s.label) + " out of range");
    }
  }
}

void write_dataset(std::ostream& out, const Dataset& data) {
  out << expected_header(data.input_width, data.attribute_levels) << '\n';
  std::string line;
  for (const Sample& s : data.samples) {
    line = std::to_string(s.id);
    for (double f : s.features) {
      line += ',';
      format_double(line, f);
    }
    for (int j = 0; j < data.attribute_levels; ++j) {
      const auto& a = s.attributes.at(j);
      line += ',';
      line += std::to_string(a ? *a : kMissingLabel);
    }
    line += ',';
    line += std::to_string(s.label ? *s.label : kMissingLabel);
    line += ',';
    line += to_string(s.source);
    out << line << '\n';
  }
}

void write_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_dataset(out, data);
  if (!out) throw Error("failed writing '" + path + "'");
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty dataset file", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto columns = split_commas(line);
  Dataset data;
  std::size_t c = 1;
  if (columns.empty() || columns[0] != "id") {
    throw ParseError("header must start with 'id'", 1);
  }
  while (c < columns.size() && columns[c] == "f" + std::to_string(data.input_width)) {
    ++data.input_width;
    ++c;
  }
  while (c < columns.size() &&
         columns[c] == "attr_" + std::to_string(data.attribute_levels)) {
    ++data.attribute_levels;
    ++c;
  }
  if (line != expected_header(data.input_width, data.attribute_levels) ||
      data.input_width == 0) {
    throw ParseError("malformed header '" + line + "'", 1);
  }

  const std::size_t expected = columns.size();
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != expected) {
      throw ParseError("expected " + std::to_string(expected) +
                           " columns, found " + std::to_string(fields.size()),
                       lineno);
    }
    Sample s;
    s.id = parse_number<std::int64_t>(fields[0], lineno, "id");
    s.features.reserve(data.input_width);
    std::size_t f = 1;
    for (int i = 0; i < data.input_width; ++i, ++f) {
      const double v = parse_number<double>(fields[f], lineno, "feature");
      if (!std::isfinite(v)) throw ParseError("non-finite feature", lineno);
      s.features.push_back(v);
    }
    for (int j = 0; j < data.attribute_levels; ++j, ++f) {
      s.attributes.push_back(parse_label(fields[f], lineno));
    }
    s.label = parse_label(fields[f++], lineno);
    if (fields[f] == "primary") {
      s.source = Source::primary;
    } else if (fields[f] == "auxiliary") {
      s.source = Source::auxiliary;
    } else {
      throw ParseError("unknown source '" + std::string(fields[f]) + "'",
                       lineno);
    }
    data.samples.push_back(std::move(s));
  }
  return data;
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_dataset(in);
}

Dataset read_dataset(const std::string& path, int input_width,
                     int attribute_levels) {
  Dataset data = read_dataset(path);
  if (data.input_width != input_width ||
      data.attribute_levels != attribute_levels) {
    throw SchemaMismatch("'" + path + "' has " +
                         std::to_string(data.input_width) + " features and " +
                         std::to_string(data.attribute_levels) +
                         " attribute columns; expected " +
                         std::to_string(input_width) + " and " +
                         std::to_string(attribute_levels));
  }
  return data;
}

Dataset strip_attribute_labels(Dataset data, double fraction,
                               std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw InvalidConfig("attribute label fraction must lie in [0, 1]");
  }
  const std::size_t n = data.samples.size();
  const auto keep =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (keep >= n) return data;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Separate stream so the training draws do not depend on the fraction.
  Rng rng{seed, 0x5712195ULL};
  std::shuffle(order.begin(), order.end(), rng.engine());
  for (std::size_t i = keep; i < n; ++i) {
    for (auto& a : data.samples[order[i]].attributes) a.reset();
  }
  return data;
}

Dataset merge_sources(Dataset primary, const Dataset& auxiliary) {
  if (primary.input_width != auxiliary.input_width ||
      primary.attribute_levels != auxiliary.attribute_levels) {
    throw SchemaMismatch("auxiliary data layout differs from primary data");
  }
  for (Sample s : auxiliary.samples) {
    s.source = Source::auxiliary;
    primary.samples.push_back(std::move(s));
  }
  return primary;
}

}  // namespace pat
