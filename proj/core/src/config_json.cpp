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

#include "pat/config_json.hpp"

#include <set>
#include <string>

#include "pat/errors.hpp"

namespace pat {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const char* section) {
  if (!j.is_object()) {
    throw InvalidConfig(std::string(section) + " must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw InvalidConfig("unknown key '" + key + "' in " + section);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

const char* to_string(Routing r) {
  return r == Routing::soft ? "soft" : "hard";
}

json schema_to_json(const AttributeSchema& schema) {
  json a = json::array();
  for (const Attribute& attr : schema.attributes()) {
    a.push_back({{"name", attr.name}, {"states", attr.states}});
  }
  return a;
}

AttributeSchema schema_from_json(const json& j) {
  if (!j.is_array()) throw InvalidConfig("schema must be an array");
  std::vector<Attribute> attrs;
  for (const json& e : j) {
    reject_unknown(e, {"name", "states"}, "schema entry");
    Attribute a;
    read(e, "name", a.name);
    read(e, "states", a.states);
    attrs.push_back(std::move(a));
  }
  try {
    return AttributeSchema(std::move(attrs));
  } catch (const InvalidSchema& e) {
    throw InvalidConfig(e.what());
  }
}

json train_config_to_json(const TrainConfig& c) {
  return {{"lambda", c.lambda},
          {"alpha", c.alpha},
          {"mu", c.mu},
          {"iterations", c.iterations},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"widths", c.widths},
          {"classes", c.classes},
          {"attribute_label_fraction", c.attribute_label_fraction},
          {"routing", to_string(c.routing)}};
}

TrainConfig train_config_from_json(const json& j,
                                   const AttributeSchema& schema) {
  reject_unknown(j,
                 {"lambda", "alpha", "mu", "iterations", "batch_size", "seed",
                  "widths", "classes", "attribute_label_fraction", "routing"},
                 "train");
  TrainConfig c;
  c.schema = schema;
  read(j, "lambda", c.lambda);
  read(j, "alpha", c.alpha);
  read(j, "mu", c.mu);
  read(j, "iterations", c.iterations);
  read(j, "batch_size", c.batch_size);
  read(j, "seed", c.seed);
  read(j, "classes", c.classes);
  read(j, "attribute_label_fraction", c.attribute_label_fraction);
  if (j.contains("widths")) {
    read(j, "widths", c.widths);
  } else {
    // One default width per level on top of the input width.
    c.widths.assign(static_cast<std::size_t>(schema.depth()) + 1, 64);
    c.widths.front() = 16;
  }
  std::string routing = "soft";
  read(j, "routing", routing);
  if (routing == "soft") {
    c.routing = Routing::soft;
  } else if (routing == "hard") {
    c.routing = Routing::hard;
  } else {
    throw InvalidConfig("routing must be 'soft' or 'hard'");
  }
  return c;
}

json synth_config_to_json(const SynthConfig& c) {
  return {{"classes", c.classes},
          {"input_width", c.input_width},
          {"attribute_separation", c.attribute_separation},
          {"class_separation", c.class_separation},
          {"noise_sigma", c.noise_sigma},
          {"class_sharing", c.class_sharing},
          {"state_skew", c.state_skew},
          {"n_train", c.n_train},
          {"n_test", c.n_test},
          {"seed", c.seed}};
}

SynthConfig synth_config_from_json(const json& j,
                                   const AttributeSchema& schema) {
  reject_unknown(j,
                 {"classes", "input_width", "attribute_separation",
                  "class_separation", "noise_sigma", "class_sharing",
                  "state_skew", "n_train", "n_test", "seed"},
                 "synth");
  SynthConfig c;
  c.schema = schema;
  read(j, "classes", c.classes);
  read(j, "input_width", c.input_width);
  read(j, "attribute_separation", c.attribute_separation);
  read(j, "class_separation", c.class_separation);
  read(j, "noise_sigma", c.noise_sigma);
  read(j, "class_sharing", c.class_sharing);
  read(j, "state_skew", c.state_skew);
  read(j, "n_train", c.n_train);
  read(j, "n_test", c.n_test);
  read(j, "seed", c.seed);
  return c;
}

}  // namespace pat
