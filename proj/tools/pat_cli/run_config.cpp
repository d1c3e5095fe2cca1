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

#include "pat_cli/run_config.hpp"

#include <fstream>
#include <set>

#include "pat/config_json.hpp"
#include "pat/errors.hpp"

namespace pat::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& section) {
  if (!j.is_object()) throw InvalidConfig(section + " must be an object");
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

RunConfig run_config_from_json(const json& j) {
  reject_unknown(j, {"schema", "synth", "train", "bench", "output"}, "config");
  RunConfig c;
  if (j.contains("schema")) c.schema = schema_from_json(j.at("schema"));
  c.synth = synth_config_from_json(j.value("synth", json::object()), c.schema);

  const json train = j.value("train", json::object());
  c.train = train_config_from_json(train, c.schema);
  if (!train.contains("widths")) c.train.widths.front() = c.synth.input_width;
  if (!train.contains("classes")) c.train.classes = c.synth.classes;

  const json bench = j.value("bench", json::object());
  reject_unknown(bench, {"seeds", "fractions", "flat_layers"}, "bench");
  read(bench, "seeds", c.bench.seeds);
  read(bench, "fractions", c.bench.fractions);
  read(bench, "flat_layers", c.bench.flat_layers);
  if (c.bench.seeds.empty()) throw InvalidConfig("bench.seeds must not be empty");
  if (c.bench.flat_layers < 1) throw InvalidConfig("bench.flat_layers must be >= 1");
  for (double f : c.bench.fractions) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw InvalidConfig("bench.fractions must lie in [0, 1]");
    }
  }

  const json out = j.value("output", json::object());
  reject_unknown(out, {"train_data", "test_data", "model", "log", "report", "dir"},
                 "output");
  read(out, "train_data", c.output.train_data);
  read(out, "test_data", c.output.test_data);
  read(out, "model", c.output.model);
  read(out, "log", c.output.log);
  read(out, "report", c.output.report);
  read(out, "dir", c.output.dir);
  return c;
}

json run_config_to_json(const RunConfig& c) {
  return {{"schema", schema_to_json(c.schema)},
          {"synth", synth_config_to_json(c.synth)},
          {"train", train_config_to_json(c.train)},
          {"bench",
           {{"seeds", c.bench.seeds},
            {"fractions", c.bench.fractions},
            {"flat_layers", c.bench.flat_layers}}},
          {"output",
           {{"train_data", c.output.train_data},
            {"test_data", c.output.test_data},
            {"model", c.output.model},
            {"log", c.output.log},
            {"report", c.output.report},
            {"dir", c.output.dir}}}};
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidConfig("malformed config file '" + path + "': " + e.what());
  }
  return run_config_from_json(j);
}

void reconcile(RunConfig& c) {
  c.synth.schema = c.schema;
  c.train.schema = c.schema;
  c.synth.validate();
  if (c.train.widths.empty() || c.train.widths.front() != c.synth.input_width) {
    throw InvalidConfig("train.widths[0] must equal synth.input_width");
  }
  c.train.validate();
}

}  // namespace pat::cli
