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

// Run configuration file: one JSON document holding the attribute schema,
// the generator and trainer settings, benchmark settings and output paths.
// Absent keys take their defaults; unknown keys are rejected.

#ifndef PAT_CLI_RUN_CONFIG_HPP_
#define PAT_CLI_RUN_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pat/comparison.hpp"
#include "pat/synth.hpp"
#include "pat/trainer.hpp"

namespace pat::cli {

struct OutputPaths {
  std::string train_data = "train.csv";
  std::string test_data = "test.csv";
  std::string model = "model.json";
  std::string log = "train.log";
  std::string report = "report.json";
  std::string dir = "results";
};

struct BenchSettings {
  std::vector<std::uint64_t> seeds = kBenchSeeds;
  std::vector<double> fractions = kDefaultFractions;
  int flat_layers = 1;
};

struct RunConfig {
  AttributeSchema schema{{{"gender", 2}, {"race", 3}}};
  SynthConfig synth;
  TrainConfig train;
  BenchSettings bench;
  OutputPaths output;
};

// Throws InvalidConfig.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& config);

// Throws InvalidConfig for unreadable or malformed files.
RunConfig load_run_config(const std::string& path);

// Restores the invariants that tie the sections together after a flag
// override (schema shared by all sections, widths.front() == input width).
void reconcile(RunConfig& config);

}  // namespace pat::cli

#endif  // PAT_CLI_RUN_CONFIG_HPP_
