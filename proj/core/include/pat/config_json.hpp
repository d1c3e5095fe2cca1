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

// JSON forms of the configuration structs. Readers reject unknown keys and
// fill absent keys with the struct defaults.

#ifndef PAT_CONFIG_JSON_HPP_
#define PAT_CONFIG_JSON_HPP_

#include <nlohmann/json.hpp>

#include "pat/attribute_tree.hpp"
#include "pat/synth.hpp"
#include "pat/trainer.hpp"

namespace pat {

nlohmann::json schema_to_json(const AttributeSchema& schema);
AttributeSchema schema_from_json(const nlohmann::json& j);

nlohmann::json train_config_to_json(const TrainConfig& config);
// Keys: lambda, alpha, mu, iterations, batch_size, seed, widths, classes,
// attribute_label_fraction, routing ("soft" | "hard"). The schema is passed
// separately because it is shared with the synthetic-data section.
TrainConfig train_config_from_json(const nlohmann::json& j,
                                   const AttributeSchema& schema);

nlohmann::json synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const nlohmann::json& j,
                                   const AttributeSchema& schema);

const char* to_string(Routing r);

}  // namespace pat

#endif  // PAT_CONFIG_JSON_HPP_
