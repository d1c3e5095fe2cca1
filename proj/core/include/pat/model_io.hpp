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

// Model persistence as versioned JSON. Doubles are written in their shortest
// round-trip decimal form, so save/load/save reproduces the file byte for
// byte.

#ifndef PAT_MODEL_IO_HPP_
#define PAT_MODEL_IO_HPP_

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "pat/model.hpp"
#include "pat/trainer.hpp"

namespace pat {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormatName = "pat-model";

struct ModelFile {
  int version = kModelFormatVersion;
  PatModel model;
  TrainConfig config;  // echo of the configuration that produced the model
};

nlohmann::json model_to_json(const PatModel& model, const TrainConfig& config);
// Throws VersionMismatch or ParseError.
ModelFile model_from_json(const nlohmann::json& j);

void save_model(std::ostream& out, const PatModel& model,
                const TrainConfig& config);
void save_model(const std::string& path, const PatModel& model,
                const TrainConfig& config);

ModelFile load_model(std::istream& in);
ModelFile load_model(const std::string& path);
// Throws SchemaMismatch when the stored schema differs from `expected`.
ModelFile load_model(const std::string& path, const AttributeSchema& expected);

}  // namespace pat

#endif  // PAT_MODEL_IO_HPP_
