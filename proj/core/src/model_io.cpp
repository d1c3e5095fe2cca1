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

#include "pat/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "pat/config_json.hpp"
#include "pat/errors.hpp"

namespace pat {
namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows()},
          {"cols", m.cols()},
          {"values", std::vector<double>(m.values().begin(), m.values().end())}};
}

Matrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols,
                        const std::string& what) {
  if (j.at("rows").get<std::size_t>() != rows ||
      j.at("cols").get<std::size_t>() != cols) {
    throw ParseError(what + ": stored shape does not match the schema", 0);
  }
  const auto values = j.at("values").get<std::vector<double>>();
  if (values.size() != rows * cols) {
    throw ParseError(what + ": wrong number of values", 0);
  }
  Matrix m(rows, cols);
  std::copy(values.begin(), values.end(), m.values().begin());
  return m;
}

Vector vector_from_json(const json& j, std::size_t size,
                        const std::string& what) {
  auto v = j.get<Vector>();
  if (v.size() != size) throw ParseError(what + ": wrong length", 0);
  return v;
}

}  // namespace

json model_to_json(const PatModel& model, const TrainConfig& config) {
  json nodes = json::array();
  for (int j = 0; j < model.tree.depth(); ++j) {
    for (const PatNode& n : model.tree.level(j)) {
      json e{{"level", n.level},
             {"index", n.index},
             {"weight", matrix_to_json(n.weight)},
             {"bias", n.bias}};
      if (!n.is_leaf()) e["centers"] = matrix_to_json(n.centers);
      nodes.push_back(std::move(e));
    }
  }
  json classifiers = json::array();
  for (const LeafClassifier& c : model.head.leaves()) {
    classifiers.push_back(
        {{"weight", matrix_to_json(c.weight)}, {"bias", c.bias}});
  }
  return {{"format", kModelFormatName},
          {"version", kModelFormatVersion},
          {"schema", schema_to_json(model.tree.schema())},
          {"widths", model.tree.widths()},
          {"classes", model.head.classes()},
          {"config", train_config_to_json(config)},
          {"nodes", std::move(nodes)},
          {"classifiers", std::move(classifiers)}};
}

ModelFile model_from_json(const json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != kModelFormatName) {
      throw ParseError("not a model file", 0);
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw VersionMismatch("model format version " + std::to_string(version) +
                            ", this build reads version " +
                            std::to_string(kModelFormatVersion));
    }
    ModelFile f;
    f.version = version;
    const AttributeSchema schema = schema_from_json(j.at("schema"));
    const auto widths = j.at("widths").get<std::vector<int>>();
    const int classes = j.at("classes").get<int>();
    f.model.tree = PatTree(schema, widths);
    f.model.head = LeafClassifiers(schema.leaf_count(),
                                   f.model.tree.width(f.model.tree.leaf_level()),
                                   classes);
    f.config = train_config_from_json(j.at("config"), schema);

    const json& nodes = j.at("nodes");
    std::size_t expected_nodes = 0;
    for (int l = 0; l < f.model.tree.depth(); ++l) {
      expected_nodes += f.model.tree.level(l).size();
    }
    if (nodes.size() != expected_nodes) {
      throw ParseError("node count does not match the schema", 0);
    }
    for (const json& e : nodes) {
      const int level = e.at("level").get<int>();
      const int index = e.at("index").get<int>();
      if (level < 0 || level >= f.model.tree.depth() || index < 0 ||
          index >= static_cast<int>(f.model.tree.level(level).size())) {
        throw ParseError("node index out of range", 0);
      }
      PatNode& n = f.model.tree.node(level, index);
      const std::string what =
          "node(" + std::to_string(level) + "," + std::to_string(index) + ")";
      n.weight = matrix_from_json(e.at("weight"), n.weight.rows(),
                                  n.weight.cols(), what + ".weight");
      n.bias = vector_from_json(e.at("bias"), n.bias.size(), what + ".bias");
      if (!n.is_leaf()) {
        n.centers = matrix_from_json(e.at("centers"), n.centers.rows(),
                                     n.centers.cols(), what + ".centers");
      }
    }
    const json& cls = j.at("classifiers");
    if (static_cast<int>(cls.size()) != f.model.head.leaf_count()) {
      throw ParseError("classifier count does not match the schema", 0);
    }
    for (int k = 0; k < f.model.head.leaf_count(); ++k) {
      LeafClassifier& c = f.model.head.leaf(k);
      const std::string what = "classifier(" + std::to_string(k) + ")";
      c.weight = matrix_from_json(cls[k].at("weight"), c.weight.rows(),
                                  c.weight.cols(), what + ".weight");
      c.bias = vector_from_json(cls[k].at("bias"), c.bias.size(),
                                what + ".bias");
    }
    return f;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what(), 0);
  } catch (const InvalidSchema& e) {
    throw ParseError(std::string("malformed model file: ") + e.what(), 0);
  } catch (const InvalidConfig& e) {
    throw ParseError(std::string("malformed model file: ") + e.what(), 0);
  }
}

void save_model(std::ostream& out, const PatModel& model,
                const TrainConfig& config) {
  out << model_to_json(model, config).dump(1) << '\n';
}

void save_model(const std::string& path, const PatModel& model,
                const TrainConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  save_model(out, model, config);
  if (!out) throw Error("failed writing '" + path + "'");
}

ModelFile load_model(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what(),
                     0);
  }
  return model_from_json(j);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return load_model(in);
}

ModelFile load_model(const std::string& path, const AttributeSchema& expected) {
  ModelFile f = load_model(path);
  if (!(f.model.tree.schema() == expected)) {
    throw SchemaMismatch("model '" + path +
                         "' was trained with a different attribute schema");
  }
  return f;
}

}  // namespace pat
