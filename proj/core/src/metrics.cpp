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

#include "pat/metrics.hpp"

#include "pat/config_json.hpp"
#include "pat/errors.hpp"
#include "pat/expression_head.hpp"
#include "pat/model_io.hpp"

namespace pat {

std::vector<PurityEntry> cluster_purity(const PatTree& tree,
                                        const Dataset& data) {
  const int inner = tree.leaf_level();
  std::vector<std::vector<double>> hit(inner), mass(inner);
  for (int j = 0; j < inner; ++j) {
    hit[j].assign(tree.level(j).size(), 0.0);
    mass[j].assign(tree.level(j).size(), 0.0);
  }
  for (const Sample& s : data.samples) {
    const int levels = std::min(labeled_depth(s.attributes), inner);
    if (levels == 0) continue;
    const MembershipTrace t = propagate(tree, s.features);
    for (int j = 0; j < levels; ++j) {
      const int y = *s.attributes[j];
      for (std::size_t k = 0; k < tree.level(j).size(); ++k) {
        const double q = t.mass[j][k];
        mass[j][k] += q;
        if (static_cast<int>(argmax(t.similarity[j][k])) == y) hit[j][k] += q;
      }
    }
  }
  std::vector<PurityEntry> out;
  for (int j = 0; j < inner; ++j) {
    for (std::size_t k = 0; k < hit[j].size(); ++k) {
      PurityEntry e;
      e.level = j;
      e.index = static_cast<int>(k);
      e.weight = mass[j][k];
      e.purity = mass[j][k] > 0.0 ? hit[j][k] / mass[j][k] : 0.0;
      out.push_back(e);
    }
  }
  return out;
}

double root_purity(const PatTree& tree, const Dataset& data) {
  const auto entries = cluster_purity(tree, data);
  return entries.empty() ? 0.0 : entries.front().purity;
}

Accuracy score_predictions(const std::vector<int>& truth,
                           const std::vector<int>& predicted, int classes) {
  if (truth.size() != predicted.size()) {
    throw ShapeMismatch("score_predictions: length mismatch");
  }
  Accuracy a;
  a.confusion.assign(static_cast<std::size_t>(classes),
                     std::vector<std::int64_t>(static_cast<std::size_t>(classes), 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++a.confusion.at(truth[i]).at(predicted[i]);
    if (truth[i] == predicted[i]) ++correct;
  }
  a.accuracy = truth.empty() ? 0.0
                             : static_cast<double>(correct) /
                                   static_cast<double>(truth.size());
  return a;
}

std::vector<int> predict_classes(const PatModel& model, const Dataset& data,
                                 Routing routing) {
  std::vector<int> out;
  out.reserve(data.size());
  for (const Sample& s : data.samples) {
    const MembershipTrace t = propagate(model.tree, s.features, routing);
    out.push_back(static_cast<int>(argmax(predict(model.head, t))));
  }
  return out;
}

MetricsReport evaluate_model(const PatModel& model, const Dataset& data,
                             Routing routing) {
  std::vector<int> truth, predicted;
  const std::vector<int> all = predict_classes(model, data, routing);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data.samples[i].label) continue;
    truth.push_back(*data.samples[i].label);
    predicted.push_back(all[i]);
  }
  const Accuracy acc = score_predictions(truth, predicted, model.classes());
  MetricsReport r;
  r.method = routing == Routing::soft ? "pat" : "hard_at";
  r.accuracy = acc.accuracy;
  r.confusion = acc.confusion;
  r.purity = cluster_purity(model.tree, data);
  r.model_version = kModelFormatVersion;
  r.parameters = model.parameter_count();
  return r;
}

nlohmann::json report_to_json(const MetricsReport& r) {
  nlohmann::json purity = nlohmann::json::array();
  for (const PurityEntry& e : r.purity) {
    purity.push_back({{"level", e.level},
                      {"index", e.index},
                      {"purity", e.purity},
                      {"weight", e.weight}});
  }
  nlohmann::json curve = nlohmann::json::array();
  for (const LossRecord& l : r.loss_curve) {
    curve.push_back({l.iteration, l.total, l.marginal, l.pat});
  }
  return {{"format", "pat-report"},
          {"version", kModelFormatVersion},
          {"method", r.method},
          {"accuracy", r.accuracy},
          {"confusion", r.confusion},
          {"purity", std::move(purity)},
          {"loss_curve_columns", {"iteration", "L", "L_MS", "L_PAT"}},
          {"loss_curve", std::move(curve)},
          {"config", r.config},
          {"seed", r.seed},
          {"model_version", r.model_version},
          {"parameters", r.parameters}};
}

}  // namespace pat
