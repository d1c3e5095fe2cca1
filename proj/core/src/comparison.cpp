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

#include "pat/comparison.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "pat/baselines.hpp"
#include "pat/config_json.hpp"
#include "pat/errors.hpp"
#include "pat/model.hpp"
#include "pat/model_io.hpp"

namespace pat {

const char* to_string(Method m) {
  switch (m) {
    case Method::flat:
      return "flat";
    case Method::attribute_specific:
      return "attribute_specific";
    case Method::hard_at:
      return "hard_at";
    case Method::pat:
      return "pat";
  }
  return "unknown";
}

std::vector<int> flat_baseline_widths(const TrainConfig& config,
                                      const ComparisonOptions& options) {
  const PatModel shape = make_model(config.schema, config.widths,
                                    config.classes, config.seed);
  return matched_hidden_widths(config.widths.front(), shape.parameter_count(),
                               config.classes, options.flat_layers);
}

namespace {

std::vector<int> labels_of(const Dataset& data) {
  std::vector<int> out;
  for (const Sample& s : data.samples) {
    if (s.label) out.push_back(*s.label);
  }
  return out;
}

MetricsReport score_flat(const std::string& method, const Dataset& test,
                         int classes,
                         const std::function<int(const Sample&)>& classify) {
  std::vector<int> predicted;
  for (const Sample& s : test.samples) {
    if (s.label) predicted.push_back(classify(s));
  }
  const Accuracy acc = score_predictions(labels_of(test), predicted, classes);
  MetricsReport r;
  r.method = method;
  r.accuracy = acc.accuracy;
  r.confusion = acc.confusion;
  return r;
}

MetricsReport run_flat(const Dataset& train, const Dataset& test,
                       const TrainConfig& config, const std::vector<int>& hidden) {
  FlatTrainResult fit = train_flat(train, hidden, config);
  MetricsReport r = score_flat(
      to_string(Method::flat), test, config.classes, [&](const Sample& s) {
        return static_cast<int>(argmax(flat_predict(fit.net, s.features)));
      });
  r.loss_curve = std::move(fit.history);
  r.parameters = fit.net.parameter_count();
  return r;
}

MetricsReport run_attribute_specific(const Dataset& train, const Dataset& test,
                                     const TrainConfig& config,
                                     const std::vector<int>& hidden,
                                     bool full_budget) {
  const AttributeSchema& schema = config.schema;
  const int combos = schema.leaf_count();
  std::vector<Dataset> subsets(static_cast<std::size_t>(combos));
  std::size_t labeled = 0;
  for (Dataset& d : subsets) {
    d.input_width = train.input_width;
    d.attribute_levels = train.attribute_levels;
  }
  for (const Sample& s : train.samples) {
    if (labeled_depth(s.attributes) < schema.attribute_count()) continue;
    subsets[combination_index(schema, s.attributes)].samples.push_back(s);
    ++labeled;
  }
  std::vector<FlatNet> nets;
  MetricsReport r;
  for (int a = 0; a < combos; ++a) {
    if (subsets[a].empty()) {
      throw EmptyDataset("no training samples for attribute combination " +
                         std::to_string(a));
    }
    TrainConfig sub = config;
    if (!full_budget) sub.iterations = std::max<int>(
        1, static_cast<int>(std::llround(
               static_cast<double>(config.iterations) *
               static_cast<double>(subsets[a].size()) /
               static_cast<double>(labeled))));
    FlatTrainResult fit = train_flat(subsets[a], hidden, sub);
    r.parameters += fit.net.parameter_count();
    nets.push_back(std::move(fit.net));
  }
  MetricsReport scored = score_flat(
      to_string(Method::attribute_specific), test, config.classes,
      [&](const Sample& s) {
        const FlatNet& net = nets[combination_index(schema, s.attributes)];
        return static_cast<int>(argmax(flat_predict(net, s.features)));
      });
  scored.parameters = r.parameters;
  return scored;
}

MetricsReport run_tree(const Dataset& train, const Dataset& test,
                       TrainConfig config, Routing routing) {
  config.routing = routing;
  TrainState state = run_training(train, config);
  MetricsReport r = evaluate_model(state.model, test, routing);
  r.loss_curve = std::move(state.history);
  return r;
}

}  // namespace

MetricsReport run_method(Method method, const Dataset& train,
                         const Dataset& test, const TrainConfig& config,
                         const ComparisonOptions& options) {
  MetricsReport r;
  nlohmann::json echo = train_config_to_json(config);
  echo["schema"] = schema_to_json(config.schema);
  switch (method) {
    case Method::flat:
    case Method::attribute_specific: {
      const std::vector<int> hidden = flat_baseline_widths(config, options);
      r = method == Method::flat
              ? run_flat(train, test, config, hidden)
              : run_attribute_specific(train, test, config, hidden,
                                       options.full_subset_budget);
      echo["flat_hidden"] = hidden;
      echo.erase("routing");
      break;
    }
    case Method::hard_at:
      r = run_tree(train, test, config, Routing::hard);
      echo["routing"] = "hard";
      break;
    case Method::pat:
      r = run_tree(train, test, config, Routing::soft);
      echo["routing"] = "soft";
      break;
  }
  r.method = to_string(method);
  r.config = std::move(echo);
  r.seed = config.seed;
  r.model_version = kModelFormatVersion;
  return r;
}

std::vector<MetricsReport> run_comparison(const Dataset& train,
                                          const Dataset& test,
                                          const TrainConfig& config,
                                          const std::vector<Method>& methods,
                                          const ComparisonOptions& options) {
  std::vector<MetricsReport> out;
  for (Method m : methods) out.push_back(run_method(m, train, test, config, options));
  return out;
}

std::vector<SweepPoint> label_fraction_sweep(
    const Dataset& train, const Dataset& test, const TrainConfig& config,
    const std::vector<double>& fractions, const LossObserver& observer) {
  std::vector<SweepPoint> out;
  for (double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw InvalidConfig("sweep fractions must lie in [0, 1]");
    }
    TrainConfig c = config;
    c.attribute_label_fraction = f;
    c.routing = Routing::soft;
    const TrainState state = run_training(train, c, observer);
    const MetricsReport r = evaluate_model(state.model, test, Routing::soft);
    out.push_back({f, r.accuracy, root_purity(state.model.tree, test)});
  }
  return out;
}

std::vector<SweepRow> sweep_over_seeds(const SynthConfig& synth,
                                       const TrainConfig& config,
                                       const std::vector<double>& fractions,
                                       const std::vector<std::uint64_t>& seeds,
                                       const LossObserver& observer) {
  std::vector<SweepRow> rows(fractions.size());
  for (std::size_t f = 0; f < fractions.size(); ++f) rows[f].fraction = fractions[f];
  for (std::uint64_t seed : seeds) {
    SynthConfig sc = synth;
    sc.seed = seed;
    TrainConfig tc = config;
    tc.seed = seed;
    const SynthData data = generate(sc);
    const auto points = label_fraction_sweep(data.train, data.test, tc, fractions, observer);
    for (std::size_t f = 0; f < points.size(); ++f) {
      rows[f].per_seed.push_back(points[f].accuracy);
    }
  }
  for (SweepRow& r : rows) {
    const double n = static_cast<double>(r.per_seed.size());
    double sum = 0.0;
    for (double a : r.per_seed) sum += a;
    r.mean_accuracy = n > 0 ? sum / n : 0.0;
    double var = 0.0;
    for (double a : r.per_seed) var += (a - r.mean_accuracy) * (a - r.mean_accuracy);
    r.stddev = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  }
  return rows;
}

std::vector<std::vector<MetricsReport>> compare_over_seeds(
    const SynthConfig& synth, const TrainConfig& config,
    const std::vector<std::uint64_t>& seeds, const std::vector<Method>& methods,
    const ComparisonOptions& options) {
  std::vector<std::vector<MetricsReport>> out;
  for (std::uint64_t seed : seeds) {
    SynthConfig sc = synth;
    sc.seed = seed;
    TrainConfig tc = config;
    tc.seed = seed;
    const SynthData data = generate(sc);
    out.push_back(run_comparison(data.train, data.test, tc, methods, options));
  }
  return out;
}

std::string comparison_table(
    const std::vector<std::vector<MetricsReport>>& per_seed) {
  std::string out = "method\tseed\taccuracy\tparameters\troot_purity\n";
  char buf[160];
  std::map<std::string, std::pair<double, int>> means;
  std::vector<std::string> order;
  for (const auto& reports : per_seed) {
    for (const MetricsReport& r : reports) {
      const double purity = r.purity.empty() ? 0.0 : r.purity.front().purity;
      std::snprintf(buf, sizeof buf, "%s\t%llu\t%.6f\t%zu\t%.6f\n",
                    r.method.c_str(), static_cast<unsigned long long>(r.seed),
                    r.accuracy, r.parameters, purity);
      out += buf;
      if (!means.count(r.method)) order.push_back(r.method);
      means[r.method].first += r.accuracy;
      means[r.method].second += 1;
    }
  }
  for (const std::string& m : order) {
    std::snprintf(buf, sizeof buf, "%s\tmean\t%.6f\t\t\n", m.c_str(),
                  means[m].first / means[m].second);
    out += buf;
  }
  return out;
}

std::string sweep_table(const std::vector<SweepRow>& rows) {
  std::string out = "fraction\tmean_accuracy\tstd\n";
  char buf[96];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.4f\t%.6f\t%.6f\n", r.fraction,
                  r.mean_accuracy, r.stddev);
    out += buf;
  }
  return out;
}

}  // namespace pat
