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

#include "pat_cli/app.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pat/comparison.hpp"
#include "pat/config_json.hpp"
#include "pat/errors.hpp"
#include "pat/metrics.hpp"
#include "pat/model_io.hpp"
#include "pat/verify.hpp"
#include "pat_cli/run_config.hpp"

namespace pat::cli {
namespace {

class VerificationFailure : public Error {
 public:
  using Error::Error;
};

// Flags shared by every subcommand that trains.
struct TrainOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  std::optional<double> mu;
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::optional<double> fraction;
  std::optional<std::string> routing;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Seed for data generation and training");
    cmd->add_option("--iterations", iterations, "Training iterations");
    cmd->add_option("--mu", mu, "Learning rate");
    cmd->add_option("--lambda", lambda, "Weight of the attribute loss");
    cmd->add_option("--alpha", alpha, "Center learning rate");
    cmd->add_option("--fraction", fraction, "Share of attribute-labeled samples");
    cmd->add_option("--routing", routing, "soft or hard")
        ->check(CLI::IsMember({"soft", "hard"}));
  }

  void apply(RunConfig& c) const {
    if (seed) {
      c.synth.seed = *seed;
      c.train.seed = *seed;
    }
    if (iterations) c.train.iterations = *iterations;
    if (mu) c.train.mu = *mu;
    if (lambda) c.train.lambda = *lambda;
    if (alpha) c.train.alpha = *alpha;
    if (fraction) c.train.attribute_label_fraction = *fraction;
    if (routing) c.train.routing = *routing == "hard" ? Routing::hard : Routing::soft;
  }
};

RunConfig load(const std::string& path) {
  return path.empty() ? RunConfig{} : load_run_config(path);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
  if (!f) throw Error("write failed for '" + path + "'");
}

void write_json(const std::string& path, const nlohmann::json& j) {
  write_text(path, j.dump(1) + "\n");
}

std::string log_header(const TrainConfig& c) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "# lambda=%g alpha=%g mu=%g iterations=%d batch_size=%d "
                "seed=%llu attribute_label_fraction=%g routing=%s\n",
                c.lambda, c.alpha, c.mu, c.iterations, c.batch_size,
                static_cast<unsigned long long>(c.seed),
                c.attribute_label_fraction, to_string(c.routing));
  return std::string("# pat train\n") + buf + "iteration\tL\tL_MS\tL_PAT\n";
}

int cmd_synth(RunConfig c, std::ostream& out) {
  reconcile(c);
  const SynthData data = generate(c.synth);
  write_dataset(c.output.train_data, data.train);
  write_dataset(c.output.test_data, data.test);
  out << "wrote " << data.train.size() << " training samples to "
      << c.output.train_data << " and " << data.test.size()
      << " test samples to " << c.output.test_data << "\n";
  return kSuccess;
}

int cmd_train(RunConfig c, const std::string& data_path,
              const std::string& aux_path, std::ostream& out) {
  reconcile(c);
  const int width = c.train.widths.front();
  const int levels = c.schema.attribute_count();
  Dataset data = read_dataset(data_path, width, levels);
  if (!aux_path.empty()) {
    data = merge_sources(std::move(data), read_dataset(aux_path, width, levels));
  }
  std::ofstream log(c.output.log, std::ios::binary);
  if (!log) throw Error("cannot write '" + c.output.log + "'");
  log << log_header(c.train);
  const TrainState state = run_training(data, c.train, [&](const LossRecord& r) {
    log << r.iteration << '\t' << format_double(r.total) << '\t'
        << format_double(r.marginal) << '\t' << format_double(r.pat) << '\n';
  });
  log.flush();
  save_model(c.output.model, state.model, c.train);
  const LossRecord& last = state.history.back();
  out << "trained " << state.iteration << " iterations; final L="
      << format_double(last.total) << "; model written to " << c.output.model
      << "\n";
  return kSuccess;
}

int cmd_eval(const std::string& config_path, const std::string& model_path,
             const std::string& data_path, const std::string& report_path,
             std::ostream& out) {
  const ModelFile file = config_path.empty()
                             ? load_model(model_path)
                             : load_model(model_path, load(config_path).schema);
  const PatModel& model = file.model;
  const Dataset data =
      read_dataset(data_path, model.tree.width(-1),
                   model.tree.schema().attribute_count());
  validate_dataset(data, model.tree.schema(), model.classes());
  MetricsReport report = evaluate_model(model, data, file.config.routing);
  report.config = train_config_to_json(file.config);
  report.config["schema"] = schema_to_json(file.config.schema);
  report.seed = file.config.seed;
  report.model_version = file.version;
  write_json(report_path, report_to_json(report));
  char buf[96];
  std::snprintf(buf, sizeof buf, "accuracy %.6f over %zu samples\n",
                report.accuracy, data.size());
  out << buf;
  return kSuccess;
}

int cmd_gradcheck(std::uint64_t seed, double tolerance,
                  double oracle_tolerance, std::ostream& out) {
  const GradCheckResult g = run_gradcheck(seed);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "gradcheck seed=%llu coordinates=%zu max_rel_error=%.3e "
                "worst=%s[%zu] analytic=%.17g numeric=%.17g\n",
                static_cast<unsigned long long>(seed), g.coordinates,
                g.max_rel_error, g.worst_parameter.c_str(), g.worst_index,
                g.analytic, g.numeric);
  out << buf;
  const OracleCase oc = random_oracle_case(seed);
  const OracleComparison o = compare_with_oracle(oc.tree, oc.traces, oc.paths);
  std::snprintf(buf, sizeof buf,
                "oracle seed=%llu loss=%.3e feature_errors=%.3e "
                "center_deltas=%.3e\n",
                static_cast<unsigned long long>(seed), o.loss, o.feature_errors,
                o.center_deltas);
  out << buf;
  if (!(g.max_rel_error <= tolerance)) {
    throw VerificationFailure("gradient check failed at " + g.worst_parameter +
                              "[" + std::to_string(g.worst_index) +
                              "]: relative error " +
                              format_double(g.max_rel_error));
  }
  if (!(o.worst() <= oracle_tolerance)) {
    throw VerificationFailure("formula oracle mismatch: relative error " +
                              format_double(o.worst()));
  }
  out << "ok\n";
  return kSuccess;
}

int cmd_compare(RunConfig c, std::ostream& out) {
  reconcile(c);
  std::filesystem::create_directories(c.output.dir);
  ComparisonOptions options;
  options.flat_layers = c.bench.flat_layers;
  const auto per_seed =
      compare_over_seeds(c.synth, c.train, c.bench.seeds, kAllMethods, options);
  for (std::size_t m = 0; m < kAllMethods.size(); ++m) {
    nlohmann::json runs = nlohmann::json::array();
    double sum = 0.0;
    for (const auto& reports : per_seed) {
      runs.push_back(report_to_json(reports[m]));
      sum += reports[m].accuracy;
    }
    const std::string name = to_string(kAllMethods[m]);
    write_json(c.output.dir + "/report_" + name + ".json",
               {{"format", "pat-report-set"},
                {"method", name},
                {"mean_accuracy", sum / static_cast<double>(per_seed.size())},
                {"synth", synth_config_to_json(c.synth)},
                {"runs", std::move(runs)}});
  }
  const std::string table = comparison_table(per_seed);
  write_text(c.output.dir + "/compare.tsv", table);
  out << table;
  return kSuccess;
}

int cmd_sweep(RunConfig c, std::ostream& out) {
  reconcile(c);
  std::filesystem::create_directories(c.output.dir);
  const auto rows =
      sweep_over_seeds(c.synth, c.train, c.bench.fractions, c.bench.seeds);
  const std::string table = sweep_table(rows);
  write_text(c.output.dir + "/sweep.tsv", table);
  out << table;
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Probabilistic attribute tree toolkit", "pat"};
  app.require_subcommand(1);

  std::string config_path;
  TrainOverrides overrides;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::optional<std::string> out_train, out_test;
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--config", config_path, "Run configuration file");
  synth->add_option("--out-train", out_train, "Training set path");
  synth->add_option("--out-test", out_test, "Test set path");
  synth->add_option("--seed", synth_seed, "Generator seed");

  auto* train = app.add_subcommand("train", "Train a model");
  std::string data_path, aux_path;
  std::optional<std::string> out_model, log_path;
  train->add_option("--config", config_path, "Run configuration file");
  train->add_option("--data", data_path, "Training data")->required();
  train->add_option("--aux-data", aux_path, "Auxiliary data source");
  train->add_option("--out-model", out_model, "Model output path");
  train->add_option("--log", log_path, "Loss log path");
  overrides.attach(train);

  auto* eval = app.add_subcommand("eval", "Evaluate a model on a dataset");
  std::string model_path, eval_data, report_path = "report.json";
  eval->add_option("--config", config_path,
                   "Run configuration whose schema the model must match");
  eval->add_option("--model", model_path, "Model file")->required();
  eval->add_option("--data", eval_data, "Dataset")->required();
  eval->add_option("--report", report_path, "Report output path");

  auto* gradcheck = app.add_subcommand("gradcheck", "Verify gradients and formulas");
  std::uint64_t check_seed = 1;
  double tolerance = 1e-4;
  double oracle_tolerance = 1e-10;
  gradcheck->add_option("--seed", check_seed, "Seed of the random model");
  gradcheck->add_option("--tolerance", tolerance,
                        "Maximum relative gradient error");
  gradcheck->add_option("--oracle-tolerance", oracle_tolerance,
                        "Maximum relative formula-oracle error");

  auto* compare = app.add_subcommand("compare", "Run the method comparison");
  std::optional<std::string> out_dir;
  std::vector<std::uint64_t> seeds;
  compare->add_option("--config", config_path, "Run configuration file");
  compare->add_option("--out-dir", out_dir, "Directory for reports");
  compare->add_option("--seeds", seeds, "Seeds")->delimiter(',');
  overrides.attach(compare);

  auto* sweep = app.add_subcommand("sweep", "Sweep the attribute-label fraction");
  std::vector<double> fractions;
  sweep->add_option("--config", config_path, "Run configuration file");
  sweep->add_option("--fractions", fractions, "Comma-separated fractions")
      ->delimiter(',');
  sweep->add_option("--out-dir", out_dir, "Directory for the table");
  sweep->add_option("--seeds", seeds, "Seeds")->delimiter(',');
  overrides.attach(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    if (*gradcheck) {
      return cmd_gradcheck(check_seed, tolerance, oracle_tolerance, out);
    }
    if (*eval) return cmd_eval(config_path, model_path, eval_data, report_path, out);

    RunConfig c = load(config_path);
    overrides.apply(c);
    if (out_dir) c.output.dir = *out_dir;
    if (!seeds.empty()) c.bench.seeds = seeds;
    if (!fractions.empty()) c.bench.fractions = fractions;
    if (*synth) {
      if (synth_seed) c.synth.seed = *synth_seed;
      if (out_train) c.output.train_data = *out_train;
      if (out_test) c.output.test_data = *out_test;
      return cmd_synth(std::move(c), out);
    }
    if (*train) {
      if (out_model) c.output.model = *out_model;
      if (log_path) c.output.log = *log_path;
      return cmd_train(std::move(c), data_path, aux_path, out);
    }
    if (*compare) return cmd_compare(std::move(c), out);
    return cmd_sweep(std::move(c), out);
  } catch (const NonFiniteLoss& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const DegenerateVector& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const VerificationFailure& e) {
    err << "error: " << e.what() << "\n";
    return kVerificationFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace pat::cli
