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

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "pat/baselines.hpp"
#include "pat/errors.hpp"
#include "pat/synth.hpp"
#include "pat/trainer.hpp"
#include "support.hpp"

namespace pat {
namespace {

using testing::gender_race;
using testing::tiny_dataset;
using testing::worked_example_tree;

TrainConfig small_config(const AttributeSchema& schema, std::vector<int> widths,
                         int classes) {
  TrainConfig c;
  c.schema = schema;
  c.widths = std::move(widths);
  c.classes = classes;
  c.iterations = 40;
  c.batch_size = 8;
  return c;
}

TEST(Batches, ShapesAndDeterminism) {
  const Dataset d = tiny_dataset(10, 3, 1, 2);
  const auto b = make_batches(d, 4, 1, 0);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0].size(), 4u);
  EXPECT_EQ(b[2].size(), 2u);
  EXPECT_EQ(b, make_batches(d, 4, 1, 0));
  EXPECT_NE(b, make_batches(d, 4, 1, 1));
  std::set<std::size_t> seen;
  for (const Batch& batch : b) seen.insert(batch.begin(), batch.end());
  EXPECT_EQ(seen.size(), 10u);
}

TEST(Batches, EmptyDatasetThrows) {
  Dataset d;
  d.input_width = 2;
  EXPECT_THROW(make_batches(d, 4, 1, 0), EmptyDataset);
}

TEST(Batches, TwoSourcesDrawHalfFromAuxiliary) {
  Dataset primary = tiny_dataset(20, 3, 1, 2, 1);
  Dataset aux = tiny_dataset(6, 3, 1, 2, 2);
  const Dataset merged = merge_sources(primary, aux);
  ASSERT_TRUE(merged.has_two_sources());
  for (const Batch& b : make_batches(merged, 8, 3, 0)) {
    int from_aux = 0;
    for (std::size_t i : b) from_aux += merged.samples[i].source == Source::auxiliary;
    if (b.size() == 8) {
      EXPECT_EQ(from_aux, 4);
    }
  }
}

TEST(Config, ValidateRejectsBadValues) {
  TrainConfig c;
  c.mu = 0.0;
  EXPECT_THROW(c.validate(), InvalidConfig);
  c = TrainConfig{};
  c.lambda = -1;
  EXPECT_THROW(c.validate(), InvalidConfig);
  c = TrainConfig{};
  c.widths = {16, 64};
  EXPECT_THROW(c.validate(), InvalidConfig);
  c = TrainConfig{};
  c.attribute_label_fraction = 1.5;
  EXPECT_THROW(c.validate(), InvalidConfig);
  EXPECT_NO_THROW(TrainConfig{}.validate());
  EXPECT_DOUBLE_EQ(TrainConfig{}.lambda, 0.1);
  EXPECT_DOUBLE_EQ(TrainConfig{}.alpha, 1.0);
}

TEST(TrainStep, WorkedCenterUpdate) {
  TrainConfig c = small_config(AttributeSchema({{"g", 2}}), {2, 2, 2}, 2);
  c.mu = 0.0;
  TrainState state;
  state.model.tree = worked_example_tree();
  state.model.head = LeafClassifiers(2, 2, 2);
  Dataset d;
  d.input_width = 2;
  d.attribute_levels = 1;
  Sample s;
  s.features = {1.0, 0.0};
  s.attributes = {0};
  s.label = 0;
  d.samples.push_back(s);
  const LossRecord r = train_step(state, d, {0}, c);
  const Matrix& centers = state.model.tree.node(0, 0).centers;
  EXPECT_NEAR(centers(1, 0), -0.13447071068499755, 1e-12);
  EXPECT_DOUBLE_EQ(centers(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(centers(0, 0), 1.0);
  EXPECT_NEAR(r.pat, 0.2689414213699951, 1e-12);
  EXPECT_NEAR(r.marginal, std::log(2.0), 1e-12);
}

TEST(TrainStep, ZeroRatesFreezeParametersButRecordLosses) {
  TrainConfig c = small_config(gender_race(), {3, 12, 12, 12}, 3);
  c.mu = 0.0;
  c.alpha = 0.0;
  const Dataset d = tiny_dataset(16, 3, 2, 3);
  TrainState state = init_state(c);
  const PatModel before = state.model;
  const LossRecord r = train_step(state, d, make_batches(d, 8, 1, 0)[0], c);
  EXPECT_EQ(state.model, before);
  EXPECT_GT(r.marginal, 0.0);
  EXPECT_EQ(state.iteration, 1);
  EXPECT_EQ(state.history.size(), 1u);
}

TEST(Training, DeterministicAndConsistentLosses) {
  const TrainConfig c = small_config(gender_race(), {3, 12, 12, 12}, 3);
  const Dataset d = tiny_dataset(40, 3, 2, 3);
  const TrainState a = run_training(d, c);
  const TrainState b = run_training(d, c);
  EXPECT_EQ(a.model, b.model);
  ASSERT_EQ(a.history.size(), 40u);
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    const LossRecord& r = a.history[i];
    EXPECT_EQ(r.iteration, static_cast<int>(i) + 1);
    EXPECT_EQ(r.total, b.history[i].total);
    EXPECT_GE(r.marginal, 0.0);
    EXPECT_GE(r.pat, 0.0);
    EXPECT_NEAR(r.total, r.marginal + c.lambda * r.pat, 1e-12);
  }
}

TEST(Training, SingleIterationEqualsOneStep) {
  TrainConfig c = small_config(gender_race(), {3, 12, 12, 12}, 3);
  c.iterations = 1;
  const Dataset d = tiny_dataset(20, 3, 2, 3);
  const TrainState run = run_training(d, c);
  TrainState manual = init_state(c);
  train_step(manual, d, make_batches(d, c.batch_size, c.seed, 0)[0], c);
  EXPECT_EQ(run.model, manual.model);
}

TEST(Training, FractionZeroLeavesCentersUntouched) {
  TrainConfig c = small_config(gender_race(), {3, 12, 12, 12}, 3);
  c.attribute_label_fraction = 0.0;
  const Dataset d = tiny_dataset(30, 3, 2, 3);
  const TrainState init = init_state(c);
  const TrainState done = run_training(d, c);
  for (int j = 0; j < 2; ++j) {
    for (std::size_t k = 0; k < done.model.tree.level(j).size(); ++k) {
      EXPECT_EQ(done.model.tree.node(j, k).centers, init.model.tree.node(j, k).centers);
    }
  }
  for (const LossRecord& r : done.history) EXPECT_EQ(r.pat, 0.0);
}

TEST(Training, RootOnlyTreeMatchesFlatNetworkBitForBit) {
  SynthConfig sc;
  sc.schema = AttributeSchema{};
  sc.n_train = 200;
  sc.n_test = 1;
  const Dataset d = generate(sc).train;
  TrainConfig c = small_config(AttributeSchema{}, {16, 12}, 7);
  c.iterations = 60;
  const TrainState pat = run_training(d, c);
  const FlatTrainResult flat = train_flat(d, {12}, c);
  ASSERT_EQ(pat.history.size(), flat.history.size());
  for (std::size_t i = 0; i < pat.history.size(); ++i) {
    EXPECT_EQ(pat.history[i].total, flat.history[i].total) << "iteration " << i;
  }
}

TEST(Training, StripLabelsKeepsRequestedShare) {
  const Dataset d = tiny_dataset(40, 3, 2, 3);
  const Dataset s = strip_attribute_labels(d, 0.25, 7);
  int labeled = 0;
  for (const Sample& x : s.samples) labeled += labeled_depth(x.attributes) > 0;
  EXPECT_EQ(labeled, 10);
  EXPECT_EQ(s, strip_attribute_labels(d, 0.25, 7));
}

TEST(Training, NonFiniteInputAborts) {
  TrainConfig c = small_config(gender_race(), {3, 12, 12, 12}, 3);
  Dataset d = tiny_dataset(8, 3, 2, 3);
  c.mu = 1e300;
  EXPECT_THROW(run_training(d, c), Error);
}

}  // namespace
}  // namespace pat
