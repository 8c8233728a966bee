// Copyright 2026 The amm-align Authors
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
#include <limits>

#include <gtest/gtest.h>

#include "amm/errors.hpp"
#include "amm/optim.hpp"
#include "test_util.hpp"

namespace amm {
namespace {

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  Rng rng(1);
  Matrix p = testing::random_matrix(3, 4, rng);
  const Matrix before = p;
  const Matrix g(3, 4);
  AdamState state(0.001);
  const ParamSlot slots[] = {{"p", p, g}};
  adam_step(state, slots);
  EXPECT_EQ(p, before);
  EXPECT_EQ(state.t, 1u);
}

TEST(Adam, FirstStepClosedForm) {
  Matrix p{{0.0}};
  const Matrix g{{2.0}};
  AdamState state(0.001);
  const ParamSlot slots[] = {{"p", p, g}};
  adam_step(state, slots);
  EXPECT_NEAR(p(0, 0), -0.000999999995, 1e-18);
}

TEST(Adam, RepeatedStepsAreNotIdempotent) {
  Matrix p{{0.0}};
  const Matrix g{{2.0}};
  AdamState state(0.001);
  const ParamSlot slots[] = {{"p", p, g}};
  adam_step(state, slots);
  const double after_one = p(0, 0);
  adam_step(state, slots);
  EXPECT_EQ(state.t, 2u);
  EXPECT_NE(p(0, 0), 2.0 * after_one);
  EXPECT_NE(state.m[0](0, 0), 2.0 * (1.0 - state.beta1));
}

TEST(Adam, FirstStepMagnitudeBoundedByLearningRate) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    Matrix p = testing::random_matrix(5, 5, rng);
    const Matrix before = p;
    Matrix g = testing::random_matrix(5, 5, rng, std::pow(10.0, rng.uniform(-6, 6)));
    AdamState state(0.01);
    const ParamSlot slots[] = {{"p", p, g}};
    adam_step(state, slots);
    for (std::size_t k = 0; k < p.size(); ++k)
      EXPECT_LE(std::abs(p.values()[k] - before.values()[k]), 0.01 * (1.0 + 1e-12));
  }
}

TEST(Adam, DeterministicGivenSameInputs) {
  Rng rng(4);
  const Matrix p0 = testing::random_matrix(2, 3, rng);
  const Matrix g = testing::random_matrix(2, 3, rng);
  Matrix a = p0, b = p0;
  AdamState sa(0.05), sb(0.05);
  for (int i = 0; i < 5; ++i) {
    const ParamSlot slot_a[] = {{"p", a, g}};
    const ParamSlot slot_b[] = {{"p", b, g}};
    adam_step(sa, slot_a);
    adam_step(sb, slot_b);
  }
  EXPECT_EQ(a, b);
  for (double v : sa.v[0].values()) EXPECT_GE(v, 0.0);
}

TEST(Adam, ShapeMismatchThrows) {
  Matrix p(2, 2);
  const Matrix g(2, 3);
  AdamState state;
  const ParamSlot slots[] = {{"p", p, g}};
  EXPECT_THROW(adam_step(state, slots), ShapeError);
}

TEST(Adam, NonFiniteGradientNamesParameterAndLeavesStateUntouched) {
  Matrix p{{1.0, 2.0}};
  Matrix q{{3.0}};
  const Matrix gp{{0.1, 0.2}};
  const Matrix gq{{std::numeric_limits<double>::quiet_NaN()}};
  AdamState state;
  const ParamSlot slots[] = {{"weights", p, gp}, {"bias", q, gq}};
  try {
    adam_step(state, slots);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("bias"), std::string::npos);
  }
  EXPECT_EQ(p, (Matrix{{1.0, 2.0}}));
  EXPECT_EQ(state.t, 0u);
}

TEST(Adam, HeadOverloadUpdatesAllFourTensors) {
  Rng rng(5);
  GluMlpHead head = head_init({3, 2, 2}, rng);
  const GluMlpHead before = head;
  HeadGradients g = GluMlpHead::zeros({3, 2, 2});
  for (Matrix* m : g.parameters())
    for (double& v : m->values()) v = 1.0;
  AdamState state(0.1);
  adam_step(state, head, g);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& now = *head.parameters()[k];
    const auto& was = *before.parameters()[k];
    for (std::size_t i = 0; i < now.size(); ++i)
      EXPECT_NEAR(now.values()[i], was.values()[i] - 0.1, 1e-9);
  }
}

}  // namespace
}  // namespace amm
