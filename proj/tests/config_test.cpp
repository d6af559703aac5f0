// Copyright 2026 The planeloc Authors
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

#include <set>
#include <string>

#include <gtest/gtest.h>

#include "planeloc/config.hpp"
#include "planeloc/error.hpp"
#include "test_util.hpp"

namespace planeloc {
namespace {

using testing::CodeOf;

TEST(RunConfig, DefaultsAreValid) {
  const RunConfig c;
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.Get("localize.lambda"), "0.5");
  EXPECT_EQ(c.Get("window.capacity"), "10");
  EXPECT_EQ(c.Get("planes.k"), "6");
  EXPECT_EQ(c.Get("planes.min_support"), "50");
  EXPECT_EQ(c.Get("localize.dist_thresh"), "0.2");
  EXPECT_EQ(c.Get("planes.angle_thresh_deg"), "15");
  EXPECT_EQ(c.Get("localize.sigma_px"), "1");
  EXPECT_EQ(c.Get("localize.sigma_plane"), "0.1");
  EXPECT_EQ(c.Get("planes.gap"), "0.5");
  EXPECT_EQ(c.Get("eval.mode"), "planar");
  EXPECT_EQ(c.Get("eval.align"), "false");
  EXPECT_EQ(c.Get("window.turn_boost"), "false");
}

TEST(RunConfig, SetGetEveryKey) {
  RunConfig c;
  const auto keys = RunConfig::Keys();
  EXPECT_EQ(std::set<std::string>(keys.begin(), keys.end()).size(), keys.size());
  for (const std::string& key : keys) {
    const std::string value = c.Get(key);
    EXPECT_NO_THROW(c.Set(key, value)) << key;
    EXPECT_EQ(c.Get(key), value) << key;
  }
  c.Set("localize.lambda", "0.25");
  EXPECT_EQ(c.localize.lambda_weight, 0.25);
  c.Set("seed", "18446744073709551615");
  EXPECT_EQ(c.seed, 18446744073709551615ull);
  c.Set("eval.mode", "spatial");
  EXPECT_EQ(c.eval_mode, AteMode::kSpatial);
  c.Set("sim.preset", "turn");
  EXPECT_EQ(c.sim.preset, "turn");
  c.Set("window.turn_boost", "true");
  EXPECT_TRUE(c.localize.window.turn_boost);
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
  RunConfig c;
  EXPECT_EQ(CodeOf([&] { c.Set("voting.radiuss", "1"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([&] { c.Get("nope"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([&] { c.Set("voting.sigma", "abc"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([&] { c.Set("voting.sigma", "1.5x"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([&] { c.Set("planes.k", "2.5"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([&] { c.Set("seed", "-1"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([&] { c.Set("eval.align", "maybe"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([&] { c.Set("eval.mode", "xy"); }), ErrorCode::kInvalidConfig);
}

TEST(RunConfig, ValidateChecksModuleInvariants) {
  const auto bad = [](const char* key, const char* value) {
    RunConfig c;
    c.Set(key, value);
    return CodeOf([&] { c.Validate(); });
  };
  EXPECT_EQ(bad("voting.min_neighbors", "2"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(bad("voting.sigma", "0"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(bad("planes.k", "0"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(bad("planes.gap", "-1"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(bad("localize.lambda", "1.5"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(bad("lm.damping_down", "2"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(bad("window.capacity", "0"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(bad("camera.fx", "0"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(bad("workers", "0"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(bad("sim.preset", "atrium"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(bad("sim.outlier_rate", "1.5"), ErrorCode::kInvalidConfig);
}

TEST(RunConfig, LoadTextReportsLines) {
  RunConfig c;
  c.LoadText("# run\n\nseed = 7\n  localize.lambda=1  \n", "cfg");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.localize.lambda_weight, 1.0);
  try {
    c.LoadText("seed = 3\n\nfoo.bar = 1\n", "cfg");
    FAIL() << "expected a ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.path(), "cfg");
  }
  try {
    c.LoadText("seed 3\n", "cfg");
    FAIL() << "expected a ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
  }
  EXPECT_EQ(CodeOf([&] { c.LoadFile("/nonexistent/planeloc.cfg"); }), ErrorCode::kIo);
}

TEST(RunConfig, SerializeRoundtrip) {
  RunConfig a;
  a.seed = 99;
  a.Set("voting.sigma", "0.3");
  a.Set("lm.max_iters", "17");
  a.Set("sim.preset", "orthogonal3");
  a.Set("localize.lambda", "0.1");
  a.Set("eval.align", "true");
  RunConfig b;
  b.LoadText(a.Serialize(), "echo");
  for (const std::string& key : RunConfig::Keys()) EXPECT_EQ(b.Get(key), a.Get(key)) << key;
  EXPECT_EQ(b.Serialize(), a.Serialize());
}

}  // namespace
}  // namespace planeloc
