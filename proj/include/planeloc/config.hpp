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

// Flat key=value run configuration shared by every command.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "planeloc/evaluation.hpp"
#include "planeloc/optimizer.hpp"
#include "planeloc/plane_map.hpp"

namespace planeloc {

struct SimulationSettings {
  std::string preset = "corridor";
  double sigma_map = 0.01;
  double sigma_px = 1.0;
  double outlier_rate = 0.0;
  int frames = 0;                    // 0 keeps the preset's value
  int landmarks = 0;                 // 0 keeps the preset's value
  double on_plane_fraction = -1.0;   // negative keeps the preset's value
  int image_width = 1240;
  int image_height = 376;
};

struct RunConfig {
  std::uint64_t seed = 0;
  int workers = 1;
  PlaneExtractionParams planes;  // includes voting parameters
  LocalizerConfig localize;      // includes camera, window and LM settings
  SimulationSettings sim;
  AteMode eval_mode = AteMode::kPlanar;
  bool eval_align = false;

  // Throws Error(kInvalidConfig) for an unknown key or a malformed value.
  void Set(const std::string& key, const std::string& value);
  std::string Get(const std::string& key) const;
  static std::vector<std::string> Keys();

  // Reads "key = value" lines ('#' comments) on top of the current values.
  // Throws ParseError for malformed lines and unknown keys.
  void LoadFile(const std::filesystem::path& path);
  void LoadText(const std::string& text, const std::string& name);

  // Every key in Keys() order; LoadText(Serialize()) restores the config.
  std::string Serialize() const;

  // Throws Error(kInvalidConfig) naming the first offending setting.
  void Validate() const;
};

}  // namespace planeloc
