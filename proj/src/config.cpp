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

#include "planeloc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "planeloc/error.hpp"
#include "planeloc/io.hpp"
#include "planeloc/synthetic.hpp"

namespace planeloc {
namespace {

[[noreturn]] void BadValue(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::kInvalidConfig, "invalid value '" + value + "' for " + key);
}

double ToDouble(const std::string& key, const std::string& value) {
  double v = 0.0;
  const char* first = value.data();
  const char* last = first + value.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (value.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    BadValue(key, value);
  }
  return v;
}

template <class Int>
Int ToInt(const std::string& key, const std::string& value) {
  Int v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    BadValue(key, value);
  }
  return v;
}

bool ToBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  BadValue(key, value);
}

struct Entry {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <class Access>
Entry Real(std::string key, Access access) {
  return {key, [access](const RunConfig& c) { return FormatDouble(access(const_cast<RunConfig&>(c))); },
          [access, key](RunConfig& c, const std::string& v) { access(c) = ToDouble(key, v); }};
}

template <class Access>
Entry Integer(std::string key, Access access) {
  using T = std::remove_reference_t<decltype(access(std::declval<RunConfig&>()))>;
  return {key, [access](const RunConfig& c) { return std::to_string(access(const_cast<RunConfig&>(c))); },
          [access, key](RunConfig& c, const std::string& v) { access(c) = ToInt<T>(key, v); }};
}

template <class Access>
Entry Flag(std::string key, Access access) {
  return {key,
          [access](const RunConfig& c) {
            return std::string(access(const_cast<RunConfig&>(c)) ? "true" : "false");
          },
          [access, key](RunConfig& c, const std::string& v) { access(c) = ToBool(key, v); }};
}

#define PL_FIELD(expr) [](RunConfig& c) -> auto& { return c.expr; }

const std::vector<Entry>& Table() {
  static const std::vector<Entry> table = {
      Integer("seed", PL_FIELD(seed)),
      Integer("workers", PL_FIELD(workers)),
      Real("voting.sigma", PL_FIELD(planes.voting.sigma)),
      Real("voting.radius", PL_FIELD(planes.voting.radius)),
      Integer("voting.min_neighbors", PL_FIELD(planes.voting.min_neighbors)),
      Integer("planes.k", PL_FIELD(planes.k)),
      Integer("planes.kmeans_max_iters", PL_FIELD(planes.kmeans_max_iters)),
      Integer("planes.min_support", PL_FIELD(planes.min_support)),
      Real("planes.gap", PL_FIELD(planes.gap)),
      Real("planes.angle_thresh_deg", PL_FIELD(planes.angle_thresh_deg)),
      Real("planes.support_cell", PL_FIELD(planes.support_cell)),
      Real("camera.fx", PL_FIELD(localize.camera.fx)),
      Real("camera.fy", PL_FIELD(localize.camera.fy)),
      Real("camera.cx", PL_FIELD(localize.camera.cx)),
      Real("camera.cy", PL_FIELD(localize.camera.cy)),
      Real("camera.baseline", PL_FIELD(localize.camera.baseline)),
      Real("localize.lambda", PL_FIELD(localize.lambda_weight)),
      Real("localize.sigma_px", PL_FIELD(localize.sigma_px)),
      Real("localize.sigma_plane", PL_FIELD(localize.sigma_plane)),
      Real("localize.dist_thresh", PL_FIELD(localize.assoc_dist)),
      Integer("localize.min_obs", PL_FIELD(localize.min_obs)),
      Real("localize.depth_epsilon", PL_FIELD(localize.depth_epsilon)),
      Real("localize.disparity_epsilon", PL_FIELD(localize.disparity_epsilon)),
      Integer("window.capacity", PL_FIELD(localize.window.capacity)),
      Flag("window.turn_boost", PL_FIELD(localize.window.turn_boost)),
      Real("window.turn_threshold_deg", PL_FIELD(localize.window.turn_threshold_deg)),
      Integer("window.boost_frames", PL_FIELD(localize.window.boost_frames)),
      Real("lm.initial_damping", PL_FIELD(localize.lm.initial_damping)),
      Real("lm.damping_up", PL_FIELD(localize.lm.damping_up)),
      Real("lm.damping_down", PL_FIELD(localize.lm.damping_down)),
      Real("lm.min_damping", PL_FIELD(localize.lm.min_damping)),
      Integer("lm.max_iters", PL_FIELD(localize.lm.max_iters)),
      Real("lm.cost_tol", PL_FIELD(localize.lm.cost_tol)),
      Real("lm.step_tol", PL_FIELD(localize.lm.step_tol)),
      {"sim.preset", [](const RunConfig& c) { return c.sim.preset; },
       [](RunConfig& c, const std::string& v) { c.sim.preset = v; }},
      Real("sim.sigma_map", PL_FIELD(sim.sigma_map)),
      Real("sim.sigma_px", PL_FIELD(sim.sigma_px)),
      Real("sim.outlier_rate", PL_FIELD(sim.outlier_rate)),
      Integer("sim.frames", PL_FIELD(sim.frames)),
      Integer("sim.landmarks", PL_FIELD(sim.landmarks)),
      Real("sim.on_plane_fraction", PL_FIELD(sim.on_plane_fraction)),
      Integer("sim.image_width", PL_FIELD(sim.image_width)),
      Integer("sim.image_height", PL_FIELD(sim.image_height)),
      {"eval.mode", [](const RunConfig& c) { return std::string(AteModeName(c.eval_mode)); },
       [](RunConfig& c, const std::string& v) {
         if (v != "planar" && v != "spatial") BadValue("eval.mode", v);
         c.eval_mode = ParseAteMode(v);
       }},
      Flag("eval.align", PL_FIELD(eval_align)),
  };
  return table;
}

#undef PL_FIELD

const Entry& Lookup(const std::string& key) {
  for (const Entry& e : Table()) {
    if (e.key == key) return e;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + key + "'");
}

std::string Trim(std::string_view s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const std::size_t b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

template <class Fn>
void Check(const std::string& what, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidConfig) throw;
    throw Error(ErrorCode::kInvalidConfig, what + ": " + e.what());
  }
}

}  // namespace

void RunConfig::Set(const std::string& key, const std::string& value) {
  Lookup(key).set(*this, value);
}

std::string RunConfig::Get(const std::string& key) const { return Lookup(key).get(*this); }

std::vector<std::string> RunConfig::Keys() {
  std::vector<std::string> keys;
  for (const Entry& e : Table()) keys.push_back(e.key);
  return keys;
}

void RunConfig::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  LoadText(text.str(), path.string());
}

void RunConfig::LoadText(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) throw ParseError(name, number, 0, "expected key = value");
    try {
      Set(Trim(std::string_view(trimmed).substr(0, eq)),
          Trim(std::string_view(trimmed).substr(eq + 1)));
    } catch (const Error& e) {
      throw ParseError(name, number, 0, e.what());
    }
  }
}

std::string RunConfig::Serialize() const {
  std::string out = "# effective configuration\n";
  for (const Entry& e : Table()) out += e.key + " = " + e.get(*this) + "\n";
  return out;
}

void RunConfig::Validate() const {
  if (workers < 1) throw Error(ErrorCode::kInvalidConfig, "workers must be >= 1");
  Check("planes", [&] { planes.Validate(); });
  Check("localize", [&] { localize.Validate(); });
  const auto names = PresetNames();
  if (std::find(names.begin(), names.end(), sim.preset) == names.end()) {
    throw Error(ErrorCode::kInvalidConfig, "unknown scene preset '" + sim.preset + "'");
  }
  if (!(sim.sigma_map >= 0.0) || !(sim.sigma_px >= 0.0) ||
      !(sim.outlier_rate >= 0.0 && sim.outlier_rate <= 1.0) || sim.frames < 0 ||
      sim.landmarks < 0 || sim.on_plane_fraction > 1.0 || sim.image_width < 1 ||
      sim.image_height < 1) {
    throw Error(ErrorCode::kInvalidConfig, "invalid sim.* setting");
  }
}

}  // namespace planeloc
