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

#include "planeloc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include <Eigen/SVD>

#include "planeloc/error.hpp"

namespace planeloc {
namespace {

struct Token {
  std::string_view text;
  int column = 0;  // 1-based
};

std::vector<Token> SplitWhitespace(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

std::vector<Token> SplitCommas(std::string_view line) {
  std::vector<Token> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? line.size() : comma;
    std::string_view field = line.substr(start, end - start);
    std::size_t lead = 0;
    while (lead < field.size() && (field[lead] == ' ' || field[lead] == '\t')) ++lead;
    field.remove_prefix(lead);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) {
      field.remove_suffix(1);
    }
    out.push_back({field, static_cast<int>(start + lead) + 1});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Iterates data lines, skipping comments and blanks, tracking line numbers.
class LineReader {
 public:
  LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  bool Next(std::string_view* line) {
    while (std::getline(in_, buffer_)) {
      ++line_number_;
      if (!buffer_.empty() && buffer_.back() == '\r') buffer_.pop_back();
      std::size_t first = buffer_.find_first_not_of(" \t");
      if (first == std::string::npos || buffer_[first] == '#') continue;
      *line = buffer_;
      return true;
    }
    if (in_.bad()) throw Error(ErrorCode::kIo, "read failure in " + name_);
    return false;
  }

  [[noreturn]] void Fail(int column, const std::string& message) const {
    throw ParseError(name_, line_number_, column, message);
  }

  int line() const { return line_number_; }

 private:
  std::istream& in_;
  std::string name_;
  std::string buffer_;
  int line_number_ = 0;
};

double ParseDouble(const LineReader& reader, const Token& token) {
  const char* first = token.text.data();
  const char* last = first + token.text.size();
  if (first != last && *first == '+') ++first;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || token.text.empty()) {
    reader.Fail(token.column, "expected a number, got '" + std::string(token.text) + "'");
  }
  if (!std::isfinite(value)) reader.Fail(token.column, "number is not finite");
  return value;
}

int ParseInt(const LineReader& reader, const Token& token) {
  const char* first = token.text.data();
  const char* last = first + token.text.size();
  int value = 0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || token.text.empty()) {
    reader.Fail(token.column, "expected an integer, got '" + std::string(token.text) + "'");
  }
  return value;
}

void ExpectCount(const LineReader& reader, const std::vector<Token>& tokens, std::size_t n) {
  if (tokens.size() != n) {
    const int column = tokens.size() > n ? tokens[n].column : 0;
    reader.Fail(column, "expected " + std::to_string(n) + " fields, found " +
                            std::to_string(tokens.size()));
  }
}

std::ifstream OpenForRead(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

constexpr std::string_view kObservationHeader = "frame_id,landmark_id,u,v,disparity";

}  // namespace

std::string FormatDouble(double value) {
  if (value == 0.0) return "0";  // also folds -0
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error(ErrorCode::kIo, "number formatting failed");
  return std::string(buf, ptr);
}

PointCloud ReadCloud(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  return ReadCloud(in, path.string());
}

PointCloud ReadCloud(std::istream& in, const std::string& name) {
  LineReader reader(in, name);
  PointCloud cloud;
  std::string_view line;
  while (reader.Next(&line)) {
    const auto tokens = SplitWhitespace(line);
    ExpectCount(reader, tokens, 3);
    cloud.points.emplace_back(ParseDouble(reader, tokens[0]), ParseDouble(reader, tokens[1]),
                              ParseDouble(reader, tokens[2]));
  }
  return cloud;
}

void WriteCloud(const PointCloud& cloud, const std::filesystem::path& path) {
  std::string text;
  for (const Vec3& p : cloud.points) {
    text += FormatDouble(p.x()) + ' ' + FormatDouble(p.y()) + ' ' + FormatDouble(p.z()) + '\n';
  }
  WriteText(path, text);
}

std::vector<Observation> ReadObservations(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  return ReadObservations(in, path.string());
}

std::vector<Observation> ReadObservations(std::istream& in, const std::string& name) {
  LineReader reader(in, name);
  std::string_view line;
  if (!reader.Next(&line)) throw ParseError(name, 1, 0, "missing observation header");
  {
    std::string header;
    for (char c : line) {
      if (c != ' ' && c != '\t') header += c;
    }
    if (header != kObservationHeader) {
      reader.Fail(1, "expected header '" + std::string(kObservationHeader) + "'");
    }
  }
  std::vector<Observation> out;
  while (reader.Next(&line)) {
    const auto tokens = SplitCommas(line);
    ExpectCount(reader, tokens, 5);
    Observation obs;
    obs.frame_id = ParseInt(reader, tokens[0]);
    obs.landmark_id = ParseInt(reader, tokens[1]);
    if (obs.frame_id < 0) reader.Fail(tokens[0].column, "frame id must be non-negative");
    obs.pixel = Vec2(ParseDouble(reader, tokens[2]), ParseDouble(reader, tokens[3]));
    if (!tokens[4].text.empty()) obs.disparity = ParseDouble(reader, tokens[4]);
    out.push_back(obs);
  }
  return out;
}

void WriteObservations(std::span<const Observation> observations,
                       const std::filesystem::path& path) {
  std::string text(kObservationHeader);
  text += '\n';
  for (const Observation& o : observations) {
    text += std::to_string(o.frame_id) + ',' + std::to_string(o.landmark_id) + ',' +
            FormatDouble(o.pixel.x()) + ',' + FormatDouble(o.pixel.y()) + ',' +
            (o.disparity ? FormatDouble(*o.disparity) : std::string()) + '\n';
  }
  WriteText(path, text);
}

Trajectory ReadTrajectory(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  return ReadTrajectory(in, path.string());
}

Trajectory ReadTrajectory(std::istream& in, const std::string& name) {
  LineReader reader(in, name);
  Trajectory traj;
  std::string_view line;
  while (reader.Next(&line)) {
    const auto tokens = SplitWhitespace(line);
    ExpectCount(reader, tokens, 12);
    Mat3 r;
    Vec3 t;
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) r(row, col) = ParseDouble(reader, tokens[row * 4 + col]);
      t[row] = ParseDouble(reader, tokens[row * 4 + 3]);
    }
    const double deviation = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (!(r.determinant() > 0.0) || deviation > 1e-6) {
      throw Error(ErrorCode::kNonRigidPose,
                  name + ":" + std::to_string(reader.line()) + ": rotation block is not a rotation");
    }
    if (deviation > 1e-12) {
      Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
      r = svd.matrixU() * svd.matrixV().transpose();
    }
    traj.frame_ids.push_back(static_cast<int>(traj.poses.size()));
    traj.poses.push_back(Pose(r, t).Inverse());
  }
  return traj;
}

std::string FormatKittiLine(const Pose& pose) {
  const Pose wc = pose.Inverse();
  std::string line;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) {
      line += FormatDouble(wc.rotation()(row, col));
      line += ' ';
    }
    line += FormatDouble(wc.translation()[row]);
    line += row < 2 ? ' ' : '\n';
  }
  return line;
}

void WriteTrajectory(const Trajectory& trajectory, const std::filesystem::path& path) {
  std::string text;
  for (const Pose& p : trajectory.poses) text += FormatKittiLine(p);
  WriteText(path, text);
}

std::vector<Plane> ReadPlanes(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  return ReadPlanes(in, path.string());
}

std::vector<Plane> ReadPlanes(std::istream& in, const std::string& name) {
  LineReader reader(in, name);
  std::vector<Plane> planes;
  std::string_view line;
  while (reader.Next(&line)) {
    const auto tokens = SplitWhitespace(line);
    ExpectCount(reader, tokens, 6);
    Plane p;
    p.id = ParseInt(reader, tokens[0]);
    p.normal = Vec3(ParseDouble(reader, tokens[1]), ParseDouble(reader, tokens[2]),
                    ParseDouble(reader, tokens[3]));
    p.offset = ParseDouble(reader, tokens[4]);
    p.support_count = ParseInt(reader, tokens[5]);
    const double norm = p.normal.norm();
    if (std::abs(norm - 1.0) > 1e-6) reader.Fail(tokens[1].column, "normal is not unit length");
    if (std::abs(norm - 1.0) > 1e-12) p.normal /= norm;
    if (p.support_count < 0) reader.Fail(tokens[5].column, "negative support count");
    for (const Plane& q : planes) {
      if (q.id == p.id) reader.Fail(tokens[0].column, "duplicate plane id");
    }
    planes.push_back(p);
  }
  return planes;
}

void WritePlanes(std::span<const Plane> planes, const std::filesystem::path& path) {
  std::string text;
  for (const Plane& p : planes) {
    text += std::to_string(p.id) + ' ' + FormatDouble(p.normal.x()) + ' ' +
            FormatDouble(p.normal.y()) + ' ' + FormatDouble(p.normal.z()) + ' ' +
            FormatDouble(p.offset) + ' ' + std::to_string(p.support_count) + '\n';
  }
  WriteText(path, text);
}

}  // namespace planeloc
