// Copyright 2026 The qrem Authors
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

#ifndef QREM_IO_HPP
#define QREM_IO_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrem/distribution.hpp"
#include "qrem/errors.hpp"
#include "qrem/mixture.hpp"
#include "qrem/noise_model.hpp"
#include "qrem/version.hpp"

namespace qrem {

using json = nlohmann::json;

// File formats.
//
// Shots, text (.txt): one bitstring per line, '0'/'1' characters, leftmost
// character is qubit 0; blank lines and lines starting with '#' are
// ignored; all lines must have equal length.
//
// Shots, structured (.json): {"n": <int>, "counts": {"<bitstring>": <count>}};
// expanded lexicographically by bitstring, each repeated count times, so
// downstream resampling is reproducible.
//
// Calibration (.json): {"qubits": [{"r1_given_0": x, "r0_given_1": y}, ...]};
// list order defines the qubit index.
//
// Distribution (.json): {"n": <int>, "normalization_mode": "probability"|
// "quasi", "weights": {"<bitstring>": <weight>}}.
//
// Results (.json): {"manifest": {...}, "results": {...}, "table": [...]?};
// when a table is present it is mirrored to a sibling .csv with columns
// method, subgroup_or_resample_index, value.

/// FNV-1a digest of a file's bytes, for the manifest's input records.
inline std::uint64_t fnv1a64_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open file: " + path.string());
  }
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[4096];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

inline std::string hex_digest(std::uint64_t value) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << value;
  return out.str();
}

/// Everything needed to reproduce a run: command, full configuration with
/// seeds, input digests, artifact version. Wall-clock duration is recorded
/// for reporting and is the only field that varies between identical runs.
struct RunManifest {
  std::string command;
  json config = json::object();
  json inputs = json::object();
  std::vector<std::string> warnings;
  double duration_ms = 0.0;

  void add_input(const std::string &name, const std::filesystem::path &path) {
    // Digest first: it throws on unreadable files, and must not do so while
    // a json initializer list is mid-construction.
    const std::string digest = hex_digest(fnv1a64_file(path));
    inputs[name] = {{"path", path.string()}, {"fnv1a64", digest}};
  }

  json to_json() const {
    json j;
    j["command"] = command;
    j["config"] = config;
    j["inputs"] = inputs;
    j["seed"] = config.contains("seed") ? config["seed"] : json(nullptr);
    j["version"] = kVersion;
    j["duration_ms"] = duration_ms;
    j["warnings"] = warnings;
    return j;
  }
};

struct TableRow {
  std::string method;
  std::size_t index = 0;
  double value = 0.0;
};

namespace detail {

inline void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
  const auto parent = path.parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot write to " + tmp.string());
    }
    out << content;
    if (!out) {
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw IoError("cannot rename " + tmp.string() + " to " + path.string());
  }
}

inline std::string format_value(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace detail

inline ShotRecord read_shots_text(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open shots file: " + path.string());
  }
  std::vector<Bitstring> shots;
  std::string line;
  std::size_t n = 0;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') {
      continue;
    }
    if (shots.empty()) {
      n = line.size();
    } else if (line.size() != n) {
      throw ParseError(path.string() + ":" + std::to_string(line_number) +
                       ": ragged line length (expected " + std::to_string(n) + ")");
    }
    shots.push_back(Bitstring::from_text(line));
  }
  if (shots.empty()) {
    throw ParseError(path.string() + ": no shots found");
  }
  return ShotRecord::from_shots(n, std::move(shots));
}

inline ShotRecord read_shots_counts(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open shots file: " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception &e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("counts") ||
      !doc["n"].is_number_integer() || !doc["counts"].is_object()) {
    throw ParseError(path.string() + ": expected fields n (integer) and counts (object)");
  }
  const auto n = doc["n"].get<std::int64_t>();
  if (n < 1) {
    throw ParseError(path.string() + ": qubit count must be positive");
  }
  std::vector<Bitstring> shots;
  // nlohmann objects iterate in sorted key order, which for equal-length
  // 0/1 strings is the lexicographic expansion order the format requires.
  for (const auto &[text, count_json] : doc["counts"].items()) {
    if (text.size() != static_cast<std::size_t>(n)) {
      throw ParseError(path.string() + ": bitstring '" + text + "' does not have length " +
                       std::to_string(n));
    }
    if (!count_json.is_number_integer() || count_json.get<std::int64_t>() <= 0) {
      throw ParseError(path.string() + ": count for '" + text + "' must be a positive integer");
    }
    const Bitstring bits = Bitstring::from_text(text);
    for (std::int64_t i = 0; i < count_json.get<std::int64_t>(); ++i) {
      shots.push_back(bits);
    }
  }
  if (shots.empty()) {
    throw ParseError(path.string() + ": counts object is empty");
  }
  return ShotRecord::from_shots(static_cast<std::size_t>(n), std::move(shots));
}

/// Format is selected by extension: .txt for text, .json for counts.
inline ShotRecord read_shots(const std::filesystem::path &path) {
  const auto ext = path.extension().string();
  if (ext == ".txt" || ext == ".text") {
    return read_shots_text(path);
  }
  if (ext == ".json") {
    return read_shots_counts(path);
  }
  throw ParseError(path.string() + ": unrecognized shots extension '" + ext +
                   "' (expected .txt or .json)");
}

/// Parses the calibration document; exact 0/1 rates are clamped and the
/// affected qubits reported through the channel's clamp list.
inline ProductChannel read_calibration(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open calibration file: " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception &e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("qubits") || !doc["qubits"].is_array() ||
      doc["qubits"].empty()) {
    throw ParseError(path.string() + ": expected a non-empty qubits array");
  }
  std::vector<QubitChannel> qubits;
  qubits.reserve(doc["qubits"].size());
  for (const auto &entry : doc["qubits"]) {
    if (!entry.is_object() || !entry.contains("r1_given_0") || !entry.contains("r0_given_1") ||
        !entry["r1_given_0"].is_number() || !entry["r0_given_1"].is_number()) {
      throw ParseError(path.string() + ": each qubit needs numeric r1_given_0 and r0_given_1");
    }
    const double r10 = entry["r1_given_0"].get<double>();
    const double r01 = entry["r0_given_1"].get<double>();
    if (!(r10 >= 0.0 && r10 <= 1.0) || !(r01 >= 0.0 && r01 <= 1.0)) {
      throw ParseError(path.string() + ": rates must lie in [0, 1]");
    }
    qubits.push_back(QubitChannel{r10, r01});
  }
  try {
    return load_calibration(std::move(qubits));
  } catch (const std::invalid_argument &e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline json distribution_to_json(const SparseDistribution &dist) {
  json weights = json::object();
  for (const auto &[bits, w] : dist.weights()) {
    weights[bits.to_text()] = w;
  }
  return json{{"n", dist.qubit_count()},
              {"normalization_mode",
               dist.mode() == NormalizationMode::probability ? "probability" : "quasi"},
              {"weights", weights}};
}

inline SparseDistribution distribution_from_json(const json &doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("weights") ||
      !doc.contains("normalization_mode")) {
    throw ParseError("distribution document needs n, normalization_mode and weights");
  }
  const auto n = doc["n"].get<std::size_t>();
  const std::string mode = doc["normalization_mode"].get<std::string>();
  std::map<Bitstring, double> weights;
  for (const auto &[text, value] : doc["weights"].items()) {
    weights.emplace(Bitstring::from_text(text), value.get<double>());
  }
  if (mode == "probability") {
    return SparseDistribution::probability(n, std::move(weights));
  }
  if (mode == "quasi") {
    return SparseDistribution::quasi(n, std::move(weights));
  }
  throw ParseError("unknown normalization_mode '" + mode + "'");
}

inline SparseDistribution read_distribution(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open distribution file: " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception &e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
  return distribution_from_json(doc);
}

inline json mixture_to_json(const MixtureModel &model) {
  json components = json::array();
  for (const auto &c : model.components) {
    components.push_back({{"bitstring", c.bitstring.to_text()}, {"weight", c.weight}});
  }
  return json{{"n", model.n}, {"components", components}};
}

inline void write_shots_text(const std::filesystem::path &path, const ShotRecord &record) {
  std::string content;
  content.reserve(record.shot_count() * (record.n + 1));
  for (const auto &shot : record.shots) {
    content += shot.to_text();
    content += '\n';
  }
  detail::write_file_atomic(path, content);
}

inline void write_calibration(const std::filesystem::path &path, const ProductChannel &ch) {
  json qubits = json::array();
  for (const auto &q : ch.qubits()) {
    qubits.push_back({{"r1_given_0", q.r1_given_0}, {"r0_given_1", q.r0_given_1}});
  }
  detail::write_file_atomic(path, json{{"qubits", qubits}}.dump(2) + "\n");
}

/// Writes manifest + results (+ optional table) as JSON; a non-empty table
/// is additionally mirrored to a flat CSV next to the JSON for plotting.
inline void write_results(const std::filesystem::path &path, const RunManifest &manifest,
                          const json &results, const std::vector<TableRow> &table = {}) {
  json doc;
  doc["manifest"] = manifest.to_json();
  doc["results"] = results;
  if (!table.empty()) {
    json rows = json::array();
    for (const auto &row : table) {
      rows.push_back({{"method", row.method}, {"index", row.index}, {"value", row.value}});
    }
    doc["table"] = rows;
  }
  detail::write_file_atomic(path, doc.dump(2) + "\n");
  if (!table.empty()) {
    std::string csv = "method,subgroup_or_resample_index,value\n";
    for (const auto &row : table) {
      csv += row.method;
      csv += ',';
      csv += std::to_string(row.index);
      csv += ',';
      csv += detail::format_value(row.value);
      csv += '\n';
    }
    std::filesystem::path csv_path = path;
    csv_path.replace_extension(".csv");
    detail::write_file_atomic(csv_path, csv);
  }
}

}  // namespace qrem

#endif
