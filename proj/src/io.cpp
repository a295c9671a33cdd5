//
// Copyright 2026 The rllow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "rllow/io.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace rllow {
namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("field \"") + key + "\": " + e.what());
  }
}

void expect_size(const Json& j, std::size_t n, const std::string& what) {
  if (!j.is_array() || j.size() != n) {
    throw ValidationError(what + " must be an array of length " + std::to_string(n));
  }
}

bool parse_bit(const std::string& s) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw ValidationError("winner_is_first must be 0 or 1, got \"" + s + "\"");
}

int parse_index(const std::string& s) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("bad index \"" + s + "\"");
  }
  if (used != s.size() || value < 0) throw ValidationError("bad index \"" + s + "\"");
  return value;
}

}  // namespace

Json instance_to_json(const Instance& v) {
  Json features = Json::array();
  for (int k = 0; k < v.num_states(); ++k) {
    Json per_state = Json::array();
    for (int i = 0; i < v.num_actions(); ++i) {
      const auto row = v.features.row(k, i);
      per_state.push_back(std::vector<double>(row.begin(), row.end()));
    }
    features.push_back(std::move(per_state));
  }
  Json schedule = Json::array();
  for (const ObservedPair& p : v.schedule.observed()) {
    schedule.push_back(Json::array({p.index.state, p.index.first, p.index.second, p.proportion}));
  }
  return Json{{"S", v.num_states()},   {"A", v.num_actions()}, {"d", v.dim()},
              {"features", features},  {"theta", v.theta},     {"rho", v.rho},
              {"schedule", schedule},  {"L", v.reward_bound}};
}

Instance instance_from_json(const Json& j) {
  const int s = field<int>(j, "S");
  const int a = field<int>(j, "A");
  const int d = field<int>(j, "d");
  if (s <= 0 || a <= 0 || d <= 0) throw ValidationError("S, A and d must be positive");

  Instance v;
  v.features = FeatureMap(s, a, d);
  const Json& features = j.at("features");
  expect_size(features, static_cast<std::size_t>(s), "features");
  for (int k = 0; k < s; ++k) {
    expect_size(features[k], static_cast<std::size_t>(a), "features[k]");
    for (int i = 0; i < a; ++i) {
      expect_size(features[k][i], static_cast<std::size_t>(d), "features[k][i]");
      for (int c = 0; c < d; ++c) v.features.row(k, i)[c] = features[k][i][c].get<double>();
    }
  }
  v.theta = field<std::vector<double>>(j, "theta");
  if (v.theta.size() != static_cast<std::size_t>(d)) throw ValidationError("theta must have length d");
  v.rho = field<std::vector<double>>(j, "rho");
  if (v.rho.size() != static_cast<std::size_t>(s)) throw ValidationError("rho must have length S");
  v.reward_bound = field<double>(j, "L");

  v.schedule = Schedule(s, a);
  const Json& schedule = j.at("schedule");
  if (!schedule.is_array()) throw ValidationError("schedule must be an array");
  for (const Json& entry : schedule) {
    expect_size(entry, 4, "schedule entry");
    const int k = entry[0].get<int>();
    const int i = entry[1].get<int>();
    const int jj = entry[2].get<int>();
    if (k < 0 || k >= s || i < 0 || jj >= a) throw ValidationError("schedule entry out of range");
    v.schedule.set(k, i, jj, entry[3].get<double>());
  }
  return validate_instance(v);
}

Json kernel_to_json(const TransitionKernel& kernel) {
  Json p = Json::array();
  for (int k = 0; k < kernel.num_states; ++k) {
    Json per_state = Json::array();
    for (int i = 0; i < kernel.num_actions; ++i) {
      Json row = Json::array();
      for (int next = 0; next < kernel.num_states; ++next) row.push_back(kernel(k, i, next));
      per_state.push_back(std::move(row));
    }
    p.push_back(std::move(per_state));
  }
  return Json{{"P", p}};
}

TransitionKernel kernel_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("P")) throw ValidationError("missing field \"P\"");
  const Json& p = j.at("P");
  if (!p.is_array() || p.empty() || !p[0].is_array() || p[0].empty()) {
    throw ValidationError("P must be an S x A x S array");
  }
  TransitionKernel kernel;
  kernel.num_states = static_cast<int>(p.size());
  kernel.num_actions = static_cast<int>(p[0].size());
  for (const Json& per_state : p) {
    expect_size(per_state, static_cast<std::size_t>(kernel.num_actions), "P[k]");
    for (const Json& row : per_state) {
      expect_size(row, static_cast<std::size_t>(kernel.num_states), "P[k][i]");
      for (const Json& value : row) kernel.probs.push_back(value.get<double>());
    }
  }
  return validate_kernel(kernel);
}

Json report_to_json(const EstimateReport& report, const std::optional<PrivacyParams>& privacy) {
  Json rhat = Json::array();
  for (int k = 0; k < report.num_states; ++k) {
    const auto first = report.rhat.begin() + static_cast<std::ptrdiff_t>(k) * report.num_actions;
    rhat.push_back(std::vector<double>(first, first + report.num_actions));
  }
  Json out{{"rhat", rhat}, {"selections", report.selections}, {"tie_sets", report.tie_sets}};
  if (privacy) out["privacy"] = Json{{"epsilon", privacy->epsilon}, {"delta", privacy->delta}};
  return out;
}

Json hardness_to_json(const HardnessReport& report) {
  Json pairs = Json::array();
  for (const PairHardness& p : report.pairs) {
    pairs.push_back(Json{{"state", p.state},
                         {"action", p.action},
                         {"gap", p.gap},
                         {"gamma", p.gamma},
                         {"gamma_tilde", p.gamma_tilde},
                         {"gamma_dp", p.gamma_dp},
                         {"gamma_tilde_dp", p.gamma_tilde_dp},
                         {"ratio", p.ratio}});
  }
  Json out{{"H", report.hardness},
           {"hardest", {report.hardest_state, report.hardest_action}},
           {"q_member", report.q_member},
           {"pairs", pairs}};
  if (report.privacy) {
    out["privacy"] = Json{{"epsilon", report.privacy->epsilon}, {"delta", report.privacy->delta}};
    out["H_DP"] = *report.hardness_dp;
  }
  return out;
}

void write_dataset(std::ostream& out, const PreferenceDataset& data) {
  out << "state,first,second,winner_is_first\n";
  for (const PreferenceRecord& r : data.records) {
    out << r.state << ',' << r.first << ',' << r.second << ',' << (r.winner_is_first ? 1 : 0) << '\n';
  }
}

PreferenceDataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("dataset is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "state,first,second,winner_is_first") {
    throw ValidationError("dataset header must be state,first,second,winner_is_first");
  }
  PreferenceDataset data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) throw ValidationError("dataset line " + std::to_string(line_no) + ": expected 4 fields");
    PreferenceRecord r{parse_index(cells[0]), parse_index(cells[1]), parse_index(cells[2]),
                       parse_bit(cells[3])};
    if (r.first >= r.second) {
      throw ValidationError("dataset line " + std::to_string(line_no) + ": first must be < second");
    }
    data.records.push_back(r);
  }
  return data;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
  if (!out) throw ValidationError("failed writing " + path);
}

Instance read_instance(const std::string& path) {
  try {
    return instance_from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void write_instance(const std::string& path, const Instance& v) {
  write_text_file(path, instance_to_json(v).dump(2) + "\n");
}

TransitionKernel read_kernel(const std::string& path) {
  try {
    return kernel_from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

PreferenceDataset read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return read_dataset(in);
}

void write_dataset_file(const std::string& path, const PreferenceDataset& data) {
  std::ostringstream out;
  write_dataset(out, data);
  write_text_file(path, out.str());
}

}  // namespace rllow
