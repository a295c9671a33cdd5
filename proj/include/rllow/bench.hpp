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

// Monte Carlo regret experiments: configuration, the seeded runner, summary
// statistics and the CSV / JSON / SVG outputs.

#ifndef RLLOW_BENCH_HPP_
#define RLLOW_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rllow/dp_estimator.hpp"
#include "rllow/instance.hpp"
#include "rllow/io.hpp"
#include "rllow/mdp.hpp"

namespace rllow {

inline constexpr const char* kAlgorithms[] = {"rl_low", "dp_rl_low", "mle", "rl_low_mdp"};

struct ExperimentConfig {
  std::optional<GeneratorConfig> generator;
  std::optional<std::string> instance_path;
  std::vector<std::size_t> n_grid{50, 100, 150, 200, 250, 300, 350, 400};
  std::size_t repetitions = 200;
  std::vector<std::string> algorithms{"rl_low"};
  std::optional<PrivacyParams> privacy;
  std::optional<std::string> kernel_path;
  std::uint64_t master_seed = 0;
  std::string output_dir = ".";
  unsigned threads = 0;  // 0: one per hardware thread
  bool timing = false;   // wall_ms is 0 unless set, keeping the CSV reproducible
};

// Throws ValidationError for an empty or non-increasing n_grid, zero
// repetitions, unknown or repeated algorithms, a missing instance source,
// or privacy parameters outside (0, 1).
ExperimentConfig validate_config(const ExperimentConfig& cfg);

// Relative paths inside the file are taken relative to `base_dir`.
ExperimentConfig config_from_json(const Json& j, const std::string& base_dir = "");
ExperimentConfig load_config(const std::string& path);

Instance resolve_instance(const ExperimentConfig& cfg);

struct ResultRow {
  std::string algo;
  std::size_t n = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  double regret = 0.0;
  double wall_ms = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

using ResultTable = std::vector<ResultRow>;

// sum_k rho_k (r[k][best] - r[k][selected]).
double simple_regret(const Instance& v, std::span<const int> selections);

// Seed of the dataset shared by every algorithm at (n, rep), and of the
// algorithm's own randomness (tie breaks, privacy noise) in that cell.
std::uint64_t dataset_seed(std::uint64_t master_seed, std::size_t n, std::size_t rep);
std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& algo, std::size_t n,
                        std::size_t rep);

// Regret of one algorithm on one dataset.
double run_cell(const std::string& algo, const Instance& v, const Instance& reparam,
                const PreferenceDataset& data, std::uint64_t seed,
                const std::optional<PrivacyParams>& privacy,
                const std::optional<TransitionKernel>& kernel);

// Rows ordered by (algorithm in config order, n, rep), independent of the
// thread count.
ResultTable run_experiment(const ExperimentConfig& cfg);
// The instance source fields of cfg are ignored by this overload.
ResultTable run_experiment(const ExperimentConfig& cfg, const Instance& v,
                           const std::optional<TransitionKernel>& kernel);

struct SummaryRow {
  std::string algo;
  std::size_t n = 0;
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // sample convention, n - 1 divisor; 0 for one row
  double std_error = 0.0;
};

// One row per (algo, n), in order of first appearance.
std::vector<SummaryRow> summarize(const ResultTable& table);

void write_results_csv(std::ostream& out, const ResultTable& table);
ResultTable read_results_csv(std::istream& in);
Json summary_to_json(const std::vector<SummaryRow>& summary);
// Log-scale regret against n, one polyline and one +-1 std band per
// algorithm.
std::string regret_svg(const std::vector<SummaryRow>& summary);

// Writes results.csv, summary.json and regret.svg into cfg.output_dir.
void emit_outputs(const std::vector<SummaryRow>& summary, const ResultTable& table,
                  const ExperimentConfig& cfg);

}  // namespace rllow

#endif  // RLLOW_BENCH_HPP_
