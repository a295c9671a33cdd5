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

#include "rllow/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "rllow/estimator.hpp"
#include "rllow/mle.hpp"
#include "rllow/rng.hpp"

namespace rllow {
namespace {

bool known_algorithm(const std::string& name) {
  return std::find(std::begin(kAlgorithms), std::end(kAlgorithms), name) != std::end(kAlgorithms);
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
  if (base_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base_dir) / path).string();
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

namespace {

// Everything except the instance source.
void validate_settings(const ExperimentConfig& cfg) {
  if (cfg.n_grid.empty()) throw ValidationError("n_grid must not be empty");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] == 0) throw ValidationError("n_grid entries must be positive");
    if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1]) {
      throw ValidationError("n_grid must be strictly increasing");
    }
  }
  if (cfg.repetitions == 0) throw ValidationError("repetitions must be at least 1");
  if (cfg.algorithms.empty()) throw ValidationError("at least one algorithm is required");
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
    if (!known_algorithm(cfg.algorithms[i])) {
      throw ValidationError("unknown algorithm \"" + cfg.algorithms[i] + "\"");
    }
    if (std::find(cfg.algorithms.begin(), cfg.algorithms.begin() + i, cfg.algorithms[i]) !=
        cfg.algorithms.begin() + i) {
      throw ValidationError("algorithm listed twice: " + cfg.algorithms[i]);
    }
  }
  if (cfg.privacy) validate_privacy(*cfg.privacy);
}

}  // namespace

ExperimentConfig validate_config(const ExperimentConfig& cfg) {
  validate_settings(cfg);
  if (cfg.generator.has_value() == cfg.instance_path.has_value()) {
    throw ValidationError("exactly one of generator and instance must be given");
  }
  return cfg;
}

ExperimentConfig config_from_json(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  ExperimentConfig cfg;
  try {
    if (j.contains("generator")) {
      const Json& g = j.at("generator");
      GeneratorConfig gen;
      gen.num_states = g.value("S", gen.num_states);
      gen.num_actions = g.value("A", gen.num_actions);
      gen.dim = g.value("d", gen.dim);
      gen.gap_step = g.value("gap_step", gen.gap_step);
      gen.seed = g.value("seed", gen.seed);
      cfg.generator = gen;
    }
    if (j.contains("instance")) cfg.instance_path = resolve_path(j.at("instance").get<std::string>(), base_dir);
    if (j.contains("n_grid")) cfg.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
    cfg.repetitions = j.value("repetitions", cfg.repetitions);
    if (j.contains("algorithms")) cfg.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    if (j.contains("privacy")) {
      const Json& p = j.at("privacy");
      cfg.privacy = PrivacyParams{p.at("epsilon").get<double>(), p.at("delta").get<double>()};
    }
    if (j.contains("kernel")) cfg.kernel_path = resolve_path(j.at("kernel").get<std::string>(), base_dir);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    if (j.contains("output_dir")) cfg.output_dir = resolve_path(j.at("output_dir").get<std::string>(), base_dir);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.timing = j.value("timing", cfg.timing);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return validate_config(cfg);
}

ExperimentConfig load_config(const std::string& path) {
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return config_from_json(read_json_file(path), dir);
}

Instance resolve_instance(const ExperimentConfig& cfg) {
  if (cfg.generator) return make_benchmark_instance(*cfg.generator);
  if (cfg.instance_path) return read_instance(*cfg.instance_path);
  throw ValidationError("config has no instance source");
}

double simple_regret(const Instance& v, std::span<const int> selections) {
  if (selections.size() != static_cast<std::size_t>(v.num_states())) {
    throw ValidationError("one selection per state is required");
  }
  const std::vector<double> gaps = suboptimality_gaps(v);
  double total = 0.0;
  for (int k = 0; k < v.num_states(); ++k) {
    if (selections[k] < 0 || selections[k] >= v.num_actions()) {
      throw ValidationError("selected action out of range");
    }
    total += v.rho[k] * gaps[static_cast<std::size_t>(k) * v.num_actions() + selections[k]];
  }
  return total;
}

std::uint64_t dataset_seed(std::uint64_t master_seed, std::size_t n, std::size_t rep) {
  return derive_seed(master_seed, "dataset", {n, rep});
}

std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& algo, std::size_t n,
                        std::size_t rep) {
  return derive_seed(master_seed, algo, {n, rep});
}

double run_cell(const std::string& algo, const Instance& v, const Instance& reparam,
                const PreferenceDataset& data, std::uint64_t seed,
                const std::optional<PrivacyParams>& privacy,
                const std::optional<TransitionKernel>& kernel) {
  if (algo == "rl_low") {
    return simple_regret(v, rl_low(data, v.features, v.reward_bound, seed).selections);
  }
  if (algo == "dp_rl_low") {
    if (!privacy) throw ValidationError("dp_rl_low needs privacy parameters");
    const DpReport report = dp_rl_low(data, v.features, v.reward_bound, *privacy, seed, seed);
    return simple_regret(v, report.estimate.selections);
  }
  if (algo == "mle") {
    const MleFit fit = mle_fit(data, reparam.features, reparam.reward_bound);
    return simple_regret(v, mle_select(fit, reparam.features, seed).selections);
  }
  if (algo == "rl_low_mdp") {
    if (!kernel) throw ValidationError("rl_low_mdp needs a transition kernel");
    const Policy policy = rl_low_mdp(data, v.features, v.reward_bound, *kernel, v.rho, seed);
    return mdp_regret(v, *kernel, policy);
  }
  throw ValidationError("unknown algorithm \"" + algo + "\"");
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const Instance v = resolve_instance(cfg);
  std::optional<TransitionKernel> kernel;
  if (cfg.kernel_path) kernel = read_kernel(*cfg.kernel_path);
  return run_experiment(cfg, v, kernel);
}

ResultTable run_experiment(const ExperimentConfig& cfg, const Instance& v,
                           const std::optional<TransitionKernel>& kernel) {
  validate_settings(cfg);
  const ConsistencyResult consistency = check_consistency(v);
  if (!consistency.consistent) {
    throw InconsistencyError("instance is not consistent", *consistency.witness);
  }
  const bool wants_kernel = std::find(cfg.algorithms.begin(), cfg.algorithms.end(),
                                      std::string("rl_low_mdp")) != cfg.algorithms.end();
  if (wants_kernel && !kernel) throw ValidationError("rl_low_mdp needs a kernel");
  if (kernel && (kernel->num_states != v.num_states() || kernel->num_actions != v.num_actions())) {
    throw ValidationError("kernel shape does not match the instance");
  }
  if (std::find(cfg.algorithms.begin(), cfg.algorithms.end(), std::string("dp_rl_low")) !=
          cfg.algorithms.end() && !cfg.privacy) {
    throw ValidationError("dp_rl_low needs privacy parameters");
  }
  const Instance reparam = zero_sum_reparam(v);

  ResultTable table;
  for (const std::string& algo : cfg.algorithms) {
    for (std::size_t n : cfg.n_grid) {
      for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
        table.push_back(ResultRow{algo, n, rep, cell_seed(cfg.master_seed, algo, n, rep), 0.0, 0.0});
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t idx = next++; idx < table.size() && !failed; idx = next++) {
      ResultRow& row = table[idx];
      try {
        const auto start = std::chrono::steady_clock::now();
        const PreferenceDataset data =
            sample_dataset(v, row.n, dataset_seed(cfg.master_seed, row.n, row.rep));
        row.regret = run_cell(row.algo, v, reparam, data, row.seed, cfg.privacy, kernel);
        if (cfg.timing) {
          row.wall_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start).count();
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failed) failure = std::current_exception();
        failed = true;
      }
    }
  };
  unsigned threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, table.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return table;
}

std::vector<SummaryRow> summarize(const ResultTable& table) {
  if (table.empty()) throw ValidationError("cannot summarize an empty table");
  std::vector<SummaryRow> out;
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> groups;
  for (const ResultRow& row : table) {
    auto& group = groups[{row.algo, row.n}];
    if (group.empty()) out.push_back(SummaryRow{row.algo, row.n});
    group.push_back(row.regret);
  }
  for (SummaryRow& s : out) {
    const std::vector<double>& values = groups[{s.algo, s.n}];
    s.count = values.size();
    double sum = 0.0;
    for (double x : values) sum += x;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count > 1) {
      double ss = 0.0;
      for (double x : values) ss += (x - s.mean) * (x - s.mean);
      s.std_dev = std::sqrt(ss / static_cast<double>(s.count - 1));
    }
    s.std_error = s.std_dev / std::sqrt(static_cast<double>(s.count));
  }
  return out;
}

void write_results_csv(std::ostream& out, const ResultTable& table) {
  out << "algo,n,rep,seed,regret,wall_ms\n";
  for (const ResultRow& r : table) {
    out << r.algo << ',' << r.n << ',' << r.rep << ',' << r.seed << ',' << format_double(r.regret)
        << ',' << format_double(r.wall_ms) << '\n';
  }
}

ResultTable read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "algo,n,rep,seed,regret,wall_ms") {
    throw ValidationError("results header must be algo,n,rep,seed,regret,wall_ms");
  }
  ResultTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != 6) throw ValidationError("results line needs 6 fields: " + line);
    try {
      table.push_back(ResultRow{cells[0], std::stoull(cells[1]), std::stoull(cells[2]),
                                std::stoull(cells[3]), std::stod(cells[4]), std::stod(cells[5])});
    } catch (const std::exception&) {
      throw ValidationError("malformed results line: " + line);
    }
  }
  return table;
}

Json summary_to_json(const std::vector<SummaryRow>& summary) {
  Json out = Json::array();
  for (const SummaryRow& s : summary) {
    out.push_back(Json{{"algo", s.algo},
                       {"n", s.n},
                       {"count", s.count},
                       {"mean", s.mean},
                       {"std", s.std_dev},
                       {"stderr", s.std_error}});
  }
  return out;
}

std::string regret_svg(const std::vector<SummaryRow>& summary) {
  constexpr double kWidth = 720, kHeight = 440, kLeft = 70, kRight = 150, kTop = 20, kBottom = 50;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  std::vector<std::string> algos;
  double n_lo = 1e300, n_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (const SummaryRow& s : summary) {
    if (std::find(algos.begin(), algos.end(), s.algo) == algos.end()) algos.push_back(s.algo);
    n_lo = std::min(n_lo, static_cast<double>(s.n));
    n_hi = std::max(n_hi, static_cast<double>(s.n));
    if (s.mean > 0.0) y_lo = std::min(y_lo, s.mean);
    y_hi = std::max(y_hi, s.mean + s.std_dev);
  }
  if (y_lo > y_hi || !(y_hi > 0.0)) {
    y_lo = 1e-3;
    y_hi = 1.0;
  }
  // Zero regret has no log; everything is floored one decade below the
  // smallest positive mean.
  const double floor = y_lo / 10.0;
  const double log_lo = std::floor(std::log10(floor));
  const double log_hi = std::ceil(std::log10(y_hi));
  const double span_n = n_hi > n_lo ? n_hi - n_lo : 1.0;
  auto px = [&](double n) { return kLeft + (n - n_lo) / span_n * (kWidth - kLeft - kRight); };
  auto py = [&](double y) {
    const double ly = std::log10(std::max(y, floor));
    return kTop + (log_hi - ly) / std::max(log_hi - log_lo, 1.0) * (kHeight - kTop - kBottom);
  };

  std::ostringstream svg;
  svg.setf(std::ios::fixed);
  svg.precision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight
      << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  for (double e = log_lo; e <= log_hi; e += 1.0) {
    const double y = py(std::pow(10.0, e));
    svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
        << "\" font-size=\"11\" text-anchor=\"end\">1e" << static_cast<int>(e) << "</text>\n";
  }
  std::vector<double> ticks;
  for (const SummaryRow& s : summary) {
    if (std::find(ticks.begin(), ticks.end(), static_cast<double>(s.n)) == ticks.end()) {
      ticks.push_back(static_cast<double>(s.n));
    }
  }
  for (double n : ticks) {
    svg << "<text x=\"" << px(n) << "\" y=\"" << kHeight - kBottom + 16
        << "\" font-size=\"11\" text-anchor=\"middle\">" << static_cast<long long>(n) << "</text>\n";
  }
  svg << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 10
      << "\" font-size=\"12\" text-anchor=\"middle\">n</text>\n";
  svg << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (kTop + kHeight - kBottom) / 2 << ")\">mean simple regret</text>\n";

  for (std::size_t a = 0; a < algos.size(); ++a) {
    const char* color = colors[a % std::size(colors)];
    std::vector<const SummaryRow*> rows;
    for (const SummaryRow& s : summary) {
      if (s.algo == algos[a]) rows.push_back(&s);
    }
    std::sort(rows.begin(), rows.end(), [](const SummaryRow* x, const SummaryRow* y) { return x->n < y->n; });
    svg << "<polygon class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
    for (const SummaryRow* s : rows) svg << px(static_cast<double>(s->n)) << ',' << py(s->mean + s->std_dev) << ' ';
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      svg << px(static_cast<double>((*it)->n)) << ',' << py((*it)->mean - (*it)->std_dev) << ' ';
    }
    svg << "\"/>\n";
    svg << "<polyline class=\"series\" data-algo=\"" << algos[a] << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (const SummaryRow* s : rows) svg << px(static_cast<double>(s->n)) << ',' << py(s->mean) << ' ';
    svg << "\"/>\n";
    const double ly = kTop + 16 + 18 * static_cast<double>(a);
    svg << "<line x1=\"" << kWidth - kRight + 12 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 32
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kWidth - kRight + 38 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
        << algos[a] << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_outputs(const std::vector<SummaryRow>& summary, const ResultTable& table,
                  const ExperimentConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw ValidationError("cannot create " + cfg.output_dir + ": " + ec.message());
  const std::filesystem::path dir(cfg.output_dir);
  std::ostringstream csv;
  write_results_csv(csv, table);
  write_text_file((dir / "results.csv").string(), csv.str());
  write_text_file((dir / "summary.json").string(), summary_to_json(summary).dump(2) + "\n");
  write_text_file((dir / "regret.svg").string(), regret_svg(summary));
}

}  // namespace rllow
