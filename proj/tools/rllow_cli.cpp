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

// rllow: command-line front end.
//
//   rllow gen-instance --S 2 --A 10 --d 5 --seed 7 --out inst.json
//   rllow sample --instance inst.json --n 400 --seed 1 --out data.csv
//   rllow estimate --instance inst.json --dataset data.csv [--epsilon e --delta d]
//   rllow run --config experiment.json
//   rllow analyze --instance inst.json [--epsilon e --delta d]
//   rllow adversary --instance inst.json --out alt.json
//   rllow mdp --instance inst.json --kernel P.json [--dataset data.csv | --config cfg.json]
//
// Exit codes: 0 success, 2 invalid input, 3 inconsistent instance,
// 4 numerical failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rllow/analysis.hpp"
#include "rllow/bench.hpp"
#include "rllow/dp_estimator.hpp"
#include "rllow/estimator.hpp"
#include "rllow/instance.hpp"
#include "rllow/io.hpp"
#include "rllow/mdp.hpp"

namespace {

using namespace rllow;

void emit(const Json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

std::optional<PrivacyParams> privacy_from(const std::optional<double>& eps,
                                          const std::optional<double>& delta) {
  if (!eps && !delta) return std::nullopt;
  if (!eps || !delta) throw ValidationError("--epsilon and --delta must be given together");
  return validate_privacy(PrivacyParams{*eps, *delta});
}

void print_summary(const std::vector<SummaryRow>& summary) {
  for (const SummaryRow& s : summary) {
    std::cout << s.algo << " n=" << s.n << " mean=" << s.mean << " std=" << s.std_dev
              << " stderr=" << s.std_error << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline preference-based RL estimators and analysis"};
  app.require_subcommand(1);

  GeneratorConfig gen;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen-instance", "generate the synthetic benchmark instance");
  gen_cmd->add_option("--S", gen.num_states, "number of states")->capture_default_str();
  gen_cmd->add_option("--A", gen.num_actions, "number of actions")->capture_default_str();
  gen_cmd->add_option("--d", gen.dim, "feature dimension")->capture_default_str();
  gen_cmd->add_option("--gap-step", gen.gap_step, "reward decrement per action index")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "generator seed")->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "output instance JSON")->required();

  std::string instance_path, dataset_path, out_path, config_path, kernel_path;
  std::size_t sample_n = 0;
  std::uint64_t seed = 0, tie_seed = 0;
  std::optional<double> epsilon, delta;

  auto* sample_cmd = app.add_subcommand("sample", "sample a preference dataset");
  sample_cmd->add_option("--instance", instance_path)->required();
  sample_cmd->add_option("--n", sample_n, "nominal sample size")->required();
  sample_cmd->add_option("--seed", seed)->capture_default_str();
  sample_cmd->add_option("--out", out_path, "output CSV")->required();

  auto* estimate_cmd = app.add_subcommand("estimate", "estimate rewards and select actions");
  estimate_cmd->add_option("--instance", instance_path, "features and L are read from here")->required();
  estimate_cmd->add_option("--dataset", dataset_path)->required();
  estimate_cmd->add_option("--epsilon", epsilon);
  estimate_cmd->add_option("--delta", delta);
  estimate_cmd->add_option("--seed", seed, "privacy noise seed")->capture_default_str();
  estimate_cmd->add_option("--tie-seed", tie_seed)->capture_default_str();
  estimate_cmd->add_option("--out", out_path, "output JSON (default stdout)");

  auto* run_cmd = app.add_subcommand("run", "run a Monte Carlo experiment");
  run_cmd->add_option("--config", config_path)->required();

  auto* analyze_cmd = app.add_subcommand("analyze", "hardness report of an instance");
  analyze_cmd->add_option("--instance", instance_path)->required();
  analyze_cmd->add_option("--epsilon", epsilon);
  analyze_cmd->add_option("--delta", delta);
  analyze_cmd->add_option("--out", out_path, "output JSON (default stdout)");

  auto* adversary_cmd = app.add_subcommand("adversary", "alternative instance for the lower bound");
  adversary_cmd->add_option("--instance", instance_path)->required();
  adversary_cmd->add_option("--out", out_path, "output instance JSON")->required();

  auto* mdp_cmd = app.add_subcommand("mdp", "known-transition MDP policy search and hardness");
  mdp_cmd->add_option("--instance", instance_path)->required();
  mdp_cmd->add_option("--kernel", kernel_path)->required();
  auto* mdp_dataset = mdp_cmd->add_option("--dataset", dataset_path);
  auto* mdp_config = mdp_cmd->add_option("--config", config_path);
  mdp_dataset->excludes(mdp_config);
  mdp_cmd->add_option("--tie-seed", tie_seed)->capture_default_str();
  mdp_cmd->add_option("--out", out_path, "output JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) {
      write_instance(gen_out, make_benchmark_instance(gen));
    } else if (*sample_cmd) {
      const Instance v = read_instance(instance_path);
      write_dataset_file(out_path, sample_dataset(v, sample_n, seed));
    } else if (*estimate_cmd) {
      const Instance v = read_instance(instance_path);
      const PreferenceDataset data = read_dataset_file(dataset_path);
      const auto privacy = privacy_from(epsilon, delta);
      if (privacy) {
        const DpReport r = dp_rl_low(data, v.features, v.reward_bound, *privacy, seed, tie_seed);
        emit(report_to_json(r.estimate, r.privacy), out_path);
      } else {
        emit(report_to_json(rl_low(data, v.features, v.reward_bound, tie_seed)), out_path);
      }
    } else if (*run_cmd) {
      const ExperimentConfig cfg = load_config(config_path);
      const ResultTable table = run_experiment(cfg);
      const auto summary = summarize(table);
      emit_outputs(summary, table, cfg);
      print_summary(summary);
    } else if (*analyze_cmd) {
      const Instance v = read_instance(instance_path);
      emit(hardness_to_json(hardness(v, privacy_from(epsilon, delta))), out_path);
    } else if (*adversary_cmd) {
      const Instance v = read_instance(instance_path);
      const AdversaryReport report = lower_bound_adversary(v);
      write_instance(out_path, report.pair.alt);
      std::cout << Json{{"state", report.state},
                        {"action", report.action},
                        {"eta", report.pair.eta},
                        {"dtilde", report.pair.dtilde_value},
                        {"q_member", report.base_hardness.q_member},
                        {"flips_only_hardest_state", report.flips_only_hardest_state},
                        {"hardness_within_band", report.hardness_within_band}}
                       .dump(2)
                << '\n';
    } else if (*mdp_cmd) {
      const Instance v = read_instance(instance_path);
      const TransitionKernel kernel = read_kernel(kernel_path);
      if (!config_path.empty()) {
        ExperimentConfig cfg = load_config(config_path);
        cfg.generator.reset();
        cfg.instance_path = instance_path;
        cfg.kernel_path = kernel_path;
        const ResultTable table = run_experiment(cfg, v, kernel);
        const auto summary = summarize(table);
        emit_outputs(summary, table, cfg);
        print_summary(summary);
      } else if (!dataset_path.empty()) {
        const PreferenceDataset data = read_dataset_file(dataset_path);
        const Policy policy = rl_low_mdp(data, v.features, v.reward_bound, kernel, v.rho, tie_seed);
        emit(Json{{"policy", policy}, {"regret", mdp_regret(v, kernel, policy)}}, out_path);
      } else {
        const MdpHardness h = mdp_hardness(v, kernel);
        emit(Json{{"H_MDP", h.hardness}, {"optimal_policy", h.optimal}}, out_path);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what();
    if (const auto* inc = dynamic_cast<const InconsistencyError*>(&e)) {
      std::cerr << " (witness state " << inc->witness().state << ", actions "
                << inc->witness().first << ", " << inc->witness().second << ")";
    }
    std::cerr << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
