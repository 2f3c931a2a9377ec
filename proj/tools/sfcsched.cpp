/*
Copyright 2026 The sfcsched Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sfcsched.hpp"

namespace {

struct Common {
  std::string scenario_path;
  std::string policy;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario_path, "scenario file (JSON); defaults apply when omitted");
  cmd->add_option("--policy", c.policy, "fws, lfff, mfff, lfdt or mfdt");
  cmd->add_option("--seed", c.seed, "base RNG seed; overrides SFC_SCHED_SEED and the file");
  cmd->add_option("--out", c.out, "output path; stdout when omitted");
  cmd->add_option("--format", c.format, "csv or structured")->check(CLI::IsMember({"csv", "structured"}));
}

sfcsched::ScenarioFile load(const Common& c) {
  sfcsched::ScenarioFile f = c.scenario_path.empty() ? sfcsched::ScenarioFile{} : sfcsched::parse_scenario_file(c.scenario_path);
  if (auto env = sfcsched::seed_from_env()) f.scenario.rng_seed = *env;
  if (c.seed) f.scenario.rng_seed = *c.seed;
  if (!c.policy.empty()) {
    f.scenario.policy = sfcsched::parse_policy(c.policy);
    f.sweep.policies = {f.scenario.policy};
  }
  return f;
}

void write(const std::vector<sfcsched::ResultRow>& rows, const Common& c) {
  const auto fmt = sfcsched::parse_format(c.format);
  if (c.out.empty())
    sfcsched::emit_results(rows, fmt, std::cout);
  else
    sfcsched::emit_results(rows, fmt, c.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Service function chain scheduling simulator"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts, validate_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "simulate one scenario under one policy");
  add_common(run_cmd, run_opts);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "demand or load sweep across policies");
  add_common(sweep_cmd, sweep_opts);
  std::string var = "demand";
  unsigned threads = 0;
  sweep_cmd->add_option("--var", var, "demand or load")->check(CLI::IsMember({"demand", "load"}));
  sweep_cmd->add_option("--threads", threads, "worker threads (0: one per core)");

  CLI::App* validate_cmd = app.add_subcommand("validate", "parse and check a scenario file");
  validate_cmd->add_option("--scenario", validate_opts.scenario_path, "scenario file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const sfcsched::ScenarioFile f = load(run_opts);
      const sfcsched::MetricsReport rep = sfcsched::run(f.scenario);
      std::vector<sfcsched::ResultRow> rows;
      for (std::string_view m : sfcsched::metric_names)
        rows.push_back({rep.policy, sfcsched::SweepVar::demand, static_cast<double>(rep.arrived), std::string(m),
                        sfcsched::metric_value(rep, m), 1});
      write(rows, run_opts);
    } else if (*sweep_cmd) {
      const sfcsched::ScenarioFile f = load(sweep_opts);
      const auto v = var == "load" ? sfcsched::SweepVar::load : sfcsched::SweepVar::demand;
      const auto rows = threads ? sfcsched::run_sweep(f.scenario, f.sweep, v, threads)
                                : sfcsched::run_sweep(f.scenario, f.sweep, v);
      write(rows, sweep_opts);
    } else if (*validate_cmd) {
      load(validate_opts);
      std::cout << "ok: " << validate_opts.scenario_path << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
