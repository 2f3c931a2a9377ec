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

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sfcsched.hpp"

using namespace sfcsched;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  auto p = std::filesystem::temp_directory_path() / ("sfcsched_test_" + name);
  std::ofstream(p) << body;
  return p.string();
}

errc parse_code(const std::string& text, std::string* msg = nullptr) {
  try {
    parse_scenario_text(text);
  } catch (const error& e) {
    if (msg) *msg = e.what();
    return e.code();
  }
  ADD_FAILURE() << "expected an error for " << text;
  return errc::io_error;
}

std::string emit(const std::vector<ResultRow>& rows, ResultFormat f) {
  std::ostringstream os;
  emit_results(rows, f, os);
  return os.str();
}

// Runs the command line tool and returns (exit status, combined output).
std::pair<int, std::string> cli(const std::string& args) {
  const std::string cmd = std::string(SFCSCHED_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST(ParseScenario, PolicyOnlyKeepsDefaults) {
  ScenarioFile f = parse_scenario_text(R"({"policy": "mfdt"})");
  const Scenario d;
  EXPECT_EQ(f.scenario.policy, PolicyKind::mfdt);
  EXPECT_EQ(f.scenario.request_count, d.request_count);
  EXPECT_EQ(f.scenario.arrival_rate_rps, d.arrival_rate_rps);
  EXPECT_EQ(f.scenario.background_load_fraction, d.background_load_fraction);
  EXPECT_EQ(f.scenario.catalog.size(), 4u);
  EXPECT_EQ(f.scenario.chains.size(), 4u);
  EXPECT_EQ(f.scenario.topology.nodes().size(), 20u);
  EXPECT_EQ(f.scenario.weights.alpha_dep, 1.0);
  EXPECT_EQ(f.scenario.weights.beta_wait, 0.01);
  EXPECT_EQ(f.sweep.repetitions, 5u);
  EXPECT_EQ(f.sweep.demand_points, (std::vector<std::size_t>{100, 500, 1000, 2000, 3000, 4000, 5000}));
  EXPECT_EQ(f.sweep.load_points.size(), 9u);
}

TEST(ParseScenario, DefaultConstructionNeedsNoConfiguration) {
  Scenario sc;
  EXPECT_NO_THROW(sc.validate());
  EXPECT_NO_THROW(SweepSpec{}.validate());
  ScenarioFile f = parse_scenario_text("{}");
  EXPECT_EQ(f.scenario.policy, PolicyKind::fws);
}

TEST(ParseScenario, OverloadedBackgroundRejectedWithPath) {
  std::string msg;
  EXPECT_EQ(parse_code(R"({"workload": {"background_load_fraction": 1.2}})", &msg), errc::validation_error);
  EXPECT_NE(msg.find("workload.background_load_fraction"), std::string::npos) << msg;
}

TEST(ParseScenario, CatalogOverrideRoundTrips) {
  ScenarioFile f = parse_scenario_text(R"({"catalog": [
      {"name": "a", "memory_gb": 4, "cores": 2, "max_bandwidth_mbps": 10, "hourly_cost": 0.5},
      {"name": "b", "memory_gb": 16, "cores": 8, "max_bandwidth_mbps": 100, "hourly_cost": 1.5}]})");
  ASSERT_EQ(f.scenario.catalog.size(), 2u);
  EXPECT_EQ(f.scenario.catalog[0].name, "a");
  EXPECT_EQ(f.scenario.catalog[0].memory_gb, 4.0);
  EXPECT_EQ(f.scenario.catalog[1].cores, 8);
  EXPECT_EQ(f.scenario.catalog[1].max_bandwidth_mbps, 100.0);
  EXPECT_EQ(f.scenario.catalog[1].hourly_cost, 1.5);
}

TEST(ParseScenario, Errors) {
  std::string msg;
  EXPECT_EQ(parse_code("{not json", &msg), errc::parse_error);
  EXPECT_EQ(parse_code(R"({"workload": {"request_cnt": 5}})", &msg), errc::validation_error);
  EXPECT_NE(msg.find("workload.request_cnt"), std::string::npos) << msg;
  EXPECT_EQ(parse_code(R"({"colour": 1})", &msg), errc::validation_error);
  EXPECT_EQ(parse_code(R"({"policy": "lifo"})", &msg), errc::validation_error);
  EXPECT_NE(msg.find("policy"), std::string::npos);
  EXPECT_EQ(parse_code(R"({"workload": {"request_count": -3}})", &msg), errc::validation_error);
  EXPECT_EQ(parse_code(R"({"workload": {"request_count": "ten"}})", &msg), errc::validation_error);
  EXPECT_EQ(parse_code(R"({"chains": {"definitions": [{"id": 1, "nodes": [1, 2], "edges": [[1, 2], [2, 1]]}]}})", &msg),
            errc::validation_error);
  EXPECT_NE(msg.find("chains.definitions[0]"), std::string::npos) << msg;
  EXPECT_NE(msg.find("CycleDetected"), std::string::npos) << msg;
  EXPECT_EQ(parse_code(R"({"sweep": {"demand_points": [10, 5]}})", &msg), errc::validation_error);
  EXPECT_EQ(parse_code(R"({"sweep": {"load_points": [0.5, 1.0]}})", &msg), errc::validation_error);
  EXPECT_EQ(parse_code(R"({"sweep": {"repetitions": 0}})", &msg), errc::validation_error);
  EXPECT_EQ(parse_code(R"({"fws": {"alpha_dep": 0, "beta_wait": 0}})", &msg), errc::validation_error);
  EXPECT_EQ(parse_code(R"({"topology": {"machines": [{"node": 0, "type": "x9"}]}})", &msg), errc::validation_error);
  EXPECT_NE(msg.find("topology.machines[0].type"), std::string::npos) << msg;
}

TEST(ParseScenario, FullDocument) {
  ScenarioFile f = parse_scenario_text(R"({
    "policy": "lfdt",
    "topology": {"nodes": [{"id": 0, "kind": "micro", "vm_slots": 2}, {"id": 5, "kind": "core", "vm_slots": 8}],
                 "links": [{"a": 0, "b": 5, "mu_pps": 500}],
                 "machines": [{"node": 5, "type": "t2.small"}],
                 "packet_kb": 2, "traffic_window_ms": 500, "max_utilization": 0.95},
    "chains": {"definitions": [{"id": 3, "nodes": [1, 2, 3], "edges": [[1, 2], [1, 3]]}],
               "services": [{"id": 1, "exec_time_ms": 10, "data_out_kb": 5, "capacity_rps": 20, "memory_gb": 1, "cores": 1},
                            {"id": 2, "exec_time_ms": 20, "data_out_kb": 6, "capacity_rps": 30, "memory_gb": 1, "cores": 1},
                            {"id": 3, "exec_time_ms": 30, "data_out_kb": 7, "capacity_rps": 40, "memory_gb": 2, "cores": 2}]},
    "workload": {"request_count": 50, "arrival_rate_rps": 20, "sla_delay_range_ms": [100, 200],
                 "sla_cost_range": [0.001, 0.002], "background_load_fraction": 0.3, "seed": 42},
    "fws": {"alpha_dep": 2, "beta_wait": 0.5, "dependents": "immediate", "enqueue_tie_break": false},
    "engine": {"provision_latency_ms": 1, "deploy_latency_ms": 2, "resume_latency_ms": 3, "idle_release_ms": null,
               "ingress_delay": false},
    "sweep": {"demand_points": [5, 10], "load_points": [0.2], "policies": ["fws", "mfff"], "repetitions": 2}
  })");
  const Scenario& s = f.scenario;
  EXPECT_EQ(s.policy, PolicyKind::lfdt);
  EXPECT_EQ(s.topology.nodes().size(), 2u);
  EXPECT_EQ(s.topology.links()[0].mu_pps, 500.0);
  ASSERT_EQ(s.initial_machines.size(), 1u);
  EXPECT_EQ(s.initial_machines[0].node, 5);
  EXPECT_EQ(s.network.packet_kb, 2.0);
  EXPECT_EQ(s.chains.size(), 1u);
  EXPECT_EQ(s.services->at(3).demand.cores, 2);
  EXPECT_EQ(s.request_count, 50u);
  EXPECT_EQ(s.sla_delay_range_ms.hi, 200.0);
  EXPECT_EQ(s.rng_seed, 42u);
  EXPECT_EQ(s.weights.dependents, DependentsMode::immediate);
  EXPECT_FALSE(s.weights.enqueue_tie_break);
  EXPECT_TRUE(std::isinf(s.engine.idle_release_ms));
  EXPECT_FALSE(s.engine.ingress_delay);
  EXPECT_EQ(f.sweep.policies, (std::vector<PolicyKind>{PolicyKind::fws, PolicyKind::mfff}));
  EXPECT_EQ(f.sweep.repetitions, 2u);
  MetricsReport r = run(s);
  EXPECT_EQ(r.arrived, 50u);
}

TEST(ParseScenario, FileErrors) {
  try {
    parse_scenario("/nonexistent/scenario.json");
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::io_error);
  }
  const std::string p = write_temp("ok.json", R"({"policy": "mfff", "workload": {"request_count": 7}})");
  Scenario s = parse_scenario(p);
  EXPECT_EQ(s.policy, PolicyKind::mfff);
  EXPECT_EQ(s.request_count, 7u);
}

TEST(SeedEnv, OverridesWhenSet) {
  unsetenv("SFC_SCHED_SEED");
  EXPECT_FALSE(seed_from_env().has_value());
  setenv("SFC_SCHED_SEED", "12345", 1);
  EXPECT_EQ(seed_from_env(), 12345u);
  setenv("SFC_SCHED_SEED", "12x", 1);
  EXPECT_THROW(seed_from_env(), error);
  unsetenv("SFC_SCHED_SEED");
}

namespace {

Scenario small_base() {
  Scenario sc;
  sc.request_count = 30;
  sc.rng_seed = 100;
  return sc;
}

}  // namespace

TEST(RunSweep, OnePolicyOnePointOneRepGivesFourRows) {
  SweepSpec sw;
  sw.policies = {PolicyKind::fws};
  sw.demand_points = {20};
  sw.repetitions = 1;
  auto rows = run_sweep(small_base(), sw, SweepVar::demand, 1);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(rows[i].metric, metric_names[i]);
    EXPECT_EQ(rows[i].reps, 1u);
    EXPECT_EQ(rows[i].sweep_value, 20.0);
  }
}

TEST(RunSweep, FivePoliciesSevenPointsGive140RowsAndRoundTrip) {
  SweepSpec sw;
  sw.demand_points = {5, 10, 15, 20, 25, 30, 35};
  sw.repetitions = 1;
  auto rows = run_sweep(small_base(), sw, SweepVar::demand, 2);
  ASSERT_EQ(rows.size(), 140u);
  for (ResultFormat fmt : {ResultFormat::csv, ResultFormat::structured}) {
    std::istringstream in(emit(rows, fmt));
    EXPECT_EQ(parse_results(in, fmt), rows);
  }
}

TEST(RunSweep, MeansEqualIndependentSingleRuns) {
  SweepSpec sw;
  sw.policies = {PolicyKind::lfff};
  sw.demand_points = {25};
  sw.repetitions = 3;
  Scenario base = small_base();
  auto rows = run_sweep(base, sw, SweepVar::demand, 3);
  std::map<std::string, double> sum;
  for (std::uint64_t k = 0; k < 3; ++k) {
    Scenario sc = base;
    sc.policy = PolicyKind::lfff;
    sc.request_count = 25;
    sc.rng_seed = base.rng_seed + k;
    MetricsReport r = run(sc);
    for (std::string_view m : metric_names) sum[std::string(m)] += metric_value(r, m);
  }
  for (const ResultRow& row : rows) {
    EXPECT_EQ(row.reps, 3u);
    EXPECT_DOUBLE_EQ(row.mean, sum.at(row.metric) / 3.0) << row.metric;
  }
}

TEST(RunSweep, LoadSweepUsesLoadPoints) {
  SweepSpec sw;
  sw.policies = {PolicyKind::fws, PolicyKind::mfdt};
  sw.load_points = {0.1, 0.6};
  sw.repetitions = 1;
  auto rows = run_sweep(small_base(), sw, SweepVar::load, 1);
  ASSERT_EQ(rows.size(), 16u);
  EXPECT_EQ(rows.front().sweep_var, SweepVar::load);
  EXPECT_EQ(rows.front().sweep_value, 0.1);
  EXPECT_EQ(rows.back().sweep_value, 0.6);
}

TEST(RunSweep, ThreadCountDoesNotChangeRows) {
  SweepSpec sw;
  sw.demand_points = {10, 20};
  sw.repetitions = 2;
  EXPECT_EQ(run_sweep(small_base(), sw, SweepVar::demand, 1), run_sweep(small_base(), sw, SweepVar::demand, 4));
}

TEST(EmitResults, OneRowTwoLines) {
  std::vector<ResultRow> rows{{"fws", SweepVar::demand, 100.0, "traffic_kb", 12.5, 5}};
  const std::string csv = emit(rows, ResultFormat::csv);
  EXPECT_EQ(csv, "policy,sweep_var,sweep_value,metric,mean,reps\nfws,demand,100,traffic_kb,12.5,5\n");
}

TEST(EmitResults, SortedAndDeterministic) {
  std::vector<ResultRow> rows{{"mfff", SweepVar::load, 0.3, "turnaround_ms", 1.0 / 3.0, 2},
                              {"fws", SweepVar::load, 0.7, "cost_per_hour", 0.1, 2},
                              {"fws", SweepVar::load, 0.3, "traffic_kb", 2.0, 2},
                              {"fws", SweepVar::load, 0.3, "cost_per_hour", 3.0, 2}};
  const std::string a = emit(rows, ResultFormat::csv);
  EXPECT_EQ(a, emit(rows, ResultFormat::csv));
  std::istringstream in(a);
  auto back = parse_results(in, ResultFormat::csv);
  ASSERT_EQ(back.size(), 4u);
  EXPECT_EQ(back[0].metric, "cost_per_hour");
  EXPECT_EQ(back[0].sweep_value, 0.3);
  EXPECT_EQ(back[1].metric, "traffic_kb");
  EXPECT_EQ(back[2].sweep_value, 0.7);
  EXPECT_EQ(back[3].policy, "mfff");
  EXPECT_EQ(back[3].mean, 1.0 / 3.0);
  EXPECT_EQ(emit(rows, ResultFormat::structured), emit(rows, ResultFormat::structured));
}

TEST(EmitResults, EmptyRowsAndBadPath) {
  std::ostringstream os;
  EXPECT_THROW(emit_results({}, ResultFormat::csv, os), error);
  std::vector<ResultRow> rows{{"fws", SweepVar::demand, 1.0, "traffic_kb", 1.0, 1}};
  try {
    emit_results(rows, ResultFormat::csv, std::string("/nonexistent/dir/out.csv"));
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::io_error);
  }
}

TEST(Cli, ValidateRunAndErrors) {
  const std::string good = write_temp("cli.json", R"({"workload": {"request_count": 40}})");
  auto [rc, out] = cli("validate --scenario " + good);
  EXPECT_EQ(rc, 0) << out;
  const std::string bad = write_temp("cli_bad.json", R"({"workload": {"background_load_fraction": 1.2}})");
  std::tie(rc, out) = cli("validate --scenario " + bad);
  EXPECT_NE(rc, 0);
  EXPECT_NE(out.find("workload.background_load_fraction"), std::string::npos) << out;
  std::tie(rc, out) = cli("run --scenario " + good + " --policy nope");
  EXPECT_NE(rc, 0);
  std::tie(rc, out) = cli("frobnicate");
  EXPECT_NE(rc, 0);

  std::tie(rc, out) = cli("run --scenario " + good + " --policy lfff --seed 3");
  ASSERT_EQ(rc, 0) << out;
  EXPECT_EQ(out.rfind("policy,sweep_var,sweep_value,metric,mean,reps\n", 0), 0u) << out;
  EXPECT_NE(out.find("lfff,demand,40,traffic_kb,"), std::string::npos) << out;
  auto [rc2, out2] = cli("run --scenario " + good + " --policy lfff --seed 3");
  EXPECT_EQ(out, out2);
}

TEST(Cli, SeedPrecedenceFlagOverEnvOverFile) {
  const std::string file = write_temp("seed.json", R"({"workload": {"request_count": 40, "seed": 1}})");
  auto base = cli("run --scenario " + file).second;
  auto flag5 = cli("run --scenario " + file + " --seed 5").second;
  EXPECT_NE(base, flag5);
  setenv("SFC_SCHED_SEED", "5", 1);
  auto env5 = cli("run --scenario " + file).second;
  auto env5_flag1 = cli("run --scenario " + file + " --seed 1").second;
  unsetenv("SFC_SCHED_SEED");
  EXPECT_EQ(env5, flag5);
  EXPECT_EQ(env5_flag1, base);
}

TEST(SampleScenarios, AllParse) {
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator("scenarios")) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(parse_scenario_file(entry.path().string())) << entry.path();
    ++n;
  }
  EXPECT_GE(n, 3);
}
