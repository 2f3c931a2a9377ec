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

#include <cmath>
#include <numeric>
#include <vector>

#include "sfcsched.hpp"
#include "support/oracles.hpp"

using namespace sfcsched;

TEST(Workload, EmptyWhenNoRequests) {
  Scenario sc;
  sc.request_count = 0;
  EXPECT_TRUE(generate_workload(sc).empty());
  MetricsReport r = run(sc);
  EXPECT_EQ(r.arrived, 0u);
  EXPECT_EQ(r.total_cost_per_hour, 0.0);
}

TEST(Workload, SameSeedSameRequests) {
  Scenario sc;
  sc.request_count = 500;
  sc.rng_seed = 77;
  auto a = generate_workload(sc);
  auto b = generate_workload(sc);
  ASSERT_EQ(a.size(), 500u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].arrival_time_ms, b[i].arrival_time_ms);
    EXPECT_EQ(a[i].chain_id, b[i].chain_id);
    EXPECT_EQ(a[i].delay_sla_ms, b[i].delay_sla_ms);
    EXPECT_EQ(a[i].cost_sla, b[i].cost_sla);
    EXPECT_EQ(a[i].ingress_node, b[i].ingress_node);
  }
  sc.rng_seed = 78;
  EXPECT_NE(generate_workload(sc)[0].arrival_time_ms, a[0].arrival_time_ms);
}

TEST(Workload, MeanGapNearInverseRate) {
  Scenario sc;
  sc.request_count = 10000;
  sc.arrival_rate_rps = 100.0;
  auto w = generate_workload(sc);
  const double mean_gap = w.back().arrival_time_ms / static_cast<double>(w.size());
  EXPECT_NEAR(mean_gap, 10.0, 0.5);
  for (const UserRequest& r : w) {
    EXPECT_GE(r.delay_sla_ms, sc.sla_delay_range_ms.lo);
    EXPECT_LE(r.delay_sla_ms, sc.sla_delay_range_ms.hi);
    EXPECT_GE(r.cost_sla, sc.sla_cost_range.lo);
    EXPECT_LE(r.cost_sla, sc.sla_cost_range.hi);
    EXPECT_EQ(sc.topology.node(r.ingress_node).kind, CloudKind::micro);
  }
}

TEST(Services, DefaultRangesHold) {
  Scenario sc;
  ServiceDirectory d = generate_services(sc);
  ASSERT_EQ(d.size(), 20u);
  for (const auto& [id, s] : d) {
    EXPECT_GE(s.exec_time_ms, 10.0);
    EXPECT_LE(s.exec_time_ms, 100.0);
    EXPECT_GE(s.data_out_kb, 5.0);
    EXPECT_LE(s.data_out_kb, 20.0);
    EXPECT_GE(s.capacity_rps, 20.0);
    EXPECT_LE(s.capacity_rps, 100.0);
  }
}

TEST(CheckSla, Cases) {
  UserRequest r;
  r.delay_sla_ms = 250.0;
  r.cost_sla = 1.0;
  EXPECT_TRUE(check_sla(r, 200.0, 0.5));
  EXPECT_FALSE(check_sla(r, 300.0, 0.5));
  EXPECT_FALSE(check_sla(r, 200.0, 1.5));
  EXPECT_FALSE(check_sla(r, std::nullopt, 0.0));
}

namespace {

ServiceDirectory data_dir(const ServiceChain& c, const std::map<ServiceId, double>& data) {
  ServiceDirectory d;
  for (ServiceId s : c.nodes()) {
    MicroServiceDef m;
    m.id = s;
    m.data_out_kb = data.count(s) ? data.at(s) : 1.0;
    d[s] = m;
  }
  return d;
}

std::vector<Placement> place_on(const ServiceChain& c, const std::map<ServiceId, MachineId>& machine) {
  std::vector<Placement> out;
  for (ServiceId s : c.nodes()) out.push_back({0, s, machine.at(s), 0, 0.0, 0.0, 0.0, SelectionRule::affinity});
  return out;
}

}  // namespace

TEST(AccumulateTraffic, Cases) {
  auto chains = canonical_sfcs();
  const ServiceChain& c1 = chains[0];
  std::map<InstanceId, ChainId> inst{{0, c1.id()}};
  auto one = place_on(c1, {{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}});
  EXPECT_EQ(accumulate_traffic(one, chains, data_dir(c1, {}), inst), 0.0);

  ServiceChain pair = build_chain(7, {1, 2}, {{1, 2}});
  std::vector<ServiceChain> just{pair};
  std::map<InstanceId, ChainId> pinst{{0, 7}};
  EXPECT_EQ(accumulate_traffic(place_on(pair, {{1, 0}, {2, 1}}), just, data_dir(pair, {{1, 12.0}}), pinst), 12.0);

  // No placement of the second chain cuts exactly 6->7 and 9->10 (that would
  // need 6, 8, 9 together and 7 with 9 too), so the nearest split also cuts
  // 7->9: 10 + 3 + 8 kB.
  const ServiceChain& c2 = chains[1];
  auto dir = data_dir(c2, {{6, 10.0}, {7, 3.0}, {8, 4.0}, {9, 8.0}});
  std::map<InstanceId, ChainId> inst2{{0, c2.id()}};
  for (const std::map<ServiceId, MachineId>& m : {std::map<ServiceId, MachineId>{{6, 0}, {7, 1}, {8, 0}, {9, 0}, {10, 2}},
                                                  std::map<ServiceId, MachineId>{{6, 0}, {7, 1}, {8, 0}, {9, 1}, {10, 2}}}) {
    double by_hand = 0.0;
    for (const Edge& e : c2.edges())
      if (m.at(e.pred) != m.at(e.succ)) by_hand += dir.at(e.pred).data_out_kb;
    EXPECT_EQ(accumulate_traffic(place_on(c2, m), chains, dir, inst2), by_hand);
  }
  EXPECT_EQ(accumulate_traffic(place_on(c2, {{6, 0}, {7, 1}, {8, 0}, {9, 0}, {10, 2}}), chains, dir, inst2), 21.0);
}

TEST(TotalCost, Cases) {
  auto cat = default_catalog();
  std::vector<MachineRecord> three(3, MachineRecord{0, 0, cat[0], 0.0, std::nullopt});
  EXPECT_NEAR(total_cost(three), 0.102, 1e-12);
  EXPECT_EQ(total_cost(std::vector<MachineRecord>{}), 0.0);
  std::vector<MachineRecord> mixed{{0, 0, cat[1], 0.0, std::nullopt}, {1, 0, cat[3], 0.0, std::nullopt}};
  EXPECT_NEAR(total_cost(mixed), 0.208, 1e-12);
}

TEST(Run, SingleServiceColdStart) {
  Scenario sc;
  sc.chains = {build_chain(1, {1}, {})};
  MicroServiceDef d;
  d.id = 1;
  d.exec_time_ms = 40.0;
  d.demand = {1.0, 1};
  sc.services = ServiceDirectory{{1, d}};
  sc.requests = std::vector<UserRequest>{{0, 1, 0.0, 1000.0, 1.0, 0}};
  RunResult r = simulate(sc);
  ASSERT_EQ(r.report.completed, 1u);
  EXPECT_DOUBLE_EQ(r.report.avg_turnaround_ms, 40.0 + sc.engine.provision_latency_ms + sc.engine.deploy_latency_ms);
  EXPECT_EQ(r.report.total_traffic_kb, 0.0);
  EXPECT_EQ(r.report.satisfied_pct, 100.0);
  EXPECT_NEAR(r.report.total_cost_per_hour, 0.034, 1e-12);
}

TEST(Run, WholeChainOnOneMachineUnderFws) {
  Scenario sc;
  sc.chains = {canonical_sfcs()[0]};
  ServiceDirectory dir;
  for (ServiceId s : sc.chains[0].nodes()) {
    MicroServiceDef d;
    d.id = s;
    d.exec_time_ms = 20.0;
    d.data_out_kb = 10.0;
    d.demand = {0.5, 1};
    dir[s] = d;
  }
  sc.services = dir;
  // Two cores, so the parallel branches 4 and 5 fit side by side.
  sc.catalog = {default_catalog()[1]};
  sc.requests = std::vector<UserRequest>{{0, 1, 0.0, 1000.0, 1.0, 0}};
  RunResult r = simulate(sc);
  ASSERT_EQ(r.placements.size(), 5u);
  for (const Placement& p : r.placements) {
    EXPECT_EQ(p.machine, r.placements[0].machine);
    if (!sc.chains[0].predecessors(p.service).empty()) {
      EXPECT_EQ(p.rule, SelectionRule::affinity);
    }
  }
  EXPECT_EQ(r.report.total_traffic_kb, 0.0);
  EXPECT_TRUE(oracle::audit(r, sc).ok());
}

TEST(Run, SmallFixtureGivesValidExclusiveSchedule) {
  oracle::SmallFixture f = oracle::small_fixture();
  for (PolicyKind k : all_policies) {
    f.scenario.policy = k;
    RunResult r = simulate(f.scenario);
    EXPECT_EQ(r.report.completed, 3u) << policy_name(k);
    EXPECT_EQ(r.machines.size(), 5u);
    oracle::Audit a = oracle::audit(r, f.scenario);
    EXPECT_TRUE(a.ok()) << a.summary();
    // Single-core machines run one service at a time.
    for (const Placement& p : r.placements)
      for (const Placement& q : r.placements)
        if (&p != &q && p.machine == q.machine) {
          EXPECT_TRUE(p.finish_ms <= q.start_ms || q.finish_ms <= p.start_ms);
        }
  }
}

TEST(Run, DefaultScenarioPassesAudit) {
  Scenario sc;
  sc.request_count = 300;
  for (PolicyKind k : all_policies) {
    sc.policy = k;
    RunResult r = simulate(sc);
    oracle::Audit a = oracle::audit(r, sc);
    EXPECT_TRUE(a.ok()) << policy_name(k) << '\n' << a.summary();
    EXPECT_GT(a.placements_checked, 0u);
  }
}

TEST(Run, SameSeedBitIdenticalReports) {
  Scenario sc;
  sc.request_count = 400;
  sc.rng_seed = 9;
  MetricsReport a = run(sc), b = run(sc);
  EXPECT_EQ(a.total_traffic_kb, b.total_traffic_kb);
  EXPECT_EQ(a.avg_turnaround_ms, b.avg_turnaround_ms);
  EXPECT_EQ(a.satisfied_pct, b.satisfied_pct);
  EXPECT_EQ(a.total_cost_per_hour, b.total_cost_per_hour);
  ASSERT_EQ(a.requests.size(), b.requests.size());
  for (std::size_t i = 0; i < a.requests.size(); ++i) EXPECT_EQ(a.requests[i].turnaround_ms, b.requests[i].turnaround_ms);
}

TEST(Run, DroppedRequestsAreUnsatisfied) {
  // One tiny machine and nowhere to grow: most requests exceed their bound
  // while waiting and are dropped.
  Scenario sc;
  sc.topology = Topology({{0, CloudKind::micro, 1}}, {});
  sc.catalog = {{"tiny", 4.0, 2, 25.0, 0.05}};
  sc.service_gen.memory_gb = {0.5, 1.0};
  sc.request_count = 400;
  sc.arrival_rate_rps = 400.0;
  RunResult r = simulate(sc);
  EXPECT_GT(r.report.dropped, 0u);
  EXPECT_EQ(r.report.arrived, r.report.completed + r.report.dropped);
  EXPECT_LT(r.report.satisfied_pct, 100.0);
  EXPECT_LE(r.report.satisfied_pct, 100.0 * static_cast<double>(r.report.completed) / 400.0);
  EXPECT_TRUE(oracle::audit(r, sc).ok()) << oracle::audit(r, sc).summary();
}

TEST(Run, InfeasibleServiceIsDroppedNotThrown) {
  Scenario sc;
  sc.catalog = {{"small", 1.0, 1, 25.0, 0.01}};
  sc.service_gen.memory_gb = {2.0, 3.0};
  sc.request_count = 10;
  MetricsReport r = run(sc);
  EXPECT_EQ(r.dropped, 10u);
  EXPECT_EQ(r.satisfied_pct, 0.0);
}
