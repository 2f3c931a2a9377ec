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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sfcsched/error.hpp"
#include "sfcsched/fws.hpp"
#include "sfcsched/infrastructure.hpp"
#include "sfcsched/policy.hpp"
#include "sfcsched/sfc_model.hpp"

namespace sfcsched {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct IntRange {
  int lo = 1;
  int hi = 1;
};

// Distributions the per-scenario service definitions are drawn from.
struct ServiceGenConfig {
  Range exec_time_ms{10.0, 100.0};
  Range data_out_kb{5.0, 20.0};
  Range capacity_rps{20.0, 100.0};
  Range memory_gb{0.5, 3.0};
  IntRange cores{1, 2};
};

struct NetworkConfig {
  double packet_kb = 4.0;
  // Scheduled transfers raise a link's arrival rate for this long.
  double traffic_window_ms = 1000.0;
  // Offered load above this fraction of a link's rate is evaluated here.
  double max_utilization = 0.99;
};

struct EngineConfig {
  double provision_latency_ms = 20.0;
  double deploy_latency_ms = 10.0;
  double resume_latency_ms = 5.0;
  // Machines hosting nothing for this long are released; infinity keeps them.
  double idle_release_ms = 1000.0;
  bool ingress_delay = true;
};

struct InitialMachine {
  NodeId node = 0;
  std::string type;
};

struct Scenario {
  PolicyKind policy = PolicyKind::fws;
  TopologyConfig topology_config;
  Topology topology = default_topology();
  std::vector<VmType> catalog = default_catalog();
  std::vector<ServiceChain> chains = canonical_sfcs();
  std::optional<ServiceDirectory> services;
  ServiceGenConfig service_gen;
  std::size_t request_count = 1000;
  double arrival_rate_rps = 100.0;
  Range sla_delay_range_ms{400.0, 1000.0};
  Range sla_cost_range{1.0e-5, 4.0e-5};
  double background_load_fraction = 0.5;
  std::uint64_t rng_seed = 1;
  std::optional<std::vector<UserRequest>> requests;
  std::vector<InitialMachine> initial_machines;
  WeightParams weights;
  EngineConfig engine;
  NetworkConfig network;

  const ServiceChain& chain(ChainId id) const {
    for (const ServiceChain& c : chains)
      if (c.id() == id) return c;
    throw error(errc::validation_error, "unknown chain " + std::to_string(id));
  }

  void validate() const {
    auto range = [](const Range& r, const char* field, bool positive) {
      if (!(r.lo <= r.hi)) throw error(errc::validation_error, std::string(field) + ": lo must not exceed hi");
      if (positive && !(r.lo > 0.0)) throw error(errc::validation_error, std::string(field) + ": values must be positive");
    };
    range(sla_delay_range_ms, "workload.sla_delay_range_ms", true);
    range(sla_cost_range, "workload.sla_cost_range", true);
    range(service_gen.exec_time_ms, "chains.exec_time_ms", true);
    range(service_gen.data_out_kb, "chains.data_out_kb", true);
    range(service_gen.capacity_rps, "chains.capacity_rps", true);
    range(service_gen.memory_gb, "chains.memory_gb", true);
    if (service_gen.cores.lo < 1 || service_gen.cores.lo > service_gen.cores.hi)
      throw error(errc::validation_error, "chains.cores: need 1 <= lo <= hi");
    if (!(background_load_fraction >= 0.0 && background_load_fraction < 1.0))
      throw error(errc::validation_error, "workload.background_load_fraction: must lie in [0, 1)");
    if (!(arrival_rate_rps > 0.0)) throw error(errc::validation_error, "workload.arrival_rate_rps: must be positive");
    if (catalog.empty()) throw error(errc::validation_error, "catalog: needs at least one VM type");
    for (const VmType& t : catalog)
      if (!(t.memory_gb > 0.0) || t.cores <= 0 || !(t.max_bandwidth_mbps > 0.0) || !(t.hourly_cost > 0.0))
        throw error(errc::validation_error, "catalog." + t.name + ": every field must be positive");
    if (chains.empty()) throw error(errc::validation_error, "chains: needs at least one chain");
    std::set<ServiceId> seen;
    for (const ServiceChain& c : chains)
      for (ServiceId s : c.nodes())
        if (!seen.insert(s).second)
          throw error(errc::validation_error, "chains: service " + std::to_string(s) + " appears in two chains");
    if (services)
      for (ServiceId s : seen) {
        if (!services->count(s))
          throw error(errc::validation_error, "chains.services: no definition for service " + std::to_string(s));
        const MicroServiceDef& d = services->at(s);
        if (!(d.exec_time_ms > 0.0) || !(d.data_out_kb > 0.0) || !(d.capacity_rps > 0.0) || !(d.demand.memory_gb > 0.0) ||
            d.demand.cores <= 0)
          throw error(errc::validation_error, "chains.services." + std::to_string(s) + ": every field must be positive");
      }
    weights.validate();
    if (engine.provision_latency_ms < 0.0 || engine.deploy_latency_ms < 0.0 || engine.resume_latency_ms < 0.0 ||
        !(engine.idle_release_ms >= 0.0))
      throw error(errc::validation_error, "engine: latencies must be non-negative");
    if (!(network.packet_kb > 0.0) || !(network.traffic_window_ms > 0.0) ||
        !(network.max_utilization > 0.0 && network.max_utilization < 1.0))
      throw error(errc::validation_error, "topology.network: invalid packet size, window or utilisation cap");
    if (requests)
      for (const UserRequest& r : *requests) {
        if (!(r.delay_sla_ms > 0.0) || !(r.cost_sla > 0.0))
          throw error(errc::validation_error, "workload.requests: SLA bounds must be positive");
        chain(r.chain_id);
        if (!topology.has_node(r.ingress_node))
          throw error(errc::validation_error, "workload.requests: unknown ingress node");
      }
    for (const InitialMachine& m : initial_machines)
      if (!topology.has_node(m.node)) throw error(errc::validation_error, "topology.machines: unknown node");
  }
};

namespace detail {
inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id)};
  return std::mt19937_64(seq);
}
}  // namespace detail

// Service definitions drawn once per seed and shared by every request.
inline ServiceDirectory generate_services(const Scenario& sc) {
  if (sc.services) return *sc.services;
  auto rng = detail::stream(sc.rng_seed, 1);
  const ServiceGenConfig& g = sc.service_gen;
  auto uni = [&](const Range& r) { return std::uniform_real_distribution<double>(r.lo, r.hi)(rng); };
  std::vector<ServiceId> ids;
  for (const ServiceChain& c : sc.chains) ids.insert(ids.end(), c.nodes().begin(), c.nodes().end());
  std::sort(ids.begin(), ids.end());
  ServiceDirectory dir;
  for (ServiceId id : ids) {
    MicroServiceDef d;
    d.id = id;
    d.exec_time_ms = uni(g.exec_time_ms);
    d.data_out_kb = uni(g.data_out_kb);
    d.capacity_rps = uni(g.capacity_rps);
    d.demand.memory_gb = uni(g.memory_gb);
    d.demand.cores = std::uniform_int_distribution<int>(g.cores.lo, g.cores.hi)(rng);
    dir[id] = d;
  }
  return dir;
}

// Poisson arrivals; chain, SLA bounds and ingress node drawn uniformly.
inline std::vector<UserRequest> generate_workload(const Scenario& sc) {
  if (sc.requests) return *sc.requests;
  auto rng = detail::stream(sc.rng_seed, 2);
  std::exponential_distribution<double> gap(sc.arrival_rate_rps / 1000.0);
  std::uniform_int_distribution<std::size_t> pick_chain(0, sc.chains.size() - 1);
  std::uniform_real_distribution<double> delay_sla(sc.sla_delay_range_ms.lo, sc.sla_delay_range_ms.hi);
  std::uniform_real_distribution<double> cost_sla(sc.sla_cost_range.lo, sc.sla_cost_range.hi);
  std::vector<NodeId> edge_nodes;
  for (const CloudNode& n : sc.topology.nodes())
    if (n.kind == CloudKind::micro) edge_nodes.push_back(n.id);
  if (edge_nodes.empty())
    for (const CloudNode& n : sc.topology.nodes()) edge_nodes.push_back(n.id);
  std::uniform_int_distribution<std::size_t> pick_node(0, edge_nodes.size() - 1);

  std::vector<UserRequest> out;
  out.reserve(sc.request_count);
  double t = 0.0;
  for (std::size_t i = 0; i < sc.request_count; ++i) {
    t += gap(rng);
    UserRequest r;
    r.request_id = static_cast<RequestId>(i);
    r.chain_id = sc.chains[pick_chain(rng)].id();
    r.arrival_time_ms = t;
    r.delay_sla_ms = delay_sla(rng);
    r.cost_sla = cost_sla(rng);
    r.ingress_node = edge_nodes[pick_node(rng)];
    out.push_back(r);
  }
  return out;
}

inline bool check_sla(const UserRequest& req, std::optional<double> turnaround_ms, double attributed_cost) {
  if (!turnaround_ms) return false;  // dropped
  return *turnaround_ms <= req.delay_sla_ms && attributed_cost <= req.cost_sla;
}

struct Placement {
  InstanceId instance = 0;
  ServiceId service = 0;
  MachineId machine = 0;
  NodeId node = 0;
  double placed_ms = 0.0;  // capacity is reserved from here
  double start_ms = 0.0;
  double finish_ms = 0.0;
  SelectionRule rule = SelectionRule::affinity;
};

struct TransferRecord {
  InstanceId instance = 0;
  ServiceId from = 0;
  ServiceId to = 0;
  MachineId from_machine = 0;
  MachineId to_machine = 0;
  double data_kb = 0.0;
  double depart_ms = 0.0;
  double arrive_ms = 0.0;
};

/// Sum of data_out over precedence edges whose endpoints ran on different
/// machines. Independent of the engine's online accumulator.
inline double accumulate_traffic(std::span<const Placement> placements, std::span<const ServiceChain> chains,
                                 const ServiceDirectory& services, const std::map<InstanceId, ChainId>& instance_chain) {
  std::map<TaskKey, MachineId> where;
  for (const Placement& p : placements) where[{p.instance, p.service}] = p.machine;
  std::map<ChainId, const ServiceChain*> by_id;
  for (const ServiceChain& c : chains) by_id[c.id()] = &c;
  double kb = 0.0;
  for (const auto& [inst, chain_id] : instance_chain) {
    for (const Edge& e : by_id.at(chain_id)->edges()) {
      auto a = where.find({inst, e.pred});
      auto b = where.find({inst, e.succ});
      if (a == where.end() || b == where.end()) continue;
      if (a->second != b->second) kb += lookup(services, e.pred).data_out_kb;
    }
  }
  return kb;
}

// Every provisioned machine is billed one hour at its on-demand rate.
inline double total_cost(std::span<const MachineRecord> machines) {
  double c = 0.0;
  for (const MachineRecord& m : machines) c += m.type.hourly_cost;
  return c;
}

struct RequestRecord {
  RequestId request_id = 0;
  ChainId chain_id = 0;
  double arrival_ms = 0.0;
  bool completed = false;
  bool dropped = false;
  double turnaround_ms = 0.0;
  double attributed_cost = 0.0;
  bool satisfied = false;
};

struct MetricsReport {
  std::string policy;
  double total_traffic_kb = 0.0;
  double avg_turnaround_ms = 0.0;
  double satisfied_pct = 0.0;
  double total_cost_per_hour = 0.0;
  std::size_t arrived = 0;
  std::size_t completed = 0;
  std::size_t dropped = 0;
  std::size_t machines_provisioned = 0;
  double makespan_ms = 0.0;
  std::vector<RequestRecord> requests;
};

struct RunResult {
  MetricsReport report;
  ServiceDirectory services;
  std::vector<UserRequest> workload;
  std::vector<Placement> placements;
  std::vector<TransferRecord> transfers;
  std::vector<MachineRecord> machines;
  std::map<InstanceId, ChainId> instance_chain;
  std::size_t max_in_flight = 0;
};

}  // namespace sfcsched
