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
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sfcsched/error.hpp"
#include "sfcsched/sfc_model.hpp"

namespace sfcsched {

using MachineId = int;

struct VmType {
  std::string name;
  double memory_gb = 0.0;
  int cores = 0;
  double max_bandwidth_mbps = 0.0;  // megabytes per second
  double hourly_cost = 0.0;
};

// Amazon EC2 on-demand configurations.
inline std::vector<VmType> default_catalog() {
  return {
      {"t2.small", 2.0, 1, 25.0, 0.034},
      {"t2.medium", 4.0, 2, 25.0, 0.068},
      {"t2.large", 8.0, 2, 25.0, 0.136},
      {"m4.large", 8.0, 2, 56.25, 0.140},
  };
}

// Cheapest type that covers the demand; equal prices fall back to the name.
inline const VmType& nearest_vm_type(double memory_gb, int cores, std::span<const VmType> catalog) {
  const VmType* best = nullptr;
  for (const VmType& t : catalog) {
    if (t.memory_gb < memory_gb || t.cores < cores) continue;
    if (!best || t.hourly_cost < best->hourly_cost || (t.hourly_cost == best->hourly_cost && t.name < best->name))
      best = &t;
  }
  if (!best)
    throw error(errc::no_feasible_type, "no catalog type offers " + std::to_string(memory_gb) + " GB and " +
                                            std::to_string(cores) + " cores");
  return *best;
}

/// Mean sojourn time (seconds) of an M/D/1 queue with Poisson arrivals at
/// `lambda_pps` and deterministic service at `mu_pps`:
///   T = 1/(2 mu) * (2 - rho) / (1 - rho),  rho = lambda / mu.
inline double link_delay(double lambda_pps, double mu_pps) {
  if (!(mu_pps > 0.0)) throw error(errc::non_positive_rate, "link service rate must be positive");
  if (!(lambda_pps >= 0.0)) throw error(errc::non_positive_rate, "link arrival rate must be non-negative");
  if (lambda_pps >= mu_pps) throw error(errc::unstable_queue, "arrival rate reaches the link service rate");
  const double rho = lambda_pps / mu_pps;
  return (1.0 / (2.0 * mu_pps)) * (2.0 - rho) / (1.0 - rho);
}

enum class CloudKind { micro, core };

struct CloudNode {
  NodeId id = 0;
  CloudKind kind = CloudKind::micro;
  int vm_slots = 1;
};

struct Link {
  NodeId a = 0;
  NodeId b = 0;
  double mu_pps = 1.0;
  double lambda_pps = 0.0;
};

struct TopologyConfig {
  int micro_nodes = 16;
  int core_nodes = 4;
  int micro_vm_slots = 4;
  int core_vm_slots = 32;
  double core_core_mu_pps = 1600.0;
  double core_micro_mu_pps = 400.0;
};

// Undirected cloud graph with precomputed minimum-hop routes. Among routes of
// equal length the one found by breadth-first search with ascending neighbour
// ids wins.
class Topology {
 public:
  Topology() = default;
  Topology(std::vector<CloudNode> nodes, std::vector<Link> links) : nodes_(std::move(nodes)), links_(std::move(links)) {
    std::sort(nodes_.begin(), nodes_.end(), [](const CloudNode& x, const CloudNode& y) { return x.id < y.id; });
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (i > 0 && nodes_[i].id == nodes_[i - 1].id)
        throw error(errc::validation_error, "duplicate node id " + std::to_string(nodes_[i].id));
      if (nodes_[i].vm_slots < 0) throw error(errc::validation_error, "negative vm_slots on node " + std::to_string(nodes_[i].id));
      index_[nodes_[i].id] = i;
    }
    adj_.assign(nodes_.size(), {});
    for (std::size_t li = 0; li < links_.size(); ++li) {
      const Link& l = links_[li];
      if (!index_.count(l.a) || !index_.count(l.b) || l.a == l.b)
        throw error(errc::validation_error, "link references an unknown node or is a self loop");
      if (!(l.mu_pps > 0.0)) throw error(errc::non_positive_rate, "link service rate must be positive");
      adj_[index_[l.a]].push_back({l.b, li});
      adj_[index_[l.b]].push_back({l.a, li});
    }
    for (auto& v : adj_) std::sort(v.begin(), v.end());
    compute_routes();
  }

  std::span<const CloudNode> nodes() const noexcept { return nodes_; }
  std::span<const Link> links() const noexcept { return links_; }
  std::vector<Link>& mutable_links() noexcept { return links_; }

  bool has_node(NodeId n) const { return index_.count(n) > 0; }

  const CloudNode& node(NodeId n) const { return nodes_[idx(n)]; }

  // Link indices along the route from src to dst; empty when src == dst.
  const std::vector<std::size_t>& route(NodeId src, NodeId dst) const {
    const auto& r = routes_[idx(src)][idx(dst)];
    if (!r) throw error(errc::no_path, "no path from node " + std::to_string(src) + " to " + std::to_string(dst));
    return *r;
  }

  bool connected(NodeId src, NodeId dst) const { return routes_[idx(src)][idx(dst)].has_value(); }

  std::size_t hops(NodeId src, NodeId dst) const { return route(src, dst).size(); }

 private:
  struct Neighbor {
    NodeId node;
    std::size_t link;
    auto operator<=>(const Neighbor&) const = default;
  };

  std::size_t idx(NodeId n) const {
    auto it = index_.find(n);
    if (it == index_.end()) throw error(errc::no_path, "unknown node " + std::to_string(n));
    return it->second;
  }

  void compute_routes() {
    const std::size_t n = nodes_.size();
    routes_.assign(n, std::vector<std::optional<std::vector<std::size_t>>>(n));
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<std::optional<std::pair<std::size_t, std::size_t>>> parent(n);  // (prev node idx, link)
      std::vector<bool> seen(n, false);
      std::queue<std::size_t> q;
      q.push(s);
      seen[s] = true;
      while (!q.empty()) {
        std::size_t u = q.front();
        q.pop();
        for (const Neighbor& nb : adj_[u]) {
          std::size_t v = index_.at(nb.node);
          if (seen[v]) continue;
          seen[v] = true;
          parent[v] = {u, nb.link};
          q.push(v);
        }
      }
      for (std::size_t d = 0; d < n; ++d) {
        if (!seen[d]) continue;
        std::vector<std::size_t> path;
        for (std::size_t v = d; v != s; v = parent[v]->first) path.push_back(parent[v]->second);
        std::reverse(path.begin(), path.end());
        routes_[s][d] = std::move(path);
      }
    }
  }

  std::vector<CloudNode> nodes_;
  std::vector<Link> links_;
  std::map<NodeId, std::size_t> index_;
  std::vector<std::vector<Neighbor>> adj_;
  std::vector<std::vector<std::optional<std::vector<std::size_t>>>> routes_;
};

// Micro clouds take ids 0..micro-1 and core clouds follow. Core clouds form
// a full mesh; micro cloud i hangs off core cloud i / (micro / core).
inline Topology default_topology(const TopologyConfig& cfg = {}) {
  if (cfg.micro_nodes < 0 || cfg.core_nodes <= 0)
    throw error(errc::validation_error, "topology needs at least one core cloud");
  std::vector<CloudNode> nodes;
  std::vector<Link> links;
  for (int i = 0; i < cfg.micro_nodes; ++i) nodes.push_back({i, CloudKind::micro, cfg.micro_vm_slots});
  for (int j = 0; j < cfg.core_nodes; ++j) nodes.push_back({cfg.micro_nodes + j, CloudKind::core, cfg.core_vm_slots});
  for (int j = 0; j < cfg.core_nodes; ++j)
    for (int k = j + 1; k < cfg.core_nodes; ++k)
      links.push_back({cfg.micro_nodes + j, cfg.micro_nodes + k, cfg.core_core_mu_pps, 0.0});
  const int per_core = std::max(1, (cfg.micro_nodes + cfg.core_nodes - 1) / cfg.core_nodes);
  for (int i = 0; i < cfg.micro_nodes; ++i)
    links.push_back({i, cfg.micro_nodes + std::min(i / per_core, cfg.core_nodes - 1), cfg.core_micro_mu_pps, 0.0});
  return Topology(std::move(nodes), std::move(links));
}

/// Sum of link delays (seconds) along the minimum-hop route, using each
/// link's stored arrival rate.
inline double path_delay(const Topology& topo, NodeId src, NodeId dst) {
  double total = 0.0;
  for (std::size_t li : topo.route(src, dst)) {
    const Link& l = topo.links()[li];
    total += link_delay(l.lambda_pps, l.mu_pps);
  }
  return total;
}

// Sets every link's arrival rate to a fixed fraction of its service rate.
inline void apply_background_load(Topology& topo, double load_fraction) {
  if (!(load_fraction >= 0.0 && load_fraction < 1.0))
    throw error(errc::validation_error, "background load fraction must lie in [0, 1)");
  for (Link& l : topo.mutable_links()) l.lambda_pps = load_fraction * l.mu_pps;
}

enum class MachineState { active, buffered };
enum class HostedState { reserved, running, idle };

struct HostedService {
  ResourceDemand demand;
  HostedState state = HostedState::reserved;
};

// A provisioned VM. Hosted entries hold their demand until they are buffered;
// buffered services keep only a storage residual, which counts as zero compute.
class Machine {
 public:
  Machine(MachineId id, NodeId node, VmType type) : id_(id), node_(node), type_(std::move(type)) {}

  MachineId id() const noexcept { return id_; }
  NodeId node() const noexcept { return node_; }
  const VmType& type() const noexcept { return type_; }
  MachineState state() const noexcept { return state_; }
  double used_memory_gb() const noexcept { return used_memory_; }
  int used_cores() const noexcept { return used_cores_; }
  const std::map<TaskKey, HostedService>& hosted() const noexcept { return hosted_; }
  const std::set<ServiceId>& buffered_services() const noexcept { return buffered_; }
  bool empty() const noexcept { return hosted_.empty(); }

  bool fits(const ResourceDemand& d) const noexcept {
    return used_memory_ + d.memory_gb <= type_.memory_gb + 1e-9 && used_cores_ + d.cores <= type_.cores;
  }

  double utilization() const noexcept {
    return std::max(used_memory_ / type_.memory_gb, static_cast<double>(used_cores_) / type_.cores);
  }

  double remaining_fraction() const noexcept { return 1.0 - utilization(); }

  void host(const TaskKey& key, const ResourceDemand& d) {
    if (!fits(d)) throw error(errc::no_capacity, "machine " + std::to_string(id_) + " cannot fit the demand");
    if (hosted_.count(key)) throw error(errc::invalid_transition, "task already hosted on machine " + std::to_string(id_));
    hosted_[key] = {d, HostedState::reserved};
    used_memory_ += d.memory_gb;
    used_cores_ += d.cores;
    state_ = MachineState::active;
  }

  void start(const TaskKey& key) { transition(key, HostedState::reserved, HostedState::running); }
  void finish(const TaskKey& key) { transition(key, HostedState::running, HostedState::idle); }

  // Releases the compute of an instance that no longer serves demand.
  void buffer_idle(const TaskKey& key) {
    auto it = hosted_.find(key);
    if (it == hosted_.end()) throw error(errc::not_idle, "task is not hosted on machine " + std::to_string(id_));
    if (it->second.state != HostedState::idle) throw error(errc::not_idle, "task is still serving demand");
    used_memory_ -= it->second.demand.memory_gb;
    used_cores_ -= it->second.demand.cores;
    if (used_memory_ < 1e-9) used_memory_ = 0.0;
    hosted_.erase(it);
    buffered_.insert(key.service);
    if (hosted_.empty()) state_ = MachineState::buffered;
  }

  // Brings a buffered service back for a new task; the caller delays the
  // task's start by the resume latency.
  void resume(const TaskKey& key, const ResourceDemand& d) {
    if (!buffered_.count(key.service))
      throw error(errc::not_buffered, "service " + std::to_string(key.service) + " is not buffered on machine " +
                                          std::to_string(id_));
    host(key, d);
  }

 private:
  void transition(const TaskKey& key, HostedState from, HostedState to) {
    auto it = hosted_.find(key);
    if (it == hosted_.end() || it->second.state != from)
      throw error(errc::invalid_transition, "hosted task on machine " + std::to_string(id_) + " is not in the expected state");
    it->second.state = to;
  }

  MachineId id_;
  NodeId node_;
  VmType type_;
  MachineState state_ = MachineState::active;
  double used_memory_ = 0.0;
  int used_cores_ = 0;
  std::map<TaskKey, HostedService> hosted_;
  std::set<ServiceId> buffered_;
};

struct MachineRecord {
  MachineId id = 0;
  NodeId node = 0;
  VmType type;
  double provisioned_ms = 0.0;
  std::optional<double> released_ms;
};

// Machines currently provisioned across the topology, plus the history of
// every machine ever provisioned (used for cost accounting).
class Cluster {
 public:
  explicit Cluster(const Topology& topo) : topo_(&topo) {
    for (const CloudNode& n : topo.nodes()) in_use_[n.id] = 0;
  }

  const Topology& topology() const noexcept { return *topo_; }

  std::map<MachineId, Machine>& machines() noexcept { return machines_; }
  const std::map<MachineId, Machine>& machines() const noexcept { return machines_; }
  const std::vector<MachineRecord>& history() const noexcept { return history_; }

  Machine& machine(MachineId id) { return machines_.at(id); }
  const Machine& machine(MachineId id) const { return machines_.at(id); }
  bool has_machine(MachineId id) const { return machines_.count(id) > 0; }

  int free_slots(NodeId n) const { return topo_->node(n).vm_slots - in_use_.at(n); }

  Machine& provision(NodeId n, const VmType& type, double now_ms = 0.0) {
    if (free_slots(n) <= 0) throw error(errc::node_full, "node " + std::to_string(n) + " has no free VM slot");
    MachineId id = next_id_++;
    ++in_use_[n];
    history_.push_back({id, n, type, now_ms, std::nullopt});
    return machines_.emplace(id, Machine(id, n, type)).first->second;
  }

  void release(MachineId id, double now_ms = 0.0) {
    auto it = machines_.find(id);
    if (it == machines_.end()) throw error(errc::validation_error, "unknown machine " + std::to_string(id));
    if (!it->second.empty()) throw error(errc::machine_busy, "machine " + std::to_string(id) + " still hosts services");
    --in_use_[it->second.node()];
    history_[static_cast<std::size_t>(id)].released_ms = now_ms;
    machines_.erase(it);
  }

 private:
  const Topology* topo_;
  std::map<MachineId, Machine> machines_;
  std::map<NodeId, int> in_use_;
  std::vector<MachineRecord> history_;  // indexed by machine id
  MachineId next_id_ = 0;
};

}  // namespace sfcsched
