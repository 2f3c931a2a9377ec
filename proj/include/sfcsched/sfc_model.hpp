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
#include <cstddef>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sfcsched/error.hpp"

namespace sfcsched {

using ServiceId = int;
using ChainId = int;
using RequestId = std::int64_t;
using InstanceId = std::int64_t;
using NodeId = int;

struct ResourceDemand {
  double memory_gb = 1.0;
  int cores = 1;
};

struct MicroServiceDef {
  ServiceId id = 0;
  double exec_time_ms = 10.0;
  double data_out_kb = 5.0;
  double capacity_rps = 20.0;
  ResourceDemand demand;
};

using ServiceDirectory = std::map<ServiceId, MicroServiceDef>;

inline const MicroServiceDef& lookup(const ServiceDirectory& dir, ServiceId id) {
  auto it = dir.find(id);
  if (it == dir.end()) throw error(errc::unknown_service, "service " + std::to_string(id) + " has no definition");
  return it->second;
}

struct Edge {
  ServiceId pred = 0;
  ServiceId succ = 0;
  auto operator<=>(const Edge&) const = default;
};

class ServiceChain;
ServiceChain build_chain(ChainId chain_id, std::vector<ServiceId> nodes, std::vector<Edge> edges);

// Immutable precedence DAG of one service function chain. An edge (a, b)
// means b may start only after a has finished.
class ServiceChain {
 public:
  ChainId id() const noexcept { return id_; }
  std::span<const ServiceId> nodes() const noexcept { return nodes_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  bool contains(ServiceId s) const { return std::binary_search(nodes_.begin(), nodes_.end(), s); }

  std::span<const ServiceId> predecessors(ServiceId s) const { return adjacency(preds_, s); }
  std::span<const ServiceId> successors(ServiceId s) const { return adjacency(succs_, s); }

  // Nodes sorted ascending; ids increase along every path, so this is also a
  // topological order.
  std::span<const ServiceId> topological_order() const noexcept { return nodes_; }

  std::vector<ServiceId> sources() const {
    std::vector<ServiceId> out;
    for (ServiceId s : nodes_)
      if (predecessors(s).empty()) out.push_back(s);
    return out;
  }

  std::size_t transitive_dependents(ServiceId s) const {
    auto it = reach_.find(s);
    if (it == reach_.end()) throw error(errc::unknown_service, "service " + std::to_string(s) + " not in chain " + std::to_string(id_));
    return it->second;
  }

  std::size_t immediate_dependents(ServiceId s) const {
    if (!contains(s)) throw error(errc::unknown_service, "service " + std::to_string(s) + " not in chain " + std::to_string(id_));
    return successors(s).size();
  }

 private:
  friend ServiceChain build_chain(ChainId, std::vector<ServiceId>, std::vector<Edge>);

  std::span<const ServiceId> adjacency(const std::map<ServiceId, std::vector<ServiceId>>& m, ServiceId s) const {
    auto it = m.find(s);
    if (it == m.end()) {
      if (!contains(s)) throw error(errc::unknown_service, "service " + std::to_string(s) + " not in chain " + std::to_string(id_));
      return {};
    }
    return it->second;
  }

  ChainId id_ = 0;
  std::vector<ServiceId> nodes_;
  std::vector<Edge> edges_;
  std::map<ServiceId, std::vector<ServiceId>> preds_;
  std::map<ServiceId, std::vector<ServiceId>> succs_;
  std::map<ServiceId, std::size_t> reach_;
};

inline ServiceChain build_chain(ChainId chain_id, std::vector<ServiceId> nodes, std::vector<Edge> edges) {
  const std::string where = "chain " + std::to_string(chain_id);
  if (nodes.empty()) throw error(errc::empty_chain, where + " has no services");
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  ServiceChain c;
  c.id_ = chain_id;
  c.nodes_ = std::move(nodes);
  for (const Edge& e : edges) {
    if (!c.contains(e.pred) || !c.contains(e.succ))
      throw error(errc::dangling_edge, where + " edge (" + std::to_string(e.pred) + "," + std::to_string(e.succ) +
                                           ") references an unknown service");
    c.preds_[e.succ].push_back(e.pred);
    c.succs_[e.pred].push_back(e.succ);
  }

  // Kahn's algorithm; anything left unvisited sits on a cycle.
  std::map<ServiceId, std::size_t> indegree;
  for (ServiceId s : c.nodes_) indegree[s] = c.preds_.count(s) ? c.preds_[s].size() : 0;
  std::vector<ServiceId> frontier, order;
  for (auto [s, d] : indegree)
    if (d == 0) frontier.push_back(s);
  while (!frontier.empty()) {
    ServiceId s = frontier.back();
    frontier.pop_back();
    order.push_back(s);
    if (auto it = c.succs_.find(s); it != c.succs_.end())
      for (ServiceId t : it->second)
        if (--indegree[t] == 0) frontier.push_back(t);
  }
  if (order.size() != c.nodes_.size()) throw error(errc::cycle_detected, where + " precedence edges contain a cycle");

  for (const Edge& e : edges)
    if (e.pred >= e.succ)
      throw error(errc::unordered_edge, where + " edge (" + std::to_string(e.pred) + "," + std::to_string(e.succ) +
                                            ") runs against numerical service order");
  c.edges_ = std::move(edges);

  for (ServiceId s : c.nodes_) {
    std::set<ServiceId> seen;
    std::vector<ServiceId> stack{s};
    while (!stack.empty()) {
      ServiceId u = stack.back();
      stack.pop_back();
      for (ServiceId v : c.successors(u))
        if (seen.insert(v).second) stack.push_back(v);
    }
    c.reach_[s] = seen.size();
  }
  return c;
}

inline std::size_t transitive_dependents(const ServiceChain& chain, ServiceId s) { return chain.transitive_dependents(s); }

// The four evaluation chains over services 1..20.
inline std::vector<ServiceChain> canonical_sfcs() {
  std::vector<ServiceChain> out;
  out.push_back(build_chain(1, {1, 2, 3, 4, 5}, {{1, 2}, {2, 3}, {3, 4}, {3, 5}}));
  out.push_back(build_chain(2, {6, 7, 8, 9, 10}, {{6, 7}, {6, 8}, {7, 9}, {8, 9}, {9, 10}}));
  out.push_back(build_chain(3, {11, 12, 13, 14}, {{11, 12}, {12, 13}, {12, 14}}));
  out.push_back(build_chain(4, {15, 16, 17, 18, 19, 20},
                            {{15, 16}, {15, 17}, {16, 18}, {17, 18}, {18, 19}, {18, 20}}));
  return out;
}

// One service of one chain instance: the unit that gets placed on a machine.
struct TaskKey {
  InstanceId instance = 0;
  ServiceId service = 0;
  auto operator<=>(const TaskKey&) const = default;
};

struct UserRequest {
  RequestId request_id = 0;
  ChainId chain_id = 0;
  double arrival_time_ms = 0.0;
  double delay_sla_ms = 1.0;
  double cost_sla = 1.0;
  // Cloud node the user's traffic enters through.
  NodeId ingress_node = 0;
};

enum class ServiceStatus { waiting, ready, running, done };

// Per-request execution state of one chain.
class ChainInstance {
 public:
  ChainInstance(InstanceId instance_id, RequestId request_id, const ServiceChain& chain)
      : id_(instance_id), request_id_(request_id), chain_(&chain) {
    for (ServiceId s : chain.nodes()) status_[s] = ServiceStatus::waiting;
  }

  InstanceId id() const noexcept { return id_; }
  RequestId request_id() const noexcept { return request_id_; }
  ChainId chain_id() const noexcept { return chain_->id(); }
  const ServiceChain& chain() const noexcept { return *chain_; }

  ServiceStatus status(ServiceId s) const {
    auto it = status_.find(s);
    if (it == status_.end()) throw error(errc::unknown_service, "service " + std::to_string(s) + " not in instance");
    return it->second;
  }

  void mark_ready(ServiceId s) { advance(s, ServiceStatus::waiting, ServiceStatus::ready); }
  void mark_running(ServiceId s) { advance(s, ServiceStatus::ready, ServiceStatus::running); }
  void mark_done(ServiceId s) { advance(s, ServiceStatus::running, ServiceStatus::done); }

  bool predecessors_done(ServiceId s) const {
    return std::ranges::all_of(chain_->predecessors(s),
                               [&](ServiceId p) { return status(p) == ServiceStatus::done; });
  }

  bool complete() const {
    return std::ranges::all_of(status_, [](const auto& kv) { return kv.second == ServiceStatus::done; });
  }

 private:
  void advance(ServiceId s, ServiceStatus from, ServiceStatus to) {
    ServiceStatus cur = status(s);
    if (cur != from)
      throw error(errc::invalid_transition, "service " + std::to_string(s) + " is not in the expected state");
    if (to != ServiceStatus::done && !predecessors_done(s))
      throw error(errc::invalid_transition, "service " + std::to_string(s) + " has unfinished predecessors");
    status_[s] = to;
  }

  InstanceId id_;
  RequestId request_id_;
  const ServiceChain* chain_;
  std::map<ServiceId, ServiceStatus> status_;
};

// Services not yet started whose predecessors have all finished.
inline std::vector<ServiceId> ready_services(const ChainInstance& inst) {
  std::vector<ServiceId> out;
  for (ServiceId s : inst.chain().nodes()) {
    ServiceStatus st = inst.status(s);
    if ((st == ServiceStatus::waiting || st == ServiceStatus::ready) && inst.predecessors_done(s)) out.push_back(s);
  }
  return out;
}

}  // namespace sfcsched
