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
#include <limits>
#include <numeric>
#include <set>
#include <span>
#include <tuple>
#include <vector>

#include "sfcsched/error.hpp"
#include "sfcsched/infrastructure.hpp"
#include "sfcsched/policy.hpp"
#include "sfcsched/sfc_model.hpp"

namespace sfcsched {

enum class DependentsMode { transitive, immediate };

struct WeightParams {
  double alpha_dep = 1.0;    // per dependent service
  double beta_wait = 0.01;   // per millisecond spent waiting
  DependentsMode dependents = DependentsMode::transitive;
  bool enqueue_tie_break = true;

  void validate() const {
    if (alpha_dep < 0.0 || beta_wait < 0.0)
      throw error(errc::validation_error, "fws.alpha_dep and fws.beta_wait must be non-negative");
    if (alpha_dep == 0.0 && beta_wait == 0.0)
      throw error(errc::validation_error, "fws.alpha_dep and fws.beta_wait cannot both be zero");
  }
};

inline std::size_t dependents_of(const ServiceChain& chain, ServiceId s, DependentsMode mode) {
  return mode == DependentsMode::transitive ? chain.transitive_dependents(s) : chain.immediate_dependents(s);
}

inline double compute_weight(std::size_t dependents, double wait_ms, const WeightParams& params) {
  return params.alpha_dep * static_cast<double>(dependents) + params.beta_wait * std::max(0.0, wait_ms);
}

inline double compute_weight(const ReadyEntry& e, double now_ms, const WeightParams& params) {
  return compute_weight(e.dependents, now_ms - e.enqueue_ms, params);
}

inline double compute_weight(const ReadyEntry& e, double now_ms, const ServiceChain& chain, const WeightParams& params) {
  return compute_weight(dependents_of(chain, e.key.service, params.dependents), now_ms - e.enqueue_ms, params);
}

// Dispatch order: highest label, then highest weight, then earliest enqueue,
// then lowest (instance, service).
inline std::vector<std::size_t> fws_order(std::span<const ReadyEntry> queue, double now_ms, const WeightParams& params) {
  std::vector<double> w(queue.size());
  for (std::size_t i = 0; i < queue.size(); ++i) w[i] = compute_weight(queue[i], now_ms, params);
  std::vector<std::size_t> idx(queue.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const ReadyEntry& x = queue[a];
    const ReadyEntry& y = queue[b];
    if (x.label != y.label) return x.label > y.label;
    if (w[a] != w[b]) return w[a] > w[b];
    if (params.enqueue_tie_break && x.enqueue_ms != y.enqueue_ms) return x.enqueue_ms < y.enqueue_ms;
    return x.key < y.key;
  });
  return idx;
}

inline TaskKey select_next_service(std::span<const ReadyEntry> queue, double now_ms, const WeightParams& params = {}) {
  if (queue.empty()) throw error(errc::empty_queue, "no ready service to select");
  return queue[fws_order(queue, now_ms, params).front()].key;
}

namespace detail {

// Inter-machine kilobytes if the service lands on `m`, each transfer weighted
// by the machines it crosses: one for the machine boundary plus one per hop.
inline double added_traffic(const PlacementRequest& req, const Machine& m, const Topology& topo) {
  double kb = 0.0;
  for (const PredecessorPlacement& p : req.preds)
    if (p.machine != m.id()) kb += p.data_out_kb * static_cast<double>(1 + topo.hops(p.node, m.node()));
  return kb;
}

inline std::size_t anchor_hops(const PlacementRequest& req, const Machine& m, const Topology& topo) {
  if (!req.preds.empty() || !req.anchor) return 0;
  return topo.connected(*req.anchor, m.node()) ? topo.hops(*req.anchor, m.node()) : std::numeric_limits<std::size_t>::max();
}

}  // namespace detail

/// Affinity-first machine selection.
///
///  (a) a machine that ran a predecessor of the same instance and still has
///      room for the service;
///  (b) otherwise the feasible machine adding the least hop-weighted
///      inter-machine traffic (sources prefer machines near their ingress
///      node), then the one with most remaining capacity;
///  (c) otherwise a new machine of the nearest catalog type on the node with
///      the lowest path delay to the predecessors (or the ingress node).
///
/// Remaining ties go to the lower machine or node id. `delay(src, dst)` gives
/// the current path delay between two nodes.
template <typename DelayFn>
MachineChoice select_machine_fws(const PlacementRequest& req, Cluster& cluster, std::span<const VmType> catalog,
                                 DelayFn&& delay) {
  const Topology& topo = cluster.topology();
  auto& machines = cluster.machines();

  std::set<MachineId> pred_machines;
  for (const PredecessorPlacement& p : req.preds) pred_machines.insert(p.machine);

  const Machine* best = nullptr;
  double best_kb = 0.0;
  for (MachineId id : pred_machines) {
    auto it = machines.find(id);
    if (it == machines.end() || !it->second.fits(req.demand)) continue;
    double kb = detail::added_traffic(req, it->second, topo);
    if (!best || kb < best_kb) best = &it->second, best_kb = kb;
  }
  if (best) return {best->id(), SelectionRule::affinity, false};

  using Score = std::tuple<double, std::size_t, double, MachineId>;
  std::optional<Score> best_score;
  for (const auto& [id, m] : machines) {
    if (!m.fits(req.demand)) continue;
    if (!req.preds.empty() && !std::ranges::all_of(req.preds, [&](const auto& p) { return topo.connected(p.node, m.node()); }))
      continue;
    Score s{detail::added_traffic(req, m, topo), detail::anchor_hops(req, m, topo), -m.remaining_fraction(), id};
    if (!best_score || s < *best_score) best_score = s;
  }
  if (best_score) return {std::get<3>(*best_score), SelectionRule::traffic, false};

  const VmType& type = nearest_vm_type(req.demand.memory_gb, req.demand.cores, catalog);
  std::optional<std::pair<double, NodeId>> best_node;
  for (const CloudNode& n : topo.nodes()) {
    if (cluster.free_slots(n.id) <= 0) continue;
    double d = 0.0;
    bool reachable = true;
    auto add = [&](NodeId from) {
      if (!topo.connected(from, n.id)) reachable = false;
      else d += delay(from, n.id);
    };
    if (req.preds.empty() && req.anchor) add(*req.anchor);
    for (const PredecessorPlacement& p : req.preds) add(p.node);
    if (!reachable) continue;
    if (!best_node || std::pair{d, n.id} < *best_node) best_node = {d, n.id};
  }
  if (!best_node) throw error(errc::no_capacity, "no machine fits the service and every node is full");
  return {cluster.provision(best_node->second, type, req.now_ms).id(), SelectionRule::provision, true};
}

inline MachineChoice select_machine_fws(const PlacementRequest& req, Cluster& cluster, std::span<const VmType> catalog) {
  const Topology& topo = cluster.topology();
  return select_machine_fws(req, cluster, catalog, [&](NodeId a, NodeId b) { return path_delay(topo, a, b); });
}

}  // namespace sfcsched
