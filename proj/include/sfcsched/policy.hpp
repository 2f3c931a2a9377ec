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
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sfcsched/error.hpp"
#include "sfcsched/infrastructure.hpp"
#include "sfcsched/sfc_model.hpp"

namespace sfcsched {

enum class PolicyKind { fws, lfff, mfff, lfdt, mfdt };

inline constexpr std::array<PolicyKind, 5> all_policies{PolicyKind::fws, PolicyKind::lfff, PolicyKind::mfff,
                                                        PolicyKind::lfdt, PolicyKind::mfdt};

constexpr std::string_view policy_name(PolicyKind p) noexcept {
  switch (p) {
    case PolicyKind::fws: return "fws";
    case PolicyKind::lfff: return "lfff";
    case PolicyKind::mfff: return "mfff";
    case PolicyKind::lfdt: return "lfdt";
    case PolicyKind::mfdt: return "mfdt";
  }
  return "fws";
}

inline PolicyKind parse_policy(std::string_view name) {
  for (PolicyKind p : all_policies)
    if (policy_name(p) == name) return p;
  throw error(errc::validation_error, "unknown policy '" + std::string(name) + "' (expected fws|lfff|mfff|lfdt|mfdt)");
}

// A labelled, ready service waiting for a machine.
struct ReadyEntry {
  TaskKey key;
  int label = 0;
  double enqueue_ms = 0.0;
  double exec_time_ms = 0.0;
  std::size_t dependents = 0;
};

// Where an already placed predecessor of the service ran.
struct PredecessorPlacement {
  ServiceId service = 0;
  MachineId machine = 0;
  NodeId node = 0;
  double data_out_kb = 0.0;
};

struct PlacementRequest {
  TaskKey key;
  ResourceDemand demand;
  std::vector<PredecessorPlacement> preds;
  // Node the request's input comes from when the service has no predecessor.
  std::optional<NodeId> anchor;
  double now_ms = 0.0;
};

enum class SelectionRule { affinity, traffic, provision, least_full, most_full, fallback_provision };

constexpr std::string_view rule_name(SelectionRule r) noexcept {
  switch (r) {
    case SelectionRule::affinity: return "affinity";
    case SelectionRule::traffic: return "traffic";
    case SelectionRule::provision: return "provision";
    case SelectionRule::least_full: return "least_full";
    case SelectionRule::most_full: return "most_full";
    case SelectionRule::fallback_provision: return "fallback_provision";
  }
  return "";
}

struct MachineChoice {
  MachineId machine = 0;
  SelectionRule rule = SelectionRule::affinity;
  bool provisioned = false;
};

// Lowest-id node with a free VM slot, provisioned with the cheapest type that
// fits. Shared fallback of every policy.
inline MachineChoice provision_first_free(const PlacementRequest& req, Cluster& cluster, std::span<const VmType> catalog,
                                          SelectionRule rule) {
  const VmType& type = nearest_vm_type(req.demand.memory_gb, req.demand.cores, catalog);
  for (const CloudNode& n : cluster.topology().nodes())
    if (cluster.free_slots(n.id) > 0) return {cluster.provision(n.id, type, req.now_ms).id(), rule, true};
  throw error(errc::no_capacity, "no machine fits the service and every node is full");
}

}  // namespace sfcsched
