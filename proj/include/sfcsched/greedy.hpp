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
#include <numeric>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sfcsched/error.hpp"
#include "sfcsched/infrastructure.hpp"
#include "sfcsched/policy.hpp"

namespace sfcsched {

enum class MachineBias { least_full, most_full };
enum class ServiceBias { first_finish, decreasing_time };

struct GreedyPolicy {
  MachineBias machine_bias = MachineBias::least_full;
  ServiceBias service_bias = ServiceBias::first_finish;

  static GreedyPolicy from(PolicyKind kind) {
    switch (kind) {
      case PolicyKind::lfff: return {MachineBias::least_full, ServiceBias::first_finish};
      case PolicyKind::mfff: return {MachineBias::most_full, ServiceBias::first_finish};
      case PolicyKind::lfdt: return {MachineBias::least_full, ServiceBias::decreasing_time};
      case PolicyKind::mfdt: return {MachineBias::most_full, ServiceBias::decreasing_time};
      case PolicyKind::fws: break;
    }
    throw error(errc::validation_error, "fws is not a greedy policy");
  }

  PolicyKind kind() const noexcept {
    if (machine_bias == MachineBias::least_full)
      return service_bias == ServiceBias::first_finish ? PolicyKind::lfff : PolicyKind::lfdt;
    return service_bias == ServiceBias::first_finish ? PolicyKind::mfff : PolicyKind::mfdt;
  }
};

// Labels come first; within one label the bias picks the shortest
// (first_finish) or longest (decreasing_time) execution time.
inline std::vector<std::size_t> greedy_order(std::span<const ReadyEntry> queue, ServiceBias bias) {
  std::vector<std::size_t> idx(queue.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const ReadyEntry& x = queue[a];
    const ReadyEntry& y = queue[b];
    if (x.label != y.label) return x.label > y.label;
    if (x.exec_time_ms != y.exec_time_ms)
      return bias == ServiceBias::first_finish ? x.exec_time_ms < y.exec_time_ms : x.exec_time_ms > y.exec_time_ms;
    return x.key < y.key;
  });
  return idx;
}

inline TaskKey greedy_select_service(std::span<const ReadyEntry> queue, ServiceBias bias) {
  if (queue.empty()) throw error(errc::empty_queue, "no ready service to select");
  return queue[greedy_order(queue, bias).front()].key;
}

// Feasible machine with the lowest (least_full) or highest (most_full)
// utilisation; affinity and traffic are never consulted.
inline MachineChoice greedy_select_machine(const PlacementRequest& req, Cluster& cluster, MachineBias bias,
                                           std::span<const VmType> catalog) {
  const Machine* best = nullptr;
  for (const auto& [id, m] : cluster.machines()) {
    if (!m.fits(req.demand)) continue;
    if (!best) {
      best = &m;
      continue;
    }
    double u = m.utilization(), bu = best->utilization();
    if (bias == MachineBias::least_full ? u < bu : u > bu) best = &m;
  }
  if (best)
    return {best->id(), bias == MachineBias::least_full ? SelectionRule::least_full : SelectionRule::most_full, false};
  return provision_first_free(req, cluster, catalog, SelectionRule::fallback_provision);
}

}  // namespace sfcsched
