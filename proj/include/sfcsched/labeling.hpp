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

#include <cstddef>
#include <map>
#include <queue>
#include <set>
#include <span>
#include <tuple>
#include <vector>

#include "sfcsched/sfc_model.hpp"

namespace sfcsched {

// Services of one chain instance that have not been placed yet.
struct PendingInstance {
  InstanceId instance = 0;
  double arrival_ms = 0.0;
  const ServiceChain* chain = nullptr;
  std::vector<ServiceId> pending;
};

using LabelMap = std::map<TaskKey, int>;

// Coffman-Graham style labelling over the union of the pending DAGs.
//
// Label 1 goes to a service without unlabelled successors; every later label
// goes to the candidate (all successors labelled) with the smallest execution
// time, ties resolved by earlier arrival, lower instance id, lower service id.
// Successors outside the pending set are treated as already labelled. The
// result is a permutation of 1..N with label(pred) > label(succ).
inline LabelMap assign_labels(std::span<const PendingInstance> batch, const ServiceDirectory& services) {
  using Key = std::tuple<double, double, InstanceId, ServiceId>;
  struct Node {
    TaskKey key;
    double exec;
    double arrival;
    const ServiceChain* chain;
    int unlabeled_succ = 0;
  };

  std::vector<Node> nodes;
  std::map<TaskKey, std::size_t> index;
  for (const PendingInstance& p : batch) {
    for (ServiceId s : p.pending) {
      TaskKey k{p.instance, s};
      if (index.count(k)) continue;
      index[k] = nodes.size();
      nodes.push_back({k, lookup(services, s).exec_time_ms, p.arrival_ms, p.chain});
    }
  }
  for (Node& n : nodes)
    for (ServiceId t : n.chain->successors(n.key.service))
      if (index.count({n.key.instance, t})) ++n.unlabeled_succ;

  std::priority_queue<std::pair<Key, std::size_t>, std::vector<std::pair<Key, std::size_t>>, std::greater<>> cand;
  auto key_of = [&](const Node& n) { return Key{n.exec, n.arrival, n.key.instance, n.key.service}; };
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].unlabeled_succ == 0) cand.push({key_of(nodes[i]), i});

  LabelMap labels;
  int next = 1;
  while (!cand.empty()) {
    std::size_t i = cand.top().second;
    cand.pop();
    const Node& n = nodes[i];
    labels[n.key] = next++;
    for (ServiceId p : n.chain->predecessors(n.key.service)) {
      auto it = index.find({n.key.instance, p});
      if (it == index.end()) continue;
      if (--nodes[it->second].unlabeled_succ == 0) cand.push({key_of(nodes[it->second]), it->second});
    }
  }
  return labels;
}

}  // namespace sfcsched
