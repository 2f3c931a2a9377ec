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
#include <deque>
#include <utility>
#include <vector>

#include "sfcsched/infrastructure.hpp"

namespace sfcsched {

// Time-varying link arrival rates: a fixed background share of each link's
// service rate plus the packets of scheduled transfers seen within a sliding
// window.
class NetworkLoad {
 public:
  NetworkLoad(const Topology& topo, double background_fraction, double window_ms, double packet_kb, double max_utilization)
      : topo_(&topo),
        window_ms_(window_ms),
        packet_kb_(packet_kb),
        max_util_(max_utilization),
        recent_(topo.links().size()),
        in_window_(topo.links().size(), 0) {
    for (const Link& l : topo.links()) background_.push_back(background_fraction * l.mu_pps);
  }

  double lambda_pps(std::size_t link, double now_ms) {
    expire(link, now_ms);
    return background_[link] + static_cast<double>(in_window_[link]) * 1000.0 / window_ms_;
  }

  // Seconds; offered load beyond the utilisation cap is evaluated at the cap.
  double path_delay(NodeId src, NodeId dst, double now_ms) {
    double total = 0.0;
    for (std::size_t li : topo_->route(src, dst)) {
      const double mu = topo_->links()[li].mu_pps;
      total += link_delay(std::min(lambda_pps(li, now_ms), max_util_ * mu), mu);
    }
    return total;
  }

  void record(NodeId src, NodeId dst, double now_ms, double kb) {
    const auto packets = static_cast<std::int64_t>(std::ceil(kb / packet_kb_));
    for (std::size_t li : topo_->route(src, dst)) {
      expire(li, now_ms);
      recent_[li].emplace_back(now_ms, packets);
      in_window_[li] += packets;
    }
  }

 private:
  void expire(std::size_t li, double now_ms) {
    auto& q = recent_[li];
    while (!q.empty() && q.front().first <= now_ms - window_ms_) {
      in_window_[li] -= q.front().second;
      q.pop_front();
    }
  }

  const Topology* topo_;
  double window_ms_;
  double packet_kb_;
  double max_util_;
  std::vector<double> background_;
  std::vector<std::deque<std::pair<double, std::int64_t>>> recent_;
  std::vector<std::int64_t> in_window_;
};

}  // namespace sfcsched
