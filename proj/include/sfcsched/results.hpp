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
#include <string>
#include <string_view>
#include <vector>

#include "sfcsched/error.hpp"
#include "sfcsched/policy.hpp"
#include "sfcsched/scenario.hpp"
#include "sfcsched/simulation.hpp"

namespace sfcsched {

enum class SweepVar { demand, load };

constexpr std::string_view sweep_var_name(SweepVar v) noexcept { return v == SweepVar::demand ? "demand" : "load"; }

struct SweepSpec {
  std::vector<std::size_t> demand_points{100, 500, 1000, 2000, 3000, 4000, 5000};
  std::vector<double> load_points{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<PolicyKind> policies{all_policies.begin(), all_policies.end()};
  std::size_t repetitions = 5;

  void validate() const {
    if (repetitions == 0) throw error(errc::validation_error, "sweep.repetitions: must be positive");
    if (policies.empty()) throw error(errc::validation_error, "sweep.policies: must not be empty");
    for (std::size_t i = 1; i < demand_points.size(); ++i)
      if (demand_points[i] <= demand_points[i - 1])
        throw error(errc::validation_error, "sweep.demand_points: must be strictly increasing");
    for (std::size_t i = 0; i < load_points.size(); ++i) {
      if (!(load_points[i] >= 0.0 && load_points[i] < 1.0))
        throw error(errc::validation_error, "sweep.load_points: values must lie in [0, 1)");
      if (i > 0 && load_points[i] <= load_points[i - 1])
        throw error(errc::validation_error, "sweep.load_points: must be strictly increasing");
    }
  }
};

inline constexpr std::array<std::string_view, 4> metric_names{"cost_per_hour", "satisfied_pct", "traffic_kb",
                                                              "turnaround_ms"};

struct ResultRow {
  std::string policy;
  SweepVar sweep_var = SweepVar::demand;
  double sweep_value = 0.0;
  std::string metric;
  double mean = 0.0;
  std::size_t reps = 0;

  bool operator==(const ResultRow&) const = default;
};

inline double metric_value(const MetricsReport& r, std::string_view metric) {
  if (metric == "traffic_kb") return r.total_traffic_kb;
  if (metric == "turnaround_ms") return r.avg_turnaround_ms;
  if (metric == "satisfied_pct") return r.satisfied_pct;
  if (metric == "cost_per_hour") return r.total_cost_per_hour;
  throw error(errc::validation_error, "unknown metric " + std::string(metric));
}

// Canonical row order: policy, then sweep value, then metric name (sweep
// variable last, for files that mix demand and load rows).
inline void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.policy != b.policy) return a.policy < b.policy;
    if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
    if (a.metric != b.metric) return a.metric < b.metric;
    return a.sweep_var < b.sweep_var;
  });
}

}  // namespace sfcsched
