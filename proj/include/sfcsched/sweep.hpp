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
#include <atomic>
#include <charconv>
#include <cstddef>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include "json.hpp"

#include "sfcsched/error.hpp"
#include "sfcsched/results.hpp"
#include "sfcsched/scenario.hpp"
#include "sfcsched/simulation.hpp"

namespace sfcsched {

// Runs every (policy, sweep point, repetition) cell; repetition k uses seed
// base + k. Cells run on `threads` workers, and the output order depends only
// on the inputs.
inline std::vector<ResultRow> run_sweep(const Scenario& base, const SweepSpec& sweep, SweepVar var,
                                        unsigned threads = std::max(1u, std::thread::hardware_concurrency())) {
  sweep.validate();
  const std::size_t points = var == SweepVar::demand ? sweep.demand_points.size() : sweep.load_points.size();
  struct Cell {
    std::size_t policy, point, rep;
    MetricsReport report;
  };
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < sweep.policies.size(); ++p)
    for (std::size_t i = 0; i < points; ++i)
      for (std::size_t k = 0; k < sweep.repetitions; ++k) cells.push_back({p, i, k, {}});

  auto scenario_for = [&](const Cell& c) {
    Scenario sc = base;
    sc.policy = sweep.policies[c.policy];
    if (var == SweepVar::demand)
      sc.request_count = sweep.demand_points[c.point];
    else
      sc.background_load_fraction = sweep.load_points[c.point];
    sc.rng_seed = base.rng_seed + c.rep;
    return sc;
  };

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        cells[i].report = run(scenario_for(cells[i]));
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<ResultRow> rows;
  for (std::size_t p = 0; p < sweep.policies.size(); ++p)
    for (std::size_t i = 0; i < points; ++i)
      for (std::string_view metric : metric_names) {
        double sum = 0.0;
        for (const Cell& c : cells)
          if (c.policy == p && c.point == i) sum += metric_value(c.report, metric);
        ResultRow row;
        row.policy = std::string(policy_name(sweep.policies[p]));
        row.sweep_var = var;
        row.sweep_value = var == SweepVar::demand ? static_cast<double>(sweep.demand_points[i]) : sweep.load_points[i];
        row.metric = std::string(metric);
        row.mean = sum / static_cast<double>(sweep.repetitions);
        row.reps = sweep.repetitions;
        rows.push_back(row);
      }
  sort_rows(rows);
  return rows;
}

enum class ResultFormat { csv, structured };

inline ResultFormat parse_format(std::string_view name) {
  if (name == "csv") return ResultFormat::csv;
  if (name == "structured" || name == "json") return ResultFormat::structured;
  throw error(errc::validation_error, "unknown format '" + std::string(name) + "' (expected csv|structured)");
}

namespace detail {

// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw error(errc::parse_error, where + ": '" + std::string(s) + "' is not a number");
  return v;
}

}  // namespace detail

inline constexpr std::string_view csv_header = "policy,sweep_var,sweep_value,metric,mean,reps";

inline void emit_results(std::vector<ResultRow> rows, ResultFormat format, std::ostream& out) {
  if (rows.empty()) throw error(errc::validation_error, "no result rows to emit");
  sort_rows(rows);
  if (format == ResultFormat::csv) {
    out << csv_header << '\n';
    for (const ResultRow& r : rows)
      out << r.policy << ',' << sweep_var_name(r.sweep_var) << ',' << detail::format_double(r.sweep_value) << ','
          << r.metric << ',' << detail::format_double(r.mean) << ',' << r.reps << '\n';
  } else {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ResultRow& r : rows)
      arr.push_back({{"policy", r.policy},
                     {"sweep_var", std::string(sweep_var_name(r.sweep_var))},
                     {"sweep_value", r.sweep_value},
                     {"metric", r.metric},
                     {"mean", r.mean},
                     {"reps", r.reps}});
    out << arr.dump(2) << '\n';
  }
  if (!out) throw error(errc::io_error, "failed to write results");
}

inline void emit_results(const std::vector<ResultRow>& rows, ResultFormat format, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw error(errc::io_error, "cannot open " + path + " for writing");
  emit_results(rows, format, f);
}

inline std::vector<ResultRow> parse_results(std::istream& in, ResultFormat format) {
  std::vector<ResultRow> rows;
  auto var_of = [](std::string_view s) {
    if (s == "demand") return SweepVar::demand;
    if (s == "load") return SweepVar::load;
    throw error(errc::parse_error, "unknown sweep_var '" + std::string(s) + "'");
  };
  if (format == ResultFormat::csv) {
    std::string line;
    if (!std::getline(in, line) || line != csv_header) throw error(errc::parse_error, "missing CSV header");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::vector<std::string> f;
      std::stringstream ss(line);
      for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
      const std::string where = "line " + std::to_string(lineno);
      if (f.size() != 6) throw error(errc::parse_error, where + ": expected 6 fields");
      ResultRow r;
      r.policy = f[0];
      r.sweep_var = var_of(f[1]);
      r.sweep_value = detail::parse_double(f[2], where);
      r.metric = f[3];
      r.mean = detail::parse_double(f[4], where);
      r.reps = static_cast<std::size_t>(detail::parse_double(f[5], where));
      rows.push_back(r);
    }
  } else {
    nlohmann::json arr;
    try {
      in >> arr;
    } catch (const nlohmann::json::exception& e) {
      throw error(errc::parse_error, e.what());
    }
    try {
      for (const auto& o : arr)
        rows.push_back({o.at("policy").get<std::string>(), var_of(o.at("sweep_var").get<std::string>()),
                        o.at("sweep_value").get<double>(), o.at("metric").get<std::string>(), o.at("mean").get<double>(),
                        o.at("reps").get<std::size_t>()});
    } catch (const nlohmann::json::exception& e) {
      throw error(errc::parse_error, e.what());
    }
  }
  return rows;
}

}  // namespace sfcsched
