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

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <utility>
#include <vector>

#include "json.hpp"

#include "sfcsched/error.hpp"
#include "sfcsched/infrastructure.hpp"
#include "sfcsched/policy.hpp"
#include "sfcsched/results.hpp"
#include "sfcsched/scenario.hpp"
#include "sfcsched/sfc_model.hpp"

namespace sfcsched {

struct ScenarioFile {
  Scenario scenario;
  SweepSpec sweep;
};

namespace detail {

using json = nlohmann::json;

[[noreturn]] inline void invalid(const std::string& path, const std::string& what) {
  throw error(errc::validation_error, path + ": " + what);
}

// One JSON object; every key must be consumed before finish() or it is
// reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_, "expected an object");
  }

  const std::string& path() const noexcept { return path_; }
  std::string at(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }

  const json* find(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  template <class T>
  void get(const char* key, T& out) {
    if (const json* v = find(key)) out = convert<T>(*v, at(key));
  }

  void range(const char* key, Range& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array() || v->size() != 2) invalid(at(key), "expected [lo, hi]");
    out.lo = convert<double>((*v)[0], at(key) + "[0]");
    out.hi = convert<double>((*v)[1], at(key) + "[1]");
  }

  void range(const char* key, IntRange& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array() || v->size() != 2) invalid(at(key), "expected [lo, hi]");
    out.lo = convert<int>((*v)[0], at(key) + "[0]");
    out.hi = convert<int>((*v)[1], at(key) + "[1]");
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) invalid(at(k), "unknown key");
  }

  template <class T>
  static T convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) invalid(path, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) invalid(path, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) invalid(path, "expected a number");
      return v.get<T>();
    } else {
      static_assert(std::is_integral_v<T>);
      if (!v.is_number_integer()) invalid(path, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) return static_cast<T>(v.get<std::uint64_t>());
        invalid(path, "must be non-negative");
      } else {
        auto x = v.get<std::int64_t>();
        if (x < std::numeric_limits<T>::min() || x > std::numeric_limits<T>::max()) invalid(path, "out of range");
        return static_cast<T>(x);
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

inline const json& array_at(const json* v, const std::string& path) {
  if (!v->is_array()) invalid(path, "expected an array");
  return *v;
}

inline std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline void read_topology(Section& s, Scenario& sc) {
  TopologyConfig& cfg = sc.topology_config;
  s.get("micro_nodes", cfg.micro_nodes);
  s.get("core_nodes", cfg.core_nodes);
  s.get("micro_vm_slots", cfg.micro_vm_slots);
  s.get("core_vm_slots", cfg.core_vm_slots);
  s.get("core_core_mu_pps", cfg.core_core_mu_pps);
  s.get("core_micro_mu_pps", cfg.core_micro_mu_pps);
  s.get("packet_kb", sc.network.packet_kb);
  s.get("traffic_window_ms", sc.network.traffic_window_ms);
  s.get("max_utilization", sc.network.max_utilization);

  const json* nodes = s.find("nodes");
  const json* links = s.find("links");
  if (nodes || links) {
    if (!nodes || !links) invalid(s.path(), "nodes and links must be given together");
    std::vector<CloudNode> ns;
    const std::string np = s.at("nodes");
    const json& na = array_at(nodes, np);
    for (std::size_t i = 0; i < na.size(); ++i) {
      Section n(na[i], item(np, i));
      CloudNode cn;
      std::string kind = "micro";
      n.get("id", cn.id);
      n.get("kind", kind);
      n.get("vm_slots", cn.vm_slots);
      n.finish();
      if (kind == "micro")
        cn.kind = CloudKind::micro;
      else if (kind == "core")
        cn.kind = CloudKind::core;
      else
        invalid(n.at("kind"), "expected micro or core");
      if (cn.vm_slots < 0) invalid(n.at("vm_slots"), "must be non-negative");
      ns.push_back(cn);
    }
    std::vector<Link> ls;
    const std::string lp = s.at("links");
    const json& la = array_at(links, lp);
    for (std::size_t i = 0; i < la.size(); ++i) {
      Section l(la[i], item(lp, i));
      Link lk;
      l.get("a", lk.a);
      l.get("b", lk.b);
      l.get("mu_pps", lk.mu_pps);
      l.finish();
      if (!(lk.mu_pps > 0.0)) invalid(l.at("mu_pps"), "must be positive");
      ls.push_back(lk);
    }
    try {
      sc.topology = Topology(std::move(ns), std::move(ls));
    } catch (const error& e) {
      invalid(s.path(), e.what());
    }
  } else {
    if (cfg.micro_nodes < 0 || cfg.core_nodes < 1) invalid(s.path(), "need at least one core node");
    if (!(cfg.core_core_mu_pps > 0.0)) invalid(s.at("core_core_mu_pps"), "must be positive");
    if (!(cfg.core_micro_mu_pps > 0.0)) invalid(s.at("core_micro_mu_pps"), "must be positive");
    if (cfg.micro_vm_slots < 0 || cfg.core_vm_slots < 0) invalid(s.path(), "vm slot counts must be non-negative");
    sc.topology = default_topology(cfg);
  }

  if (const json* ms = s.find("machines")) {
    const std::string mp = s.at("machines");
    const json& ma = array_at(ms, mp);
    for (std::size_t i = 0; i < ma.size(); ++i) {
      Section m(ma[i], item(mp, i));
      InitialMachine im;
      m.get("node", im.node);
      m.get("type", im.type);
      m.finish();
      sc.initial_machines.push_back(im);
    }
  }
  s.finish();
}

inline void read_catalog(const json* v, Scenario& sc) {
  const std::string path = "catalog";
  const json& arr = array_at(v, path);
  if (arr.empty()) invalid(path, "needs at least one VM type");
  sc.catalog.clear();
  std::set<std::string> names;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Section t(arr[i], item(path, i));
    VmType vt;
    t.get("name", vt.name);
    t.get("memory_gb", vt.memory_gb);
    t.get("cores", vt.cores);
    t.get("max_bandwidth_mbps", vt.max_bandwidth_mbps);
    t.get("hourly_cost", vt.hourly_cost);
    t.finish();
    if (vt.name.empty()) invalid(t.at("name"), "required");
    if (!names.insert(vt.name).second) invalid(t.at("name"), "duplicate type " + vt.name);
    if (!(vt.memory_gb > 0.0)) invalid(t.at("memory_gb"), "must be positive");
    if (vt.cores <= 0) invalid(t.at("cores"), "must be positive");
    if (!(vt.max_bandwidth_mbps > 0.0)) invalid(t.at("max_bandwidth_mbps"), "must be positive");
    if (!(vt.hourly_cost > 0.0)) invalid(t.at("hourly_cost"), "must be positive");
    sc.catalog.push_back(vt);
  }
}

inline void read_chains(Section& s, Scenario& sc) {
  s.range("exec_time_ms", sc.service_gen.exec_time_ms);
  s.range("data_out_kb", sc.service_gen.data_out_kb);
  s.range("capacity_rps", sc.service_gen.capacity_rps);
  s.range("memory_gb", sc.service_gen.memory_gb);
  s.range("cores", sc.service_gen.cores);

  if (const json* defs = s.find("definitions")) {
    const std::string dp = s.at("definitions");
    const json& da = array_at(defs, dp);
    sc.chains.clear();
    for (std::size_t i = 0; i < da.size(); ++i) {
      Section d(da[i], item(dp, i));
      ChainId id = 0;
      std::vector<ServiceId> nodes;
      std::vector<Edge> edges;
      d.get("id", id);
      if (const json* n = d.find("nodes")) {
        const json& arr = array_at(n, d.at("nodes"));
        for (std::size_t k = 0; k < arr.size(); ++k) nodes.push_back(Section::convert<ServiceId>(arr[k], item(d.at("nodes"), k)));
      }
      if (const json* e = d.find("edges")) {
        const json& arr = array_at(e, d.at("edges"));
        for (std::size_t k = 0; k < arr.size(); ++k) {
          const std::string ep = item(d.at("edges"), k);
          if (!arr[k].is_array() || arr[k].size() != 2) invalid(ep, "expected [pred, succ]");
          edges.push_back({Section::convert<ServiceId>(arr[k][0], ep + "[0]"), Section::convert<ServiceId>(arr[k][1], ep + "[1]")});
        }
      }
      d.finish();
      try {
        sc.chains.push_back(build_chain(id, std::move(nodes), std::move(edges)));
      } catch (const error& e) {
        invalid(d.path(), e.what());
      }
    }
  }

  if (const json* svcs = s.find("services")) {
    const std::string sp = s.at("services");
    const json& sa = array_at(svcs, sp);
    ServiceDirectory dir;
    for (std::size_t i = 0; i < sa.size(); ++i) {
      Section d(sa[i], item(sp, i));
      MicroServiceDef def;
      d.get("id", def.id);
      d.get("exec_time_ms", def.exec_time_ms);
      d.get("data_out_kb", def.data_out_kb);
      d.get("capacity_rps", def.capacity_rps);
      d.get("memory_gb", def.demand.memory_gb);
      d.get("cores", def.demand.cores);
      d.finish();
      if (!dir.emplace(def.id, def).second) invalid(d.at("id"), "duplicate service " + std::to_string(def.id));
    }
    sc.services = std::move(dir);
  }
  s.finish();
}

inline void read_workload(Section& s, Scenario& sc) {
  s.get("request_count", sc.request_count);
  s.get("arrival_rate_rps", sc.arrival_rate_rps);
  s.range("sla_delay_range_ms", sc.sla_delay_range_ms);
  s.range("sla_cost_range", sc.sla_cost_range);
  s.get("background_load_fraction", sc.background_load_fraction);
  s.get("seed", sc.rng_seed);
  if (!(sc.background_load_fraction >= 0.0 && sc.background_load_fraction < 1.0))
    invalid(s.at("background_load_fraction"), "must lie in [0, 1)");
  if (!(sc.arrival_rate_rps > 0.0)) invalid(s.at("arrival_rate_rps"), "must be positive");
  if (const json* reqs = s.find("requests")) {
    const std::string rp = s.at("requests");
    const json& ra = array_at(reqs, rp);
    std::vector<UserRequest> out;
    for (std::size_t i = 0; i < ra.size(); ++i) {
      Section r(ra[i], item(rp, i));
      UserRequest u;
      u.request_id = static_cast<RequestId>(i);
      r.get("request_id", u.request_id);
      r.get("chain_id", u.chain_id);
      r.get("arrival_time_ms", u.arrival_time_ms);
      r.get("delay_sla_ms", u.delay_sla_ms);
      r.get("cost_sla", u.cost_sla);
      r.get("ingress_node", u.ingress_node);
      r.finish();
      if (!(u.arrival_time_ms >= 0.0)) invalid(r.at("arrival_time_ms"), "must be non-negative");
      out.push_back(u);
    }
    sc.requests = std::move(out);
  }
  s.finish();
}

inline void read_fws(Section& s, Scenario& sc) {
  s.get("alpha_dep", sc.weights.alpha_dep);
  s.get("beta_wait", sc.weights.beta_wait);
  s.get("enqueue_tie_break", sc.weights.enqueue_tie_break);
  std::string mode;
  s.get("dependents", mode);
  if (mode == "transitive")
    sc.weights.dependents = DependentsMode::transitive;
  else if (mode == "immediate")
    sc.weights.dependents = DependentsMode::immediate;
  else if (!mode.empty())
    invalid(s.at("dependents"), "expected transitive or immediate");
  s.finish();
}

inline void read_engine(Section& s, Scenario& sc) {
  EngineConfig& e = sc.engine;
  s.get("provision_latency_ms", e.provision_latency_ms);
  s.get("deploy_latency_ms", e.deploy_latency_ms);
  s.get("resume_latency_ms", e.resume_latency_ms);
  if (const json* v = s.find("idle_release_ms"))
    e.idle_release_ms = v->is_null() ? std::numeric_limits<double>::infinity()
                                     : Section::convert<double>(*v, s.at("idle_release_ms"));
  s.get("ingress_delay", e.ingress_delay);
  s.finish();
}

inline void read_sweep(Section& s, SweepSpec& sw) {
  if (const json* v = s.find("demand_points")) {
    const json& arr = array_at(v, s.at("demand_points"));
    sw.demand_points.clear();
    for (std::size_t i = 0; i < arr.size(); ++i)
      sw.demand_points.push_back(Section::convert<std::size_t>(arr[i], item(s.at("demand_points"), i)));
  }
  if (const json* v = s.find("load_points")) {
    const json& arr = array_at(v, s.at("load_points"));
    sw.load_points.clear();
    for (std::size_t i = 0; i < arr.size(); ++i)
      sw.load_points.push_back(Section::convert<double>(arr[i], item(s.at("load_points"), i)));
  }
  if (const json* v = s.find("policies")) {
    const json& arr = array_at(v, s.at("policies"));
    sw.policies.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = item(s.at("policies"), i);
      try {
        sw.policies.push_back(parse_policy(Section::convert<std::string>(arr[i], p)));
      } catch (const error& e) {
        if (e.code() != errc::validation_error) throw;
        invalid(p, e.what());
      }
    }
  }
  s.get("repetitions", sw.repetitions);
  s.finish();
}

}  // namespace detail

// Reads a scenario document. Omitted fields keep the Scenario / SweepSpec
// defaults; unknown keys are rejected with their path.
inline ScenarioFile parse_scenario_text(std::string_view text) {
  detail::json doc;
  try {
    doc = detail::json::parse(text.begin(), text.end());
  } catch (const detail::json::parse_error& e) {
    throw error(errc::parse_error, e.what());
  }
  ScenarioFile out;
  Scenario& sc = out.scenario;
  detail::Section root(doc, "");
  if (const auto* p = root.find("policy")) {
    try {
      sc.policy = parse_policy(detail::Section::convert<std::string>(*p, "policy"));
    } catch (const error& e) {
      if (e.code() != errc::validation_error) throw;
      detail::invalid("policy", e.what());
    }
  }
  // Topology first so that workload and machine checks see the final node set.
  if (const auto* v = root.find("topology")) {
    detail::Section s(*v, "topology");
    detail::read_topology(s, sc);
  }
  if (const auto* v = root.find("catalog")) detail::read_catalog(v, sc);
  if (const auto* v = root.find("chains")) {
    detail::Section s(*v, "chains");
    detail::read_chains(s, sc);
  }
  if (const auto* v = root.find("workload")) {
    detail::Section s(*v, "workload");
    detail::read_workload(s, sc);
  }
  if (const auto* v = root.find("fws")) {
    detail::Section s(*v, "fws");
    detail::read_fws(s, sc);
  }
  if (const auto* v = root.find("engine")) {
    detail::Section s(*v, "engine");
    detail::read_engine(s, sc);
  }
  if (const auto* v = root.find("sweep")) {
    detail::Section s(*v, "sweep");
    detail::read_sweep(s, out.sweep);
  }
  root.finish();

  for (std::size_t i = 0; i < sc.initial_machines.size(); ++i) {
    const InitialMachine& m = sc.initial_machines[i];
    bool known = false;
    for (const VmType& t : sc.catalog) known = known || t.name == m.type;
    if (!known) detail::invalid(detail::item("topology.machines", i) + ".type", "not in catalog: " + m.type);
  }
  sc.validate();
  out.sweep.validate();
  return out;
}

inline ScenarioFile parse_scenario_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw error(errc::io_error, "cannot open scenario file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario_text(ss.str());
}

inline Scenario parse_scenario(const std::string& path) { return parse_scenario_file(path).scenario; }

// SFC_SCHED_SEED, when set, replaces the seed from the scenario file.
inline std::optional<std::uint64_t> seed_from_env() {
  const char* v = std::getenv("SFC_SCHED_SEED");
  if (!v || !*v) return std::nullopt;
  std::uint64_t seed = 0;
  std::string_view s(v);
  auto res = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw error(errc::validation_error, "SFC_SCHED_SEED: expected an unsigned integer, got '" + std::string(s) + "'");
  return seed;
}

}  // namespace sfcsched
