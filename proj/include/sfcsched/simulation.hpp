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
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfcsched/error.hpp"
#include "sfcsched/fws.hpp"
#include "sfcsched/greedy.hpp"
#include "sfcsched/infrastructure.hpp"
#include "sfcsched/labeling.hpp"
#include "sfcsched/network.hpp"
#include "sfcsched/policy.hpp"
#include "sfcsched/scenario.hpp"
#include "sfcsched/sfc_model.hpp"

namespace sfcsched {

enum class EventKind : int { service_finish = 0, transfer_complete = 1, service_start = 2, arrival = 3, machine_idle = 4 };

struct Event {
  double time_ms = 0.0;
  EventKind kind = EventKind::arrival;
  std::uint64_t seq = 0;
  InstanceId instance = 0;
  ServiceId service = 0;
  MachineId machine = 0;
  double token = 0.0;

  friend bool operator>(const Event& a, const Event& b) {
    if (a.time_ms != b.time_ms) return a.time_ms > b.time_ms;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.seq > b.seq;
  }
};

// Single-threaded discrete-event run of one scenario under one policy.
class Simulation {
 public:
  explicit Simulation(Scenario sc)
      : sc_(std::move(sc)),
        topo_(sc_.topology),
        cluster_((sc_.validate(), apply_background_load(topo_, sc_.background_load_fraction), topo_)),
        net_(topo_, sc_.background_load_fraction, sc_.network.traffic_window_ms, sc_.network.packet_kb,
             sc_.network.max_utilization) {
    if (sc_.policy != PolicyKind::fws) greedy_ = GreedyPolicy::from(sc_.policy);
    result_.services = generate_services(sc_);
    result_.workload = generate_workload(sc_);
    std::stable_sort(result_.workload.begin(), result_.workload.end(),
                     [](const UserRequest& a, const UserRequest& b) { return a.arrival_time_ms < b.arrival_time_ms; });
    for (const InitialMachine& im : sc_.initial_machines) {
      auto it = std::find_if(sc_.catalog.begin(), sc_.catalog.end(), [&](const VmType& t) { return t.name == im.type; });
      if (it == sc_.catalog.end()) throw error(errc::validation_error, "topology.machines: unknown VM type " + im.type);
      Machine& m = cluster_.provision(im.node, *it, 0.0);
      ready_at_[m.id()] = 0.0;
      mark_idle(m.id(), 0.0);
    }
    for (std::size_t i = 0; i < result_.workload.size(); ++i) {
      Event e;
      e.time_ms = result_.workload[i].arrival_time_ms;
      e.kind = EventKind::arrival;
      e.instance = static_cast<InstanceId>(i);
      push(e);
    }
  }

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  RunResult run() {
    while (!events_.empty()) {
      Event e = events_.top();
      events_.pop();
      if (e.time_ms < clock_) throw std::logic_error("event dequeued out of time order");
      clock_ = e.time_ms;
      switch (e.kind) {
        case EventKind::arrival: on_arrival(e); break;
        case EventKind::service_start: on_start(e); break;
        case EventKind::service_finish: on_finish(e); break;
        case EventKind::transfer_complete: traffic_kb_ += e.token; break;
        case EventKind::machine_idle: on_machine_idle(e); break;
      }
      // Decisions are taken once every event of the current instant is in.
      if (dirty_ && (events_.empty() || events_.top().time_ms > clock_)) {
        dirty_ = false;
        label_batch();
        dispatch(clock_);
      }
    }
    // Whatever is still queued can never be placed.
    for (const ReadyEntry& r : ready_) drop(r.key.instance);
    ready_.clear();
    finalize();
    return std::move(result_);
  }

 private:
  struct Live {
    ChainInstance inst;
    const UserRequest* req;
    std::map<ServiceId, std::size_t> placement;  // index into result_.placements
    bool dropped = false;
    bool completed = false;
    double cost = 0.0;
  };

  void push(Event e) {
    e.seq = seq_++;
    events_.push(e);
  }

  void mark_idle(MachineId m, double now) {
    idle_since_[m] = now;
    if (!std::isfinite(sc_.engine.idle_release_ms)) return;
    Event e;
    e.time_ms = now + sc_.engine.idle_release_ms;
    e.kind = EventKind::machine_idle;
    e.machine = m;
    e.token = now;
    push(e);
  }

  void on_arrival(const Event& e) {
    const UserRequest& req = result_.workload[static_cast<std::size_t>(e.instance)];
    const ServiceChain& chain = sc_.chain(req.chain_id);
    live_.push_back(Live{ChainInstance(e.instance, req.request_id, chain), &req, {}});
    result_.instance_chain[e.instance] = chain.id();
    ++arrived_;
    batch_.push_back(e.instance);
    for (ServiceId s : ready_services(live_.back().inst)) enqueue(e.instance, s, e.time_ms);
    result_.max_in_flight = std::max(result_.max_in_flight, arrived_ - completed_ - dropped_);
    dirty_ = true;
  }

  void on_start(const Event& e) {
    Live& l = live_[static_cast<std::size_t>(e.instance)];
    l.inst.mark_running(e.service);
    cluster_.machine(e.machine).start({e.instance, e.service});
  }

  void on_finish(const Event& e) {
    Live& l = live_[static_cast<std::size_t>(e.instance)];
    const TaskKey key{e.instance, e.service};
    l.inst.mark_done(e.service);
    Machine& m = cluster_.machine(e.machine);
    m.finish(key);
    m.buffer_idle(key);
    if (m.empty()) mark_idle(m.id(), e.time_ms);

    const Placement& p = result_.placements[l.placement.at(e.service)];
    l.cost += m.type().hourly_cost * (p.finish_ms - p.placed_ms) / 3.6e6;

    if (!l.dropped) {
      for (ServiceId succ : l.inst.chain().successors(e.service))
        if (l.inst.status(succ) == ServiceStatus::waiting && l.inst.predecessors_done(succ)) enqueue(e.instance, succ, e.time_ms);
      if (l.inst.complete()) {
        l.completed = true;
        ++completed_;
      }
    }
    dirty_ = true;
  }

  void on_machine_idle(const Event& e) {
    if (!cluster_.has_machine(e.machine)) return;
    const Machine& m = cluster_.machine(e.machine);
    auto it = idle_since_.find(e.machine);
    if (!m.empty() || it == idle_since_.end() || it->second != e.token) return;
    cluster_.release(e.machine, e.time_ms);
    idle_since_.erase(it);
    dirty_ = true;
  }

  void enqueue(InstanceId inst, ServiceId s, double now) {
    Live& l = live_[static_cast<std::size_t>(inst)];
    l.inst.mark_ready(s);
    ReadyEntry r;
    r.key = {inst, s};
    r.label = labels_.count(r.key) ? labels_.at(r.key) : 0;
    r.enqueue_ms = now;
    r.exec_time_ms = lookup(result_.services, s).exec_time_ms;
    r.dependents = dependents_of(l.inst.chain(), s, sc_.weights.dependents);
    ready_.push_back(r);
  }

  // Requests arriving at the same instant are labelled together; earlier
  // batches keep their labels, so labels of different batches can tie.
  void label_batch() {
    if (batch_.empty()) return;
    std::vector<PendingInstance> pending;
    for (InstanceId id : batch_) {
      const Live& l = live_[static_cast<std::size_t>(id)];
      PendingInstance p{id, l.req->arrival_time_ms, &l.inst.chain(), {}};
      for (ServiceId s : l.inst.chain().nodes()) p.pending.push_back(s);
      pending.push_back(std::move(p));
    }
    for (const auto& [key, label] : assign_labels(pending, result_.services)) labels_[key] = label;
    for (ReadyEntry& r : ready_)
      if (auto it = labels_.find(r.key); it != labels_.end()) r.label = it->second;
    batch_.clear();
  }

  void drop(InstanceId inst) {
    Live& l = live_[static_cast<std::size_t>(inst)];
    if (l.dropped || l.completed) return;
    l.dropped = true;
    ++dropped_;
  }

  void dispatch(double now) {
    if (ready_.empty()) return;
    std::vector<std::size_t> order =
        greedy_ ? greedy_order(ready_, greedy_->service_bias) : fws_order(ready_, now, sc_.weights);
    std::vector<bool> gone(ready_.size(), false);
    for (std::size_t i : order) {
      const ReadyEntry& r = ready_[i];
      Live& l = live_[static_cast<std::size_t>(r.key.instance)];
      if (l.dropped) {
        gone[i] = true;
        continue;
      }
      PlacementRequest req = placement_request(l, r.key.service, now);
      std::optional<MachineChoice> choice;
      try {
        if (greedy_)
          choice = greedy_select_machine(req, cluster_, greedy_->machine_bias, sc_.catalog);
        else
          choice = select_machine_fws(req, cluster_, sc_.catalog,
                                      [&](NodeId a, NodeId b) { return net_.path_delay(a, b, now); });
      } catch (const error& err) {
        if (err.code() == errc::no_feasible_type ||
            (err.code() == errc::no_capacity && now - l.req->arrival_time_ms > l.req->delay_sla_ms)) {
          drop(r.key.instance);
          gone[i] = true;
          continue;
        }
        if (err.code() != errc::no_capacity) throw;
        continue;
      }
      if (choice->provisioned) ready_at_[choice->machine] = now + sc_.engine.provision_latency_ms;
      place(l, r.key.service, *choice, now);
      gone[i] = true;
    }
    std::vector<ReadyEntry> keep;
    for (std::size_t i = 0; i < ready_.size(); ++i)
      if (!gone[i] && !live_[static_cast<std::size_t>(ready_[i].key.instance)].dropped) keep.push_back(ready_[i]);
    ready_ = std::move(keep);
  }

  PlacementRequest placement_request(const Live& l, ServiceId s, double now) const {
    PlacementRequest req;
    req.key = {l.inst.id(), s};
    req.demand = lookup(result_.services, s).demand;
    req.now_ms = now;
    for (ServiceId p : l.inst.chain().predecessors(s)) {
      const Placement& pl = result_.placements[l.placement.at(p)];
      req.preds.push_back({p, pl.machine, pl.node, lookup(result_.services, p).data_out_kb});
    }
    if (req.preds.empty()) req.anchor = l.req->ingress_node;
    return req;
  }

  void place(Live& l, ServiceId s, const MachineChoice& choice, double now) {
    const TaskKey key{l.inst.id(), s};
    const MicroServiceDef& def = lookup(result_.services, s);
    Machine& m = cluster_.machine(choice.machine);

    bool active = std::ranges::any_of(m.hosted(), [&](const auto& kv) { return kv.first.service == s; });
    double warm = 0.0;
    if (active) {
      m.host(key, def.demand);
    } else if (m.buffered_services().count(s)) {
      m.resume(key, def.demand);
      warm = sc_.engine.resume_latency_ms;
    } else {
      m.host(key, def.demand);
      warm = sc_.engine.deploy_latency_ms;
    }
    idle_since_.erase(m.id());
    if (m.utilization() > 1.0 + 1e-9) throw std::logic_error("machine capacity exceeded");

    double start = std::max(now, ready_at_.at(m.id())) + warm;
    for (ServiceId p : l.inst.chain().predecessors(s)) {
      const Placement& pp = result_.placements[l.placement.at(p)];
      if (pp.machine == m.id()) {
        start = std::max(start, pp.finish_ms);
        continue;
      }
      const MicroServiceDef& pd = lookup(result_.services, p);
      const double bw = std::min(cluster_history_type(pp.machine).max_bandwidth_mbps, m.type().max_bandwidth_mbps);
      const double arrive = now + net_.path_delay(pp.node, m.node(), now) * 1000.0 + pd.data_out_kb / bw;
      net_.record(pp.node, m.node(), now, pd.data_out_kb);
      result_.transfers.push_back({l.inst.id(), p, s, pp.machine, m.id(), pd.data_out_kb, now, arrive});
      Event t;
      t.time_ms = arrive;
      t.kind = EventKind::transfer_complete;
      t.instance = l.inst.id();
      t.service = s;
      t.token = pd.data_out_kb;
      push(t);
      start = std::max(start, arrive);
    }
    if (l.inst.chain().predecessors(s).empty() && sc_.engine.ingress_delay)
      start = std::max(start, now + net_.path_delay(l.req->ingress_node, m.node(), now) * 1000.0);

    labels_.erase(key);
    Placement pl{l.inst.id(), s, m.id(), m.node(), now, start, start + def.exec_time_ms, choice.rule};
    l.placement[s] = result_.placements.size();
    result_.placements.push_back(pl);

    Event st;
    st.time_ms = pl.start_ms;
    st.kind = EventKind::service_start;
    st.instance = l.inst.id();
    st.service = s;
    st.machine = m.id();
    push(st);
    Event fin = st;
    fin.time_ms = pl.finish_ms;
    fin.kind = EventKind::service_finish;
    push(fin);
  }

  const VmType& cluster_history_type(MachineId id) const {
    return cluster_.history()[static_cast<std::size_t>(id)].type;
  }

  void finalize() {
    MetricsReport& rep = result_.report;
    rep.policy = std::string(policy_name(sc_.policy));
    rep.total_traffic_kb = traffic_kb_;
    rep.arrived = arrived_;
    rep.completed = completed_;
    rep.dropped = dropped_;
    result_.machines = cluster_.history();
    rep.machines_provisioned = result_.machines.size();
    rep.total_cost_per_hour = total_cost(result_.machines);
    double sum_turn = 0.0;
    std::size_t satisfied = 0;
    double first = std::numeric_limits<double>::infinity(), last = 0.0;
    for (const Live& l : live_) {
      RequestRecord rec;
      rec.request_id = l.req->request_id;
      rec.chain_id = l.req->chain_id;
      rec.arrival_ms = l.req->arrival_time_ms;
      rec.completed = l.completed;
      rec.dropped = l.dropped;
      rec.attributed_cost = l.cost;
      first = std::min(first, rec.arrival_ms);
      std::optional<double> turnaround;
      if (l.completed) {
        double fin = 0.0;
        for (const auto& [s, idx] : l.placement) fin = std::max(fin, result_.placements[idx].finish_ms);
        rec.turnaround_ms = fin - rec.arrival_ms;
        turnaround = rec.turnaround_ms;
        sum_turn += rec.turnaround_ms;
        last = std::max(last, fin);
      }
      rec.satisfied = check_sla(*l.req, turnaround, l.cost);
      satisfied += rec.satisfied ? 1 : 0;
      if (l.completed) rep.requests.push_back(rec);
    }
    rep.avg_turnaround_ms = completed_ ? sum_turn / static_cast<double>(completed_) : 0.0;
    rep.satisfied_pct = arrived_ ? 100.0 * static_cast<double>(satisfied) / static_cast<double>(arrived_) : 100.0;
    rep.makespan_ms = completed_ ? last - first : 0.0;
  }

  Scenario sc_;
  Topology topo_;
  Cluster cluster_;
  NetworkLoad net_;
  std::optional<GreedyPolicy> greedy_;
  RunResult result_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
  double clock_ = 0.0;
  std::vector<Live> live_;
  std::vector<InstanceId> batch_;
  bool dirty_ = false;
  std::vector<ReadyEntry> ready_;
  LabelMap labels_;
  std::map<MachineId, double> ready_at_;
  std::map<MachineId, double> idle_since_;
  double traffic_kb_ = 0.0;
  std::size_t arrived_ = 0, completed_ = 0, dropped_ = 0;
};

inline RunResult simulate(Scenario sc) { return Simulation(std::move(sc)).run(); }

inline MetricsReport run(Scenario sc) { return simulate(std::move(sc)).report; }

}  // namespace sfcsched
