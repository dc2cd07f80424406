#include "acme/eval/coordinator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>

#include "acme/common/error.hpp"
#include "acme/sim/engine.hpp"
#include "acme/sim/network.hpp"

namespace acme::eval {

std::string_view to_string(EvalMode m) {
  return m == EvalMode::kBaseline ? "baseline" : "decoupled";
}

std::string_view to_string(PhaseKind k) {
  switch (k) {
    case PhaseKind::kRemoteLoad: return "RemoteLoad";
    case PhaseKind::kPrecursorLoad: return "PrecursorLoad";
    case PhaseKind::kLocalLoad: return "LocalLoad";
    case PhaseKind::kInference: return "Inference";
    case PhaseKind::kDump: return "Dump";
    case PhaseKind::kGpuMetric: return "GpuMetric";
    case PhaseKind::kCpuMetric: return "CpuMetric";
  }
  return "Unknown";
}

bool parse_phase_kind(std::string_view s, PhaseKind& out) {
  for (PhaseKind k : {PhaseKind::kRemoteLoad, PhaseKind::kPrecursorLoad, PhaseKind::kLocalLoad,
                      PhaseKind::kInference, PhaseKind::kDump, PhaseKind::kGpuMetric,
                      PhaseKind::kCpuMetric}) {
    if (to_string(k) == s) {
      out = k;
      return true;
    }
  }
  return false;
}

LoadModel LoadModel::for_model(const sim::ModelShape& shape) {
  LoadModel m;
  m.model_bytes = sim::model_memory(shape).params_bytes;
  return m;
}

LoadModel LoadModel::from_config(const KvConfig& cfg) {
  LoadModel m;
  if (cfg.has("eval.model_psi")) m = for_model({cfg.get_double("eval.model_psi", 7e9), 1});
  m.storage_nic_gbps = cfg.get_double("eval.storage_nic_gbps", m.storage_nic_gbps);
  m.storage_aggregate_gbps = cfg.get_double("eval.storage_aggregate_gbps", m.storage_aggregate_gbps);
  m.local_gbps = cfg.get_double("eval.local_gbps", m.local_gbps);
  m.trial_setup_seconds = cfg.get_double("eval.trial_setup_s", m.trial_setup_seconds);
  m.dump_seconds = cfg.get_double("eval.dump_s", m.dump_seconds);
  m.validate();
  return m;
}

void LoadModel::validate() const {
  if (!(model_bytes > 0)) throw Error(ErrorCode::kConfig, "eval model size must be > 0");
  if (!(storage_nic_gbps > 0) || !(storage_aggregate_gbps > 0) || !(local_gbps > 0)) {
    throw Error(ErrorCode::kConfig, "eval bandwidths must be > 0");
  }
  if (!(local_gbps > storage_nic_gbps)) {
    throw Error(ErrorCode::kConfig, "local load bandwidth must exceed the storage NIC");
  }
  if (!(trial_setup_seconds >= 0) || !(dump_seconds >= 0)) {
    throw Error(ErrorCode::kConfig, "eval fixed costs must be >= 0");
  }
}

double LoadModel::remote_solo_seconds() const {
  return sim::transfer_time(model_bytes, 1, std::min(storage_nic_gbps, storage_aggregate_gbps));
}

double LoadModel::local_seconds() const { return sim::transfer_time(model_bytes, 1, local_gbps); }

std::int64_t TrialPlan::inference_ticks() const {
  std::int64_t total = 0;
  for (const auto& lane : gpu_phases) {
    for (const auto& p : lane) {
      if (p.kind == PhaseKind::kInference) total += p.inference_ticks;
    }
  }
  return total;
}

void TrialPlan::validate() const {
  for (std::size_t g = 0; g < gpu_phases.size(); ++g) {
    double prev_end = 0;
    for (const auto& p : gpu_phases[g]) {
      if (p.start < prev_end || p.end < p.start) {
        throw Error(ErrorCode::kInvalid, "overlapping phases on GPU " + std::to_string(g));
      }
      if (p.kind == PhaseKind::kCpuMetric) {
        throw Error(ErrorCode::kInvalid, "CPU metric phase on GPU " + std::to_string(g));
      }
      prev_end = p.end;
    }
  }
}

std::vector<QueueEntry> prioritize_queue(std::vector<QueueEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const QueueEntry& a, const QueueEntry& b) {
    if (a.runtime_minutes != b.runtime_minutes) return a.runtime_minutes > b.runtime_minutes;
    if (a.metric_minutes != b.metric_minutes) return a.metric_minutes > b.metric_minutes;
    return a.name < b.name;
  });
  return entries;
}

std::vector<std::vector<std::size_t>> least_loaded_assign(const std::vector<double>& costs, int gpus) {
  if (gpus < 1) throw Error(ErrorCode::kInvalid, "need at least one GPU");
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(gpus));
  std::vector<double> load(static_cast<std::size_t>(gpus), 0.0);
  for (std::size_t i = 0; i < costs.size(); ++i) {
    const auto g = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
    out[g].push_back(i);
    load[g] += costs[i];
  }
  return out;
}

namespace {

struct Item {
  std::string dataset;
  int shard = 0;
  int shards = 1;
  std::int64_t ticks = 0;
  double metric_minutes = 0;
};

std::vector<Item> split_items(const std::vector<EvalDataset>& datasets, int gpus, double factor) {
  std::int64_t total = 0;
  for (const auto& d : datasets) total += d.inference_ticks();
  const double mean_load = static_cast<double>(total) / gpus;
  std::vector<Item> items;
  for (const auto& d : datasets) {
    const std::int64_t ticks = d.inference_ticks();
    std::int64_t n = 1;
    if (d.splittable && static_cast<double>(ticks) > factor * mean_load) {
      n = static_cast<std::int64_t>(std::ceil(static_cast<double>(ticks) / mean_load));
      const std::int64_t gran = to_ticks(d.granularity);
      if (gran > 0) n = std::min(n, ticks / gran);
      n = std::max<std::int64_t>(n, 1);
    }
    const std::int64_t base = ticks / n;
    const std::int64_t extra = ticks % n;
    for (std::int64_t s = 0; s < n; ++s) {
      Item it;
      it.dataset = d.name;
      it.shard = static_cast<int>(s);
      it.shards = static_cast<int>(n);
      it.ticks = base + (s < extra ? 1 : 0);
      // Metric work follows the shard's share of the outputs.
      it.metric_minutes = d.metric_minutes * static_cast<double>(it.ticks) / static_cast<double>(ticks);
      items.push_back(std::move(it));
    }
  }
  return items;
}

Phase make_phase(PhaseKind kind, int gpu, int node, double start, double duration) {
  Phase p;
  p.kind = kind;
  p.gpu = gpu;
  p.node = node;
  p.start = start;
  p.end = start + duration;
  return p;
}

Phase item_phase(PhaseKind kind, int gpu, int node, const Item& it, double start, double duration) {
  Phase p = make_phase(kind, gpu, node, start, duration);
  p.dataset = it.dataset;
  p.shard = it.shard;
  p.shards = it.shards;
  if (kind == PhaseKind::kInference) p.inference_ticks = it.ticks;
  if (kind == PhaseKind::kGpuMetric || kind == PhaseKind::kCpuMetric) p.metric_minutes = it.metric_minutes;
  return p;
}

TrialPlan plan_baseline(const std::vector<EvalDataset>& datasets, TrialPlan plan, const LoadModel& load) {
  const double load_s = load.trial_setup_seconds + load.remote_solo_seconds() + load.local_seconds();
  std::vector<double> free_at(static_cast<std::size_t>(plan.gpus()), 0.0);
  for (const auto& d : datasets) {
    Item it{d.name, 0, 1, d.inference_ticks(), d.metric_minutes};
    const int g = static_cast<int>(std::min_element(free_at.begin(), free_at.end()) - free_at.begin());
    const int node = plan.node_of(g);
    auto& lane = plan.gpu_phases[static_cast<std::size_t>(g)];
    double t = free_at[static_cast<std::size_t>(g)];
    lane.push_back(item_phase(PhaseKind::kRemoteLoad, g, node, it, t, load_s));
    t = lane.back().end;
    lane.push_back(item_phase(PhaseKind::kInference, g, node, it, t, ticks_to_seconds(it.ticks)));
    t = lane.back().end;
    // The trial writes its outputs before scoring them on the same GPU slot.
    lane.push_back(item_phase(PhaseKind::kGpuMetric, g, node, it, t,
                              load.dump_seconds + it.metric_minutes * 60.0));
    free_at[static_cast<std::size_t>(g)] = lane.back().end;
  }
  return plan;
}

// Decoupled lane layout for a fixed item-to-GPU assignment.
TrialPlan layout_decoupled(TrialPlan plan, const std::vector<Item>& items,
                           const std::vector<std::vector<std::size_t>>& lanes, const LoadModel& load) {
  const double precursor_s = load.remote_solo_seconds();
  const double local_s = load.trial_setup_seconds + load.local_seconds();
  std::vector<bool> node_used(static_cast<std::size_t>(plan.nodes), false);
  for (int g = 0; g < plan.gpus(); ++g) {
    if (!lanes[static_cast<std::size_t>(g)].empty()) node_used[static_cast<std::size_t>(plan.node_of(g))] = true;
  }
  std::vector<bool> precursor_placed(static_cast<std::size_t>(plan.nodes), false);
  for (int g = 0; g < plan.gpus(); ++g) {
    const int node = plan.node_of(g);
    if (!node_used[static_cast<std::size_t>(node)]) continue;
    auto& lane = plan.gpu_phases[static_cast<std::size_t>(g)];
    if (!precursor_placed[static_cast<std::size_t>(node)]) {
      lane.push_back(make_phase(PhaseKind::kPrecursorLoad, g, node, 0, precursor_s));
      precursor_placed[static_cast<std::size_t>(node)] = true;
    }
    const auto& assigned = lanes[static_cast<std::size_t>(g)];
    if (assigned.empty()) continue;
    double t = precursor_s;
    lane.push_back(make_phase(PhaseKind::kLocalLoad, g, node, t, local_s));
    t = lane.back().end;
    for (std::size_t idx : assigned) {
      const Item& it = items[idx];
      lane.push_back(item_phase(PhaseKind::kInference, g, node, it, t, ticks_to_seconds(it.ticks)));
      t = lane.back().end;
      lane.push_back(item_phase(PhaseKind::kDump, g, node, it, t, load.dump_seconds));
      t = lane.back().end;
      plan.cpu_phases.push_back(item_phase(PhaseKind::kCpuMetric, -1, node, it, t, it.metric_minutes * 60.0));
    }
  }
  return plan;
}

double lane_makespan(const TrialPlan& plan) {
  double m = 0;
  for (const auto& lane : plan.gpu_phases) {
    if (!lane.empty()) m = std::max(m, lane.back().end);
  }
  return m;
}

}  // namespace

TrialPlan plan_trials(const std::vector<EvalDataset>& datasets, int gpus, int nodes, EvalMode mode,
                      const LoadModel& load, const PlanOptions& options) {
  if (datasets.empty()) throw Error(ErrorCode::kData, "no datasets to evaluate");
  if (gpus < 1 || nodes < 1 || nodes > gpus) throw Error(ErrorCode::kConfig, "need 1 <= nodes <= gpus");
  load.validate();
  for (const auto& d : datasets) d.validate();

  TrialPlan plan;
  plan.mode = mode;
  plan.nodes = nodes;
  plan.gpus_per_node = (gpus + nodes - 1) / nodes;
  plan.gpu_phases.resize(static_cast<std::size_t>(gpus));
  if (mode == EvalMode::kBaseline) return plan_baseline(datasets, std::move(plan), load);

  // Prior-based packing: split large datasets, sort, then least-loaded greedy.
  const std::vector<Item> shards = split_items(datasets, gpus, options.split_factor);
  std::vector<QueueEntry> queue;
  std::map<std::string, std::size_t> by_key;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    const std::string key = shards[i].dataset + "#" + std::to_string(shards[i].shard);
    by_key[key] = i;
    queue.push_back({key, ticks_to_minutes(shards[i].ticks), shards[i].metric_minutes});
  }
  queue = prioritize_queue(std::move(queue));
  std::vector<Item> ordered;
  std::vector<double> costs;
  for (const auto& q : queue) {
    ordered.push_back(shards[by_key.at(q.name)]);
    costs.push_back(ticks_to_seconds(ordered.back().ticks) + load.dump_seconds);
  }
  TrialPlan lpt = layout_decoupled(plan, ordered, least_loaded_assign(costs, gpus), load);
  lpt.packing = "lpt";

  // Unsplit datasets in list order; kept when the priors predict it finishes
  // strictly earlier than the sorted packing.
  std::vector<Item> listed;
  std::vector<double> list_costs;
  for (const auto& d : datasets) {
    listed.push_back({d.name, 0, 1, d.inference_ticks(), d.metric_minutes});
    list_costs.push_back(ticks_to_seconds(d.inference_ticks()) + load.dump_seconds);
  }
  TrialPlan list = layout_decoupled(plan, listed, least_loaded_assign(list_costs, gpus), load);
  list.packing = "list";
  return lane_makespan(list) < lane_makespan(lpt) ? list : lpt;
}

namespace {

class EvalSimulator {
 public:
  EvalSimulator(const TrialPlan& plan, const LoadModel& load, const SimOptions& options)
      : plan_(plan), load_(load), options_(options), engine_(0) {
    aggregate_link_ = net_.add_link(load.storage_aggregate_gbps);
    for (int n = 0; n < plan.nodes; ++n) node_link_.push_back(net_.add_link(load.storage_nic_gbps));
    next_.assign(plan.gpu_phases.size(), 0);
    out_ = plan;
    out_.cpu_phases.clear();
    node_ready_.assign(static_cast<std::size_t>(plan.nodes), true);
    for (const auto& lane : plan.gpu_phases) {
      for (const auto& p : lane) {
        if (p.kind == PhaseKind::kPrecursorLoad) node_ready_[static_cast<std::size_t>(p.node)] = false;
      }
    }
    waiting_.resize(static_cast<std::size_t>(plan.nodes));
  }

  TrialPlan run() {
    for (std::size_t g = 0; g < plan_.gpu_phases.size(); ++g) start_next(g);
    engine_.run();
    return out_;
  }

  std::uint64_t hash() const { return engine_.log_hash(); }

 private:
  Phase& current(std::size_t g) { return out_.gpu_phases[g][next_[g]]; }

  void start_next(std::size_t g) {
    if (next_[g] >= out_.gpu_phases[g].size()) return;
    Phase& p = current(g);
    const auto node = static_cast<std::size_t>(p.node);
    if (p.kind == PhaseKind::kLocalLoad && !node_ready_[node]) {
      waiting_[node].push_back(g);
      return;
    }
    const double now = engine_.now();
    p.start = now;
    if (p.kind == PhaseKind::kRemoteLoad || p.kind == PhaseKind::kPrecursorLoad) {
      net_.advance_to(now);
      const int flow = net_.start_flow(load_.model_bytes, {node_link_[node], aggregate_link_});
      flow_lane_[flow] = g;
      reschedule_network();
      return;
    }
    finish_in(g, fixed_duration(p));
  }

  double fixed_duration(const Phase& p) const {
    switch (p.kind) {
      case PhaseKind::kRemoteLoad: return load_.trial_setup_seconds + load_.local_seconds();
      case PhaseKind::kPrecursorLoad: return 0;
      case PhaseKind::kLocalLoad: return load_.trial_setup_seconds + load_.local_seconds();
      case PhaseKind::kInference: return ticks_to_seconds(p.inference_ticks);
      case PhaseKind::kDump: return load_.dump_seconds;
      case PhaseKind::kGpuMetric: return load_.dump_seconds + p.metric_minutes * 60.0;
      case PhaseKind::kCpuMetric: return p.metric_minutes * 60.0;
    }
    return 0;
  }

  void finish_in(std::size_t g, double delay) {
    const Phase& p = current(g);
    engine_.schedule_in(delay, sim::EventKind::kFinish,
                        [this, g](sim::Engine&, const sim::SimEvent&) { finish(g); },
                        std::string(to_string(p.kind)), static_cast<std::int64_t>(g));
  }

  void reschedule_network() {
    if (net_event_) engine_.cancel(*net_event_);
    net_event_.reset();
    const auto next = net_.next_completion();
    if (!next) return;
    net_event_ = engine_.schedule(std::max(next->first, engine_.now()), sim::EventKind::kTransferDone,
                                  [this, flow = next->second](sim::Engine&, const sim::SimEvent&) {
                                    transfer_done(flow);
                                  },
                                  "transfer", next->second);
  }

  void transfer_done(int flow) {
    net_event_.reset();
    net_.advance_to(engine_.now());
    net_.remove_flow(flow);
    const std::size_t g = flow_lane_.at(flow);
    flow_lane_.erase(flow);
    reschedule_network();
    finish_in(g, fixed_duration(current(g)));
  }

  void finish(std::size_t g) {
    Phase& p = current(g);
    p.end = engine_.now();
    if (p.kind == PhaseKind::kDump) {
      Phase cpu = p;
      cpu.kind = PhaseKind::kCpuMetric;
      cpu.gpu = -1;
      cpu.inference_ticks = 0;
      cpu.metric_minutes = metric_of(p);
      release_cpu(std::move(cpu));
    }
    if (p.kind == PhaseKind::kPrecursorLoad) {
      const auto node = static_cast<std::size_t>(p.node);
      node_ready_[node] = true;
      const auto waiting = std::move(waiting_[node]);
      waiting_[node].clear();
      ++next_[g];
      start_next(g);
      for (std::size_t w : waiting) start_next(w);
      return;
    }
    ++next_[g];
    start_next(g);
  }

  double metric_of(const Phase& dump) const {
    for (const auto& c : plan_.cpu_phases) {
      if (c.dataset == dump.dataset && c.shard == dump.shard) return c.metric_minutes;
    }
    return 0;
  }

  void release_cpu(Phase cpu) {
    if (options_.cpu_slots > 0 && cpu_running_ >= options_.cpu_slots) {
      cpu_queue_.push_back(std::move(cpu));
      return;
    }
    start_cpu(std::move(cpu));
  }

  void start_cpu(Phase cpu) {
    ++cpu_running_;
    cpu.start = engine_.now();
    const double d = cpu.metric_minutes * 60.0;
    const std::size_t idx = out_.cpu_phases.size();
    out_.cpu_phases.push_back(std::move(cpu));
    engine_.schedule_in(d, sim::EventKind::kFinish,
                        [this, idx](sim::Engine&, const sim::SimEvent&) {
                          out_.cpu_phases[idx].end = engine_.now();
                          --cpu_running_;
                          if (!cpu_queue_.empty()) {
                            Phase next = std::move(cpu_queue_.front());
                            cpu_queue_.pop_front();
                            start_cpu(std::move(next));
                          }
                        },
                        "CpuMetric", -1);
  }

  const TrialPlan& plan_;
  const LoadModel& load_;
  SimOptions options_;
  sim::Engine engine_;
  sim::FlowNetwork net_;
  int aggregate_link_ = 0;
  std::vector<int> node_link_;
  std::vector<std::size_t> next_;
  std::vector<bool> node_ready_;
  std::vector<std::vector<std::size_t>> waiting_;
  std::map<int, std::size_t> flow_lane_;
  std::optional<std::uint64_t> net_event_;
  int cpu_running_ = 0;
  std::deque<Phase> cpu_queue_;
  TrialPlan out_;
};

}  // namespace

EvalResult simulate_eval(const TrialPlan& plan, const LoadModel& load, const SimOptions& options) {
  load.validate();
  if (options.cpu_slots < 0) throw Error(ErrorCode::kConfig, "cpu_slots must be >= 0");
  EvalSimulator sim(plan, load, options);
  EvalResult r;
  r.timeline = sim.run();
  r.event_log_hash = sim.hash();
  for (const auto& lane : r.timeline.gpu_phases) {
    for (const auto& p : lane) {
      r.makespan = std::max(r.makespan, p.end);
      if (p.kind != PhaseKind::kPrecursorLoad) r.gpu_busy_seconds += p.end - p.start;
    }
  }
  r.completion = r.makespan;
  for (const auto& c : r.timeline.cpu_phases) r.completion = std::max(r.completion, c.end);
  double idle_sum = 0;
  for (const auto& lane : r.timeline.gpu_phases) {
    double inference = 0;
    for (const auto& p : lane) {
      if (p.kind == PhaseKind::kInference) inference += p.end - p.start;
    }
    r.inference_seconds += inference;
    const double idle = r.makespan > 0 ? 1.0 - inference / r.makespan : 0.0;
    r.gpu_idle_fraction.push_back(idle);
    idle_sum += idle;
  }
  r.mean_idle_fraction = r.gpu_idle_fraction.empty() ? 0.0 : idle_sum / r.gpu_idle_fraction.size();
  return r;
}

}  // namespace acme::eval
