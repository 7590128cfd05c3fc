#include "core/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <queue>
#include <set>
#include <string>

#include "core/config_file.hpp"
#include "core/error.hpp"
#include "core/failure_stats.hpp"
#include "core/lemon.hpp"
#include "core/rng.hpp"

namespace relsim {

std::vector<std::pair<FailureCause, double>> default_cause_mix() {
  // Hardware-heavy mix: interconnect and filesystem dominate, catch-all
  // node-down events stay rare.
  return {
      {FailureCause::IbLink, 0.18},         {FailureCause::FsMount, 0.16},
      {FailureCause::GpuMemory, 0.14},      {FailureCause::Pcie, 0.12},
      {FailureCause::GpuUnavailable, 0.10}, {FailureCause::NvLink, 0.08},
      {FailureCause::MainMemory, 0.06},     {FailureCause::GpuDriver, 0.05},
      {FailureCause::NodeFailCatchall, 0.04}, {FailureCause::EthLink, 0.04},
      {FailureCause::SystemService, 0.03},
  };
}

namespace {

// Internal queue event kinds; the numeric value is the tie-break rank at
// equal timestamps. Failures outrank detections, detections outrank job
// milestones, so a job dying and finishing at the same instant dies.
enum QKind : int {
  kSubmit = 0,
  kNodeFailure = 1,
  kDetection = 2,
  kHealthTick = 3,
  kMilestone = 4,
  kNodeRemediated = 5,
  kLemonScan = 6,
};

enum MilestoneKind : long long { kCkpt = 0, kComplete = 1, kTimeout = 2 };

struct QEv {
  double t{0.0};
  int kind{0};
  long long a{0};  // run or node index
  long long b{0};  // epoch / attempt sequence
  long long c{0};  // milestone kind
  uint64_t seq{0};
};

struct QCmp {
  bool operator()(const QEv& x, const QEv& y) const {
    if (x.t != y.t) return x.t > y.t;
    if (x.kind != y.kind) return x.kind > y.kind;
    if (x.a != y.a) return x.a > y.a;
    if (x.b != y.b) return x.b > y.b;
    return x.seq > y.seq;
  }
};

struct RunState {
  JobSpec spec;
  int nodes_needed{0};
  JobRunRecord rec;
  double banked{0.0};           // durable productive seconds across attempts
  bool pending{false};
  bool running{false};
  double eligible_since{0.0};
  long long failure_requeues{0};
  bool next_attempt_after_failure{false};

  uint64_t attempt_seq{0};      // bumped at attempt start and end
  double attempt_start{0.0};
  double attempt_banked{0.0};   // durable progress inside the attempt
  int attempt_ckpts{0};
  double last_ckpt_t{0.0};
  std::vector<int> attempt_nodes;
};

struct NodeSt {
  Node info;
  int occupant{-1};
  uint64_t fail_epoch{0};
  bool fail_pending{false};
  FailureCause pending_cause{FailureCause::Unattributed};
  int kill_run{-1};
  uint64_t kill_attempt_seq{0};
  bool low_drain{false};
  bool det_flagged{false};      // detector verdict pending replacement
  bool ever_flagged{false};     // sticky: never flag the same id twice
  Rng fail_rng{0};
  Rng check_rng{0};
};

class Simulation {
 public:
  Simulation(const ClusterConfig& cfg, const std::vector<JobSpec>& workload,
             uint64_t seed)
      : cfg_(cfg), seed_(seed) {
    validate(workload);
    build_nodes();
    build_runs(workload);
  }

  SimTrace run() {
    for (size_t i = 0; i < runs_.size(); ++i)
      push({runs_[i].spec.submit_time.s, kSubmit, static_cast<long long>(i),
            0, 0, 0});
    if (cfg_.false_positive_rate > 0.0)
      push({cfg_.health_check_period.s, kHealthTick, 0, 0, 0, 0});
    if (cfg_.detection.enabled)
      push({cfg_.detection.period.s, kLemonScan, 0, 0, 0, 0});

    double horizon = cfg_.sim_horizon.s;
    double now = 0.0;
    while (!queue_.empty()) {
      double t = queue_.top().t;
      if (horizon > 0.0 && t > horizon) break;
      while (!queue_.empty() && queue_.top().t == t) {
        QEv ev = queue_.top();
        queue_.pop();
        if (ev.kind != kHealthTick && ev.kind != kLemonScan) --active_events_;
        dispatch(ev);
      }
      if (sched_dirty_) schedule_pass(t);
      now = t;
    }
    finalize(horizon > 0.0 ? horizon : now);
    return std::move(trace_);
  }

 private:
  void validate(const std::vector<JobSpec>& workload) {
    require(cfg_.node_count >= 1, Errc::invalid_argument,
            "node_count must be >= 1");
    require(cfg_.gpus_per_node >= 1, Errc::invalid_argument,
            "gpus_per_node must be >= 1");
    require(cfg_.base_failure_rate.per_node_day >= 0.0, Errc::invalid_argument,
            "base failure rate must be non-negative");
    require(cfg_.lemon_fraction >= 0.0 && cfg_.lemon_fraction <= 1.0,
            Errc::invalid_argument, "lemon_fraction must lie in [0,1]");
    require(cfg_.lemon_multiplier > 0.0, Errc::invalid_argument,
            "lemon_multiplier must be positive");
    require(cfg_.health_check_period.s > 0.0, Errc::invalid_argument,
            "health check period must be positive");
    require(cfg_.heartbeat_timeout.s >= 0.0, Errc::invalid_argument,
            "heartbeat timeout must be non-negative");
    require(cfg_.false_positive_rate >= 0.0 && cfg_.false_positive_rate < 1.0,
            Errc::invalid_argument, "false positive rate must lie in [0,1)");
    require(cfg_.false_positive_rate == 0.0 || cfg_.sim_horizon.s > 0.0,
            Errc::invalid_argument,
            "spurious health checks need a finite sim horizon");
    require(cfg_.min_preemption_age.s >= 0.0, Errc::invalid_argument,
            "min preemption age must be non-negative");
    require(cfg_.repair_time.s > 0.0, Errc::invalid_argument,
            "repair time must be positive");
    require(cfg_.default_max_lifetime.s > 0.0, Errc::invalid_argument,
            "default max lifetime must be positive");
    require(cfg_.sim_horizon.s >= 0.0, Errc::invalid_argument,
            "sim horizon must be non-negative");
    require(!cfg_.cause_mix.empty(), Errc::invalid_argument,
            "cause mix must not be empty");
    double wsum = 0.0;
    for (const auto& [c, w] : cfg_.cause_mix) {
      (void)c;
      require(w >= 0.0, Errc::invalid_argument,
              "cause mix weights must be non-negative");
      wsum += w;
    }
    require(wsum > 0.0, Errc::invalid_argument, "cause mix sums to zero");
    if (cfg_.detection.enabled) {
      require(cfg_.detection.period.s > 0.0 && cfg_.detection.window.s > 0.0,
              Errc::invalid_argument,
              "detection period and window must be positive");
      require(!cfg_.detection.cutoffs.empty(), Errc::invalid_argument,
              "detection enabled but no signal cutoffs configured");
    }

    std::set<std::string> run_ids, job_ids;
    for (const JobSpec& s : workload) {
      require(s.gpus >= 1, Errc::invalid_argument,
              "job " + s.job_id + ": gpus must be >= 1");
      require(s.required_productive_time.s > 0.0, Errc::invalid_argument,
              "job " + s.job_id +
                  ": required productive time must be positive");
      require(s.submit_time.s >= 0.0, Errc::invalid_argument,
              "job " + s.job_id + ": negative submit time");
      require(s.checkpoint_write_overhead.s >= 0.0 &&
                  s.restart_overhead.s >= 0.0,
              Errc::invalid_argument,
              "job " + s.job_id + ": negative overhead");
      require(run_ids.insert(s.logical_run_id).second, Errc::invalid_argument,
              "duplicate logical_run_id: " + s.logical_run_id);
      require(job_ids.insert(s.job_id).second, Errc::invalid_argument,
              "duplicate job_id: " + s.job_id);
    }
  }

  void build_nodes() {
    nodes_.reserve(cfg_.node_count);
    for (int i = 0; i < cfg_.node_count; ++i) {
      NodeSt n;
      char buf[24];
      std::snprintf(buf, sizeof buf, "node-%05d", i);
      n.info.node_id = buf;
      n.info.gpus = cfg_.gpus_per_node;
      n.info.base_failure_rate = cfg_.base_failure_rate;
      n.fail_rng = Rng(derive_seed(seed_, 0x11, static_cast<uint64_t>(i)));
      n.check_rng = Rng(derive_seed(seed_, 0x12, static_cast<uint64_t>(i)));
      node_index_[n.info.node_id] = i;
      nodes_.push_back(std::move(n));
    }
    long long lemons = std::llround(cfg_.lemon_fraction *
                                    static_cast<double>(cfg_.node_count));
    if (lemons > 0) {
      Rng pick(derive_seed(seed_, 0x13));
      std::vector<int> idx(cfg_.node_count);
      for (int i = 0; i < cfg_.node_count; ++i) idx[i] = i;
      for (long long i = 0; i < lemons; ++i) {
        long long j =
            i + static_cast<long long>(pick.uniform_int(idx.size() - i));
        std::swap(idx[i], idx[j]);
        nodes_[idx[i]].info.lemon_multiplier = cfg_.lemon_multiplier;
      }
    }

    trace_.seed = seed_;
    trace_.config = cfg_;
    trace_.config_hash = config_hash(cluster_config_to_flat(cfg_));
    trace_.nodes.reserve(nodes_.size());
    for (const NodeSt& n : nodes_) trace_.nodes.push_back(n.info);
  }

  void build_runs(const std::vector<JobSpec>& workload) {
    std::vector<JobSpec> sorted = workload;
    std::sort(sorted.begin(), sorted.end(),
              [](const JobSpec& a, const JobSpec& b) {
                if (a.submit_time.s != b.submit_time.s)
                  return a.submit_time.s < b.submit_time.s;
                return a.logical_run_id < b.logical_run_id;
              });
    runs_.reserve(sorted.size());
    for (JobSpec& s : sorted) {
      RunState r;
      r.nodes_needed = nodes_required(s, cfg_.gpus_per_node);
      r.rec.logical_run_id = s.logical_run_id;
      r.rec.spec = s;
      r.spec = std::move(s);
      runs_.push_back(std::move(r));
    }
  }

  void push(QEv ev) {
    ev.seq = ++seq_;
    if (ev.kind != kHealthTick && ev.kind != kLemonScan) ++active_events_;
    queue_.push(ev);
  }

  bool activity_remains() const {
    return running_count_ > 0 || pending_count_ > 0 || active_events_ > 0;
  }

  void record_event(double t, SimEventKind kind, const RunState* run,
                    const NodeSt* node) {
    EventRecord e;
    e.time = TimePoint{t};
    e.kind = kind;
    if (run) {
      e.job_id = run->spec.job_id;
      e.logical_run_id = run->spec.logical_run_id;
    }
    if (node) e.node_id = node->info.node_id;
    trace_.events.push_back(std::move(e));
  }

  void record_transition(NodeSt& n, double t, NodeState to,
                         const std::string& reason) {
    trace_.node_transitions.push_back(
        {n.info.node_id, TimePoint{t}, n.info.state, to, reason});
    n.info.state = to;
  }

  FailureCause draw_cause(Rng& rng) {
    double total = 0.0;
    for (const auto& [c, w] : cfg_.cause_mix) {
      (void)c;
      total += w;
    }
    double u = rng.uniform01() * total;
    double acc = 0.0;
    for (const auto& [c, w] : cfg_.cause_mix) {
      acc += w;
      if (u < acc) return c;
    }
    return cfg_.cause_mix.back().first;
  }

  double next_tick(double t) const {
    double per = cfg_.health_check_period.s;
    double td = std::ceil(t / per) * per;
    if (td < t) td += per;
    return td;
  }

  double effective_lifetime(const JobSpec& s) const {
    return s.max_lifetime.s > 0.0 ? s.max_lifetime.s
                                  : cfg_.default_max_lifetime.s;
  }

  void dispatch(const QEv& ev) {
    switch (ev.kind) {
      case kSubmit: on_submit(ev); break;
      case kNodeFailure: on_node_failure(ev); break;
      case kDetection: on_detection(ev); break;
      case kHealthTick: on_health_tick(ev); break;
      case kMilestone: on_milestone(ev); break;
      case kNodeRemediated: on_remediated(ev); break;
      case kLemonScan: on_lemon_scan(ev); break;
      default: raise(Errc::internal, "unknown event kind");
    }
  }

  void on_submit(const QEv& ev) {
    RunState& r = runs_[ev.a];
    record_event(ev.t, SimEventKind::Submit, &r, nullptr);
    if (r.nodes_needed > cfg_.node_count) {
      r.rec.final_state = JobState::Failed;  // can never be placed
      return;
    }
    r.pending = true;
    r.eligible_since = ev.t;
    ++pending_count_;
    sched_dirty_ = true;
  }

  // ---- scheduling ----

  bool node_free(const NodeSt& n) const {
    return n.info.state == NodeState::Available && !n.fail_pending &&
           n.occupant < 0;
  }

  int count_free() const {
    int free_cnt = 0;
    for (const NodeSt& n : nodes_)
      if (node_free(n)) ++free_cnt;
    return free_cnt;
  }

  std::vector<int> sorted_pending() const {
    std::vector<int> pend;
    for (size_t i = 0; i < runs_.size(); ++i)
      if (runs_[i].pending) pend.push_back(static_cast<int>(i));
    std::sort(pend.begin(), pend.end(), [this](int x, int y) {
      const RunState& a = runs_[x];
      const RunState& b = runs_[y];
      if (a.spec.priority != b.spec.priority)
        return a.spec.priority > b.spec.priority;
      if (a.spec.submit_time.s != b.spec.submit_time.s)
        return a.spec.submit_time.s < b.spec.submit_time.s;
      return a.spec.job_id < b.spec.job_id;
    });
    return pend;
  }

  void schedule_pass(double t) {
    sched_dirty_ = false;
    bool restart = true;
    while (restart) {
      restart = false;
      std::vector<int> pend = sorted_pending();
      int free_cnt = count_free();
      for (int ri : pend) {
        RunState& r = runs_[ri];
        if (!r.pending) continue;
        if (r.nodes_needed <= free_cnt) {
          start_attempt(ri, t);
          free_cnt -= r.nodes_needed;
          continue;
        }
        if (try_preempt_for(ri, t, free_cnt)) {
          // Victims joined the pending set; rescan in priority order.
          restart = true;
          break;
        }
      }
    }
  }

  // Preempts only when the evictions actually let the incoming job start.
  // Victim order: lowest priority first, then youngest attempt.
  bool try_preempt_for(int ri, double t, int free_cnt) {
    const RunState& incoming = runs_[ri];
    std::vector<int> victims;
    for (size_t i = 0; i < runs_.size(); ++i) {
      const RunState& v = runs_[i];
      if (!v.running) continue;
      if (v.spec.priority >= incoming.spec.priority) continue;
      if (t - v.attempt_start < cfg_.min_preemption_age.s) continue;
      victims.push_back(static_cast<int>(i));
    }
    if (victims.empty()) return false;
    std::sort(victims.begin(), victims.end(), [this](int x, int y) {
      const RunState& a = runs_[x];
      const RunState& b = runs_[y];
      if (a.spec.priority != b.spec.priority)
        return a.spec.priority < b.spec.priority;
      if (a.attempt_start != b.attempt_start)
        return a.attempt_start > b.attempt_start;
      return a.spec.job_id < b.spec.job_id;
    });

    // A victim only frees nodes that are clean: not failed, not draining,
    // not flagged for replacement.
    int usable = free_cnt;
    std::vector<int> chosen;
    for (int vi : victims) {
      if (usable >= incoming.nodes_needed) break;
      int clean = 0;
      for (int ni : runs_[vi].attempt_nodes) {
        const NodeSt& n = nodes_[ni];
        if (!n.fail_pending && !n.low_drain && !n.det_flagged) ++clean;
      }
      if (clean == 0) continue;
      chosen.push_back(vi);
      usable += clean;
    }
    if (usable < incoming.nodes_needed) return false;

    for (int vi : chosen) preempt(vi, ri, t);
    start_attempt(ri, t);
    return true;
  }

  void preempt(int vi, int by, double t) {
    RunState& v = runs_[vi];
    record_event(t, SimEventKind::Preempt, &v, nullptr);
    JobAttempt a = close_attempt(v, t, JobState::Preempted, v.attempt_banked);
    a.preempted_by = runs_[by].spec.logical_run_id;
    a.preempted_by_requeued_failure = runs_[by].next_attempt_after_failure;
    v.rec.attempts.push_back(std::move(a));
    release_nodes(v, t, -1);
    v.pending = true;
    v.eligible_since = t;
    ++pending_count_;
    record_event(t, SimEventKind::Requeue, &v, nullptr);
  }

  void start_attempt(int ri, double t) {
    RunState& r = runs_[ri];
    std::vector<int> alloc;
    alloc.reserve(r.nodes_needed);
    for (size_t i = 0; i < nodes_.size() &&
                       alloc.size() < static_cast<size_t>(r.nodes_needed);
         ++i) {
      if (node_free(nodes_[i])) alloc.push_back(static_cast<int>(i));
    }
    require(alloc.size() == static_cast<size_t>(r.nodes_needed),
            Errc::internal, "scheduler accounting mismatch");

    r.pending = false;
    --pending_count_;
    r.running = true;
    ++running_count_;
    r.rec.queue_time.s += t - r.eligible_since;
    ++r.attempt_seq;
    r.attempt_start = t;
    r.attempt_banked = 0.0;
    r.attempt_ckpts = 0;
    r.last_ckpt_t = 0.0;
    r.attempt_nodes = std::move(alloc);

    for (int ni : r.attempt_nodes) {
      NodeSt& n = nodes_[ni];
      n.occupant = ri;
      double rate = n.info.effective_rate_per_second();
      double tf = t + n.fail_rng.exponential(rate);
      if (std::isfinite(tf))
        push({tf, kNodeFailure, ni, static_cast<long long>(n.fail_epoch), 0,
              0});
    }
    record_event(t, SimEventKind::Start, &r, nullptr);
    schedule_milestone(ri, t, true);
  }

  void schedule_milestone(int ri, double t, bool fresh_start) {
    RunState& r = runs_[ri];
    double remaining =
        r.spec.required_productive_time.s - r.banked - r.attempt_banked;
    double dt = r.spec.checkpoint_interval.s;
    double w = r.spec.checkpoint_write_overhead.s;
    double lead = fresh_start ? r.spec.restart_overhead.s : 0.0;
    double when;
    long long kind;
    if (dt > 0.0 && remaining > dt) {
      when = t + lead + dt + w;
      kind = kCkpt;
    } else {
      when = t + lead + remaining;
      kind = kComplete;
    }
    double deadline = r.attempt_start + effective_lifetime(r.spec);
    if (when > deadline) {
      when = deadline;
      kind = kTimeout;
    }
    push({when, kMilestone, ri, static_cast<long long>(r.attempt_seq), kind,
          0});
  }

  void on_milestone(const QEv& ev) {
    RunState& r = runs_[ev.a];
    if (!r.running || r.attempt_seq != static_cast<uint64_t>(ev.b)) return;
    switch (ev.c) {
      case kCkpt: {
        r.attempt_banked += r.spec.checkpoint_interval.s;
        r.attempt_ckpts += 1;
        r.last_ckpt_t = ev.t;
        record_event(ev.t, SimEventKind::CheckpointDone, &r, nullptr);
        schedule_milestone(static_cast<int>(ev.a), ev.t, false);
        break;
      }
      case kComplete: {
        double surviving = r.spec.required_productive_time.s - r.banked;
        JobAttempt a =
            close_attempt(r, ev.t, JobState::Completed, surviving);
        r.rec.attempts.push_back(std::move(a));
        r.rec.final_state = JobState::Completed;
        record_event(ev.t, SimEventKind::Complete, &r, nullptr);
        release_nodes(r, ev.t, -1);
        break;
      }
      case kTimeout: {
        JobAttempt a =
            close_attempt(r, ev.t, JobState::Timeout, r.attempt_banked);
        r.rec.attempts.push_back(std::move(a));
        r.rec.final_state = JobState::Timeout;
        record_event(ev.t, SimEventKind::Complete, &r, nullptr);
        release_nodes(r, ev.t, -1);
        break;
      }
      default:
        raise(Errc::internal, "unknown milestone kind");
    }
  }

  // Builds the attempt record and settles the run's W = Q + R + U split:
  // `surviving` productive seconds persist, the rest of the attempt's wall
  // clock is unproductive.
  JobAttempt close_attempt(RunState& r, double t, JobState end_state,
                           double surviving) {
    JobAttempt a;
    a.attempt_index = static_cast<int>(r.rec.attempts.size());
    a.start_time = TimePoint{r.attempt_start};
    a.end_time = TimePoint{t};
    a.end_state = end_state;
    a.nodes.reserve(r.attempt_nodes.size());
    for (int ni : r.attempt_nodes) a.nodes.push_back(nodes_[ni].info.node_id);
    a.checkpoints_written = r.attempt_ckpts;
    if (r.attempt_ckpts > 0)
      a.last_checkpoint_completion = TimePoint{r.last_ckpt_t};
    a.surviving_productive_s = surviving;
    a.requeue_after_failure = r.next_attempt_after_failure;
    r.next_attempt_after_failure = false;

    r.banked += surviving;
    double dur = t - r.attempt_start;
    r.rec.productive_time.s += surviving;
    r.rec.unproductive_time.s += dur - surviving;
    r.running = false;
    --running_count_;
    ++r.attempt_seq;
    return a;
  }

  // Returns every node of the closed attempt to the pool except
  // `keep_in_remediation` (the node that failed). Draining and flagged
  // nodes leave for remediation instead of going free.
  void release_nodes(RunState& r, double t, int keep_in_remediation) {
    for (int ni : r.attempt_nodes) {
      NodeSt& n = nodes_[ni];
      n.occupant = -1;
      ++n.fail_epoch;
      if (ni == keep_in_remediation) continue;
      if (n.fail_pending) continue;  // its own detection event is coming
      if (n.low_drain || n.det_flagged) {
        n.low_drain = false;
        record_transition(n, t, NodeState::Remediation,
                          n.det_flagged ? "flagged-for-replacement"
                                        : "drained-after-job");
        push({t + cfg_.repair_time.s, kNodeRemediated, ni, 0, 0, 0});
      }
    }
    r.attempt_nodes.clear();
    sched_dirty_ = true;
  }

  void on_node_failure(const QEv& ev) {
    NodeSt& n = nodes_[ev.a];
    if (n.fail_epoch != static_cast<uint64_t>(ev.b)) return;  // stale draw
    require(n.occupant >= 0, Errc::internal,
            "failure fired on an unoccupied node");
    n.fail_pending = true;
    n.pending_cause = draw_cause(n.fail_rng);
    n.kill_run = n.occupant;
    n.kill_attempt_seq = runs_[n.occupant].attempt_seq;
    record_event(ev.t, SimEventKind::NodeFailure, &runs_[n.occupant], &n);
    double td = next_tick(ev.t);
    if (n.pending_cause == FailureCause::NodeFailCatchall)
      td += cfg_.heartbeat_timeout.s;
    push({td, kDetection, ev.a, 0, 0, 0});
  }

  void on_detection(const QEv& ev) {
    NodeSt& n = nodes_[ev.a];
    require(n.fail_pending, Errc::internal, "detection without failure");
    n.fail_pending = false;
    trace_.health_events.push_back({n.info.node_id, TimePoint{ev.t},
                                    n.pending_cause, Severity::High, false});
    record_transition(n, ev.t, NodeState::Remediation,
                      to_string(n.pending_cause));
    n.low_drain = false;
    push({ev.t + cfg_.repair_time.s, kNodeRemediated, ev.a, 0, 0, 0});

    int ri = n.kill_run;
    n.kill_run = -1;
    if (ri >= 0 && runs_[ri].running &&
        runs_[ri].attempt_seq == n.kill_attempt_seq) {
      RunState& r = runs_[ri];
      JobAttempt a =
          close_attempt(r, ev.t, JobState::NodeFail, r.attempt_banked);
      a.failing_node = n.info.node_id;
      r.rec.attempts.push_back(std::move(a));
      release_nodes(r, ev.t, static_cast<int>(ev.a));
      bool can_requeue =
          cfg_.requeue_on_node_fail &&
          (cfg_.max_requeues < 0 || r.failure_requeues < cfg_.max_requeues);
      if (can_requeue) {
        ++r.failure_requeues;
        r.next_attempt_after_failure = true;
        r.pending = true;
        r.eligible_since = ev.t;
        ++pending_count_;
        record_event(ev.t, SimEventKind::Requeue, &r, nullptr);
      } else {
        r.rec.final_state = JobState::NodeFail;
      }
    }
    sched_dirty_ = true;
  }

  void on_health_tick(const QEv& ev) {
    for (size_t i = 0; i < nodes_.size(); ++i) {
      NodeSt& n = nodes_[i];
      if (n.info.state != NodeState::Available || n.fail_pending) continue;
      if (n.check_rng.uniform01() >= cfg_.false_positive_rate) continue;
      FailureCause cause = draw_cause(n.check_rng);
      trace_.health_events.push_back(
          {n.info.node_id, TimePoint{ev.t}, cause, Severity::Low, true});
      if (n.occupant >= 0) {
        // Degradation finding on a busy node: drain, do not kill.
        n.low_drain = true;
        record_transition(n, ev.t, NodeState::Draining,
                          std::string("health:") + to_string(cause));
      } else {
        record_transition(n, ev.t, NodeState::Remediation,
                          std::string("health:") + to_string(cause));
        push({ev.t + cfg_.repair_time.s, kNodeRemediated,
              static_cast<long long>(i), 0, 0, 0});
        sched_dirty_ = true;
      }
    }
    if (activity_remains())
      push({ev.t + cfg_.health_check_period.s, kHealthTick, 0, 0, 0, 0});
  }

  void on_remediated(const QEv& ev) {
    NodeSt& n = nodes_[ev.a];
    require(n.info.state == NodeState::Remediation, Errc::internal,
            "remediation finished on a node not in remediation");
    bool replaced = n.det_flagged;
    if (replaced) {
      // Hardware swap: the slot keeps its id, the degradation is gone.
      n.info.lemon_multiplier = 1.0;
      n.det_flagged = false;
    }
    record_transition(n, ev.t, NodeState::Available,
                      replaced ? "replaced" : "repaired");
    record_event(ev.t, SimEventKind::NodeRemediated, nullptr, &n);
    sched_dirty_ = true;
  }

  void on_lemon_scan(const QEv& ev) {
    std::vector<JobLogEntry> log;
    for (const RunState& r : runs_) {
      if (!r.rec.attempts.empty()) flatten_attempts_into(log, r.rec);
    }
    std::vector<std::string> node_ids;
    node_ids.reserve(nodes_.size());
    for (const NodeSt& n : nodes_) node_ids.push_back(n.info.node_id);

    TimeSpan window = cfg_.detection.window;
    if (window.s > ev.t) window = TimeSpan{ev.t};
    std::vector<NodeSignals> sig = compute_node_signals(
        log, trace_.health_events, trace_.node_transitions, node_ids,
        TimePoint{ev.t}, window, TimePoint{0.0});
    LemonThresholds th;
    th.cutoffs = cfg_.detection.cutoffs;
    std::vector<LemonVerdict> verdicts = classify_lemons(sig, th);

    LemonScanRecord scan;
    scan.time = TimePoint{ev.t};
    for (const LemonVerdict& v : verdicts) {
      if (!v.flagged) continue;
      int ni = node_index(v.node_id);
      NodeSt& n = nodes_[ni];
      if (n.det_flagged || n.ever_flagged) continue;
      n.det_flagged = true;
      n.ever_flagged = true;
      scan.flagged.push_back(v.node_id);
      if (n.info.state == NodeState::Available && !n.fail_pending) {
        if (n.occupant >= 0) {
          record_transition(n, ev.t, NodeState::Draining, "lemon-flag");
        } else {
          record_transition(n, ev.t, NodeState::Remediation, "lemon-flag");
          push({ev.t + cfg_.repair_time.s, kNodeRemediated, ni, 0, 0, 0});
          sched_dirty_ = true;
        }
      }
      // Nodes already draining or in remediation keep the flag; their
      // multiplier resets when remediation completes.
    }
    trace_.lemon_scans.push_back(std::move(scan));
    if (activity_remains())
      push({ev.t + cfg_.detection.period.s, kLemonScan, 0, 0, 0, 0});
  }

  int node_index(const std::string& node_id) const {
    auto it = node_index_.find(node_id);
    require(it != node_index_.end(), Errc::internal, "unknown node id");
    return it->second;
  }

  void finalize(double end) {
    for (RunState& r : runs_) {
      if (r.running) {
        JobAttempt a =
            close_attempt(r, end, JobState::Running, r.attempt_banked);
        r.rec.attempts.push_back(std::move(a));
        r.rec.final_state = JobState::Running;
        for (int ni : r.attempt_nodes) {
          nodes_[ni].occupant = -1;
          ++nodes_[ni].fail_epoch;
        }
        r.attempt_nodes.clear();
      } else if (r.pending) {
        r.rec.queue_time.s += end - r.eligible_since;
        r.rec.final_state = JobState::Pending;
        --pending_count_;
      }
    }
    trace_.runs.reserve(runs_.size());
    for (RunState& r : runs_) trace_.runs.push_back(std::move(r.rec));
    trace_.end_time = TimePoint{end};
  }

  ClusterConfig cfg_;
  uint64_t seed_;
  std::vector<NodeSt> nodes_;
  std::vector<RunState> runs_;
  std::map<std::string, int> node_index_;
  std::priority_queue<QEv, std::vector<QEv>, QCmp> queue_;
  uint64_t seq_{0};
  long long active_events_{0};
  int running_count_{0};
  int pending_count_{0};
  bool sched_dirty_{false};
  SimTrace trace_;
};

}  // namespace

SimTrace run_simulation(const ClusterConfig& cfg,
                        const std::vector<JobSpec>& workload, uint64_t seed) {
  Simulation sim(cfg, workload, seed);
  return sim.run();
}

GoodputBreakdown goodput_loss_attribution(const SimTrace& trace,
                                          TimeSpan lost_work_cap) {
  require(lost_work_cap.s > 0.0, Errc::invalid_argument,
          "lost work cap must be positive");
  GoodputBreakdown out;
  std::map<int, GoodputSizeRow> by_size;
  for (const JobRunRecord& run : trace.runs) {
    for (const JobAttempt& a : run.attempts) {
      double lost_h =
          std::min(a.end_time.s - a.start_time.s, lost_work_cap.s) /
          kSecondsPerHour * run.spec.gpus;
      if (a.end_state == JobState::NodeFail) {
        out.first_order_gpu_hours += lost_h;
        by_size[run.spec.gpus].first_order_gpu_hours += lost_h;
      } else if (a.end_state == JobState::Preempted &&
                 a.preempted_by_requeued_failure) {
        out.second_order_gpu_hours += lost_h;
        by_size[run.spec.gpus].second_order_gpu_hours += lost_h;
      }
    }
  }
  out.by_size.reserve(by_size.size());
  for (auto& [gpus, row] : by_size) {
    row.gpus = gpus;
    out.by_size.push_back(row);
  }
  return out;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

FlatConfig cluster_config_to_flat(const ClusterConfig& cfg) {
  FlatConfig f;
  auto add = [&](const char* k, std::string v) {
    f.entries.emplace_back(k, std::move(v));
  };
  add("node_count", std::to_string(cfg.node_count));
  add("gpus_per_node", std::to_string(cfg.gpus_per_node));
  add("base_failure_rate_per_node_day",
      fmt_double(cfg.base_failure_rate.per_node_day));
  add("lemon_fraction", fmt_double(cfg.lemon_fraction));
  add("lemon_multiplier", fmt_double(cfg.lemon_multiplier));
  add("health_check_period_s", fmt_double(cfg.health_check_period.s));
  add("heartbeat_timeout_s", fmt_double(cfg.heartbeat_timeout.s));
  add("false_positive_rate", fmt_double(cfg.false_positive_rate));
  add("min_preemption_age_s", fmt_double(cfg.min_preemption_age.s));
  add("default_max_lifetime_s", fmt_double(cfg.default_max_lifetime.s));
  add("requeue_on_node_fail", cfg.requeue_on_node_fail ? "true" : "false");
  add("max_requeues", std::to_string(cfg.max_requeues));
  add("repair_time_s", fmt_double(cfg.repair_time.s));
  add("sim_horizon_s", fmt_double(cfg.sim_horizon.s));
  for (const auto& [cause, weight] : cfg.cause_mix)
    add((std::string("cause_weight.") + to_string(cause)).c_str(),
        fmt_double(weight));
  add("detection.enabled", cfg.detection.enabled ? "true" : "false");
  add("detection.period_s", fmt_double(cfg.detection.period.s));
  add("detection.window_s", fmt_double(cfg.detection.window.s));
  for (const auto& [name, cut] : cfg.detection.cutoffs)
    add(("detection.cutoff." + name).c_str(), fmt_double(cut));
  return f;
}

ClusterConfig cluster_config_from_flat(const FlatConfig& flat) {
  static const std::set<std::string> scalars = {
      "node_count",           "gpus_per_node",
      "base_failure_rate_per_node_day", "lemon_fraction",
      "lemon_multiplier",     "health_check_period_s",
      "heartbeat_timeout_s",  "false_positive_rate",
      "min_preemption_age_s", "default_max_lifetime_s",
      "requeue_on_node_fail", "max_requeues",
      "repair_time_s",        "sim_horizon_s",
      "detection.enabled",    "detection.period_s",
      "detection.window_s"};
  ClusterConfig cfg;
  std::vector<std::pair<FailureCause, double>> mix;
  bool saw_mix = false;
  for (const auto& [k, v] : flat.entries) {
    if (k.rfind("cause_weight.", 0) == 0) {
      saw_mix = true;
      FailureCause c = failure_cause_from_string(k.substr(13));
      double w = flat.get_double(k, 0.0);
      bool found = false;
      for (auto& [mc, mw] : mix) {
        if (mc == c) {
          mw = w;  // last assignment wins, first position kept
          found = true;
        }
      }
      if (!found) mix.emplace_back(c, w);
      continue;
    }
    if (k.rfind("detection.cutoff.", 0) == 0) {
      cfg.detection.cutoffs[k.substr(17)] = flat.get_double(k, 0.0);
      continue;
    }
    require(scalars.count(k) > 0, Errc::parse, "unknown config key: " + k);
    (void)v;
  }
  if (saw_mix) cfg.cause_mix = std::move(mix);

  cfg.node_count =
      static_cast<int>(flat.get_int("node_count", cfg.node_count));
  cfg.gpus_per_node =
      static_cast<int>(flat.get_int("gpus_per_node", cfg.gpus_per_node));
  cfg.base_failure_rate.per_node_day = flat.get_double(
      "base_failure_rate_per_node_day", cfg.base_failure_rate.per_node_day);
  cfg.lemon_fraction = flat.get_double("lemon_fraction", cfg.lemon_fraction);
  cfg.lemon_multiplier =
      flat.get_double("lemon_multiplier", cfg.lemon_multiplier);
  cfg.health_check_period.s =
      flat.get_double("health_check_period_s", cfg.health_check_period.s);
  cfg.heartbeat_timeout.s =
      flat.get_double("heartbeat_timeout_s", cfg.heartbeat_timeout.s);
  cfg.false_positive_rate =
      flat.get_double("false_positive_rate", cfg.false_positive_rate);
  cfg.min_preemption_age.s =
      flat.get_double("min_preemption_age_s", cfg.min_preemption_age.s);
  cfg.default_max_lifetime.s =
      flat.get_double("default_max_lifetime_s", cfg.default_max_lifetime.s);
  cfg.requeue_on_node_fail =
      flat.get_bool("requeue_on_node_fail", cfg.requeue_on_node_fail);
  cfg.max_requeues = flat.get_int("max_requeues", cfg.max_requeues);
  cfg.repair_time.s = flat.get_double("repair_time_s", cfg.repair_time.s);
  cfg.sim_horizon.s = flat.get_double("sim_horizon_s", cfg.sim_horizon.s);
  cfg.detection.enabled =
      flat.get_bool("detection.enabled", cfg.detection.enabled);
  cfg.detection.period.s =
      flat.get_double("detection.period_s", cfg.detection.period.s);
  cfg.detection.window.s =
      flat.get_double("detection.window_s", cfg.detection.window.s);
  return cfg;
}

std::vector<CascadeRow> cascade_report(const SimTrace& trace,
                                       TimeSpan lost_work_cap) {
  require(lost_work_cap.s > 0.0, Errc::invalid_argument,
          "lost work cap must be positive");
  std::map<std::string, CascadeRow> rows;
  for (const JobRunRecord& run : trace.runs) {
    CascadeRow& row = rows[run.logical_run_id];
    row.logical_run_id = run.logical_run_id;
    row.gpus = run.spec.gpus;
    for (const JobAttempt& a : run.attempts)
      if (a.requeue_after_failure) ++row.failure_requeues;
  }
  for (const JobRunRecord& run : trace.runs) {
    for (const JobAttempt& a : run.attempts) {
      if (a.end_state != JobState::Preempted || a.preempted_by.empty())
        continue;
      auto it = rows.find(a.preempted_by);
      if (it == rows.end()) continue;
      it->second.victims += 1;
      it->second.victim_gpu_hours +=
          std::min(a.end_time.s - a.start_time.s, lost_work_cap.s) /
          kSecondsPerHour * run.spec.gpus;
    }
  }
  std::vector<CascadeRow> out;
  for (auto& [id, row] : rows)
    if (row.failure_requeues > 0 || row.victims > 0) out.push_back(row);
  std::sort(out.begin(), out.end(),
            [](const CascadeRow& a, const CascadeRow& b) {
              if (a.failure_requeues != b.failure_requeues)
                return a.failure_requeues > b.failure_requeues;
              if (a.victim_gpu_hours != b.victim_gpu_hours)
                return a.victim_gpu_hours > b.victim_gpu_hours;
              return a.logical_run_id < b.logical_run_id;
            });
  return out;
}

}  // namespace relsim
