#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/job_types.hpp"
#include "core/node_types.hpp"
#include "core/trace.hpp"

namespace relsim {

struct LemonThresholds;  // lemon.hpp

std::vector<std::pair<FailureCause, double>> default_cause_mix();

struct DetectionConfig {
  bool enabled{false};
  TimeSpan period{TimeSpan::days(7)};          // cadence of detector scans
  TimeSpan window{TimeSpan::days(28)};         // trailing signal window
  // Cutoffs as "signal_name -> threshold"; a node is flagged when any
  // signal strictly exceeds its cutoff.
  std::map<std::string, double> cutoffs;
};

struct ClusterConfig {
  int node_count{16};
  int gpus_per_node{kDefaultGpusPerNode};
  FailureRate base_failure_rate{};
  double lemon_fraction{0.0};
  double lemon_multiplier{1.0};
  TimeSpan health_check_period{TimeSpan::minutes(5)};
  TimeSpan heartbeat_timeout{TimeSpan::seconds(60)};
  // Probability that a health check fires spuriously, per node per tick.
  // Spurious findings are LOW severity: drain, never kill.
  double false_positive_rate{0.0};
  TimeSpan min_preemption_age{TimeSpan::hours(2)};
  TimeSpan default_max_lifetime{TimeSpan::days(7)};
  bool requeue_on_node_fail{true};
  long long max_requeues{-1};                  // per run, -1 = unlimited
  TimeSpan repair_time{TimeSpan::hours(24)};
  TimeSpan sim_horizon{};                      // <= 0: run until drained
  std::vector<std::pair<FailureCause, double>> cause_mix = default_cause_mix();
  DetectionConfig detection;
};

struct LemonScanRecord {
  TimePoint time{};
  std::vector<std::string> flagged;
};

// Everything one simulation produced. `nodes` is the t = 0 ground truth
// (lemon multipliers as seeded, before any detector replacement).
struct SimTrace {
  uint64_t seed{0};
  std::string config_hash;
  ClusterConfig config;
  std::vector<Node> nodes;
  std::vector<JobRunRecord> runs;
  std::vector<HealthCheckEvent> health_events;
  std::vector<NodeTransition> node_transitions;
  std::vector<EventRecord> events;
  std::vector<LemonScanRecord> lemon_scans;
  TimePoint end_time{};
};

// Discrete-event simulation of a gang-scheduled cluster: priority scheduling
// with preemption, per-node Poisson failures while occupied, tick-quantized
// health-check detection, checkpoint/rollback, and requeue-on-failure.
// Deterministic in (config, workload, seed).
SimTrace run_simulation(const ClusterConfig& cfg,
                        const std::vector<JobSpec>& workload, uint64_t seed);

struct GoodputSizeRow {
  int gpus{0};
  double first_order_gpu_hours{0.0};   // lost directly to node failures
  double second_order_gpu_hours{0.0};  // lost to preemptions by requeued jobs
};

struct GoodputBreakdown {
  double first_order_gpu_hours{0.0};
  double second_order_gpu_hours{0.0};
  std::vector<GoodputSizeRow> by_size;  // ascending gpus
};

// Charges each failed attempt and each preemption-by-requeued-failure
// min(attempt runtime, lost_work_cap) of per-GPU time.
GoodputBreakdown goodput_loss_attribution(
    const SimTrace& trace, TimeSpan lost_work_cap = TimeSpan::minutes(30));

struct CascadeRow {
  std::string logical_run_id;
  int gpus{0};
  long long failure_requeues{0};
  long long victims{0};            // attempts this run preempted
  double victim_gpu_hours{0.0};    // capped lost work across those victims
};

// Per-run requeue/preemption fan-out, worst first.
std::vector<CascadeRow> cascade_report(
    const SimTrace& trace, TimeSpan lost_work_cap = TimeSpan::minutes(30));

struct FlatConfig;  // config_file.hpp

// Round-trippable key=value form of a ClusterConfig. Cause weights appear
// as cause_weight.<CAUSE>, detector cutoffs as detection.cutoff.<signal>.
FlatConfig cluster_config_to_flat(const ClusterConfig& cfg);
ClusterConfig cluster_config_from_flat(const FlatConfig& flat);

}  // namespace relsim
