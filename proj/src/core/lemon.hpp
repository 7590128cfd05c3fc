#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/failure_stats.hpp"
#include "core/node_types.hpp"
#include "core/simulator.hpp"

namespace relsim {

// Per-node detection counters over a trailing window.
struct NodeSignals {
  std::string node_id;
  long long excl_jobid_count{0};  // distinct jobs that failed on this node
  long long xid_cnt{0};           // distinct error kinds seen in checks
  long long tickets{0};           // entries into remediation
  long long out_count{0};         // removals from the schedulable pool
  long long multi_node_node_fails{0};
  long long single_node_node_fails{0};
  // single-node failures over single-node attempts hosted; 0 when none.
  double single_node_node_failure_rate{0.0};
  TimeSpan window{};
};

// Canonical signal names, in reporting order.
const std::vector<std::string>& lemon_signal_names();
double signal_value(const NodeSignals& s, const std::string& name);

// Counters for every id in node_ids over (as_of - window, as_of], counted by
// event/end time. log_begin bounds the data span for the coverage check;
// leave it unset to infer the span from the earliest record.
std::vector<NodeSignals> compute_node_signals(
    const std::vector<JobLogEntry>& jobs,
    const std::vector<HealthCheckEvent>& events,
    const std::vector<NodeTransition>& transitions,
    const std::vector<std::string>& node_ids, TimePoint as_of, TimeSpan window,
    std::optional<TimePoint> log_begin = std::nullopt);

struct LemonThresholds {
  // signal name -> cutoff; a signal triggers when its value strictly
  // exceeds the cutoff.
  std::map<std::string, double> cutoffs;
  std::string id() const;
};

enum class LemonRule { AnyOf, KOfN };

struct LemonVerdict {
  std::string node_id;
  bool flagged{false};
  std::vector<std::string> triggering_signals;
  std::string threshold_set_id;
};

// Flags a node when at least one (any-of) or at least k (k-of-n) of the
// thresholded signals trigger. Unknown signal names in the cutoff map and
// an unsatisfiable k are errors.
std::vector<LemonVerdict> classify_lemons(
    const std::vector<NodeSignals>& signals, const LemonThresholds& thresholds,
    LemonRule rule = LemonRule::AnyOf, int k = 1);

struct DetectionMetrics {
  long long true_positives{0};
  long long false_positives{0};
  long long false_negatives{0};
  long long true_negatives{0};
  double precision{0.0};  // 1 when nothing is flagged
  double recall{0.0};     // 1 when there are no lemons
  double false_positive_rate{0.0};
  double flagged_fraction{0.0};
};

// Confusion-matrix metrics of verdicts against the true lemon id list.
// Every true lemon must appear among the verdicts.
DetectionMetrics evaluate_detection(const std::vector<LemonVerdict>& verdicts,
                                    const std::vector<std::string>& true_lemons);

struct TuneOptions {
  // Signals searched by the tuner. The job-exclusion count stays out of the
  // default rule: it correlates poorly with real node failures.
  std::vector<std::string> signals{"multi_node_node_fails",
                                   "single_node_node_fails", "out_count",
                                   "xid_cnt", "tickets"};
  double recall_floor{0.5};
  int max_candidates_per_signal{6};
};

struct TuneResult {
  LemonThresholds thresholds;
  DetectionMetrics metrics;  // on the training signals
  bool met_recall_floor{false};
};

// Exhaustive any-of grid search over per-signal quantile cutoffs: maximize
// precision subject to recall >= recall_floor; ties prefer higher recall,
// then fewer flagged nodes, then the lexicographically smallest cutoffs.
TuneResult tune_thresholds(const std::vector<NodeSignals>& signals,
                           const std::vector<std::string>& true_lemons,
                           const TuneOptions& opt = {});

struct AbComparison {
  double without_fraction{0.0};  // failed large jobs / large jobs
  double with_fraction{0.0};
  double relative_reduction{0.0};
  long long jobs_without{0};
  long long failures_without{0};
  long long jobs_with{0};
  long long failures_with{0};
  long long flagged_nodes{0};  // across all scans of the enabled arm
};

// Paired same-seed simulations with the lemon detector disabled vs enabled,
// compared on the fraction of large jobs whose run ends in NODE_FAIL.
AbComparison ab_compare_removal(const ClusterConfig& cfg,
                                const std::vector<JobSpec>& workload,
                                const LemonThresholds& thresholds,
                                uint64_t seed, int min_gpus = 512);

}  // namespace relsim
