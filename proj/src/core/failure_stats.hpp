#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/job_types.hpp"
#include "core/node_types.hpp"
#include "core/stats.hpp"

namespace relsim {

// One scheduler attempt, flattened out of a JobRunRecord. The unit of
// attribution and rate estimation.
struct JobLogEntry {
  std::string job_id;
  std::string logical_run_id;
  int attempt_index{0};
  int gpus{0};
  TimePoint start{};
  TimePoint end{};
  JobState end_state{JobState::Pending};
  std::vector<std::string> nodes;
  std::string failing_node;  // empty unless the sim blamed a node
};

void flatten_attempts_into(std::vector<JobLogEntry>& out,
                           const JobRunRecord& run);
std::vector<JobLogEntry> flatten_attempts(
    const std::vector<JobRunRecord>& runs);
void sort_by_end_time(std::vector<JobLogEntry>& log);

// A failed attempt with its blamed cause. attributed_cause is UNATTRIBUTED
// exactly when no qualifying health event fell inside the window.
struct FailureRecord {
  std::string job_id;
  std::string logical_run_id;
  int attempt_index{0};
  int gpus{0};
  TimePoint end_time{};
  JobState end_state{JobState::Failed};  // FAILED or NODE_FAIL
  FailureCause attributed_cause{FailureCause::Unattributed};
  std::string attributed_node;  // empty when unattributed
  std::vector<FailureCause> co_occurring;  // distinct, in priority order
  std::vector<std::string> nodes;
};

struct AttributionOptions {
  TimeSpan pre_window{TimeSpan::minutes(10)};
  TimeSpan post_window{TimeSpan::minutes(5)};
  // Highest first. Causes absent from the list rank after it, in enum order.
  std::vector<FailureCause> priority{
      FailureCause::GpuUnavailable, FailureCause::NvLink,
      FailureCause::GpuMemory,      FailureCause::Pcie,
      FailureCause::IbLink,         FailureCause::FsMount,
      FailureCause::MainMemory,     FailureCause::EthLink,
      FailureCause::GpuDriver,      FailureCause::SystemService,
      FailureCause::NodeFailCatchall};
};

struct AttributionResult {
  std::vector<FailureRecord> records;
  long long unknown_node_events{0};  // events on nodes absent from the log
};

// Blames each FAILED / NODE_FAIL attempt on the highest-priority cause whose
// health event hit one of the attempt's nodes inside
// [end - pre_window, end + post_window]. Other causes in the window land in
// co_occurring. Both logs must be time-sorted (jobs by end, events by time).
AttributionResult attribute_failures(const std::vector<JobLogEntry>& jobs,
                                     const std::vector<HealthCheckEvent>& events,
                                     const AttributionOptions& opt = {});

struct RateEstimate {
  long long failures{0};
  double exposure_node_days{0.0};
  FailureRate rate{};
  FailureRate ci_lower{};
  FailureRate ci_upper{};
};

// Exact Poisson (Garwood) interval on a per-node-day rate.
std::pair<FailureRate, FailureRate> rate_confidence_interval(
    long long failures, double exposure_node_days, double confidence = 0.90);

// Fleet rate over attempts with gpus > min_gpus: failures are NODE_FAIL
// attempts plus FAILED attempts whose attributed cause is a hardware one;
// exposure is node-days across all qualifying attempts.
RateEstimate estimate_failure_rate(const std::vector<FailureRecord>& records,
                                   const std::vector<JobLogEntry>& jobs,
                                   int min_gpus = 128,
                                   double confidence = 0.90);

// (N_nodes * r_f)^-1 with N_nodes = ceil(gpus / gpus_per_node).
TimeSpan project_mttf(int gpus, FailureRate r_f,
                      int gpus_per_node = kDefaultGpusPerNode);

struct RollingRatePoint {
  TimePoint time{};
  long long failures{0};
  double exposure_node_days{0.0};
  double rate_per_1000_node_days{0.0};
  std::map<FailureCause, long long> by_cause;  // filled when requested
};

// Trailing-window failure rate sampled every step. Exposure comes from
// attempt
// overlap with the window, so partially covered attempts count partially.
std::vector<RollingRatePoint> rolling_failure_rate(
    const std::vector<JobLogEntry>& jobs,
    const std::vector<FailureRecord>& records,
    TimeSpan window = TimeSpan::days(30), bool by_cause = false,
    TimeSpan step = TimeSpan::days(1));

struct SizeBucket {
  int nodes_lo{0};
  int nodes_hi{0};  // inclusive
};

struct MttfSizeRow {
  int nodes_lo{0};
  int nodes_hi{0};
  double mean_nodes{0.0};  // exposure-weighted
  long long attempts{0};
  long long failures{0};
  double exposure_days{0.0};  // job wall-clock, not node-days
  TimeSpan empirical_mttf{};  // +inf when failures = 0
  TimeSpan mttf_ci_lower{};
  TimeSpan mttf_ci_upper{};   // +inf when failures = 0
  TimeSpan projected_mttf{};
  bool zero_failures{false};
};

struct MttfSizeTable {
  std::vector<MttfSizeRow> rows;
  int omitted_empty_buckets{0};
};

// Empirical MTTF per node-count bucket: total attempt runtime over failures
// (NODE_FAIL plus hardware-attributed FAILED), with an inverted Garwood
// interval, next to the 1/N projection at the given base rate.
MttfSizeTable mttf_by_job_size(const std::vector<JobLogEntry>& jobs,
                               const std::vector<FailureRecord>& records,
                               const std::vector<SizeBucket>& buckets,
                               FailureRate r_f,
                               int gpus_per_node = kDefaultGpusPerNode,
                               double confidence = 0.90);

}  // namespace relsim
