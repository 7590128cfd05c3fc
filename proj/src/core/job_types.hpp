#pragma once

#include <string>
#include <vector>

#include "core/states.hpp"
#include "core/time_types.hpp"

namespace relsim {

// Immutable description of a job as submitted. One JobSpec describes a
// logical run; the scheduler may execute it as several attempts.
struct JobSpec {
  std::string job_id;
  std::string logical_run_id;
  int gpus{1};
  int priority{0};
  TimePoint submit_time{};
  TimeSpan required_productive_time{};
  TimeSpan checkpoint_interval{};        // <= 0 disables checkpointing
  TimeSpan checkpoint_write_overhead{};
  TimeSpan restart_overhead{};           // paid at the start of every attempt
  TimeSpan max_lifetime{};               // <= 0 means use the cluster default
};

// Whole nodes are allocated; fractional nodes round up.
int nodes_required(const JobSpec& spec, int gpus_per_node = kDefaultGpusPerNode);
int nodes_for_gpus(int gpus, int gpus_per_node = kDefaultGpusPerNode);

// One scheduler execution of a job.
struct JobAttempt {
  int attempt_index{0};
  TimePoint start_time{};
  TimePoint end_time{};
  JobState end_state{JobState::Pending};
  std::vector<std::string> nodes;
  int checkpoints_written{0};
  TimePoint last_checkpoint_completion{};
  double surviving_productive_s{0.0};    // progress banked by this attempt
  std::string failing_node;              // set when end_state == NodeFail
  std::string preempted_by;              // instigator run when end_state == Preempted
  bool preempted_by_requeued_failure{false};
  bool requeue_after_failure{false};     // attempt exists because a prior one node-failed
};

// Full history of a logical run plus its wall-clock decomposition
// W = queue + productive + unproductive.
struct JobRunRecord {
  std::string logical_run_id;
  JobSpec spec;
  std::vector<JobAttempt> attempts;
  TimeSpan queue_time{};
  TimeSpan productive_time{};
  TimeSpan unproductive_time{};
  JobState final_state{JobState::Pending};
};

// R / (Q + R + U). Raises Errc::domain when the run never consumed wall
// clock (W == 0).
double ettr_of(const JobRunRecord& run);

}  // namespace relsim
