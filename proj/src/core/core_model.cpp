#include <array>
#include <cmath>

#include "core/error.hpp"
#include "core/job_types.hpp"
#include "core/states.hpp"

namespace relsim {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::io: return "io";
    case Errc::parse: return "parse";
    case Errc::domain: return "domain";
    case Errc::regime: return "regime";
    case Errc::internal: return "internal";
  }
  return "unknown";
}

bool is_terminal(JobState s) {
  // Run-level terminality. NODE_FAIL appears as a run's final state only
  // when requeueing is exhausted or disabled; a PREEMPTED attempt always
  // requeues, so PREEMPTED is never terminal for the run.
  switch (s) {
    case JobState::Completed:
    case JobState::Failed:
    case JobState::NodeFail:
    case JobState::Timeout:
    case JobState::OutOfMemory:
    case JobState::Cancelled:
      return true;
    default:
      return false;
  }
}

const char* to_string(JobState s) {
  switch (s) {
    case JobState::Pending: return "PENDING";
    case JobState::Running: return "RUNNING";
    case JobState::Completed: return "COMPLETED";
    case JobState::Failed: return "FAILED";
    case JobState::NodeFail: return "NODE_FAIL";
    case JobState::Preempted: return "PREEMPTED";
    case JobState::Requeued: return "REQUEUED";
    case JobState::Timeout: return "TIMEOUT";
    case JobState::OutOfMemory: return "OUT_OF_MEMORY";
    case JobState::Cancelled: return "CANCELLED";
  }
  return "PENDING";
}

const char* to_string(FailureCause c) {
  switch (c) {
    case FailureCause::Oom: return "OOM";
    case FailureCause::GpuUnavailable: return "GPU_UNAVAILABLE";
    case FailureCause::GpuMemory: return "GPU_MEMORY";
    case FailureCause::GpuDriver: return "GPU_DRIVER";
    case FailureCause::NvLink: return "NVLINK";
    case FailureCause::IbLink: return "IB_LINK";
    case FailureCause::FsMount: return "FS_MOUNT";
    case FailureCause::MainMemory: return "MAIN_MEMORY";
    case FailureCause::EthLink: return "ETHLINK";
    case FailureCause::Pcie: return "PCIE";
    case FailureCause::NcclTimeout: return "NCCL_TIMEOUT";
    case FailureCause::SystemService: return "SYSTEM_SERVICE";
    case FailureCause::NodeFailCatchall: return "NODE_FAIL_CATCHALL";
    case FailureCause::Unattributed: return "UNATTRIBUTED";
  }
  return "UNATTRIBUTED";
}

const char* to_string(Severity s) {
  return s == Severity::High ? "HIGH" : "LOW";
}

const char* to_string(NodeState s) {
  switch (s) {
    case NodeState::Available: return "AVAILABLE";
    case NodeState::Draining: return "DRAINING";
    case NodeState::Remediation: return "REMEDIATION";
  }
  return "AVAILABLE";
}

JobState job_state_from_string(std::string_view s) {
  static constexpr std::array<JobState, 10> all = {
      JobState::Pending,   JobState::Running,  JobState::Completed,
      JobState::Failed,    JobState::NodeFail, JobState::Preempted,
      JobState::Requeued,  JobState::Timeout,  JobState::OutOfMemory,
      JobState::Cancelled};
  for (JobState v : all)
    if (s == to_string(v)) return v;
  raise(Errc::parse, "unknown job state: " + std::string(s));
}

FailureCause failure_cause_from_string(std::string_view s) {
  for (int i = 0; i < kFailureCauseCount; ++i) {
    auto c = static_cast<FailureCause>(i);
    if (s == to_string(c)) return c;
  }
  raise(Errc::parse, "unknown failure cause: " + std::string(s));
}

Severity severity_from_string(std::string_view s) {
  if (s == "HIGH") return Severity::High;
  if (s == "LOW") return Severity::Low;
  raise(Errc::parse, "unknown severity: " + std::string(s));
}

NodeState node_state_from_string(std::string_view s) {
  if (s == "AVAILABLE") return NodeState::Available;
  if (s == "DRAINING") return NodeState::Draining;
  if (s == "REMEDIATION") return NodeState::Remediation;
  raise(Errc::parse, "unknown node state: " + std::string(s));
}

CauseDomain cause_domain(FailureCause c) {
  // {user_program, system_software, hardware_infra}
  switch (c) {
    case FailureCause::Oom: return {true, false, false};
    case FailureCause::GpuUnavailable: return {false, true, true};
    case FailureCause::GpuMemory: return {false, false, true};
    case FailureCause::GpuDriver: return {false, true, false};
    case FailureCause::NvLink: return {false, false, true};
    case FailureCause::IbLink: return {false, false, true};
    case FailureCause::FsMount: return {false, true, false};
    case FailureCause::MainMemory: return {false, false, true};
    case FailureCause::EthLink: return {false, false, true};
    case FailureCause::Pcie: return {false, false, true};
    case FailureCause::NcclTimeout: return {true, true, true};
    case FailureCause::SystemService: return {true, true, true};
    case FailureCause::NodeFailCatchall: return {false, false, true};
    case FailureCause::Unattributed: return {false, false, false};
  }
  return {false, false, false};
}

bool is_infra_cause(FailureCause c) {
  CauseDomain d = cause_domain(c);
  return d.system_software || d.hardware_infra;
}

int nodes_for_gpus(int gpus, int gpus_per_node) {
  require(gpus > 0, Errc::invalid_argument, "gpus must be positive");
  require(gpus_per_node > 0, Errc::invalid_argument,
          "gpus_per_node must be positive");
  return (gpus + gpus_per_node - 1) / gpus_per_node;
}

int nodes_required(const JobSpec& spec, int gpus_per_node) {
  return nodes_for_gpus(spec.gpus, gpus_per_node);
}

double ettr_of(const JobRunRecord& run) {
  double w = run.queue_time.s + run.productive_time.s + run.unproductive_time.s;
  require(w > 0.0, Errc::domain,
          "run " + run.logical_run_id + " consumed no wall clock");
  return run.productive_time.s / w;
}

}  // namespace relsim
