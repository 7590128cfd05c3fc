#pragma once

#include <string>
#include <string_view>

namespace relsim {

// Scheduler-visible lifecycle of one job attempt.
enum class JobState {
  Pending,
  Running,
  Completed,
  Failed,
  NodeFail,
  Preempted,
  Requeued,
  Timeout,
  OutOfMemory,
  Cancelled,
};

// Terminal states never transition again.
bool is_terminal(JobState s);

// Root-cause categories attached to health-check events and attributed
// failures. NodeFailCatchall covers nodes that stop heartbeating without a
// more specific check firing; Unattributed marks a failure with no
// qualifying health event.
enum class FailureCause {
  Oom,
  GpuUnavailable,
  GpuMemory,
  GpuDriver,
  NvLink,
  IbLink,
  FsMount,
  MainMemory,
  EthLink,
  Pcie,
  NcclTimeout,
  SystemService,
  NodeFailCatchall,
  Unattributed,
};

inline constexpr int kFailureCauseCount = 14;

// Which layers a cause can originate from.
struct CauseDomain {
  bool user_program{false};
  bool system_software{false};
  bool hardware_infra{false};
};

CauseDomain cause_domain(FailureCause c);

// True when the cause implicates the platform rather than only user code.
bool is_infra_cause(FailureCause c);

enum class Severity { High, Low };

enum class NodeState { Available, Draining, Remediation };

const char* to_string(JobState s);
const char* to_string(FailureCause c);
const char* to_string(Severity s);
const char* to_string(NodeState s);

JobState job_state_from_string(std::string_view s);
FailureCause failure_cause_from_string(std::string_view s);
Severity severity_from_string(std::string_view s);
NodeState node_state_from_string(std::string_view s);

}  // namespace relsim
