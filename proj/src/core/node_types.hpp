#pragma once

#include <string>

#include "core/states.hpp"
#include "core/time_types.hpp"

namespace relsim {

struct Node {
  std::string node_id;
  int gpus{kDefaultGpusPerNode};
  FailureRate base_failure_rate{};
  double lemon_multiplier{1.0};          // ground-truth degradation factor
  NodeState state{NodeState::Available};

  double effective_rate_per_day() const {
    return base_failure_rate.per_node_day * lemon_multiplier;
  }
  double effective_rate_per_second() const {
    return base_failure_rate.per_second() * lemon_multiplier;
  }
};

// One health-check firing on one node.
struct HealthCheckEvent {
  std::string node_id;
  TimePoint time{};
  FailureCause check_kind{FailureCause::Unattributed};
  Severity severity{Severity::High};
  bool is_false_positive{false};
};

// Node state machine edge, recorded for audit and lemon signals.
struct NodeTransition {
  std::string node_id;
  TimePoint time{};
  NodeState from{NodeState::Available};
  NodeState to{NodeState::Available};
  std::string reason;
};

}  // namespace relsim
