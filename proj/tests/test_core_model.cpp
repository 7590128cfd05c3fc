#include <doctest.h>

#include "core/error.hpp"
#include "core/job_types.hpp"
#include "core/node_types.hpp"
#include "core/states.hpp"
#include "core/time_types.hpp"

using namespace relsim;

TEST_CASE("whole nodes are allocated, fractions round up") {
  JobSpec s;
  s.gpus = 1;
  CHECK(nodes_required(s) == 1);
  s.gpus = 8;
  CHECK(nodes_required(s) == 1);
  s.gpus = 9;
  CHECK(nodes_required(s) == 2);
  s.gpus = 16384;
  CHECK(nodes_required(s) == 2048);
  CHECK(nodes_for_gpus(12, 4) == 3);
  CHECK(nodes_for_gpus(13, 4) == 4);
}

TEST_CASE("time span helpers agree with raw seconds") {
  CHECK(TimeSpan::minutes(5).s == doctest::Approx(300.0));
  CHECK(TimeSpan::hours(2).s == doctest::Approx(7200.0));
  CHECK(TimeSpan::days(1).s == doctest::Approx(86400.0));
  CHECK(TimeSpan::hours(1).to_minutes() == doctest::Approx(60.0));
  TimePoint t{100.0};
  CHECK((t + TimeSpan::seconds(50)).s == doctest::Approx(150.0));
  CHECK((TimePoint{250.0} - t).s == doctest::Approx(150.0));
}

TEST_CASE("failure rate converts per-day to per-second in one place") {
  FailureRate r{0.0065};
  CHECK(r.per_second() == doctest::Approx(0.0065 / 86400.0));
  CHECK(FailureRate::per_1000_node_days(6.5).per_node_day ==
        doctest::Approx(0.0065));
}

TEST_CASE("job and node state names round-trip") {
  for (JobState s : {JobState::Pending, JobState::Running, JobState::Completed,
                     JobState::Failed, JobState::NodeFail, JobState::Preempted,
                     JobState::Requeued, JobState::Timeout,
                     JobState::OutOfMemory, JobState::Cancelled})
    CHECK(job_state_from_string(to_string(s)) == s);
  for (NodeState s :
       {NodeState::Available, NodeState::Draining, NodeState::Remediation})
    CHECK(node_state_from_string(to_string(s)) == s);
  for (Severity s : {Severity::High, Severity::Low})
    CHECK(severity_from_string(to_string(s)) == s);
  CHECK_THROWS_AS((void)job_state_from_string("NOT_A_STATE"), Error);
}

TEST_CASE("failure cause names round-trip") {
  for (int i = 0; i < kFailureCauseCount; ++i) {
    auto c = static_cast<FailureCause>(i);
    CHECK(failure_cause_from_string(to_string(c)) == c);
  }
}

TEST_CASE("cause domains separate user, system, and hardware layers") {
  CHECK(cause_domain(FailureCause::Oom).user_program);
  CHECK_FALSE(cause_domain(FailureCause::Oom).hardware_infra);
  CHECK(cause_domain(FailureCause::IbLink).hardware_infra);
  CHECK(cause_domain(FailureCause::GpuMemory).hardware_infra);
  CHECK(cause_domain(FailureCause::FsMount).system_software);
  CHECK_FALSE(cause_domain(FailureCause::FsMount).hardware_infra);
  CHECK_FALSE(cause_domain(FailureCause::GpuDriver).hardware_infra);
  CHECK(cause_domain(FailureCause::NcclTimeout).hardware_infra);
  CHECK(cause_domain(FailureCause::SystemService).hardware_infra);
  CHECK(is_infra_cause(FailureCause::IbLink));
  CHECK_FALSE(is_infra_cause(FailureCause::Oom));
}

TEST_CASE("terminal states never continue") {
  CHECK(is_terminal(JobState::Completed));
  CHECK(is_terminal(JobState::Failed));
  CHECK(is_terminal(JobState::Timeout));
  CHECK(is_terminal(JobState::Cancelled));
  // NODE_FAIL is a run's final state only once requeueing is exhausted.
  CHECK(is_terminal(JobState::NodeFail));
  CHECK_FALSE(is_terminal(JobState::Pending));
  CHECK_FALSE(is_terminal(JobState::Running));
  CHECK_FALSE(is_terminal(JobState::Preempted));
}

TEST_CASE("run-level ETTR is productive over wall clock") {
  JobRunRecord r;
  r.queue_time = TimeSpan::hours(1);
  r.productive_time = TimeSpan::hours(8);
  r.unproductive_time = TimeSpan::hours(1);
  CHECK(ettr_of(r) == doctest::Approx(0.8));
  JobRunRecord empty;
  CHECK_THROWS_AS((void)ettr_of(empty), Error);
}

TEST_CASE("node effective rate scales with the lemon multiplier") {
  Node n;
  n.base_failure_rate = FailureRate{0.02};
  n.lemon_multiplier = 20.0;
  CHECK(n.effective_rate_per_day() == doctest::Approx(0.4));
  CHECK(n.effective_rate_per_second() == doctest::Approx(0.4 / 86400.0));
}
