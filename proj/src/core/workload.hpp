#pragma once

#include <cstdint>
#include <vector>

#include "core/job_types.hpp"

namespace relsim {

// One GPU-count band of the size mix. Sizes below one full node draw
// uniformly from [gpu_lo, gpu_hi]; larger bands draw from doublings of
// gpu_lo capped at gpu_hi.
struct SizeBucketSpec {
  int gpu_lo{1};
  int gpu_hi{1};
  double probability{0.0};
  int priority{0};
};

std::vector<SizeBucketSpec> default_size_mix();

struct WorkloadConfig {
  long long job_count{1000};
  std::vector<SizeBucketSpec> size_buckets = default_size_mix();
  double arrival_rate_per_s{1.0 / 120.0};
  TimeSpan duration_median{TimeSpan::hours(2)};
  double duration_sigma_log{1.5};
  TimeSpan duration_cap{TimeSpan::days(7)};
  TimeSpan checkpoint_interval{TimeSpan::hours(1)};
  TimeSpan checkpoint_write_overhead{TimeSpan::minutes(5)};
  TimeSpan restart_overhead{TimeSpan::minutes(5)};
  uint64_t seed{0};
};

// Draws an open-loop synthetic workload: Poisson arrivals, bucketed sizes,
// log-normal durations. Deterministic in (config, seed).
std::vector<JobSpec> generate_workload(const WorkloadConfig& cfg);

struct StatusRow {
  JobState state{JobState::Pending};
  long long runs{0};
  long long attempts{0};
  double gpu_hours{0.0};  // occupied GPU-time of attempts ending in `state`
};

// Tabulates run outcomes and per-attempt GPU-time by attempt end state.
std::vector<StatusRow> status_breakdown(const std::vector<JobRunRecord>& runs);

struct FlatConfig;  // config_file.hpp

// Round-trippable key=value form. Size buckets appear as repeated
// `bucket = <gpu_lo> <gpu_hi> <probability> <priority>` lines.
FlatConfig workload_config_to_flat(const WorkloadConfig& cfg);
WorkloadConfig workload_config_from_flat(const FlatConfig& flat);

}  // namespace relsim
