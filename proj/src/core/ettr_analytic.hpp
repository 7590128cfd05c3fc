#pragma once

#include <optional>
#include <vector>

#include "core/job_types.hpp"
#include "core/time_types.hpp"

namespace relsim {

// Inputs to the closed-form expected-ETTR model for one job holding n_nodes
// nodes. Rates are per node-day; every duration is a TimeSpan in seconds.
struct EttrParams {
  int n_nodes{1};
  FailureRate failure_rate{};            // per node, r_f
  TimeSpan restart_overhead{};           // u0, paid on every (re)start
  TimeSpan checkpoint_write{};           // w_cp
  TimeSpan checkpoint_interval{};        // dt_cp
  TimeSpan queue_wait{};                 // mean q per interruption
  TimeSpan required_productive{};        // R

  // Aggregate interruption rate across the allocation, per second.
  double lambda_per_second() const {
    return n_nodes * failure_rate.per_second();
  }
  // The model is a first-order expansion; it requires
  // N * r_f * (u0 + dt/2) < 1.
  double regime_term() const {
    return lambda_per_second() *
           (restart_overhead.s + checkpoint_interval.s / 2.0);
  }
  bool valid_regime() const { return regime_term() < 1.0; }
};

struct EttrEstimate {
  double value{0.0};               // expected ETTR, a lower bound on E[ETTR]
  double expected_failures{0.0};   // E[N_f] over the run
  double expected_slowdown{0.0};   // E[S] = E[(Q+U)/R]
  double regime_term{0.0};
  bool is_lower_bound{true};
};

// E[N_f] = R*N*rf*(1 + u0/R + w/dt) / (1 - N*rf*(u0 + dt/2)).
double expected_failures(const EttrParams& p);

// Full closed-form estimate. Raises Errc::regime outside the validity
// region and Errc::domain if inputs are malformed.
EttrEstimate expected_ettr_full(const EttrParams& p);

// Queue-free, overhead-light simplification:
// (1 - N*rf*(u0 + dt/2)) / (1 + w/dt).
double expected_ettr_simplified(const EttrParams& p);

// Checkpoint interval minimizing lost work: sqrt(2*w_cp / (N*rf)).
TimeSpan optimal_checkpoint_interval(TimeSpan checkpoint_write, int n_nodes,
                                     FailureRate rate);

struct IntervalSearch {
  TimeSpan lo{};              // <= 0 picks a default from the params
  TimeSpan hi{};              // <= 0 picks the regime boundary
  int grid_points{240};       // clamped up to 200 minimum
};

// Maximizes expected_ettr_full over the checkpoint interval by log-spaced
// grid scan plus golden-section refinement. Ties resolve to the smaller
// interval. p.checkpoint_interval is ignored.
TimeSpan numeric_optimal_interval(const EttrParams& p,
                                  const IntervalSearch& search = {});

enum class EttrFormula { Simplified, Full };

struct LogRange {
  double lo{0.0};
  double hi{0.0};
  int points{0};
};

struct SweepSpec {
  int n_nodes{1};
  TimeSpan restart_overhead{};
  TimeSpan queue_wait{};
  TimeSpan required_productive{};
  LogRange failure_rate_per_day{};   // r_f axis, per node-day
  LogRange checkpoint_write_s{};     // w_cp axis, seconds
  TimeSpan min_interval{TimeSpan::seconds(10)};
  EttrFormula formula{EttrFormula::Simplified};
};

struct SweepCell {
  double failure_rate_per_day{0.0};
  double checkpoint_write_s{0.0};
  double interval_s{0.0};            // dt actually used
  double ettr{0.0};                  // NaN when the regime is violated
  bool valid{true};
  bool floored{false};               // dt* fell below min_interval
};

struct SweepResult {
  SweepSpec spec;
  std::vector<double> rate_axis;
  std::vector<double> write_axis;
  std::vector<SweepCell> cells;      // row-major: rate index * writes + write index
};

// Evaluates the chosen formula at the per-cell optimal interval across a
// log-spaced (r_f, w_cp) grid.
SweepResult ettr_sweep(const SweepSpec& spec);

struct LogEttrAssumptions {
  TimeSpan restart_overhead{TimeSpan::minutes(5)};
  TimeSpan checkpoint_write{TimeSpan::minutes(5)};
  FailureRate failure_rate{};                  // used for the interval default
  std::optional<TimeSpan> interval_override{}; // else optimal for the job size
  TimeSpan min_total_scheduled{TimeSpan::hours(48)};
};

// Estimates a historical run's ETTR from scheduler logs alone: treats every
// attempt that did not complete as an interruption costing u0 + dt/2 of
// productive time, then discounts checkpoint-write overhead.
double job_run_ettr_from_log(const JobRunRecord& run,
                             const LogEttrAssumptions& assume);

}  // namespace relsim
