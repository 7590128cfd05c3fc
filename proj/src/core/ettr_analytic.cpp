#include "core/ettr_analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/error.hpp"

namespace relsim {

namespace {

void check_common(const EttrParams& p, bool needs_interval) {
  require(p.n_nodes >= 1, Errc::invalid_argument, "n_nodes must be >= 1");
  require(p.failure_rate.per_node_day >= 0.0, Errc::invalid_argument,
          "failure rate must be non-negative");
  require(p.restart_overhead.s >= 0.0, Errc::invalid_argument,
          "restart overhead must be non-negative");
  require(p.checkpoint_write.s >= 0.0, Errc::invalid_argument,
          "checkpoint write cost must be non-negative");
  require(p.queue_wait.s >= 0.0, Errc::invalid_argument,
          "queue wait must be non-negative");
  if (needs_interval)
    require(p.checkpoint_interval.s > 0.0, Errc::invalid_argument,
            "checkpoint interval must be positive");
}

void check_regime(const EttrParams& p) {
  if (!p.valid_regime())
    raise(Errc::regime,
          "formula regime violated: N*r_f*(u0 + dt/2) = " +
              std::to_string(p.regime_term()) + " >= 1");
}

}  // namespace

double expected_failures(const EttrParams& p) {
  check_common(p, true);
  require(p.required_productive.s > 0.0, Errc::invalid_argument,
          "required productive time must be positive");
  check_regime(p);
  double lam = p.lambda_per_second();
  double r = p.required_productive.s;
  double u0 = p.restart_overhead.s;
  double w = p.checkpoint_write.s;
  double dt = p.checkpoint_interval.s;
  return r * lam * (1.0 + u0 / r + w / dt) /
         (1.0 - lam * (u0 + dt / 2.0));
}

EttrEstimate expected_ettr_full(const EttrParams& p) {
  check_common(p, true);
  require(p.required_productive.s > 0.0, Errc::invalid_argument,
          "required productive time must be positive");
  check_regime(p);

  double lam = p.lambda_per_second();
  double r = p.required_productive.s;
  double u0 = p.restart_overhead.s;
  double w = p.checkpoint_write.s;
  double dt = p.checkpoint_interval.s;
  double q = p.queue_wait.s;

  double numerator = 1.0 - lam * (u0 + dt / 2.0);
  double denominator = 1.0 + (u0 + q) / r + w / dt +
                       lam * q * (1.0 + w / dt - dt / (2.0 * r));

  EttrEstimate est;
  est.regime_term = p.regime_term();
  est.expected_failures = expected_failures(p);
  est.value = numerator / denominator;
  // E[S] decomposition: restarts and queue waits per interruption, half an
  // interval of lost work per interruption, plus steady checkpoint writes.
  double nf = est.expected_failures;
  est.expected_slowdown =
      ((nf + 1.0) * (q + u0) + nf * dt / 2.0 + r * (w / dt)) / r;
  require(est.value > 0.0 && est.value <= 1.0, Errc::domain,
          "parameters fall outside the model's validity region");
  return est;
}

double expected_ettr_simplified(const EttrParams& p) {
  check_common(p, true);
  check_regime(p);
  double lam = p.lambda_per_second();
  double u0 = p.restart_overhead.s;
  double w = p.checkpoint_write.s;
  double dt = p.checkpoint_interval.s;
  return (1.0 - lam * (u0 + dt / 2.0)) / (1.0 + w / dt);
}

TimeSpan optimal_checkpoint_interval(TimeSpan checkpoint_write, int n_nodes,
                                     FailureRate rate) {
  require(checkpoint_write.s >= 0.0, Errc::invalid_argument,
          "checkpoint write cost must be non-negative");
  require(n_nodes >= 1, Errc::invalid_argument, "n_nodes must be >= 1");
  require(rate.per_node_day > 0.0, Errc::domain,
          "optimal interval is undefined at zero failure rate");
  double lam = n_nodes * rate.per_second();
  return TimeSpan::seconds(std::sqrt(2.0 * checkpoint_write.s / lam));
}

namespace {

// Evaluates the full formula, mapping regime violations to -inf so the
// optimizer can treat them as infeasible instead of propagating errors.
double objective(EttrParams p, double dt) {
  p.checkpoint_interval = TimeSpan::seconds(dt);
  if (!p.valid_regime()) return -std::numeric_limits<double>::infinity();
  return expected_ettr_full(p).value;
}

}  // namespace

TimeSpan numeric_optimal_interval(const EttrParams& p,
                                  const IntervalSearch& search) {
  check_common(p, false);
  require(p.required_productive.s > 0.0, Errc::invalid_argument,
          "required productive time must be positive");
  double lam = p.lambda_per_second();
  require(lam > 0.0, Errc::domain,
          "numeric interval search is undefined at zero failure rate");

  // Regime boundary: lam*(u0 + dt/2) < 1  =>  dt < 2*(1/lam - u0).
  double boundary = 2.0 * (1.0 / lam - p.restart_overhead.s);
  require(boundary > 0.0, Errc::regime,
          "no feasible checkpoint interval: restart overhead alone exceeds "
          "the mean time between failures");

  double lo = search.lo.s > 0.0 ? search.lo.s : 1.0;
  double hi = search.hi.s > 0.0 ? search.hi.s : 0.999 * boundary;
  require(lo > 0.0 && hi > lo, Errc::invalid_argument,
          "interval search bounds must satisfy 0 < lo < hi");
  int n = std::max(search.grid_points, 200);

  // Log-spaced scan; strict improvement keeps the smallest tied argmax.
  double best_dt = lo;
  double best_val = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  double ratio = hi / lo;
  for (int i = 0; i < n; ++i) {
    double dt = lo * std::pow(ratio, static_cast<double>(i) / (n - 1));
    double v = objective(p, dt);
    if (v > best_val) {
      best_val = v;
      best_dt = dt;
      best_i = i;
    }
  }
  require(std::isfinite(best_val), Errc::regime,
          "no feasible checkpoint interval in the search range");

  // Golden-section refinement around the best grid cell. The equality
  // branch shrinks from the right, so plateaus resolve to the smaller
  // interval.
  double a = lo * std::pow(ratio, static_cast<double>(std::max(0, best_i - 1)) / (n - 1));
  double b = lo * std::pow(ratio, static_cast<double>(std::min(n - 1, best_i + 1)) / (n - 1));
  const double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = objective(p, x1);
  double f2 = objective(p, x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = objective(p, x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = objective(p, x1);
    }
  }
  double refined = 0.5 * (a + b);
  return TimeSpan::seconds(objective(p, refined) >= best_val ? refined
                                                             : best_dt);
}

namespace {

std::vector<double> log_axis(const LogRange& r, const char* what) {
  require(r.points >= 2, Errc::invalid_argument,
          std::string(what) + " axis needs at least 2 points");
  require(r.lo > 0.0 && r.hi >= r.lo, Errc::invalid_argument,
          std::string(what) + " axis needs 0 < lo <= hi");
  std::vector<double> axis(r.points);
  double ratio = r.hi / r.lo;
  for (int i = 0; i < r.points; ++i)
    axis[i] = r.lo * std::pow(ratio, static_cast<double>(i) / (r.points - 1));
  return axis;
}

}  // namespace

SweepResult ettr_sweep(const SweepSpec& spec) {
  require(spec.n_nodes >= 1, Errc::invalid_argument, "n_nodes must be >= 1");
  require(spec.min_interval.s > 0.0, Errc::invalid_argument,
          "min_interval must be positive");
  if (spec.formula == EttrFormula::Full)
    require(spec.required_productive.s > 0.0, Errc::invalid_argument,
            "full formula needs required productive time");

  SweepResult out;
  out.spec = spec;
  out.rate_axis = log_axis(spec.failure_rate_per_day, "failure-rate");
  out.write_axis = log_axis(spec.checkpoint_write_s, "checkpoint-write");
  out.cells.reserve(out.rate_axis.size() * out.write_axis.size());

  for (double rf : out.rate_axis) {
    for (double w : out.write_axis) {
      SweepCell cell;
      cell.failure_rate_per_day = rf;
      cell.checkpoint_write_s = w;
      EttrParams p;
      p.n_nodes = spec.n_nodes;
      p.failure_rate = FailureRate{rf};
      p.restart_overhead = spec.restart_overhead;
      p.checkpoint_write = TimeSpan::seconds(w);
      p.queue_wait = spec.queue_wait;
      p.required_productive = spec.required_productive;
      TimeSpan dt = optimal_checkpoint_interval(TimeSpan::seconds(w),
                                                spec.n_nodes, FailureRate{rf});
      if (dt.s < spec.min_interval.s) {
        dt = spec.min_interval;
        cell.floored = true;
      }
      p.checkpoint_interval = dt;
      cell.interval_s = dt.s;
      if (!p.valid_regime()) {
        cell.valid = false;
        cell.ettr = std::numeric_limits<double>::quiet_NaN();
      } else {
        cell.ettr = spec.formula == EttrFormula::Full
                        ? expected_ettr_full(p).value
                        : expected_ettr_simplified(p);
      }
      out.cells.push_back(cell);
    }
  }
  return out;
}

double job_run_ettr_from_log(const JobRunRecord& run,
                             const LogEttrAssumptions& assume) {
  require(!run.attempts.empty(), Errc::domain,
          "run " + run.logical_run_id + " has no attempts");

  double total_scheduled = 0.0;
  int max_nodes = 0;
  long long interruptions = 0;
  for (const JobAttempt& a : run.attempts) {
    double d = a.end_time.s - a.start_time.s;
    require(d >= 0.0, Errc::domain, "attempt with negative duration");
    total_scheduled += d;
    max_nodes = std::max(max_nodes, static_cast<int>(a.nodes.size()));
    if (a.end_state != JobState::Completed) ++interruptions;
  }
  require(total_scheduled >= assume.min_total_scheduled.s, Errc::domain,
          "run " + run.logical_run_id +
              " has too little scheduled time for a stable estimate");

  int n = max_nodes > 0 ? max_nodes : nodes_required(run.spec);
  double dt;
  if (assume.interval_override.has_value()) {
    dt = assume.interval_override->s;
    require(dt > 0.0, Errc::invalid_argument,
            "interval override must be positive");
  } else {
    dt = optimal_checkpoint_interval(assume.checkpoint_write, n,
                                     assume.failure_rate)
             .s;
    require(dt > 0.0, Errc::domain,
            "zero optimal interval; pass an interval override");
  }

  double u0 = assume.restart_overhead.s;
  double w = assume.checkpoint_write.s;
  double r_est = (total_scheduled - interruptions * (u0 + dt / 2.0)) /
                 (1.0 + w / dt);
  r_est = std::max(0.0, r_est);

  // Queue time is recomputed from the log so the estimate does not depend
  // on the producer having filled the aggregate field.
  double queue = std::max(0.0, run.attempts.front().start_time.s -
                                   run.spec.submit_time.s);
  for (size_t i = 1; i < run.attempts.size(); ++i)
    queue += std::max(0.0, run.attempts[i].start_time.s -
                               run.attempts[i - 1].end_time.s);

  return r_est / (queue + total_scheduled);
}

}  // namespace relsim
