#include "core/failure_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "core/error.hpp"
#include "core/states.hpp"

namespace relsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool counts_as_infra_failure(const FailureRecord& r) {
  if (r.end_state == JobState::NodeFail) return true;
  return r.end_state == JobState::Failed &&
         cause_domain(r.attributed_cause).hardware_infra;
}

}  // namespace

void flatten_attempts_into(std::vector<JobLogEntry>& out,
                           const JobRunRecord& run) {
  for (const JobAttempt& a : run.attempts) {
    JobLogEntry e;
    e.job_id = run.spec.job_id;
    e.logical_run_id = run.logical_run_id;
    e.attempt_index = a.attempt_index;
    e.gpus = run.spec.gpus;
    e.start = a.start_time;
    e.end = a.end_time;
    e.end_state = a.end_state;
    e.nodes = a.nodes;
    e.failing_node = a.failing_node;
    out.push_back(std::move(e));
  }
}

std::vector<JobLogEntry> flatten_attempts(
    const std::vector<JobRunRecord>& runs) {
  std::vector<JobLogEntry> out;
  for (const JobRunRecord& run : runs) flatten_attempts_into(out, run);
  return out;
}

void sort_by_end_time(std::vector<JobLogEntry>& log) {
  std::stable_sort(log.begin(), log.end(),
                   [](const JobLogEntry& a, const JobLogEntry& b) {
                     if (a.end.s != b.end.s) return a.end.s < b.end.s;
                     if (a.job_id != b.job_id) return a.job_id < b.job_id;
                     return a.attempt_index < b.attempt_index;
                   });
}

AttributionResult attribute_failures(const std::vector<JobLogEntry>& jobs,
                                     const std::vector<HealthCheckEvent>& events,
                                     const AttributionOptions& opt) {
  require(opt.pre_window.s >= 0.0 && opt.post_window.s >= 0.0,
          Errc::invalid_argument, "attribution windows must be non-negative");
  for (size_t i = 1; i < jobs.size(); ++i)
    require(jobs[i - 1].end.s <= jobs[i].end.s, Errc::invalid_argument,
            "job log not sorted by end time");
  for (size_t i = 1; i < events.size(); ++i)
    require(events[i - 1].time.s <= events[i].time.s, Errc::invalid_argument,
            "health event log not sorted by time");

  // rank: position in the configured priority order; unlisted causes rank
  // after the whole list, in enum order.
  std::vector<int> rank(kFailureCauseCount, 0);
  for (int c = 0; c < kFailureCauseCount; ++c)
    rank[c] = static_cast<int>(opt.priority.size()) + c;
  for (size_t i = 0; i < opt.priority.size(); ++i)
    rank[static_cast<int>(opt.priority[i])] = static_cast<int>(i);

  std::set<std::string> known_nodes;
  for (const JobLogEntry& j : jobs)
    known_nodes.insert(j.nodes.begin(), j.nodes.end());

  AttributionResult out;
  for (const HealthCheckEvent& e : events)
    if (!known_nodes.count(e.node_id)) ++out.unknown_node_events;

  for (const JobLogEntry& j : jobs) {
    if (j.end_state != JobState::Failed && j.end_state != JobState::NodeFail)
      continue;
    double lo = j.end.s - opt.pre_window.s;
    double hi = j.end.s + opt.post_window.s;
    auto first = std::lower_bound(
        events.begin(), events.end(), lo,
        [](const HealthCheckEvent& e, double t) { return e.time.s < t; });
    std::set<std::string> my_nodes(j.nodes.begin(), j.nodes.end());

    // Earliest hit per cause; ties on time break toward the smaller node id.
    struct Hit {
      double t;
      std::string node;
    };
    std::map<int, Hit> hits;  // cause -> earliest event
    for (auto it = first; it != events.end() && it->time.s <= hi; ++it) {
      if (!my_nodes.count(it->node_id)) continue;
      int c = static_cast<int>(it->check_kind);
      auto [pos, fresh] = hits.try_emplace(c, Hit{it->time.s, it->node_id});
      if (!fresh && (it->time.s < pos->second.t ||
                     (it->time.s == pos->second.t &&
                      it->node_id < pos->second.node)))
        pos->second = {it->time.s, it->node_id};
    }

    FailureRecord rec;
    rec.job_id = j.job_id;
    rec.logical_run_id = j.logical_run_id;
    rec.attempt_index = j.attempt_index;
    rec.gpus = j.gpus;
    rec.end_time = j.end;
    rec.end_state = j.end_state;
    rec.nodes = j.nodes;
    if (!hits.empty()) {
      std::vector<int> causes;
      causes.reserve(hits.size());
      for (const auto& [c, h] : hits) {
        (void)h;
        causes.push_back(c);
      }
      std::sort(causes.begin(), causes.end(),
                [&](int a, int b) { return rank[a] < rank[b]; });
      rec.attributed_cause = static_cast<FailureCause>(causes.front());
      rec.attributed_node = hits.at(causes.front()).node;
      for (size_t k = 1; k < causes.size(); ++k)
        rec.co_occurring.push_back(static_cast<FailureCause>(causes[k]));
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::pair<FailureRate, FailureRate> rate_confidence_interval(
    long long failures, double exposure_node_days, double confidence) {
  require(exposure_node_days > 0.0, Errc::invalid_argument,
          "exposure must be positive");
  require(failures >= 0, Errc::invalid_argument,
          "failure count must be non-negative");
  RateInterval iv = garwood_interval(failures, exposure_node_days, confidence);
  return {FailureRate{iv.lower}, FailureRate{iv.upper}};
}

RateEstimate estimate_failure_rate(const std::vector<FailureRecord>& records,
                                   const std::vector<JobLogEntry>& jobs,
                                   int min_gpus, double confidence) {
  RateEstimate est;
  for (const JobLogEntry& j : jobs) {
    if (j.gpus <= min_gpus) continue;
    est.exposure_node_days += (j.end.s - j.start.s) / kSecondsPerDay *
                              static_cast<double>(j.nodes.size());
  }
  require(est.exposure_node_days > 0.0, Errc::domain,
          "no exposure above the GPU-count floor");
  for (const FailureRecord& r : records) {
    if (r.gpus <= min_gpus) continue;
    if (counts_as_infra_failure(r)) ++est.failures;
  }
  est.rate.per_node_day =
      static_cast<double>(est.failures) / est.exposure_node_days;
  auto [lo, hi] =
      rate_confidence_interval(est.failures, est.exposure_node_days,
                               confidence);
  est.ci_lower = lo;
  est.ci_upper = hi;
  return est;
}

TimeSpan project_mttf(int gpus, FailureRate r_f, int gpus_per_node) {
  require(gpus >= 1, Errc::invalid_argument, "gpus must be >= 1");
  require(gpus_per_node >= 1, Errc::invalid_argument,
          "gpus_per_node must be >= 1");
  require(r_f.per_node_day > 0.0, Errc::domain, "infinite MTTF at zero rate");
  int nodes = (gpus + gpus_per_node - 1) / gpus_per_node;
  return TimeSpan{kSecondsPerDay / (nodes * r_f.per_node_day)};
}

std::vector<RollingRatePoint> rolling_failure_rate(
    const std::vector<JobLogEntry>& jobs,
    const std::vector<FailureRecord>& records, TimeSpan window, bool by_cause,
    TimeSpan step) {
  require(window.s > 0.0, Errc::invalid_argument, "window must be positive");
  require(step.s > 0.0, Errc::invalid_argument, "step must be positive");
  if (jobs.empty()) return {};

  double t0 = kInf, t1 = -kInf;
  for (const JobLogEntry& j : jobs) {
    t0 = std::min(t0, j.start.s);
    t1 = std::max(t1, j.end.s);
  }
  auto points_end =
      static_cast<long long>(std::ceil((t1 - t0) / step.s));
  if (points_end < 1) points_end = 1;

  std::vector<RollingRatePoint> out;
  out.reserve(static_cast<size_t>(points_end));
  for (long long k = 1; k <= points_end; ++k) {
    double t = t0 + static_cast<double>(k) * step.s;
    double wlo = t - window.s;
    RollingRatePoint p;
    p.time = TimePoint{t};
    for (const JobLogEntry& j : jobs) {
      double ov = std::min(j.end.s, t) - std::max(j.start.s, wlo);
      if (ov > 0.0)
        p.exposure_node_days +=
            ov / kSecondsPerDay * static_cast<double>(j.nodes.size());
    }
    for (const FailureRecord& r : records) {
      if (r.end_time.s <= wlo || r.end_time.s > t) continue;
      ++p.failures;
      if (by_cause) ++p.by_cause[r.attributed_cause];
    }
    if (p.exposure_node_days > 0.0)
      p.rate_per_1000_node_days =
          static_cast<double>(p.failures) / p.exposure_node_days * 1000.0;
    out.push_back(std::move(p));
  }
  return out;
}

MttfSizeTable mttf_by_job_size(const std::vector<JobLogEntry>& jobs,
                               const std::vector<FailureRecord>& records,
                               const std::vector<SizeBucket>& buckets,
                               FailureRate r_f, int gpus_per_node,
                               double confidence) {
  require(!buckets.empty(), Errc::invalid_argument, "no size buckets given");
  require(r_f.per_node_day > 0.0, Errc::domain,
          "projection needs a positive base rate");
  require(gpus_per_node >= 1, Errc::invalid_argument,
          "gpus_per_node must be >= 1");
  for (const SizeBucket& b : buckets)
    require(b.nodes_lo >= 1 && b.nodes_hi >= b.nodes_lo,
            Errc::invalid_argument, "malformed size bucket");

  MttfSizeTable table;
  for (const SizeBucket& b : buckets) {
    MttfSizeRow row;
    row.nodes_lo = b.nodes_lo;
    row.nodes_hi = b.nodes_hi;
    double node_weight = 0.0;
    for (const JobLogEntry& j : jobs) {
      int n = static_cast<int>(j.nodes.size());
      if (n < b.nodes_lo || n > b.nodes_hi) continue;
      double dur_days = (j.end.s - j.start.s) / kSecondsPerDay;
      ++row.attempts;
      row.exposure_days += dur_days;
      node_weight += dur_days * n;
    }
    if (row.exposure_days <= 0.0) {
      ++table.omitted_empty_buckets;
      continue;
    }
    row.mean_nodes = node_weight / row.exposure_days;
    for (const FailureRecord& r : records) {
      int n = static_cast<int>(r.nodes.size());
      if (n < b.nodes_lo || n > b.nodes_hi) continue;
      if (counts_as_infra_failure(r)) ++row.failures;
    }
    row.zero_failures = row.failures == 0;
    row.empirical_mttf =
        row.zero_failures
            ? TimeSpan{kInf}
            : TimeSpan::days(row.exposure_days /
                             static_cast<double>(row.failures));
    RateInterval iv =
        garwood_interval(row.failures, row.exposure_days, confidence);
    row.mttf_ci_lower = TimeSpan::days(1.0 / iv.upper);
    row.mttf_ci_upper =
        iv.lower > 0.0 ? TimeSpan::days(1.0 / iv.lower) : TimeSpan{kInf};
    row.projected_mttf =
        TimeSpan{kSecondsPerDay / (row.mean_nodes * r_f.per_node_day)};
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace relsim
