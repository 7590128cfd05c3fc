#include "core/lemon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "core/config_file.hpp"
#include "core/error.hpp"

namespace relsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

const std::vector<std::string>& lemon_signal_names() {
  static const std::vector<std::string> names = {
      "excl_jobid_count",      "xid_cnt",
      "tickets",               "out_count",
      "multi_node_node_fails", "single_node_node_fails",
      "single_node_node_failure_rate"};
  return names;
}

double signal_value(const NodeSignals& s, const std::string& name) {
  if (name == "excl_jobid_count") return static_cast<double>(s.excl_jobid_count);
  if (name == "xid_cnt") return static_cast<double>(s.xid_cnt);
  if (name == "tickets") return static_cast<double>(s.tickets);
  if (name == "out_count") return static_cast<double>(s.out_count);
  if (name == "multi_node_node_fails")
    return static_cast<double>(s.multi_node_node_fails);
  if (name == "single_node_node_fails")
    return static_cast<double>(s.single_node_node_fails);
  if (name == "single_node_node_failure_rate")
    return s.single_node_node_failure_rate;
  raise(Errc::invalid_argument, "unknown lemon signal: " + name);
}

std::vector<NodeSignals> compute_node_signals(
    const std::vector<JobLogEntry>& jobs,
    const std::vector<HealthCheckEvent>& events,
    const std::vector<NodeTransition>& transitions,
    const std::vector<std::string>& node_ids, TimePoint as_of, TimeSpan window,
    std::optional<TimePoint> log_begin) {
  require(window.s > 0.0, Errc::invalid_argument, "window must be positive");
  require(!node_ids.empty(), Errc::invalid_argument, "empty node universe");

  double begin;
  if (log_begin) {
    begin = log_begin->s;
  } else {
    begin = kInf;
    for (const JobLogEntry& j : jobs) begin = std::min(begin, j.start.s);
    for (const HealthCheckEvent& e : events) begin = std::min(begin, e.time.s);
    for (const NodeTransition& t : transitions)
      begin = std::min(begin, t.time.s);
    if (!std::isfinite(begin)) begin = 0.0;
  }
  require(as_of.s - window.s >= begin - 1e-6, Errc::domain,
          "window reaches back before the log begins");

  std::map<std::string, size_t> idx;
  for (size_t i = 0; i < node_ids.size(); ++i) {
    require(idx.emplace(node_ids[i], i).second, Errc::invalid_argument,
            "duplicate node id: " + node_ids[i]);
  }
  const size_t n = node_ids.size();
  std::vector<std::set<std::string>> excl(n);
  std::vector<std::set<int>> kinds(n);
  std::vector<NodeSignals> out(n);
  std::vector<long long> hosted_single(n, 0);

  double wlo = as_of.s - window.s;
  auto in_window = [&](double t) { return t > wlo && t <= as_of.s; };

  for (const JobLogEntry& j : jobs) {
    if (!in_window(j.end.s)) continue;
    if (j.nodes.size() == 1) {
      auto it = idx.find(j.nodes.front());
      if (it != idx.end()) ++hosted_single[it->second];
    }
    if (j.end_state == JobState::NodeFail && !j.failing_node.empty()) {
      auto it = idx.find(j.failing_node);
      if (it == idx.end()) continue;
      excl[it->second].insert(j.job_id);
      if (j.nodes.size() > 1)
        ++out[it->second].multi_node_node_fails;
      else
        ++out[it->second].single_node_node_fails;
    }
  }
  for (const HealthCheckEvent& e : events) {
    if (!in_window(e.time.s)) continue;
    auto it = idx.find(e.node_id);
    if (it != idx.end()) kinds[it->second].insert(static_cast<int>(e.check_kind));
  }
  for (const NodeTransition& t : transitions) {
    if (!in_window(t.time.s)) continue;
    auto it = idx.find(t.node_id);
    if (it == idx.end()) continue;
    if (t.to == NodeState::Remediation) ++out[it->second].tickets;
    if (t.from == NodeState::Available && t.to != NodeState::Available)
      ++out[it->second].out_count;
  }

  for (size_t i = 0; i < n; ++i) {
    out[i].node_id = node_ids[i];
    out[i].excl_jobid_count = static_cast<long long>(excl[i].size());
    out[i].xid_cnt = static_cast<long long>(kinds[i].size());
    out[i].single_node_node_failure_rate =
        hosted_single[i] > 0
            ? static_cast<double>(out[i].single_node_node_fails) /
                  static_cast<double>(hosted_single[i])
            : 0.0;
    out[i].window = window;
  }
  return out;
}

std::string LemonThresholds::id() const {
  FlatConfig flat;
  flat.entries.reserve(cutoffs.size());
  for (const auto& [name, cut] : cutoffs)
    flat.entries.emplace_back(name, std::to_string(cut));
  return config_hash(flat);
}

std::vector<LemonVerdict> classify_lemons(
    const std::vector<NodeSignals>& signals, const LemonThresholds& thresholds,
    LemonRule rule, int k) {
  require(!thresholds.cutoffs.empty(), Errc::invalid_argument,
          "no signal cutoffs configured");
  const std::vector<std::string>& known = lemon_signal_names();
  for (const auto& [name, cut] : thresholds.cutoffs) {
    (void)cut;
    require(std::find(known.begin(), known.end(), name) != known.end(),
            Errc::invalid_argument, "unknown lemon signal: " + name);
  }
  int need = 1;
  if (rule == LemonRule::KOfN) {
    require(k >= 1 && k <= static_cast<int>(thresholds.cutoffs.size()),
            Errc::invalid_argument, "k out of range for k-of-n rule");
    need = k;
  }

  std::string set_id = thresholds.id();
  std::vector<LemonVerdict> out;
  out.reserve(signals.size());
  for (const NodeSignals& s : signals) {
    LemonVerdict v;
    v.node_id = s.node_id;
    v.threshold_set_id = set_id;
    for (const auto& [name, cut] : thresholds.cutoffs)
      if (signal_value(s, name) > cut) v.triggering_signals.push_back(name);
    v.flagged = static_cast<int>(v.triggering_signals.size()) >= need;
    out.push_back(std::move(v));
  }
  return out;
}

DetectionMetrics evaluate_detection(
    const std::vector<LemonVerdict>& verdicts,
    const std::vector<std::string>& true_lemons) {
  std::set<std::string> universe, flagged;
  for (const LemonVerdict& v : verdicts) {
    require(universe.insert(v.node_id).second, Errc::invalid_argument,
            "duplicate verdict for node: " + v.node_id);
    if (v.flagged) flagged.insert(v.node_id);
  }
  std::set<std::string> truth(true_lemons.begin(), true_lemons.end());
  for (const std::string& id : truth)
    require(universe.count(id), Errc::invalid_argument,
            "ground-truth node missing from verdicts: " + id);

  DetectionMetrics m;
  for (const std::string& id : flagged) {
    if (truth.count(id))
      ++m.true_positives;
    else
      ++m.false_positives;
  }
  m.false_negatives = static_cast<long long>(truth.size()) - m.true_positives;
  m.true_negatives = static_cast<long long>(universe.size()) -
                     m.true_positives - m.false_positives - m.false_negatives;
  m.precision = (m.true_positives + m.false_positives) > 0
                    ? static_cast<double>(m.true_positives) /
                          static_cast<double>(m.true_positives +
                                              m.false_positives)
                    : 1.0;
  m.recall = !truth.empty() ? static_cast<double>(m.true_positives) /
                                  static_cast<double>(truth.size())
                            : 1.0;
  long long healthy = m.false_positives + m.true_negatives;
  m.false_positive_rate =
      healthy > 0 ? static_cast<double>(m.false_positives) /
                        static_cast<double>(healthy)
                  : 0.0;
  m.flagged_fraction =
      !universe.empty() ? static_cast<double>(flagged.size()) /
                              static_cast<double>(universe.size())
                        : 0.0;
  return m;
}

TuneResult tune_thresholds(const std::vector<NodeSignals>& signals,
                           const std::vector<std::string>& true_lemons,
                           const TuneOptions& opt) {
  require(!signals.empty(), Errc::invalid_argument, "no signals to tune on");
  require(!opt.signals.empty(), Errc::invalid_argument,
          "tuner needs at least one signal");
  require(opt.recall_floor >= 0.0 && opt.recall_floor <= 1.0,
          Errc::invalid_argument, "recall floor must lie in [0,1]");
  require(opt.max_candidates_per_signal >= 2, Errc::invalid_argument,
          "need at least two cutoff candidates per signal");

  const size_t nsig = opt.signals.size();
  const size_t nn = signals.size();

  // Value matrix and per-signal cutoff candidates (quantiles plus the max,
  // which disables the signal under the strict-exceed rule).
  std::vector<std::vector<double>> vals(nn, std::vector<double>(nsig));
  for (size_t i = 0; i < nn; ++i)
    for (size_t j = 0; j < nsig; ++j)
      vals[i][j] = signal_value(signals[i], opt.signals[j]);

  std::vector<std::vector<double>> cands(nsig);
  const double quantiles[] = {0.50, 0.75, 0.90, 0.95, 0.99, 1.0};
  for (size_t j = 0; j < nsig; ++j) {
    std::vector<double> sorted(nn);
    for (size_t i = 0; i < nn; ++i) sorted[i] = vals[i][j];
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> c;
    for (double q : quantiles) {
      size_t at = static_cast<size_t>(q * static_cast<double>(nn - 1));
      c.push_back(sorted[at]);
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    if (static_cast<int>(c.size()) > opt.max_candidates_per_signal) {
      std::vector<double> thin;
      int cap = opt.max_candidates_per_signal;
      for (int i = 0; i < cap; ++i) {
        size_t at = static_cast<size_t>(std::llround(
            static_cast<double>(i) * static_cast<double>(c.size() - 1) /
            static_cast<double>(cap - 1)));
        thin.push_back(c[at]);
      }
      thin.erase(std::unique(thin.begin(), thin.end()), thin.end());
      c = std::move(thin);
    }
    cands[j] = std::move(c);
  }

  std::set<std::string> truth(true_lemons.begin(), true_lemons.end());
  std::vector<bool> is_lemon(nn, false);
  for (size_t i = 0; i < nn; ++i) is_lemon[i] = truth.count(signals[i].node_id);
  long long lemon_count = 0;
  for (bool b : is_lemon) lemon_count += b ? 1 : 0;

  struct Score {
    bool feasible{false};
    double precision{-1.0};
    double recall{-1.0};
    long long flagged{0};
    std::vector<double> cuts;
  };
  Score best;

  std::vector<size_t> pick(nsig, 0);
  bool done = false;
  while (!done) {
    std::vector<double> cuts(nsig);
    for (size_t j = 0; j < nsig; ++j) cuts[j] = cands[j][pick[j]];

    long long tp = 0, fp = 0, flagged = 0;
    for (size_t i = 0; i < nn; ++i) {
      bool hit = false;
      for (size_t j = 0; j < nsig; ++j) {
        if (vals[i][j] > cuts[j]) {
          hit = true;
          break;
        }
      }
      if (!hit) continue;
      ++flagged;
      if (is_lemon[i])
        ++tp;
      else
        ++fp;
    }
    Score s;
    s.precision = flagged > 0 ? static_cast<double>(tp) /
                                    static_cast<double>(flagged)
                              : 1.0;
    s.recall = lemon_count > 0 ? static_cast<double>(tp) /
                                     static_cast<double>(lemon_count)
                               : 1.0;
    s.feasible = s.recall >= opt.recall_floor;
    s.flagged = flagged;
    s.cuts = std::move(cuts);

    auto better = [](const Score& a, const Score& b) {
      if (a.feasible != b.feasible) return a.feasible;
      if (a.feasible) {
        if (a.precision != b.precision) return a.precision > b.precision;
        if (a.recall != b.recall) return a.recall > b.recall;
      } else {
        if (a.recall != b.recall) return a.recall > b.recall;
        if (a.precision != b.precision) return a.precision > b.precision;
      }
      if (a.flagged != b.flagged) return a.flagged < b.flagged;
      return a.cuts < b.cuts;
    };
    if (best.cuts.empty() || better(s, best)) best = std::move(s);

    for (size_t j = 0;; ++j) {
      if (j == nsig) {
        done = true;
        break;
      }
      if (++pick[j] < cands[j].size()) break;
      pick[j] = 0;
    }
  }

  TuneResult result;
  for (size_t j = 0; j < nsig; ++j)
    result.thresholds.cutoffs[opt.signals[j]] = best.cuts[j];
  result.metrics =
      evaluate_detection(classify_lemons(signals, result.thresholds),
                         true_lemons);
  result.met_recall_floor = best.feasible;
  return result;
}

namespace {

void count_large_jobs(const SimTrace& trace, int min_gpus, long long& jobs,
                      long long& failures) {
  jobs = 0;
  failures = 0;
  for (const JobRunRecord& run : trace.runs) {
    if (run.spec.gpus < min_gpus) continue;
    ++jobs;
    if (run.final_state == JobState::NodeFail) ++failures;
  }
}

}  // namespace

AbComparison ab_compare_removal(const ClusterConfig& cfg,
                                const std::vector<JobSpec>& workload,
                                const LemonThresholds& thresholds,
                                uint64_t seed, int min_gpus) {
  ClusterConfig off = cfg;
  off.detection.enabled = false;
  ClusterConfig on = cfg;
  on.detection.enabled = true;
  on.detection.cutoffs = thresholds.cutoffs;

  SimTrace without = run_simulation(off, workload, seed);
  SimTrace with = run_simulation(on, workload, seed);

  AbComparison cmp;
  count_large_jobs(without, min_gpus, cmp.jobs_without, cmp.failures_without);
  count_large_jobs(with, min_gpus, cmp.jobs_with, cmp.failures_with);
  require(cmp.jobs_without > 0 && cmp.jobs_with > 0, Errc::invalid_argument,
          "workload has no jobs at or above the GPU floor");
  cmp.without_fraction = static_cast<double>(cmp.failures_without) /
                         static_cast<double>(cmp.jobs_without);
  cmp.with_fraction = static_cast<double>(cmp.failures_with) /
                      static_cast<double>(cmp.jobs_with);
  cmp.relative_reduction =
      cmp.without_fraction > 0.0
          ? (cmp.without_fraction - cmp.with_fraction) / cmp.without_fraction
          : 0.0;
  for (const LemonScanRecord& scan : with.lemon_scans)
    cmp.flagged_nodes += static_cast<long long>(scan.flagged.size());
  return cmp;
}

}  // namespace relsim
