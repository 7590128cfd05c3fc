// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Benchmarks are frozen (fixed seeds and configs) so a pass is reproducible.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "core/ettr_analytic.hpp"
#include "core/failure_stats.hpp"
#include "core/lemon.hpp"
#include "core/monte_carlo.hpp"
#include "core/simulator.hpp"
#include "core/stats.hpp"
#include "core/trace.hpp"
#include "core/workload.hpp"
#include "sim_checks.hpp"

using namespace relsim;

namespace {

int g_failures = 0;

double now_s() {
  using clk = std::chrono::steady_clock;
  return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

void report(int idx, const std::string& name, bool ok,
            const std::string& detail, double secs) {
  if (!ok) ++g_failures;
  std::printf("[%s] criterion %d: %s (%.1fs) %s\n", ok ? "PASS" : "FAIL", idx,
              name.c_str(), secs, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// 1. Projected MTTF from per-node failure rates at two fleet sizes.
void criterion_mttf_projection() {
  double t0 = now_s();
  FailureRate rf = FailureRate::per_1000_node_days(6.50);
  double h16k = project_mttf(16384, rf, 8).s / 3600.0;
  double h131k = project_mttf(131072, rf, 8).s / 3600.0;
  bool ok = std::fabs(h16k - 1.80) <= 0.02 && std::fabs(h131k - 0.23) <= 0.01;
  report(1, "projected MTTF at 16384 and 131072 GPUs", ok,
         fmt("16384 GPUs -> %.4f h (want 1.80 +/- 0.02), 131072 -> %.4f h "
             "(want 0.23 +/- 0.01)",
             h16k, h131k),
         now_s() - t0);
}

EttrParams worked_job() {
  EttrParams p;
  p.n_nodes = 8192 / 8;
  p.failure_rate = FailureRate{5.0e-3};
  p.restart_overhead = TimeSpan::minutes(5);
  p.checkpoint_write = TimeSpan::minutes(5);
  p.queue_wait = TimeSpan{0.0};
  p.required_productive = TimeSpan::days(30);
  p.checkpoint_interval =
      optimal_checkpoint_interval(p.checkpoint_write, p.n_nodes, p.failure_rate);
  return p;
}

// 2. Independent Monte-Carlo estimate agrees with the closed form.
void criterion_monte_carlo_agreement() {
  double t0 = now_s();
  EttrParams p = worked_job();
  double closed = expected_ettr_full(p).value;
  MonteCarloOptions opt;
  opt.trials = 1000;
  opt.seed = 2024;
  opt.threads = 4;
  MonteCarloEstimate est = monte_carlo_expected_ettr(p, opt);
  double rel = std::fabs(est.mean - closed) / closed;
  double secs = now_s() - t0;
  bool ok = rel < 0.05 && secs < 120.0;
  report(2, "Monte Carlo vs closed-form expected ETTR", ok,
         fmt("closed %.6f, MC mean %.6f over %d trials, rel diff %.3f%% "
             "(want <5%%)",
             closed, est.mean, est.trials, rel * 100.0),
         secs);
}

// 3. Checkpoint-overhead sensitivity of the simplified estimate.
void criterion_overhead_sensitivity() {
  double t0 = now_s();
  auto simplified = [](double rf_per_1000, double write_s) {
    EttrParams p;
    p.n_nodes = 1500;
    p.failure_rate = FailureRate::per_1000_node_days(rf_per_1000);
    p.restart_overhead = TimeSpan::minutes(5);
    p.checkpoint_write = TimeSpan::seconds(write_s);
    p.checkpoint_interval = optimal_checkpoint_interval(
        p.checkpoint_write, p.n_nodes, p.failure_rate);
    return expected_ettr_simplified(p);
  };
  double a = simplified(1.0, 300.0);
  double b = simplified(6.5, 10.0);
  double c = simplified(6.5, 300.0);
  bool ok = a >= 0.89 && b >= 0.90 && c <= 0.80;
  report(3, "simplified ETTR across failure-rate and overhead corners", ok,
         fmt("low-rate 5min write %.4f (>=0.89), high-rate 10s %.4f (>=0.90), "
             "high-rate 5min %.4f (<=0.80)",
             a, b, c),
         now_s() - t0);
}

// 4. Numeric interval optimizer tracks the analytic optimum in-regime.
void criterion_numeric_optimum() {
  double t0 = now_s();
  const int nodes[] = {16, 32, 64, 128, 512};
  const double rates[] = {0.5, 2.0, 3.5, 5.0, 6.5};
  double worst = 0.0;
  int worst_n = 0;
  double worst_r = 0.0;
  for (int n : nodes)
    for (double r : rates) {
      EttrParams p;
      p.n_nodes = n;
      p.failure_rate = FailureRate::per_1000_node_days(r);
      p.restart_overhead = TimeSpan::minutes(5);
      p.checkpoint_write = TimeSpan::minutes(5);
      TimeSpan dy = optimal_checkpoint_interval(p.checkpoint_write, p.n_nodes,
                                                p.failure_rate);
      p.required_productive = TimeSpan{100.0 * dy.s};
      TimeSpan num = numeric_optimal_interval(p);
      double rel = std::fabs(num.s - dy.s) / dy.s;
      if (rel > worst) {
        worst = rel;
        worst_n = n;
        worst_r = r;
      }
    }
  double secs = now_s() - t0;
  bool ok = worst <= 0.10 && secs < 60.0;
  report(4, "numeric optimal interval vs analytic rule on a 5x5 grid", ok,
         fmt("worst rel gap %.1f%% at %d nodes, %.1f/1000 node-days "
             "(want <=10%%)",
             worst * 100.0, worst_n, worst_r),
         secs);
}

// 5. Simulated gang failure rates match the per-node law at four job sizes.
void criterion_simulated_failure_law() {
  double t0 = now_s();
  ClusterConfig cfg;
  cfg.node_count = 3400;
  cfg.gpus_per_node = 8;
  cfg.base_failure_rate = FailureRate{6.5e-3};
  cfg.repair_time = TimeSpan::hours(24);
  cfg.default_max_lifetime = TimeSpan::seconds(1e13);
  cfg.sim_horizon = TimeSpan::days(100);

  struct Tier {
    int nodes;
    int count;
  };
  const Tier tiers[] = {{16, 24}, {64, 10}, {128, 6}, {512, 3}};
  std::vector<JobSpec> specs;
  int k = 0;
  for (const Tier& t : tiers)
    for (int i = 0; i < t.count; ++i, ++k) {
      JobSpec s;
      s.job_id = "j-" + std::to_string(k);
      s.logical_run_id = "r-" + std::to_string(k);
      s.gpus = t.nodes * cfg.gpus_per_node;
      s.submit_time = TimePoint{0.0};
      s.required_productive_time = TimeSpan::seconds(1e12);
      s.restart_overhead = TimeSpan::seconds(60.0);
      specs.push_back(s);
    }

  SimTrace t = run_simulation(cfg, specs, 505);

  bool ok = true;
  std::ostringstream detail;
  for (const Tier& tier : tiers) {
    long long fails = 0;
    double exposure_days = 0.0;
    for (const JobRunRecord& r : t.runs) {
      if (r.spec.gpus != tier.nodes * cfg.gpus_per_node) continue;
      for (const JobAttempt& a : r.attempts) {
        if (a.end_state == JobState::NodeFail) ++fails;
        exposure_days += (a.end_time.s - a.start_time.s) / 86400.0 *
                         static_cast<double>(tier.nodes);
      }
    }
    RateInterval ci = garwood_interval(fails, exposure_days, 0.90);
    bool inside = ci.lower <= 6.5e-3 && 6.5e-3 <= ci.upper;
    ok = ok && inside && fails >= 200;
    detail << tier.nodes << "n " << fails << "f "
           << (inside ? "in" : "OUT") << "; ";
  }
  double secs = now_s() - t0;
  ok = ok && secs < 300.0;
  report(5, "simulated failure rates vs (N*rf)^-1 with 90% Garwood bounds", ok,
         detail.str() + "(>=200 failures per size)", now_s() - t0);
}

// 6. Trace invariants and seed determinism over randomized configurations.
void criterion_invariants_and_determinism() {
  double t0 = now_s();
  std::mt19937_64 gen(424242u);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>()(gen);
  };
  auto pick_int = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(gen);
  };

  int checked = 0, problems_total = 0, determinism_checked = 0;
  std::string first_problem;
  bool deterministic = true;
  for (int i = 0; i < 50; ++i) {
    ClusterConfig cfg;
    cfg.node_count = pick_int(4, 24);
    cfg.base_failure_rate = FailureRate{uni(0.0, 0.08)};
    cfg.lemon_fraction = uni(0.0, 0.25);
    cfg.lemon_multiplier = uni(1.0, 30.0);
    cfg.min_preemption_age = TimeSpan::seconds(uni(600, 4 * 3600));
    cfg.repair_time = TimeSpan::seconds(uni(3600, 48 * 3600));
    cfg.max_requeues = pick_int(-1, 3);
    cfg.requeue_on_node_fail = pick_int(0, 9) > 0;
    cfg.sim_horizon = TimeSpan::days(uni(3, 21));
    if (pick_int(0, 2) == 0) cfg.false_positive_rate = uni(0.0, 0.01);
    if (pick_int(0, 3) == 0) {
      cfg.detection.enabled = true;
      cfg.detection.period = TimeSpan::days(uni(2, 10));
      cfg.detection.cutoffs = {{"multi_node_node_fails", uni(1.0, 6.0)}};
    }

    WorkloadConfig wcfg;
    wcfg.job_count = pick_int(20, 60);
    wcfg.seed = gen();
    wcfg.arrival_rate_per_s = 1.0 / uni(300, 3000);
    wcfg.duration_median = TimeSpan::seconds(uni(1800, 6 * 3600));
    wcfg.checkpoint_interval =
        pick_int(0, 3) == 0 ? TimeSpan{} : TimeSpan::seconds(uni(600, 7200));
    wcfg.size_buckets = {{1, 8, 0.6, 0},
                         {16, 64, 0.3, pick_int(0, 2)},
                         {128, 256, 0.1, pick_int(2, 4)}};
    std::vector<JobSpec> jobs = generate_workload(wcfg);

    uint64_t seed = gen();
    SimTrace t = run_simulation(cfg, jobs, seed);
    std::vector<std::string> problems = simcheck::check_invariants(t);
    problems_total += static_cast<int>(problems.size());
    if (!problems.empty() && first_problem.empty())
      first_problem = problems.front();
    ++checked;

    if (i % 5 == 0) {
      SimTrace again = run_simulation(cfg, jobs, seed);
      deterministic = deterministic && TraceFile::from_sim(t).serialize() ==
                                           TraceFile::from_sim(again).serialize();
      ++determinism_checked;
    }
  }
  bool ok = checked >= 50 && problems_total == 0 && deterministic;
  std::string detail =
      fmt("%d configs clean, %d same-seed reruns byte-identical", checked,
          determinism_checked);
  if (!first_problem.empty()) detail += "; first problem: " + first_problem;
  if (!deterministic) detail += "; NONDETERMINISTIC";
  report(6, "trace invariants and determinism over randomized configs", ok,
         detail, now_s() - t0);
}

// 7. Lemon detection precision and its effect on large-job failures.
void criterion_lemon_ab() {
  double t0 = now_s();
  ClusterConfig cfg;
  cfg.node_count = 1000;
  cfg.gpus_per_node = 8;
  cfg.base_failure_rate = FailureRate{0.04};
  cfg.lemon_fraction = 0.01;
  cfg.lemon_multiplier = 20.0;
  cfg.repair_time = TimeSpan::hours(1);
  cfg.max_requeues = 3;
  cfg.default_max_lifetime = TimeSpan::days(30);
  cfg.sim_horizon = TimeSpan::days(90);
  cfg.detection.period = TimeSpan::days(2);
  cfg.detection.window = TimeSpan::days(28);

  WorkloadConfig wl;
  wl.job_count = 5200;
  wl.size_buckets = {{512, 512, 1.0, 0}};
  wl.arrival_rate_per_s = 5200.0 / (85.0 * 86400.0);
  wl.duration_median = TimeSpan::hours(4);
  wl.duration_sigma_log = 0.3;
  wl.duration_cap = TimeSpan::hours(12);
  wl.checkpoint_interval = TimeSpan{};
  wl.restart_overhead = TimeSpan::minutes(5);
  wl.seed = 42;
  std::vector<JobSpec> specs = generate_workload(wl);
  const uint64_t seed = 7002;

  SimTrace off = run_simulation(cfg, specs, seed);
  std::vector<std::string> lemons, ids;
  for (const Node& n : off.nodes) {
    ids.push_back(n.node_id);
    if (n.lemon_multiplier > 1.0) lemons.push_back(n.node_id);
  }
  std::vector<JobLogEntry> flat = flatten_attempts(off.runs);
  sort_by_end_time(flat);
  std::vector<NodeSignals> sig = compute_node_signals(
      flat, off.health_events, off.node_transitions, ids, off.end_time,
      TimeSpan::days(28), TimePoint{0.0});
  TuneResult tuned = tune_thresholds(sig, lemons, TuneOptions{});

  AbComparison ab = ab_compare_removal(cfg, specs, tuned.thresholds, seed, 512);
  double secs = now_s() - t0;
  bool ok = tuned.metrics.precision >= 0.85 && tuned.met_recall_floor &&
            ab.relative_reduction >= 0.30 && secs < 600.0;
  report(7, "lemon-detector precision and A/B large-job failure reduction", ok,
         fmt("precision %.2f recall %.2f (floor met: %s); failure fraction "
             "%.4f -> %.4f, reduction %.1f%% (want >=30%%), %lld nodes removed",
             tuned.metrics.precision, tuned.metrics.recall,
             tuned.met_recall_floor ? "yes" : "no", ab.without_fraction,
             ab.with_fraction, ab.relative_reduction * 100.0,
             ab.flagged_nodes),
         secs);
}

// 8. Default workload mix: many small jobs, GPU-time dominated by large ones.
void criterion_size_mix() {
  double t0 = now_s();
  bool ok = true;
  std::ostringstream detail;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    WorkloadConfig wl;
    wl.job_count = 10000;
    wl.seed = seed;
    std::vector<JobSpec> specs = generate_workload(wl);
    long long small_jobs = 0;
    double small_gt = 0.0, big_gt = 0.0, total_gt = 0.0;
    for (const JobSpec& s : specs) {
      double gt = s.gpus * s.required_productive_time.s;
      total_gt += gt;
      if (s.gpus <= 8) {
        ++small_jobs;
        small_gt += gt;
      }
      if (s.gpus >= 256) big_gt += gt;
    }
    double jobs_frac = small_jobs / 10000.0;
    double small_share = small_gt / total_gt;
    double big_share = big_gt / total_gt;
    // The statistical tolerance is +/-3 points around the designed 90/10.
    bool seed_ok =
        jobs_frac >= 0.87 && small_share <= 0.13 && big_share >= 0.50;
    ok = ok && seed_ok;
    if (seed == 1 || !seed_ok)
      detail << fmt("seed %llu: %.1f%% small jobs, %.1f%% small GPU-time, "
                    "%.1f%% large GPU-time; ",
                    static_cast<unsigned long long>(seed), jobs_frac * 100.0,
                    small_share * 100.0, big_share * 100.0);
  }
  report(8, "default size mix across 5 seeds of 10000 jobs", ok,
         detail.str() +
             "(want >=87% small jobs, <=13% small GPU-time, >=50% from "
             ">=256-GPU jobs)",
         now_s() - t0);
}

// 9. Mixed-priority contention produces strictly positive second-order loss.
void criterion_second_order_loss() {
  double t0 = now_s();
  ClusterConfig cfg;
  cfg.node_count = 64;
  cfg.gpus_per_node = 8;
  cfg.base_failure_rate = FailureRate{0.5};
  cfg.repair_time = TimeSpan::hours(4);
  cfg.sim_horizon = TimeSpan::days(28);
  cfg.default_max_lifetime = TimeSpan::days(14);

  WorkloadConfig wl;
  wl.job_count = 160;
  wl.arrival_rate_per_s = 160.0 / (14.0 * 86400.0);
  wl.duration_median = TimeSpan::hours(6);
  wl.duration_sigma_log = 0.8;
  wl.duration_cap = TimeSpan::hours(48);
  wl.checkpoint_interval = TimeSpan::hours(1);
  wl.checkpoint_write_overhead = TimeSpan::minutes(2);
  wl.restart_overhead = TimeSpan::minutes(5);
  wl.seed = 31;
  wl.size_buckets = {{8, 32, 0.55, 0}, {40, 96, 0.30, 1}, {104, 256, 0.15, 2}};

  SimTrace t = run_simulation(cfg, generate_workload(wl), 901);
  GoodputBreakdown gb = goodput_loss_attribution(t);
  long long preemptions = 0;
  for (const JobRunRecord& r : t.runs)
    for (const JobAttempt& a : r.attempts)
      if (a.end_state == JobState::Preempted) ++preemptions;
  bool ok = gb.second_order_gpu_hours > 0.0 && preemptions > 0;
  report(9, "second-order goodput loss under mixed-priority failures", ok,
         fmt("first-order %.0f GPU-h, second-order %.0f GPU-h across %lld "
             "preemptions; fleet-specific magnitudes are out of scope, "
             "behavior is covered by criteria 5-8",
             gb.first_order_gpu_hours, gb.second_order_gpu_hours, preemptions),
         now_s() - t0);
}

}  // namespace

int main() {
  double t0 = now_s();
  criterion_mttf_projection();
  criterion_monte_carlo_agreement();
  criterion_overhead_sensitivity();
  criterion_numeric_optimum();
  criterion_simulated_failure_law();
  criterion_invariants_and_determinism();
  criterion_lemon_ab();
  criterion_size_mix();
  criterion_second_order_loss();
  std::printf("%s: %d of 9 criteria failed (%.1fs total)\n",
              g_failures ? "FAIL" : "OK", g_failures, now_s() - t0);
  return g_failures ? 1 : 0;
}
