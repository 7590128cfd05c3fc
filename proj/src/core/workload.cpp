#include "core/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "core/config_file.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace relsim {

std::vector<SizeBucketSpec> default_size_mix() {
  // Heavily single-GPU by job count, yet dominated by large jobs in
  // GPU-time. Priorities grow with size so big jobs can preempt.
  return {
      {1, 1, 0.44, 0},    {2, 7, 0.30, 0},     {8, 8, 0.16, 1},
      {16, 128, 0.06, 2}, {256, 1024, 0.035, 3}, {2048, 4096, 0.005, 4},
  };
}

namespace {

int draw_bucket(const std::vector<SizeBucketSpec>& buckets, double u) {
  double acc = 0.0;
  for (size_t i = 0; i < buckets.size(); ++i) {
    acc += buckets[i].probability;
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(buckets.size()) - 1;
}

int draw_size(const SizeBucketSpec& b, Rng& rng) {
  if (b.gpu_lo == b.gpu_hi) return b.gpu_lo;
  if (b.gpu_hi < kDefaultGpusPerNode) {
    // Sub-node jobs come in every size.
    return b.gpu_lo +
           static_cast<int>(rng.uniform_int(b.gpu_hi - b.gpu_lo + 1));
  }
  // Multi-node jobs cluster on power-of-two multiples of the band floor.
  std::vector<int> sizes;
  for (int s = b.gpu_lo; s <= b.gpu_hi; s *= 2) sizes.push_back(s);
  if (sizes.back() != b.gpu_hi) sizes.push_back(b.gpu_hi);
  return sizes[rng.uniform_int(sizes.size())];
}

}  // namespace

std::vector<JobSpec> generate_workload(const WorkloadConfig& cfg) {
  require(cfg.job_count > 0, Errc::invalid_argument,
          "job_count must be positive");
  require(cfg.arrival_rate_per_s > 0.0, Errc::invalid_argument,
          "arrival rate must be positive");
  require(cfg.duration_median.s > 0.0, Errc::invalid_argument,
          "duration median must be positive");
  require(cfg.duration_sigma_log >= 0.0, Errc::invalid_argument,
          "duration sigma must be non-negative");
  require(cfg.duration_cap.s >= cfg.duration_median.s, Errc::invalid_argument,
          "duration cap below the median");
  require(!cfg.size_buckets.empty(), Errc::invalid_argument,
          "size mix must not be empty");
  double total_p = 0.0;
  for (const auto& b : cfg.size_buckets) {
    require(b.gpu_lo >= 1 && b.gpu_hi >= b.gpu_lo, Errc::invalid_argument,
            "size bucket bounds must satisfy 1 <= lo <= hi");
    require(b.probability >= 0.0, Errc::invalid_argument,
            "bucket probability must be non-negative");
    total_p += b.probability;
  }
  require(std::abs(total_p - 1.0) < 1e-9, Errc::invalid_argument,
          "bucket probabilities must sum to 1");

  Rng rng(derive_seed(cfg.seed, 0x574cULL));
  std::vector<JobSpec> jobs;
  jobs.reserve(cfg.job_count);
  double t = 0.0;
  double mu_log = std::log(cfg.duration_median.s);
  for (long long i = 0; i < cfg.job_count; ++i) {
    t += rng.exponential(cfg.arrival_rate_per_s);
    int bi = draw_bucket(cfg.size_buckets, rng.uniform01());
    const SizeBucketSpec& bucket = cfg.size_buckets[bi];
    int gpus = draw_size(bucket, rng);
    double dur =
        std::min(cfg.duration_cap.s,
                 rng.lognormal(mu_log, cfg.duration_sigma_log));

    char idbuf[32];
    std::snprintf(idbuf, sizeof idbuf, "j%06lld", i);
    JobSpec spec;
    spec.job_id = idbuf;
    std::snprintf(idbuf, sizeof idbuf, "r%06lld", i);
    spec.logical_run_id = idbuf;
    spec.gpus = gpus;
    spec.priority = bucket.priority;
    spec.submit_time = TimePoint{t};
    spec.required_productive_time = TimeSpan::seconds(dur);
    spec.checkpoint_interval = cfg.checkpoint_interval;
    spec.checkpoint_write_overhead = cfg.checkpoint_write_overhead;
    spec.restart_overhead = cfg.restart_overhead;
    jobs.push_back(std::move(spec));
  }
  return jobs;
}

std::vector<StatusRow> status_breakdown(const std::vector<JobRunRecord>& runs) {
  std::map<JobState, StatusRow> by_state;
  for (const JobRunRecord& run : runs) {
    by_state[run.final_state].runs += 1;
    for (const JobAttempt& a : run.attempts) {
      StatusRow& row = by_state[a.end_state];
      row.attempts += 1;
      row.gpu_hours += run.spec.gpus *
                       (a.end_time.s - a.start_time.s) / kSecondsPerHour;
    }
  }
  std::vector<StatusRow> rows;
  rows.reserve(by_state.size());
  for (auto& [state, row] : by_state) {
    row.state = state;
    rows.push_back(row);
  }
  return rows;
}

FlatConfig workload_config_to_flat(const WorkloadConfig& cfg) {
  FlatConfig f;
  auto addf = [&](const char* k, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    f.entries.emplace_back(k, buf);
  };
  f.entries.emplace_back("job_count", std::to_string(cfg.job_count));
  addf("arrival_rate_per_s", cfg.arrival_rate_per_s);
  addf("duration_median_s", cfg.duration_median.s);
  addf("duration_sigma_log", cfg.duration_sigma_log);
  addf("duration_cap_s", cfg.duration_cap.s);
  addf("checkpoint_interval_s", cfg.checkpoint_interval.s);
  addf("checkpoint_write_overhead_s", cfg.checkpoint_write_overhead.s);
  addf("restart_overhead_s", cfg.restart_overhead.s);
  f.entries.emplace_back("seed", std::to_string(cfg.seed));
  for (const SizeBucketSpec& b : cfg.size_buckets) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d %d %.17g %d", b.gpu_lo, b.gpu_hi,
                  b.probability, b.priority);
    f.entries.emplace_back("bucket", buf);
  }
  return f;
}

WorkloadConfig workload_config_from_flat(const FlatConfig& flat) {
  static const char* known[] = {
      "job_count",           "arrival_rate_per_s",
      "duration_median_s",   "duration_sigma_log",
      "duration_cap_s",      "checkpoint_interval_s",
      "checkpoint_write_overhead_s", "restart_overhead_s",
      "seed",                "bucket"};
  for (const auto& [k, v] : flat.entries) {
    (void)v;
    bool ok = false;
    for (const char* name : known) ok = ok || k == name;
    require(ok, Errc::parse, "unknown workload config key: " + k);
  }
  WorkloadConfig cfg;
  cfg.job_count = flat.get_int("job_count", cfg.job_count);
  cfg.arrival_rate_per_s =
      flat.get_double("arrival_rate_per_s", cfg.arrival_rate_per_s);
  cfg.duration_median.s =
      flat.get_double("duration_median_s", cfg.duration_median.s);
  cfg.duration_sigma_log =
      flat.get_double("duration_sigma_log", cfg.duration_sigma_log);
  cfg.duration_cap.s = flat.get_double("duration_cap_s", cfg.duration_cap.s);
  cfg.checkpoint_interval.s =
      flat.get_double("checkpoint_interval_s", cfg.checkpoint_interval.s);
  cfg.checkpoint_write_overhead.s = flat.get_double(
      "checkpoint_write_overhead_s", cfg.checkpoint_write_overhead.s);
  cfg.restart_overhead.s =
      flat.get_double("restart_overhead_s", cfg.restart_overhead.s);
  cfg.seed = static_cast<uint64_t>(flat.get_int("seed", 0));
  std::vector<std::string> buckets = flat.get_all("bucket");
  if (!buckets.empty()) {
    cfg.size_buckets.clear();
    for (const std::string& text : buckets) {
      SizeBucketSpec b;
      int consumed = 0;
      int got = std::sscanf(text.c_str(), "%d %d %lf %d %n", &b.gpu_lo,
                            &b.gpu_hi, &b.probability, &b.priority,
                            &consumed);
      require(got == 4 && text.c_str()[consumed] == '\0', Errc::parse,
              "malformed bucket line: " + text);
      cfg.size_buckets.push_back(b);
    }
  }
  return cfg;
}

}  // namespace relsim
