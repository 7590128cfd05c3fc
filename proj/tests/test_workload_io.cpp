#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "core/config_file.hpp"
#include "core/error.hpp"
#include "core/trace.hpp"
#include "core/workload.hpp"

using namespace relsim;

namespace {

WorkloadConfig small_config(long long n, uint64_t seed) {
  WorkloadConfig cfg;
  cfg.job_count = n;
  cfg.seed = seed;
  return cfg;
}

std::string dump_specs(const std::vector<JobSpec>& specs) {
  std::string out;
  for (const JobSpec& s : specs) out += job_spec_to_json(s).dump() + "\n";
  return out;
}

}  // namespace

TEST_CASE("generation is deterministic in (config, seed)") {
  WorkloadConfig cfg = small_config(500, 77);
  std::string a = dump_specs(generate_workload(cfg));
  std::string b = dump_specs(generate_workload(cfg));
  CHECK(a == b);
  cfg.seed = 78;
  CHECK(dump_specs(generate_workload(cfg)) != a);
}

TEST_CASE("default size mix is a proper distribution") {
  double total = 0.0;
  for (const SizeBucketSpec& b : default_size_mix()) {
    CHECK(b.probability >= 0.0);
    CHECK(b.gpu_lo >= 1);
    CHECK(b.gpu_hi >= b.gpu_lo);
    total += b.probability;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bucket fractions, sizes, and priorities follow the mix") {
  WorkloadConfig cfg = small_config(20000, 1);
  cfg.size_buckets = {
      {1, 8, 0.9, 0},
      {256, 1024, 0.1, 3},
  };
  std::vector<JobSpec> jobs = generate_workload(cfg);
  long long small = 0;
  for (const JobSpec& j : jobs) {
    if (j.gpus <= 8) {
      ++small;
      CHECK(j.priority == 0);
      CHECK(j.gpus >= 1);
    } else {
      CHECK(j.priority == 3);
      // Multi-node band: doublings of the floor only.
      CHECK((j.gpus == 256 || j.gpus == 512 || j.gpus == 1024));
    }
  }
  double frac = static_cast<double>(small) / jobs.size();
  CHECK(frac == doctest::Approx(0.9).epsilon(0.02));
}

TEST_CASE("arrivals are an increasing Poisson stream at the given rate") {
  WorkloadConfig cfg = small_config(10000, 3);
  cfg.arrival_rate_per_s = 1.0 / 120.0;
  std::vector<JobSpec> jobs = generate_workload(cfg);
  double prev = 0.0;
  for (const JobSpec& j : jobs) {
    CHECK(j.submit_time.s > prev);
    prev = j.submit_time.s;
  }
  double mean_gap = prev / jobs.size();
  CHECK(mean_gap == doctest::Approx(120.0).epsilon(0.05));
}

TEST_CASE("durations are capped lognormals around the median") {
  WorkloadConfig cfg = small_config(10000, 9);
  cfg.duration_median = TimeSpan::hours(2);
  cfg.duration_cap = TimeSpan::days(7);
  std::vector<JobSpec> jobs = generate_workload(cfg);
  std::vector<double> durs;
  durs.reserve(jobs.size());
  for (const JobSpec& j : jobs) {
    CHECK(j.required_productive_time.s > 0.0);
    CHECK(j.required_productive_time.s <= cfg.duration_cap.s);
    durs.push_back(j.required_productive_time.s);
  }
  std::nth_element(durs.begin(), durs.begin() + durs.size() / 2, durs.end());
  CHECK(durs[durs.size() / 2] ==
        doctest::Approx(cfg.duration_median.s).epsilon(0.08));
}

TEST_CASE("generator rejects malformed configs") {
  WorkloadConfig cfg = small_config(0, 1);
  CHECK_THROWS_AS((void)generate_workload(cfg), Error);
  cfg = small_config(10, 1);
  cfg.size_buckets = {{1, 8, 0.5, 0}};  // probabilities sum to 0.5
  CHECK_THROWS_AS((void)generate_workload(cfg), Error);
  cfg = small_config(10, 1);
  cfg.size_buckets = {{8, 4, 1.0, 0}};  // hi < lo
  CHECK_THROWS_AS((void)generate_workload(cfg), Error);
  cfg = small_config(10, 1);
  cfg.duration_cap = TimeSpan::minutes(1);  // below the median
  CHECK_THROWS_AS((void)generate_workload(cfg), Error);
}

TEST_CASE("workload trace round-trips byte-for-byte") {
  WorkloadConfig cfg = small_config(50, 12);
  std::vector<JobSpec> jobs = generate_workload(cfg);
  TraceFile t = TraceFile::from_workload(jobs, cfg.seed, "abc123");
  std::string text = t.serialize();
  TraceFile back = TraceFile::parse(text, "<memory>");
  CHECK(back.serialize() == text);

  CHECK(back.header.at("schema") == "relsim-trace");
  CHECK(back.header.at("version") == 1);
  CHECK(back.header.at("kind") == "workload");
  CHECK(back.header.at("seed") == 12);
  CHECK(back.header.at("config_hash") == "abc123");
  CHECK(back.header.contains("tool"));

  std::vector<JobSpec> specs = back.job_specs();
  REQUIRE(specs.size() == jobs.size());
  CHECK(dump_specs(specs) == dump_specs(jobs));
}

TEST_CASE("parse failures carry the origin and line number") {
  std::string good_header = TraceFile().serialize();

  try {
    (void)TraceFile::parse(good_header + "{not json}\n", "<memory>");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse);
    CHECK(std::string(e.what()).find("<memory>:2") != std::string::npos);
  }

  try {
    (void)TraceFile::parse(good_header + "{\"type\":\"job\"}\n{\"x\":1}\n",
                           "trace.jsonl");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("trace.jsonl:3") != std::string::npos);
    CHECK(std::string(e.what()).find("type") != std::string::npos);
  }

  CHECK_THROWS_AS((void)TraceFile::parse("", "<memory>"), Error);
  CHECK_THROWS_AS((void)TraceFile::parse("{\"schema\":\"other\"}\n", "x"),
                  Error);
  try {
    (void)TraceFile::parse("{\"schema\":\"relsim-trace\",\"version\":2}\n",
                           "x");
    FAIL("expected a version error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("unsupported trace version 2") !=
          std::string::npos);
  }
}

TEST_CASE("unknown record fields survive a read/write cycle") {
  TraceFile t;
  t.header["kind"] = "workload";
  nlohmann::json rec = {{"type", "job"},
                        {"zebra", 42},
                        {"spec", {{"job_id", "j0"}, {"gpus", 4}}}};
  t.records.push_back(rec);
  std::string text = t.serialize();
  TraceFile back = TraceFile::parse(text, "<memory>");
  REQUIRE(back.records.size() == 1);
  CHECK(back.records[0].at("zebra") == 42);
  CHECK(back.serialize() == text);
}

TEST_CASE("typed views reject corrupt records with their index") {
  TraceFile t;
  t.records.push_back({{"type", "job"},
                       {"spec", {{"job_id", "j0"}, {"gpus", 0},
                                 {"required_productive_s", 60.0}}}});
  try {
    (void)t.job_specs();
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse);
    CHECK(std::string(e.what()).find("gpus") != std::string::npos);
  }
}

TEST_CASE("flat config round-trips including repeated bucket lines") {
  WorkloadConfig cfg;
  cfg.job_count = 1234;
  cfg.arrival_rate_per_s = 0.025;
  cfg.duration_median = TimeSpan::hours(3);
  cfg.duration_sigma_log = 1.25;
  cfg.seed = 99;
  cfg.size_buckets = {
      {1, 4, 0.75, 0},
      {512, 2048, 0.25, 2},
  };
  FlatConfig flat = workload_config_to_flat(cfg);
  FlatConfig reparsed = FlatConfig::parse(flat.canonical());
  WorkloadConfig back = workload_config_from_flat(reparsed);

  CHECK(back.job_count == cfg.job_count);
  CHECK(back.arrival_rate_per_s == cfg.arrival_rate_per_s);
  CHECK(back.duration_median.s == cfg.duration_median.s);
  CHECK(back.duration_sigma_log == cfg.duration_sigma_log);
  CHECK(back.seed == cfg.seed);
  REQUIRE(back.size_buckets.size() == 2);
  CHECK(back.size_buckets[1].gpu_lo == 512);
  CHECK(back.size_buckets[1].gpu_hi == 2048);
  CHECK(back.size_buckets[1].probability == 0.25);
  CHECK(back.size_buckets[1].priority == 2);

  CHECK(dump_specs(generate_workload(back)) == dump_specs(generate_workload(cfg)));
}

TEST_CASE("flat config rejects unknown keys and malformed buckets") {
  CHECK_THROWS_AS(
      (void)workload_config_from_flat(FlatConfig::parse("jobcount = 5\n")),
      Error);
  CHECK_THROWS_AS((void)workload_config_from_flat(
                      FlatConfig::parse("bucket = 1 8 0.5\n")),
                  Error);
}

TEST_CASE("config hash ignores comments and spacing but not values") {
  FlatConfig a = FlatConfig::parse("job_count = 10\nseed = 4\n");
  FlatConfig b =
      FlatConfig::parse("# synthetic mix\njob_count   =    10\n\nseed = 4\n");
  FlatConfig c = FlatConfig::parse("job_count = 11\nseed = 4\n");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("status breakdown aggregates runs and attempt GPU-time") {
  JobRunRecord r1;
  r1.spec.gpus = 8;
  r1.final_state = JobState::Completed;
  JobAttempt a;
  a.start_time = TimePoint{0};
  a.end_time = TimePoint{3600};
  a.end_state = JobState::NodeFail;
  JobAttempt b = a;
  b.start_time = TimePoint{4000};
  b.end_time = TimePoint{11200};
  b.end_state = JobState::Completed;
  r1.attempts = {a, b};

  JobRunRecord r2;
  r2.spec.gpus = 16;
  r2.final_state = JobState::Pending;

  std::vector<StatusRow> rows = status_breakdown({r1, r2});
  auto find = [&](JobState s) -> const StatusRow& {
    for (const StatusRow& row : rows)
      if (row.state == s) return row;
    static StatusRow none;
    return none;
  };
  CHECK(find(JobState::Completed).runs == 1);
  CHECK(find(JobState::Completed).attempts == 1);
  CHECK(find(JobState::Completed).gpu_hours == doctest::Approx(8 * 2.0));
  CHECK(find(JobState::NodeFail).attempts == 1);
  CHECK(find(JobState::NodeFail).gpu_hours == doctest::Approx(8 * 1.0));
  CHECK(find(JobState::Pending).runs == 1);
  CHECK(find(JobState::Pending).attempts == 0);
}
