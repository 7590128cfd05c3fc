// Exercises the shared-library C surface end to end: status codes, error
// strings, numeric parity with the core formulas, trace round trips, and the
// JSON/CSV renderers. Links only librelsim, so every expected number here is
// a frozen literal rather than a call into the C++ core.
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "relsim.h"

using nlohmann::json;

namespace {

struct CStr {
  char* p = nullptr;
  ~CStr() { relsim_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct CTrace {
  relsim_trace* t = nullptr;
  ~CTrace() { relsim_trace_free(t); }
};

relsim_ettr_params worked_example() {
  relsim_ettr_params p{};
  p.n_nodes = 1024;
  p.failure_rate_per_node_day = 5e-3;
  p.restart_overhead_s = 300.0;
  p.checkpoint_write_s = 300.0;
  p.checkpoint_interval_s = 3181.9805153394636;
  p.queue_wait_s = 0.0;
  p.required_productive_s = 30.0 * 86400.0;
  return p;
}

const char* kWorkloadCfg =
    "job_count = 50\n"
    "arrival_rate_per_s = 0.002\n"
    "duration_median_s = 14400\n"
    "duration_cap_s = 86400\n"
    "checkpoint_interval_s = 1800\n"
    "seed = 11\n"
    "bucket = 1 8 1.0 0\n";

const char* kClusterCfg =
    "node_count = 8\n"
    "gpus_per_node = 8\n"
    "base_failure_rate_per_node_day = 1.0\n"
    "sim_horizon_s = 1209600\n";

// 10 nodes, 20% lemons at 40x: failure counts separate cleanly in 60 days.
const char* kLemonCluster =
    "node_count = 10\n"
    "gpus_per_node = 8\n"
    "base_failure_rate_per_node_day = 0.02\n"
    "lemon_fraction = 0.2\n"
    "lemon_multiplier = 40\n"
    "sim_horizon_s = 5184000\n";

const char* kLemonWorkload =
    "job_count = 250\n"
    "arrival_rate_per_s = 0.00006\n"
    "duration_median_s = 14400\n"
    "duration_cap_s = 172800\n"
    "checkpoint_interval_s = 1800\n"
    "seed = 7\n"
    "bucket = 16 64 1.0 0\n";

}  // namespace

TEST_CASE("version and error-buffer basics") {
  CHECK(std::string(relsim_version()) == "1.0.0");
  CHECK(relsim_last_error() != nullptr);
  relsim_string_free(nullptr);
}

TEST_CASE("null arguments come back as EINVAL with a message") {
  relsim_ettr_estimate est{};
  CHECK(relsim_expected_ettr_full(nullptr, &est) == RELSIM_EINVAL);
  CHECK(std::string(relsim_last_error()).find("null") != std::string::npos);

  relsim_ettr_params p = worked_example();
  CHECK(relsim_expected_ettr_full(&p, nullptr) == RELSIM_EINVAL);
  CHECK(relsim_garwood_interval(1, 10.0, 0.9, nullptr, nullptr) ==
        RELSIM_EINVAL);
  CHECK(relsim_trace_parse(nullptr, nullptr) == RELSIM_EINVAL);

  double out = 0.0;
  CHECK(relsim_project_mttf_hours(16384, 6.5e-3, 8, nullptr) == RELSIM_EINVAL);
  CHECK(relsim_optimal_checkpoint_interval(300.0, 1024, 5e-3, &out) ==
        RELSIM_OK);
}

TEST_CASE("closed-form results match the frozen core values") {
  relsim_ettr_params p = worked_example();
  relsim_ettr_estimate est{};
  REQUIRE(relsim_expected_ettr_full(&p, &est) == RELSIM_OK);
  CHECK(est.value == doctest::Approx(0.8113523759441031).epsilon(1e-12));
  CHECK(est.expected_failures ==
        doctest::Approx(189.31355173671423).epsilon(1e-9));
  CHECK(est.regime_term > 0.0);
  CHECK(est.regime_term < 1.0);
  CHECK(est.expected_slowdown > 0.0);

  double nf = 0.0;
  REQUIRE(relsim_expected_failures(&p, &nf) == RELSIM_OK);
  CHECK(nf == doctest::Approx(est.expected_failures).epsilon(1e-12));

  relsim_ettr_params s{};
  s.n_nodes = 1500;
  s.failure_rate_per_node_day = 6.5e-3;
  s.restart_overhead_s = 300.0;
  s.checkpoint_write_s = 10.0;
  s.checkpoint_interval_s = 420.98784926737403;
  s.required_productive_s = 30.0 * 86400.0;
  double simplified = 0.0;
  REQUIRE(relsim_expected_ettr_simplified(&s, &simplified) == RELSIM_OK);
  CHECK(simplified == doctest::Approx(0.9205263144379506).epsilon(1e-12));

  double dt = 0.0;
  REQUIRE(relsim_optimal_checkpoint_interval(300.0, 1024, 5e-3, &dt) ==
          RELSIM_OK);
  CHECK(dt == doctest::Approx(3181.9805153394636).epsilon(1e-12));

  double hours = 0.0;
  REQUIRE(relsim_project_mttf_hours(16384, 6.5e-3, 8, &hours) == RELSIM_OK);
  CHECK(hours == doctest::Approx(1.8028846153846154).epsilon(1e-12));
  REQUIRE(relsim_project_mttf_hours(131072, 6.5e-3, 8, &hours) == RELSIM_OK);
  CHECK(hours == doctest::Approx(0.22536057692307693).epsilon(1e-12));

  double lo = -1.0, hi = -1.0;
  REQUIRE(relsim_garwood_interval(13, 2000.0, 0.90, &lo, &hi) == RELSIM_OK);
  CHECK(lo == doctest::Approx(0.003844789145815431).epsilon(1e-12));
  CHECK(hi == doctest::Approx(0.010334284537856847).epsilon(1e-12));
  REQUIRE(relsim_garwood_interval(0, 500.0, 0.90, &lo, &hi) == RELSIM_OK);
  CHECK(lo == 0.0);
  CHECK(hi == doctest::Approx(0.005991464547107979).epsilon(1e-12));
}

TEST_CASE("numeric interval search agrees with the closed form") {
  relsim_ettr_params p{};
  p.n_nodes = 16;
  p.failure_rate_per_node_day = 6.5e-3;
  p.restart_overhead_s = 300.0;
  p.checkpoint_write_s = 300.0;
  double dy = 0.0;
  REQUIRE(relsim_optimal_checkpoint_interval(300.0, 16, 6.5e-3, &dy) ==
          RELSIM_OK);
  p.required_productive_s = 100.0 * dy;
  p.checkpoint_interval_s = dy;

  double numeric = 0.0;
  REQUIRE(relsim_numeric_optimal_interval(&p, &numeric) == RELSIM_OK);
  CHECK(std::fabs(numeric - dy) / dy < 0.10);
}

TEST_CASE("failure codes map one to one onto error kinds") {
  // Regime: N * r_f * (u0 + dt/2) >= 1.
  relsim_ettr_params p{};
  p.n_nodes = 100000;
  p.failure_rate_per_node_day = 6.5e-3;
  p.restart_overhead_s = 3600.0;
  p.checkpoint_write_s = 300.0;
  p.checkpoint_interval_s = 7200.0;
  p.required_productive_s = 30.0 * 86400.0;
  relsim_ettr_estimate est{};
  CHECK(relsim_expected_ettr_full(&p, &est) == RELSIM_EREGIME);
  CHECK(std::string(relsim_last_error()).find("regime") != std::string::npos);

  // Invalid argument: zero exposure.
  double lo = 0.0, hi = 0.0;
  CHECK(relsim_garwood_interval(2, 0.0, 0.90, &lo, &hi) == RELSIM_EINVAL);

  // Parse: trace text that is not JSONL.
  CTrace bad;
  CHECK(relsim_trace_parse("not json at all\n", &bad.t) == RELSIM_EPARSE);
  CHECK(std::string(relsim_last_error()).find("<memory>") !=
        std::string::npos);

  // IO: missing file.
  CTrace missing;
  CHECK(relsim_trace_read("/nonexistent/never/trace.jsonl", &missing.t) ==
        RELSIM_EIO);

  // Parse: unknown cluster config key.
  CTrace wl, sim;
  REQUIRE(relsim_generate_workload(kWorkloadCfg, 0, 0, &wl.t) == RELSIM_OK);
  CHECK(relsim_simulate("node_cnt = 4\n", wl.t, 1, &sim.t) == RELSIM_EPARSE);
}

TEST_CASE("monte carlo is deterministic and thread-count invariant") {
  relsim_ettr_params p{};
  p.n_nodes = 64;
  p.failure_rate_per_node_day = 2e-3;
  p.restart_overhead_s = 60.0;
  p.checkpoint_write_s = 30.0;
  p.checkpoint_interval_s = 3000.0;
  p.required_productive_s = 86400.0;

  double m1 = 0.0, se1 = 0.0, m2 = 0.0, se2 = 0.0;
  REQUIRE(relsim_monte_carlo_ettr(&p, 200, 7, 0, 0.0, 1, &m1, &se1) ==
          RELSIM_OK);
  REQUIRE(relsim_monte_carlo_ettr(&p, 200, 7, 0, 0.0, 4, &m2, &se2) ==
          RELSIM_OK);
  CHECK(m1 == m2);
  CHECK(se1 == se2);
  CHECK(m1 > 0.0);
  CHECK(m1 <= 1.0);
  CHECK(se1 > 0.0);

  double m3 = 0.0, se3 = 0.0;
  REQUIRE(relsim_monte_carlo_ettr(&p, 200, 8, 0, 0.0, 1, &m3, &se3) ==
          RELSIM_OK);
  CHECK(m3 != m1);

  CHECK(relsim_monte_carlo_ettr(&p, 10, 7, 0, 0.0, 1, &m1, &se1) ==
        RELSIM_EINVAL);
  CHECK(relsim_monte_carlo_ettr(&p, 200, 7, 1, -0.5, 1, &m1, &se1) ==
        RELSIM_EINVAL);
}

TEST_CASE("sweep renderers emit stamped artifacts") {
  relsim_sweep_spec spec{};
  spec.n_nodes = 1500;
  spec.restart_overhead_s = 300.0;
  spec.queue_wait_s = 0.0;
  spec.required_productive_s = 30.0 * 86400.0;
  spec.rate_lo = 1e-3;
  spec.rate_hi = 6.5e-3;
  spec.rate_points = 3;
  spec.write_lo = 10.0;
  spec.write_hi = 300.0;
  spec.write_points = 3;
  spec.min_interval_s = 0.0;
  spec.use_full_formula = 0;

  CStr csv;
  REQUIRE(relsim_ettr_sweep_csv(&spec, &csv.p) == RELSIM_OK);
  std::string text = csv.str();
  CHECK(text.rfind("# relsim 1.0.0", 0) == 0);
  CHECK(text.find("rate_per_node_day,checkpoint_write_s,interval_s,ettr,"
                  "valid,floored") != std::string::npos);
  size_t lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  CHECK(lines == 11);  // provenance + header + 9 cells

  double levels[2] = {0.85, 0.92};
  CStr svg;
  REQUIRE(relsim_ettr_sweep_svg(&spec, levels, 2, &svg.p) == RELSIM_OK);
  CHECK(svg.str().rfind("<svg", 0) == 0);
  CHECK(svg.str().find("<!-- relsim") != std::string::npos);

  spec.rate_points = 1;
  CStr broken;
  CHECK(relsim_ettr_sweep_csv(&spec, &broken.p) == RELSIM_EINVAL);
}

TEST_CASE("workload generation, trace round trips, and info") {
  CTrace a, b, c;
  REQUIRE(relsim_generate_workload(kWorkloadCfg, 0, 0, &a.t) == RELSIM_OK);
  REQUIRE(relsim_generate_workload(kWorkloadCfg, 0, 0, &b.t) == RELSIM_OK);
  REQUIRE(relsim_generate_workload(kWorkloadCfg, 1, 99, &c.t) == RELSIM_OK);

  CStr sa, sb, sc;
  REQUIRE(relsim_trace_serialize(a.t, &sa.p) == RELSIM_OK);
  REQUIRE(relsim_trace_serialize(b.t, &sb.p) == RELSIM_OK);
  REQUIRE(relsim_trace_serialize(c.t, &sc.p) == RELSIM_OK);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str() != sc.str());

  CTrace back;
  REQUIRE(relsim_trace_parse(sa.p, &back.t) == RELSIM_OK);
  CStr again;
  REQUIRE(relsim_trace_serialize(back.t, &again.p) == RELSIM_OK);
  CHECK(again.str() == sa.str());

  CStr info;
  REQUIRE(relsim_trace_info_json(a.t, &info.p) == RELSIM_OK);
  json j = json::parse(info.str());
  CHECK(j["header"]["kind"] == "workload");
  CHECK(j["record_counts"]["job"] == 50);
  CHECK(j["records"] == 50);

  const char* path = "/tmp/relsim_capi_roundtrip.jsonl";
  REQUIRE(relsim_trace_write(a.t, path) == RELSIM_OK);
  CTrace reread;
  REQUIRE(relsim_trace_read(path, &reread.t) == RELSIM_OK);
  CStr sre;
  REQUIRE(relsim_trace_serialize(reread.t, &sre.p) == RELSIM_OK);
  CHECK(sre.str() == sa.str());
  std::remove(path);
}

TEST_CASE("simulation, summary, and per-run ettr through the C surface") {
  CTrace wl;
  REQUIRE(relsim_generate_workload(kWorkloadCfg, 0, 0, &wl.t) == RELSIM_OK);

  CTrace s1, s2, s3;
  REQUIRE(relsim_simulate(kClusterCfg, wl.t, 5, &s1.t) == RELSIM_OK);
  REQUIRE(relsim_simulate(kClusterCfg, wl.t, 5, &s2.t) == RELSIM_OK);
  REQUIRE(relsim_simulate(kClusterCfg, wl.t, 6, &s3.t) == RELSIM_OK);

  CStr t1, t2, t3;
  REQUIRE(relsim_trace_serialize(s1.t, &t1.p) == RELSIM_OK);
  REQUIRE(relsim_trace_serialize(s2.t, &t2.p) == RELSIM_OK);
  REQUIRE(relsim_trace_serialize(s3.t, &t3.p) == RELSIM_OK);
  CHECK(t1.str() == t2.str());
  CHECK(t1.str() != t3.str());

  CStr summary;
  REQUIRE(relsim_sim_summary_json(s1.t, &summary.p) == RELSIM_OK);
  json j = json::parse(summary.str());
  CHECK(j["kind"] == "simulation");
  CHECK(j["nodes"] == 8);
  CHECK(j["runs"] == 50);
  CHECK(j["seed"] == 5);
  CHECK(j["aggregate_ettr"].get<double>() >= 0.0);
  CHECK(j["aggregate_ettr"].get<double>() <= 1.0);
  CHECK(j["goodput_loss"].contains("second_order_gpu_hours"));

  relsim_log_ettr_assumptions assume{};
  assume.restart_overhead_s = 60.0;
  assume.checkpoint_write_s = 30.0;
  assume.failure_rate_per_node_day = 0.05;
  assume.interval_override_s = 1800.0;
  assume.min_total_scheduled_s = 1.0;
  double ettr = 0.0;
  REQUIRE(relsim_job_run_ettr(s1.t, "r000000", &assume, &ettr) == RELSIM_OK);
  CHECK(ettr > 0.0);
  CHECK(ettr <= 1.0);

  CHECK(relsim_job_run_ettr(s1.t, "r-nope", &assume, &ettr) == RELSIM_EINVAL);
  CHECK(std::string(relsim_last_error()).find("no run named") !=
        std::string::npos);
}

TEST_CASE("analysis CSVs render from a sim trace") {
  CTrace wl, sim;
  REQUIRE(relsim_generate_workload(kWorkloadCfg, 0, 0, &wl.t) == RELSIM_OK);
  REQUIRE(relsim_simulate(kClusterCfg, wl.t, 5, &sim.t) == RELSIM_OK);

  CStr attr;
  REQUIRE(relsim_attribute_csv(sim.t, -1.0, -1.0, &attr.p) == RELSIM_OK);
  CHECK(attr.str().rfind("# relsim", 0) == 0);
  CHECK(attr.str().find("job_id,logical_run_id") != std::string::npos);

  CStr status;
  REQUIRE(relsim_status_csv(sim.t, &status.p) == RELSIM_OK);
  CHECK(status.str().find("state,runs,attempts,gpu_hours") !=
        std::string::npos);

  CStr rolling;
  REQUIRE(relsim_rolling_rate_csv(sim.t, 0.0, 0, &rolling.p) == RELSIM_OK);
  size_t lines = 0;
  for (char c : rolling.str())
    if (c == '\n') ++lines;
  CHECK(lines >= 3);

  CStr rollsvg;
  REQUIRE(relsim_rolling_rate_svg(sim.t, 0.0, &rollsvg.p) == RELSIM_OK);
  CHECK(rollsvg.str().rfind("<svg", 0) == 0);

  int32_t buckets[4] = {1, 2, 3, 64};
  CStr mttf;
  REQUIRE(relsim_mttf_by_size_csv(sim.t, buckets, 2, 0.05, &mttf.p) ==
          RELSIM_OK);
  CHECK(mttf.str().find("nodes_lo,nodes_hi") != std::string::npos);
  CStr mttfsvg;
  REQUIRE(relsim_mttf_by_size_svg(sim.t, buckets, 2, 0.05, &mttfsvg.p) ==
          RELSIM_OK);
  CHECK(mttfsvg.str().rfind("<svg", 0) == 0);

  CStr goodput, goodsvg, cascade;
  REQUIRE(relsim_goodput_csv(sim.t, 0.0, &goodput.p) == RELSIM_OK);
  CHECK(goodput.str().find("total,,") != std::string::npos);
  REQUIRE(relsim_goodput_svg(sim.t, 0.0, &goodsvg.p) == RELSIM_OK);
  CHECK(goodsvg.str().rfind("<svg", 0) == 0);
  REQUIRE(relsim_cascade_csv(sim.t, 0.0, &cascade.p) == RELSIM_OK);
  CHECK(cascade.str().rfind("# relsim", 0) == 0);

  double rate = 0.0, lo = 0.0, hi = 0.0, exposure = 0.0;
  long long failures = -1;
  REQUIRE(relsim_estimate_failure_rate(sim.t, 0, &rate, &lo, &hi, &failures,
                                       &exposure) == RELSIM_OK);
  CHECK(rate >= 0.0);
  CHECK(lo <= rate);
  CHECK(rate <= hi);
  CHECK(failures >= 0);
  CHECK(exposure > 0.0);

  // Default floor is 128 GPUs; this workload never exceeds 8.
  CHECK(relsim_estimate_failure_rate(sim.t, -1, &rate, &lo, &hi, &failures,
                                     &exposure) == RELSIM_EDOMAIN);
  CHECK(std::string(relsim_last_error()).find("no exposure") !=
        std::string::npos);
}

TEST_CASE("lemon pipeline through the C surface") {
  CTrace wl, sim;
  REQUIRE(relsim_generate_workload(kLemonWorkload, 0, 0, &wl.t) == RELSIM_OK);
  REQUIRE(relsim_simulate(kLemonCluster, wl.t, 31, &sim.t) == RELSIM_OK);

  CStr signals;
  REQUIRE(relsim_lemon_signals_csv(sim.t, 0.0, &signals.p) == RELSIM_OK);
  CHECK(signals.str().find("node_id") != std::string::npos);
  CHECK(signals.str().find("multi_node_node_fails") != std::string::npos);

  CStr tune;
  REQUIRE(relsim_lemon_tune_json(sim.t, 0.0, -1.0, &tune.p) == RELSIM_OK);
  json tj = json::parse(tune.str());
  CHECK(tj["met_recall_floor"].get<bool>());
  CHECK(tj["metrics"]["recall"].get<double>() >= 0.5);
  CHECK(tj["cutoffs"].is_object());
  CHECK(!tj["cutoffs"].empty());

  std::string thresholds;
  for (auto& [name, cutoff] : tj["cutoffs"].items())
    thresholds += name + " = " + std::to_string(cutoff.get<double>()) + "\n";

  CStr verdicts;
  REQUIRE(relsim_lemon_classify_csv(sim.t, 0.0, thresholds.c_str(),
                                    &verdicts.p) == RELSIM_OK);
  CHECK(verdicts.str().find("node_id,flagged") != std::string::npos);

  CStr eval;
  REQUIRE(relsim_lemon_evaluate_json(sim.t, 0.0, thresholds.c_str(),
                                     &eval.p) == RELSIM_OK);
  json ej = json::parse(eval.str());
  CHECK(ej["nodes"] == 10);
  CHECK(ej["true_lemons"] == 2);
  CHECK(ej["metrics"]["recall"].get<double>() ==
        doctest::Approx(tj["metrics"]["recall"].get<double>()));
  CHECK(ej["metrics"]["precision"].get<double>() ==
        doctest::Approx(tj["metrics"]["precision"].get<double>()));

  CStr ab;
  REQUIRE(relsim_lemon_ab_compare_json(kLemonCluster, wl.t,
                                       thresholds.c_str(), 31, 16, &ab.p) ==
          RELSIM_OK);
  json aj = json::parse(ab.str());
  CHECK(aj["min_gpus"] == 16);
  CHECK(aj["without_detector"]["jobs"].get<long long>() > 0);
  CHECK(aj["with_detector"]["jobs"].get<long long>() > 0);
  CHECK(aj["relative_reduction"].is_number());

  CHECK(relsim_lemon_classify_csv(sim.t, 0.0, "bogus_signal = 1\n",
                                  &verdicts.p) == RELSIM_EINVAL);
}
