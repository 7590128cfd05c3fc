#include "relsim.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "core/config_file.hpp"
#include "core/error.hpp"
#include "core/ettr_analytic.hpp"
#include "core/failure_stats.hpp"
#include "core/lemon.hpp"
#include "core/monte_carlo.hpp"
#include "core/report.hpp"
#include "core/simulator.hpp"
#include "core/stats.hpp"
#include "core/trace.hpp"
#include "core/version.hpp"
#include "core/workload.hpp"

struct relsim_trace {
  relsim::TraceFile file;
};

namespace {

using nlohmann::json;
using namespace relsim;

thread_local std::string t_last_error;

int code_of(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return RELSIM_EINVAL;
    case Errc::io: return RELSIM_EIO;
    case Errc::parse: return RELSIM_EPARSE;
    case Errc::domain: return RELSIM_EDOMAIN;
    case Errc::regime: return RELSIM_EREGIME;
    case Errc::internal: return RELSIM_EINTERNAL;
  }
  return RELSIM_EINTERNAL;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return RELSIM_OK;
  } catch (const Error& e) {
    t_last_error = e.what();
    return code_of(e.code());
  } catch (const std::bad_alloc&) {
    t_last_error = "out of memory";
    return RELSIM_EINTERNAL;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return RELSIM_EINTERNAL;
  }
}

void need(bool ok, const char* what) {
  require(ok, Errc::invalid_argument, what);
}

void set_out(char** out, const std::string& s) {
  char* p = new char[s.size() + 1];
  std::memcpy(p, s.c_str(), s.size() + 1);
  *out = p;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

EttrParams to_core(const relsim_ettr_params& p) {
  EttrParams c;
  c.n_nodes = p.n_nodes;
  c.failure_rate = FailureRate{p.failure_rate_per_node_day};
  c.restart_overhead = TimeSpan::seconds(p.restart_overhead_s);
  c.checkpoint_write = TimeSpan::seconds(p.checkpoint_write_s);
  c.checkpoint_interval = TimeSpan::seconds(p.checkpoint_interval_s);
  c.queue_wait = TimeSpan::seconds(p.queue_wait_s);
  c.required_productive = TimeSpan::seconds(p.required_productive_s);
  return c;
}

SweepSpec to_core(const relsim_sweep_spec& s) {
  SweepSpec c;
  c.n_nodes = s.n_nodes;
  c.restart_overhead = TimeSpan::seconds(s.restart_overhead_s);
  c.queue_wait = TimeSpan::seconds(s.queue_wait_s);
  c.required_productive = TimeSpan::seconds(s.required_productive_s);
  c.failure_rate_per_day = {s.rate_lo, s.rate_hi, s.rate_points};
  c.checkpoint_write_s = {s.write_lo, s.write_hi, s.write_points};
  if (s.min_interval_s > 0.0) c.min_interval = TimeSpan::seconds(s.min_interval_s);
  c.formula = s.use_full_formula ? EttrFormula::Full : EttrFormula::Simplified;
  return c;
}

Provenance sweep_provenance(const relsim_sweep_spec& s) {
  FlatConfig f;
  f.entries = {
      {"n_nodes", std::to_string(s.n_nodes)},
      {"restart_overhead_s", num(s.restart_overhead_s)},
      {"queue_wait_s", num(s.queue_wait_s)},
      {"required_productive_s", num(s.required_productive_s)},
      {"rate_lo", num(s.rate_lo)},
      {"rate_hi", num(s.rate_hi)},
      {"rate_points", std::to_string(s.rate_points)},
      {"write_lo", num(s.write_lo)},
      {"write_hi", num(s.write_hi)},
      {"write_points", std::to_string(s.write_points)},
      {"min_interval_s", num(s.min_interval_s)},
      {"formula", s.use_full_formula ? "full" : "simplified"},
  };
  return Provenance{config_hash(f), std::nullopt};
}

// Typed views of one trace handle, shared by the analysis entry points.
struct TraceView {
  std::vector<JobRunRecord> runs;
  std::vector<HealthCheckEvent> events;
  std::vector<NodeTransition> transitions;
  std::vector<Node> nodes;
  TimePoint end_time{};
  bool is_sim{false};
  Provenance prov;
};

TraceView view_of(const relsim_trace& t, bool need_runs) {
  TraceView v;
  v.runs = t.file.job_runs();
  require(!need_runs || !v.runs.empty(), Errc::invalid_argument,
          "trace holds no job records");
  v.events = t.file.health_events();
  v.transitions = t.file.node_transitions();
  v.nodes = t.file.nodes();
  const json& h = t.file.header;
  v.is_sim = h.value("kind", "") == "simulation";
  if (h.contains("config_hash")) v.prov.config_hash = h["config_hash"];
  if (h.contains("seed")) v.prov.seed = h["seed"].get<uint64_t>();
  if (h.contains("end_time_s")) {
    v.end_time = TimePoint{h["end_time_s"].get<double>()};
  } else {
    double end = 0.0;
    for (const JobRunRecord& r : v.runs)
      for (const JobAttempt& a : r.attempts) end = std::max(end, a.end_time.s);
    for (const HealthCheckEvent& e : v.events) end = std::max(end, e.time.s);
    for (const NodeTransition& tr : v.transitions) end = std::max(end, tr.time.s);
    v.end_time = TimePoint{end};
  }
  return v;
}

std::vector<JobLogEntry> flat_log(const std::vector<JobRunRecord>& runs) {
  std::vector<JobLogEntry> log = flatten_attempts(runs);
  sort_by_end_time(log);
  return log;
}

std::vector<HealthCheckEvent> time_sorted(std::vector<HealthCheckEvent> events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const HealthCheckEvent& a, const HealthCheckEvent& b) {
                     return a.time < b.time;
                   });
  return events;
}

SimTrace runs_only_trace(const TraceView& v) {
  SimTrace st;
  st.runs = v.runs;
  return st;
}

std::vector<std::string> node_ids_of(const TraceView& v) {
  require(!v.nodes.empty(), Errc::invalid_argument,
          "trace holds no node records");
  std::vector<std::string> ids;
  ids.reserve(v.nodes.size());
  for (const Node& n : v.nodes) ids.push_back(n.node_id);
  return ids;
}

std::vector<std::string> true_lemons_of(const TraceView& v) {
  std::vector<std::string> out;
  for (const Node& n : v.nodes)
    if (n.lemon_multiplier > 1.0) out.push_back(n.node_id);
  return out;
}

std::vector<NodeSignals> signals_of(const TraceView& v, double window_s) {
  TimeSpan window =
      window_s > 0.0 ? TimeSpan::seconds(window_s) : TimeSpan::days(28);
  if (v.is_sim && window.s > v.end_time.s) window = TimeSpan{v.end_time.s};
  std::optional<TimePoint> log_begin;
  if (v.is_sim) log_begin = TimePoint{0.0};
  return compute_node_signals(flat_log(v.runs), v.events, v.transitions,
                              node_ids_of(v), v.end_time, window, log_begin);
}

LemonThresholds parse_thresholds(const char* text) {
  need(text != nullptr, "null thresholds text");
  FlatConfig f = FlatConfig::parse(text);
  require(!f.entries.empty(), Errc::invalid_argument,
          "thresholds text holds no entries");
  LemonThresholds t;
  for (const auto& [key, value] : f.entries)
    t.cutoffs[key] = f.get_double(key, 0.0);
  return t;
}

std::vector<SizeBucket> buckets_of(const int32_t* lo_hi, size_t n) {
  need(lo_hi != nullptr && n > 0, "no size buckets given");
  std::vector<SizeBucket> b;
  b.reserve(n);
  for (size_t i = 0; i < n; ++i)
    b.push_back({lo_hi[2 * i], lo_hi[2 * i + 1]});
  return b;
}

json metrics_json(const DetectionMetrics& m) {
  return json{{"true_positives", m.true_positives},
              {"false_positives", m.false_positives},
              {"false_negatives", m.false_negatives},
              {"true_negatives", m.true_negatives},
              {"precision", m.precision},
              {"recall", m.recall},
              {"false_positive_rate", m.false_positive_rate},
              {"flagged_fraction", m.flagged_fraction}};
}

}  // namespace

extern "C" {

const char* relsim_version(void) { return kToolVersion; }

const char* relsim_last_error(void) { return t_last_error.c_str(); }

void relsim_string_free(char* s) { delete[] s; }

int relsim_expected_ettr_full(const relsim_ettr_params* p,
                              relsim_ettr_estimate* out) {
  return guarded([&] {
    need(p && out, "null pointer argument");
    EttrEstimate e = expected_ettr_full(to_core(*p));
    out->value = e.value;
    out->expected_failures = e.expected_failures;
    out->expected_slowdown = e.expected_slowdown;
    out->regime_term = e.regime_term;
  });
}

int relsim_expected_ettr_simplified(const relsim_ettr_params* p, double* out) {
  return guarded([&] {
    need(p && out, "null pointer argument");
    *out = expected_ettr_simplified(to_core(*p));
  });
}

int relsim_expected_failures(const relsim_ettr_params* p, double* out) {
  return guarded([&] {
    need(p && out, "null pointer argument");
    *out = expected_failures(to_core(*p));
  });
}

int relsim_optimal_checkpoint_interval(double checkpoint_write_s,
                                       int32_t n_nodes,
                                       double rate_per_node_day,
                                       double* out_s) {
  return guarded([&] {
    need(out_s != nullptr, "null pointer argument");
    *out_s = optimal_checkpoint_interval(TimeSpan::seconds(checkpoint_write_s),
                                         n_nodes,
                                         FailureRate{rate_per_node_day})
                 .s;
  });
}

int relsim_numeric_optimal_interval(const relsim_ettr_params* p,
                                    double* out_s) {
  return guarded([&] {
    need(p && out_s, "null pointer argument");
    *out_s = numeric_optimal_interval(to_core(*p)).s;
  });
}

int relsim_monte_carlo_ettr(const relsim_ettr_params* p, int32_t trials,
                            uint64_t seed, int32_t queue_lognormal,
                            double queue_sigma_log, int32_t threads,
                            double* out_mean, double* out_stderr) {
  return guarded([&] {
    need(p && out_mean && out_stderr, "null pointer argument");
    MonteCarloOptions opt;
    opt.trials = trials;
    opt.seed = seed;
    opt.queue_model =
        queue_lognormal ? QueueModel::Lognormal : QueueModel::Constant;
    opt.queue_sigma_log = queue_sigma_log;
    opt.threads = threads > 0
                      ? threads
                      : std::max(1u, std::thread::hardware_concurrency());
    MonteCarloEstimate est = monte_carlo_expected_ettr(to_core(*p), opt);
    *out_mean = est.mean;
    *out_stderr = est.stderr_of_mean;
  });
}

int relsim_project_mttf_hours(int32_t gpus, double rate_per_node_day,
                              int32_t gpus_per_node, double* out_hours) {
  return guarded([&] {
    need(out_hours != nullptr, "null pointer argument");
    int per_node = gpus_per_node > 0 ? gpus_per_node : kDefaultGpusPerNode;
    *out_hours =
        project_mttf(gpus, FailureRate{rate_per_node_day}, per_node).to_hours();
  });
}

int relsim_garwood_interval(long long failures, double exposure,
                            double confidence, double* out_lower,
                            double* out_upper) {
  return guarded([&] {
    need(out_lower && out_upper, "null pointer argument");
    RateInterval iv = garwood_interval(failures, exposure, confidence);
    *out_lower = iv.lower;
    *out_upper = iv.upper;
  });
}

int relsim_ettr_sweep_csv(const relsim_sweep_spec* spec, char** out_csv) {
  return guarded([&] {
    need(spec && out_csv, "null pointer argument");
    set_out(out_csv, sweep_csv(ettr_sweep(to_core(*spec)),
                               sweep_provenance(*spec)));
  });
}

int relsim_ettr_sweep_svg(const relsim_sweep_spec* spec, const double* levels,
                          size_t n_levels, char** out_svg) {
  return guarded([&] {
    need(spec && out_svg, "null pointer argument");
    SweepResult r = ettr_sweep(to_core(*spec));
    Provenance prov = sweep_provenance(*spec);
    if (levels && n_levels > 0) {
      set_out(out_svg, sweep_contour_svg(
                           r, prov, std::vector<double>(levels, levels + n_levels)));
    } else {
      set_out(out_svg, sweep_contour_svg(r, prov));
    }
  });
}

int relsim_trace_read(const char* path, relsim_trace** out) {
  return guarded([&] {
    need(path && out, "null pointer argument");
    auto t = std::make_unique<relsim_trace>();
    t->file = TraceFile::read_file(path);
    *out = t.release();
  });
}

int relsim_trace_parse(const char* text, relsim_trace** out) {
  return guarded([&] {
    need(text && out, "null pointer argument");
    auto t = std::make_unique<relsim_trace>();
    t->file = TraceFile::parse(text, "<memory>");
    *out = t.release();
  });
}

int relsim_trace_write(const relsim_trace* trace, const char* path) {
  return guarded([&] {
    need(trace && path, "null pointer argument");
    trace->file.write_file(path);
  });
}

int relsim_trace_serialize(const relsim_trace* trace, char** out_text) {
  return guarded([&] {
    need(trace && out_text, "null pointer argument");
    set_out(out_text, trace->file.serialize());
  });
}

void relsim_trace_free(relsim_trace* trace) { delete trace; }

int relsim_trace_info_json(const relsim_trace* trace, char** out_json) {
  return guarded([&] {
    need(trace && out_json, "null pointer argument");
    json counts = json::object();
    for (const json& r : trace->file.records) {
      std::string type = r.value("type", "unknown");
      counts[type] = counts.value(type, 0LL) + 1;
    }
    json j{{"header", trace->file.header},
           {"records", trace->file.records.size()},
           {"record_counts", counts}};
    set_out(out_json, j.dump(2));
  });
}

int relsim_generate_workload(const char* workload_config_text,
                             int32_t use_seed_override, uint64_t seed_override,
                             relsim_trace** out) {
  return guarded([&] {
    need(workload_config_text && out, "null pointer argument");
    WorkloadConfig cfg =
        workload_config_from_flat(FlatConfig::parse(workload_config_text));
    if (use_seed_override) cfg.seed = seed_override;
    std::vector<JobSpec> jobs = generate_workload(cfg);
    FlatConfig resolved = workload_config_to_flat(cfg);
    auto t = std::make_unique<relsim_trace>();
    t->file = TraceFile::from_workload(jobs, cfg.seed, config_hash(resolved));
    t->file.header["config"] = resolved.canonical();
    *out = t.release();
  });
}

int relsim_simulate(const char* cluster_config_text,
                    const relsim_trace* workload, uint64_t seed,
                    relsim_trace** out_trace) {
  return guarded([&] {
    need(cluster_config_text && workload && out_trace, "null pointer argument");
    ClusterConfig cfg =
        cluster_config_from_flat(FlatConfig::parse(cluster_config_text));
    std::vector<JobSpec> specs = workload->file.job_specs();
    require(!specs.empty(), Errc::invalid_argument,
            "workload trace holds no job records");
    SimTrace sim = run_simulation(cfg, specs, seed);
    auto t = std::make_unique<relsim_trace>();
    t->file = TraceFile::from_sim(sim);
    t->file.header["config"] = cluster_config_to_flat(cfg).canonical();
    *out_trace = t.release();
  });
}

int relsim_sim_summary_json(const relsim_trace* sim_trace, char** out_json) {
  return guarded([&] {
    need(sim_trace && out_json, "null pointer argument");
    TraceView v = view_of(*sim_trace, true);

    size_t attempts = 0;
    double queue_h = 0.0, productive_h = 0.0, unproductive_h = 0.0;
    json states = json::object();
    for (const JobRunRecord& r : v.runs) {
      attempts += r.attempts.size();
      queue_h += r.queue_time.to_hours();
      productive_h += r.productive_time.to_hours();
      unproductive_h += r.unproductive_time.to_hours();
      std::string s = to_string(r.final_state);
      states[s] = states.value(s, 0LL) + 1;
    }
    double wall_h = queue_h + productive_h + unproductive_h;

    json by_state = json::array();
    for (const StatusRow& row : status_breakdown(v.runs)) {
      by_state.push_back(json{{"state", to_string(row.state)},
                              {"runs", row.runs},
                              {"attempts", row.attempts},
                              {"gpu_hours", row.gpu_hours}});
    }

    GoodputBreakdown g = goodput_loss_attribution(runs_only_trace(v));

    long long scans = 0, flagged = 0;
    for (const json& r : sim_trace->file.records) {
      if (r.value("type", "") != "lemon_scan") continue;
      ++scans;
      if (auto it = r.find("flagged"); it != r.end() && it->is_array())
        flagged += static_cast<long long>(it->size());
    }

    json j{{"kind", sim_trace->file.header.value("kind", "")},
           {"config_hash", v.prov.config_hash},
           {"end_time_s", v.end_time.s},
           {"nodes", v.nodes.size()},
           {"runs", v.runs.size()},
           {"attempts", attempts},
           {"final_states", states},
           {"queue_hours", queue_h},
           {"productive_hours", productive_h},
           {"unproductive_hours", unproductive_h},
           {"aggregate_ettr", wall_h > 0.0 ? productive_h / wall_h : 0.0},
           {"gpu_hours_by_state", by_state},
           {"goodput_loss",
            json{{"first_order_gpu_hours", g.first_order_gpu_hours},
                 {"second_order_gpu_hours", g.second_order_gpu_hours}}},
           {"health_events", v.events.size()},
           {"node_transitions", v.transitions.size()},
           {"lemon_scans", scans},
           {"lemon_flagged", flagged}};
    if (v.prov.seed) j["seed"] = *v.prov.seed;
    set_out(out_json, j.dump(2));
  });
}

int relsim_job_run_ettr(const relsim_trace* sim_trace,
                        const char* logical_run_id,
                        const relsim_log_ettr_assumptions* assume,
                        double* out_ettr) {
  return guarded([&] {
    need(sim_trace && logical_run_id && assume && out_ettr,
         "null pointer argument");
    TraceView v = view_of(*sim_trace, true);
    const JobRunRecord* run = nullptr;
    for (const JobRunRecord& r : v.runs)
      if (r.logical_run_id == logical_run_id) run = &r;
    require(run != nullptr, Errc::invalid_argument,
            std::string("no run named ") + logical_run_id + " in the trace");
    LogEttrAssumptions a;
    a.restart_overhead = TimeSpan::seconds(assume->restart_overhead_s);
    a.checkpoint_write = TimeSpan::seconds(assume->checkpoint_write_s);
    a.failure_rate = FailureRate{assume->failure_rate_per_node_day};
    if (assume->interval_override_s > 0.0)
      a.interval_override = TimeSpan::seconds(assume->interval_override_s);
    if (assume->min_total_scheduled_s > 0.0)
      a.min_total_scheduled = TimeSpan::seconds(assume->min_total_scheduled_s);
    *out_ettr = job_run_ettr_from_log(*run, a);
  });
}

int relsim_attribute_csv(const relsim_trace* sim_trace, double pre_window_s,
                         double post_window_s, char** out_csv) {
  return guarded([&] {
    need(sim_trace && out_csv, "null pointer argument");
    TraceView v = view_of(*sim_trace, true);
    AttributionOptions opt;
    if (pre_window_s >= 0.0) opt.pre_window = TimeSpan::seconds(pre_window_s);
    if (post_window_s >= 0.0) opt.post_window = TimeSpan::seconds(post_window_s);
    AttributionResult res =
        attribute_failures(flat_log(v.runs), time_sorted(v.events), opt);
    set_out(out_csv, failure_records_csv(res.records, v.prov));
  });
}

int relsim_estimate_failure_rate(const relsim_trace* sim_trace,
                                 int32_t min_gpus, double* out_rate,
                                 double* out_ci_lower, double* out_ci_upper,
                                 long long* out_failures,
                                 double* out_exposure_node_days) {
  return guarded([&] {
    need(sim_trace && out_rate && out_ci_lower && out_ci_upper &&
             out_failures && out_exposure_node_days,
         "null pointer argument");
    TraceView v = view_of(*sim_trace, true);
    std::vector<JobLogEntry> log = flat_log(v.runs);
    AttributionResult res = attribute_failures(log, time_sorted(v.events));
    RateEstimate est = estimate_failure_rate(res.records, log,
                                             min_gpus >= 0 ? min_gpus : 128);
    *out_rate = est.rate.per_node_day;
    *out_ci_lower = est.ci_lower.per_node_day;
    *out_ci_upper = est.ci_upper.per_node_day;
    *out_failures = est.failures;
    *out_exposure_node_days = est.exposure_node_days;
  });
}

int relsim_status_csv(const relsim_trace* sim_trace, char** out_csv) {
  return guarded([&] {
    need(sim_trace && out_csv, "null pointer argument");
    TraceView v = view_of(*sim_trace, true);
    set_out(out_csv, status_breakdown_csv(status_breakdown(v.runs), v.prov));
  });
}

int relsim_rolling_rate_csv(const relsim_trace* sim_trace, double window_s,
                            int32_t by_cause, char** out_csv) {
  return guarded([&] {
    need(sim_trace && out_csv, "null pointer argument");
    TraceView v = view_of(*sim_trace, true);
    std::vector<JobLogEntry> log = flat_log(v.runs);
    AttributionResult res = attribute_failures(log, time_sorted(v.events));
    TimeSpan window =
        window_s > 0.0 ? TimeSpan::seconds(window_s) : TimeSpan::days(30);
    std::vector<RollingRatePoint> series =
        rolling_failure_rate(log, res.records, window, by_cause != 0);
    set_out(out_csv, rolling_rate_csv(series, by_cause != 0, v.prov));
  });
}

int relsim_rolling_rate_svg(const relsim_trace* sim_trace, double window_s,
                            char** out_svg) {
  return guarded([&] {
    need(sim_trace && out_svg, "null pointer argument");
    TraceView v = view_of(*sim_trace, true);
    std::vector<JobLogEntry> log = flat_log(v.runs);
    AttributionResult res = attribute_failures(log, time_sorted(v.events));
    TimeSpan window =
        window_s > 0.0 ? TimeSpan::seconds(window_s) : TimeSpan::days(30);
    std::vector<RollingRatePoint> series =
        rolling_failure_rate(log, res.records, window, false);
    set_out(out_svg, rolling_rate_svg(series, v.prov));
  });
}

int relsim_mttf_by_size_csv(const relsim_trace* sim_trace,
                            const int32_t* bucket_lo_hi, size_t n_buckets,
                            double rate_per_node_day, char** out_csv) {
  return guarded([&] {
    need(sim_trace && out_csv, "null pointer argument");
    TraceView v = view_of(*sim_trace, true);
    std::vector<JobLogEntry> log = flat_log(v.runs);
    AttributionResult res = attribute_failures(log, time_sorted(v.events));
    MttfSizeTable table =
        mttf_by_job_size(log, res.records, buckets_of(bucket_lo_hi, n_buckets),
                         FailureRate{rate_per_node_day});
    set_out(out_csv, mttf_table_csv(table, v.prov));
  });
}

int relsim_mttf_by_size_svg(const relsim_trace* sim_trace,
                            const int32_t* bucket_lo_hi, size_t n_buckets,
                            double rate_per_node_day, char** out_svg) {
  return guarded([&] {
    need(sim_trace && out_svg, "null pointer argument");
    TraceView v = view_of(*sim_trace, true);
    std::vector<JobLogEntry> log = flat_log(v.runs);
    AttributionResult res = attribute_failures(log, time_sorted(v.events));
    MttfSizeTable table =
        mttf_by_job_size(log, res.records, buckets_of(bucket_lo_hi, n_buckets),
                         FailureRate{rate_per_node_day});
    set_out(out_svg, mttf_by_size_svg(table, v.prov));
  });
}

int relsim_goodput_csv(const relsim_trace* sim_trace, double cap_s,
                       char** out_csv) {
  return guarded([&] {
    need(sim_trace && out_csv, "null pointer argument");
    TraceView v = view_of(*sim_trace, true);
    GoodputBreakdown g = goodput_loss_attribution(
        runs_only_trace(v),
        cap_s > 0.0 ? TimeSpan::seconds(cap_s) : TimeSpan::minutes(30));
    set_out(out_csv, goodput_csv(g, v.prov));
  });
}

int relsim_goodput_svg(const relsim_trace* sim_trace, double cap_s,
                       char** out_svg) {
  return guarded([&] {
    need(sim_trace && out_svg, "null pointer argument");
    TraceView v = view_of(*sim_trace, true);
    GoodputBreakdown g = goodput_loss_attribution(
        runs_only_trace(v),
        cap_s > 0.0 ? TimeSpan::seconds(cap_s) : TimeSpan::minutes(30));
    set_out(out_svg, goodput_histogram_svg(g, v.prov));
  });
}

int relsim_cascade_csv(const relsim_trace* sim_trace, double cap_s,
                       char** out_csv) {
  return guarded([&] {
    need(sim_trace && out_csv, "null pointer argument");
    TraceView v = view_of(*sim_trace, true);
    std::vector<CascadeRow> rows = cascade_report(
        runs_only_trace(v),
        cap_s > 0.0 ? TimeSpan::seconds(cap_s) : TimeSpan::minutes(30));
    set_out(out_csv, cascade_csv(rows, v.prov));
  });
}

int relsim_lemon_signals_csv(const relsim_trace* sim_trace, double window_s,
                             char** out_csv) {
  return guarded([&] {
    need(sim_trace && out_csv, "null pointer argument");
    TraceView v = view_of(*sim_trace, false);
    set_out(out_csv, signals_csv(signals_of(v, window_s), v.prov));
  });
}

int relsim_lemon_classify_csv(const relsim_trace* sim_trace, double window_s,
                              const char* thresholds_text, char** out_csv) {
  return guarded([&] {
    need(sim_trace && out_csv, "null pointer argument");
    TraceView v = view_of(*sim_trace, false);
    std::vector<LemonVerdict> verdicts = classify_lemons(
        signals_of(v, window_s), parse_thresholds(thresholds_text));
    set_out(out_csv, verdicts_csv(verdicts, v.prov));
  });
}

int relsim_lemon_evaluate_json(const relsim_trace* sim_trace, double window_s,
                               const char* thresholds_text, char** out_json) {
  return guarded([&] {
    need(sim_trace && out_json, "null pointer argument");
    TraceView v = view_of(*sim_trace, false);
    LemonThresholds th = parse_thresholds(thresholds_text);
    std::vector<LemonVerdict> verdicts =
        classify_lemons(signals_of(v, window_s), th);
    std::vector<std::string> truth = true_lemons_of(v);
    DetectionMetrics m = evaluate_detection(verdicts, truth);
    json flagged = json::array();
    for (const LemonVerdict& vd : verdicts)
      if (vd.flagged) flagged.push_back(vd.node_id);
    json j{{"threshold_set_id", th.id()},
           {"nodes", verdicts.size()},
           {"true_lemons", truth.size()},
           {"flagged", flagged},
           {"metrics", metrics_json(m)}};
    set_out(out_json, j.dump(2));
  });
}

int relsim_lemon_tune_json(const relsim_trace* sim_trace, double window_s,
                           double recall_floor, char** out_json) {
  return guarded([&] {
    need(sim_trace && out_json, "null pointer argument");
    TraceView v = view_of(*sim_trace, false);
    TuneOptions opt;
    if (recall_floor >= 0.0) opt.recall_floor = recall_floor;
    TuneResult res =
        tune_thresholds(signals_of(v, window_s), true_lemons_of(v), opt);
    json cutoffs = json::object();
    for (const auto& [name, cut] : res.thresholds.cutoffs) cutoffs[name] = cut;
    json j{{"cutoffs", cutoffs},
           {"threshold_set_id", res.thresholds.id()},
           {"met_recall_floor", res.met_recall_floor},
           {"metrics", metrics_json(res.metrics)}};
    set_out(out_json, j.dump(2));
  });
}

int relsim_lemon_ab_compare_json(const char* cluster_config_text,
                                 const relsim_trace* workload,
                                 const char* thresholds_text, uint64_t seed,
                                 int32_t min_gpus, char** out_json) {
  return guarded([&] {
    need(cluster_config_text && workload && out_json, "null pointer argument");
    ClusterConfig cfg =
        cluster_config_from_flat(FlatConfig::parse(cluster_config_text));
    std::vector<JobSpec> specs = workload->file.job_specs();
    require(!specs.empty(), Errc::invalid_argument,
            "workload trace holds no job records");
    AbComparison c =
        ab_compare_removal(cfg, specs, parse_thresholds(thresholds_text), seed,
                           min_gpus > 0 ? min_gpus : 512);
    json j{{"seed", seed},
           {"min_gpus", min_gpus > 0 ? min_gpus : 512},
           {"without_detector",
            json{{"jobs", c.jobs_without},
                 {"failures", c.failures_without},
                 {"failure_fraction", c.without_fraction}}},
           {"with_detector",
            json{{"jobs", c.jobs_with},
                 {"failures", c.failures_with},
                 {"failure_fraction", c.with_fraction}}},
           {"relative_reduction", c.relative_reduction},
           {"flagged_nodes", c.flagged_nodes}};
    set_out(out_json, j.dump(2));
  });
}

}  // extern "C"
