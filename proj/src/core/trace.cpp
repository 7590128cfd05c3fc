#include "core/trace.hpp"

#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/simulator.hpp"
#include "core/version.hpp"

namespace relsim {

using nlohmann::json;

const char* to_string(SimEventKind k) {
  switch (k) {
    case SimEventKind::Submit: return "SUBMIT";
    case SimEventKind::Start: return "START";
    case SimEventKind::NodeFailure: return "NODE_FAILURE";
    case SimEventKind::HealthTick: return "HEALTH_TICK";
    case SimEventKind::CheckpointDone: return "CHECKPOINT_DONE";
    case SimEventKind::Complete: return "COMPLETE";
    case SimEventKind::Preempt: return "PREEMPT";
    case SimEventKind::Requeue: return "REQUEUE";
    case SimEventKind::NodeRemediated: return "NODE_REMEDIATED";
  }
  return "SUBMIT";
}

SimEventKind sim_event_kind_from_string(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(SimEventKind::NodeRemediated); ++i) {
    auto k = static_cast<SimEventKind>(i);
    if (s == to_string(k)) return k;
  }
  raise(Errc::parse, "unknown event kind: " + std::string(s));
}

namespace {

double get_num(const json& j, const char* key, double dflt = 0.0) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  require(it->is_number(), Errc::parse,
          std::string("field ") + key + " must be a number");
  return it->get<double>();
}

std::string get_str(const json& j, const char* key,
                    const std::string& dflt = "") {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  require(it->is_string(), Errc::parse,
          std::string("field ") + key + " must be a string");
  return it->get<std::string>();
}

bool get_flag(const json& j, const char* key, bool dflt = false) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  require(it->is_boolean(), Errc::parse,
          std::string("field ") + key + " must be a boolean");
  return it->get<bool>();
}

}  // namespace

json job_spec_to_json(const JobSpec& s) {
  json j;
  j["job_id"] = s.job_id;
  j["logical_run_id"] = s.logical_run_id;
  j["gpus"] = s.gpus;
  j["priority"] = s.priority;
  j["submit_time_s"] = s.submit_time.s;
  j["required_productive_s"] = s.required_productive_time.s;
  j["checkpoint_interval_s"] = s.checkpoint_interval.s;
  j["checkpoint_write_s"] = s.checkpoint_write_overhead.s;
  j["restart_overhead_s"] = s.restart_overhead.s;
  if (s.max_lifetime.s > 0.0) j["max_lifetime_s"] = s.max_lifetime.s;
  return j;
}

JobSpec job_spec_from_json(const json& j) {
  JobSpec s;
  s.job_id = get_str(j, "job_id");
  s.logical_run_id = get_str(j, "logical_run_id", s.job_id);
  s.gpus = static_cast<int>(get_num(j, "gpus", 1));
  s.priority = static_cast<int>(get_num(j, "priority", 0));
  s.submit_time = TimePoint{get_num(j, "submit_time_s")};
  s.required_productive_time = TimeSpan{get_num(j, "required_productive_s")};
  s.checkpoint_interval = TimeSpan{get_num(j, "checkpoint_interval_s")};
  s.checkpoint_write_overhead = TimeSpan{get_num(j, "checkpoint_write_s")};
  s.restart_overhead = TimeSpan{get_num(j, "restart_overhead_s")};
  s.max_lifetime = TimeSpan{get_num(j, "max_lifetime_s")};
  require(s.gpus >= 1, Errc::parse, "job " + s.job_id + ": gpus must be >= 1");
  require(s.required_productive_time.s > 0.0, Errc::parse,
          "job " + s.job_id + ": required_productive_s must be positive");
  return s;
}

namespace {

json attempt_to_json(const JobAttempt& a) {
  json j;
  j["attempt_index"] = a.attempt_index;
  j["start_s"] = a.start_time.s;
  j["end_s"] = a.end_time.s;
  j["end_state"] = to_string(a.end_state);
  j["nodes"] = a.nodes;
  if (a.checkpoints_written > 0) {
    j["checkpoints_written"] = a.checkpoints_written;
    j["last_checkpoint_s"] = a.last_checkpoint_completion.s;
  }
  if (a.surviving_productive_s > 0.0)
    j["surviving_productive_s"] = a.surviving_productive_s;
  if (!a.failing_node.empty()) j["failing_node"] = a.failing_node;
  if (!a.preempted_by.empty()) {
    j["preempted_by"] = a.preempted_by;
    if (a.preempted_by_requeued_failure) j["preempted_by_requeued_failure"] = true;
  }
  if (a.requeue_after_failure) j["requeue_after_failure"] = true;
  return j;
}

JobAttempt attempt_from_json(const json& j) {
  JobAttempt a;
  a.attempt_index = static_cast<int>(get_num(j, "attempt_index"));
  a.start_time = TimePoint{get_num(j, "start_s")};
  a.end_time = TimePoint{get_num(j, "end_s")};
  a.end_state = job_state_from_string(get_str(j, "end_state", "PENDING"));
  if (auto it = j.find("nodes"); it != j.end()) {
    require(it->is_array(), Errc::parse, "attempt nodes must be an array");
    for (const auto& n : *it) a.nodes.push_back(n.get<std::string>());
  }
  a.checkpoints_written = static_cast<int>(get_num(j, "checkpoints_written"));
  a.last_checkpoint_completion = TimePoint{get_num(j, "last_checkpoint_s")};
  a.surviving_productive_s = get_num(j, "surviving_productive_s");
  a.failing_node = get_str(j, "failing_node");
  a.preempted_by = get_str(j, "preempted_by");
  a.preempted_by_requeued_failure = get_flag(j, "preempted_by_requeued_failure");
  a.requeue_after_failure = get_flag(j, "requeue_after_failure");
  return a;
}

}  // namespace

json job_run_to_json(const JobRunRecord& r) {
  json j;
  j["type"] = "job";
  j["logical_run_id"] = r.logical_run_id;
  j["spec"] = job_spec_to_json(r.spec);
  json attempts = json::array();
  for (const JobAttempt& a : r.attempts) attempts.push_back(attempt_to_json(a));
  j["attempts"] = std::move(attempts);
  j["queue_time_s"] = r.queue_time.s;
  j["productive_time_s"] = r.productive_time.s;
  j["unproductive_time_s"] = r.unproductive_time.s;
  j["final_state"] = to_string(r.final_state);
  return j;
}

JobRunRecord job_run_from_json(const json& j) {
  JobRunRecord r;
  require(j.contains("spec"), Errc::parse, "job record missing spec");
  r.spec = job_spec_from_json(j.at("spec"));
  r.logical_run_id = get_str(j, "logical_run_id", r.spec.logical_run_id);
  if (auto it = j.find("attempts"); it != j.end()) {
    require(it->is_array(), Errc::parse, "job attempts must be an array");
    for (const auto& a : *it) r.attempts.push_back(attempt_from_json(a));
  }
  r.queue_time = TimeSpan{get_num(j, "queue_time_s")};
  r.productive_time = TimeSpan{get_num(j, "productive_time_s")};
  r.unproductive_time = TimeSpan{get_num(j, "unproductive_time_s")};
  r.final_state = job_state_from_string(get_str(j, "final_state", "PENDING"));
  require(r.queue_time.s >= 0.0 && r.productive_time.s >= 0.0 &&
              r.unproductive_time.s >= 0.0,
          Errc::parse, "run " + r.logical_run_id + ": negative time component");
  return r;
}

json node_to_json(const Node& n) {
  json j;
  j["type"] = "node";
  j["node_id"] = n.node_id;
  j["gpus"] = n.gpus;
  j["base_failure_rate_per_day"] = n.base_failure_rate.per_node_day;
  j["lemon_multiplier"] = n.lemon_multiplier;
  j["state"] = to_string(n.state);
  return j;
}

Node node_from_json(const json& j) {
  Node n;
  n.node_id = get_str(j, "node_id");
  require(!n.node_id.empty(), Errc::parse, "node record missing node_id");
  n.gpus = static_cast<int>(get_num(j, "gpus", kDefaultGpusPerNode));
  n.base_failure_rate = FailureRate{get_num(j, "base_failure_rate_per_day")};
  n.lemon_multiplier = get_num(j, "lemon_multiplier", 1.0);
  n.state = node_state_from_string(get_str(j, "state", "AVAILABLE"));
  return n;
}

json health_event_to_json(const HealthCheckEvent& e) {
  json j;
  j["type"] = "health_event";
  j["node_id"] = e.node_id;
  j["time_s"] = e.time.s;
  j["check_kind"] = to_string(e.check_kind);
  j["severity"] = to_string(e.severity);
  if (e.is_false_positive) j["false_positive"] = true;
  return j;
}

HealthCheckEvent health_event_from_json(const json& j) {
  HealthCheckEvent e;
  e.node_id = get_str(j, "node_id");
  require(!e.node_id.empty(), Errc::parse, "health event missing node_id");
  e.time = TimePoint{get_num(j, "time_s")};
  e.check_kind = failure_cause_from_string(get_str(j, "check_kind"));
  e.severity = severity_from_string(get_str(j, "severity", "HIGH"));
  e.is_false_positive = get_flag(j, "false_positive");
  return e;
}

json node_transition_to_json(const NodeTransition& t) {
  json j;
  j["type"] = "node_transition";
  j["node_id"] = t.node_id;
  j["time_s"] = t.time.s;
  j["from"] = to_string(t.from);
  j["to"] = to_string(t.to);
  if (!t.reason.empty()) j["reason"] = t.reason;
  return j;
}

NodeTransition node_transition_from_json(const json& j) {
  NodeTransition t;
  t.node_id = get_str(j, "node_id");
  require(!t.node_id.empty(), Errc::parse, "node transition missing node_id");
  t.time = TimePoint{get_num(j, "time_s")};
  t.from = node_state_from_string(get_str(j, "from", "AVAILABLE"));
  t.to = node_state_from_string(get_str(j, "to", "AVAILABLE"));
  t.reason = get_str(j, "reason");
  return t;
}

json event_to_json(const EventRecord& e) {
  json j;
  j["type"] = "event";
  j["time_s"] = e.time.s;
  j["kind"] = to_string(e.kind);
  if (!e.job_id.empty()) j["job_id"] = e.job_id;
  if (!e.logical_run_id.empty()) j["logical_run_id"] = e.logical_run_id;
  if (!e.node_id.empty()) j["node_id"] = e.node_id;
  return j;
}

EventRecord event_from_json(const json& j) {
  EventRecord e;
  e.time = TimePoint{get_num(j, "time_s")};
  e.kind = sim_event_kind_from_string(get_str(j, "kind"));
  e.job_id = get_str(j, "job_id");
  e.logical_run_id = get_str(j, "logical_run_id");
  e.node_id = get_str(j, "node_id");
  return e;
}

json TraceFile::default_header() {
  return json{{"schema", "relsim-trace"},
              {"version", 1},
              {"tool", std::string(kToolName) + " " + kToolVersion}};
}

TraceFile TraceFile::parse(const std::string& text, const std::string& origin) {
  TraceFile t;
  std::istringstream in(text);
  std::string line;
  long long lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      raise(Errc::parse,
            origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!have_header) {
      require(j.is_object() && j.value("schema", "") == "relsim-trace",
              Errc::parse,
              origin + ":1: not a relsim trace (missing schema marker)");
      int version = j.value("version", -1);
      require(version == 1, Errc::parse,
              origin + ":1: unsupported trace version " +
                  std::to_string(version));
      t.header = std::move(j);
      have_header = true;
      continue;
    }
    require(j.is_object() && j.contains("type"), Errc::parse,
            origin + ":" + std::to_string(lineno) +
                ": record missing type field");
    t.records.push_back(std::move(j));
  }
  require(have_header, Errc::parse, origin + ": empty trace (no header line)");
  return t;
}

TraceFile TraceFile::read_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io, "cannot open trace file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

std::string TraceFile::serialize() const {
  std::string out = header.dump();
  out += '\n';
  for (const json& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

void TraceFile::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), Errc::io, "cannot open trace file for write: " + path);
  out << serialize();
  require(out.good(), Errc::io, "short write to trace file: " + path);
}

namespace {

// Wraps per-record converters with the record index for error reports.
template <typename T, typename Fn>
std::vector<T> collect(const std::vector<json>& records, const char* type,
                       Fn&& convert) {
  std::vector<T> out;
  for (size_t i = 0; i < records.size(); ++i) {
    if (records[i].value("type", "") != type) continue;
    try {
      out.push_back(convert(records[i]));
    } catch (const Error&) {
      throw;
    } catch (const json::exception& e) {
      raise(Errc::parse,
            "record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<Node> TraceFile::nodes() const {
  return collect<Node>(records, "node", node_from_json);
}

std::vector<JobRunRecord> TraceFile::job_runs() const {
  return collect<JobRunRecord>(records, "job", job_run_from_json);
}

std::vector<JobSpec> TraceFile::job_specs() const {
  return collect<JobSpec>(records, "job", [](const json& j) {
    require(j.contains("spec"), Errc::parse, "job record missing spec");
    return job_spec_from_json(j.at("spec"));
  });
}

std::vector<HealthCheckEvent> TraceFile::health_events() const {
  return collect<HealthCheckEvent>(records, "health_event",
                                   health_event_from_json);
}

std::vector<NodeTransition> TraceFile::node_transitions() const {
  return collect<NodeTransition>(records, "node_transition",
                                 node_transition_from_json);
}

std::vector<EventRecord> TraceFile::events() const {
  return collect<EventRecord>(records, "event", event_from_json);
}

TraceFile TraceFile::from_workload(const std::vector<JobSpec>& jobs,
                                   uint64_t seed,
                                   const std::string& config_hash) {
  TraceFile t;
  t.header["kind"] = "workload";
  t.header["seed"] = seed;
  if (!config_hash.empty()) t.header["config_hash"] = config_hash;
  t.records.reserve(jobs.size());
  for (const JobSpec& s : jobs) {
    JobRunRecord r;
    r.logical_run_id = s.logical_run_id;
    r.spec = s;
    t.records.push_back(job_run_to_json(r));
  }
  return t;
}

TraceFile TraceFile::from_sim(const SimTrace& sim) {
  TraceFile t;
  t.header["kind"] = "simulation";
  t.header["seed"] = sim.seed;
  t.header["config_hash"] = sim.config_hash;
  t.header["end_time_s"] = sim.end_time.s;
  t.records.reserve(sim.nodes.size() + sim.runs.size() +
                    sim.health_events.size() + sim.node_transitions.size() +
                    sim.events.size());
  for (const Node& n : sim.nodes) t.records.push_back(node_to_json(n));
  for (const JobRunRecord& r : sim.runs) t.records.push_back(job_run_to_json(r));
  for (const HealthCheckEvent& e : sim.health_events)
    t.records.push_back(health_event_to_json(e));
  for (const NodeTransition& tr : sim.node_transitions)
    t.records.push_back(node_transition_to_json(tr));
  for (const EventRecord& e : sim.events) t.records.push_back(event_to_json(e));
  if (!sim.lemon_scans.empty()) {
    for (const LemonScanRecord& scan : sim.lemon_scans) {
      json j;
      j["type"] = "lemon_scan";
      j["time_s"] = scan.time.s;
      json flagged = json::array();
      for (const auto& v : scan.flagged) flagged.push_back(v);
      j["flagged"] = std::move(flagged);
      t.records.push_back(std::move(j));
    }
  }
  return t;
}

}  // namespace relsim
