#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "core/job_types.hpp"
#include "core/node_types.hpp"

namespace relsim {

struct SimTrace;  // simulator.hpp

// Event kinds recorded on the simulator timeline. Enum order is the
// tie-break order for events at equal timestamps.
enum class SimEventKind {
  Submit,
  Start,
  NodeFailure,
  HealthTick,
  CheckpointDone,
  Complete,
  Preempt,
  Requeue,
  NodeRemediated,
};

const char* to_string(SimEventKind k);
SimEventKind sim_event_kind_from_string(std::string_view s);

struct EventRecord {
  TimePoint time{};
  SimEventKind kind{SimEventKind::Submit};
  std::string job_id;
  std::string logical_run_id;
  std::string node_id;
};

// Line-oriented trace container. Line 1 is a header object; every further
// line is one typed record. Records are kept as raw JSON so unknown fields
// survive a read/write cycle byte-for-byte at the JSON level.
struct TraceFile {
  nlohmann::json header = default_header();
  std::vector<nlohmann::json> records;

  static nlohmann::json default_header();
  static TraceFile read_file(const std::string& path);
  static TraceFile parse(const std::string& text, const std::string& origin);
  void write_file(const std::string& path) const;
  std::string serialize() const;

  // Typed views. Each scans and converts records of one type, raising
  // Errc::parse with the record index on malformed content.
  std::vector<Node> nodes() const;
  std::vector<JobRunRecord> job_runs() const;
  std::vector<JobSpec> job_specs() const;
  std::vector<HealthCheckEvent> health_events() const;
  std::vector<NodeTransition> node_transitions() const;
  std::vector<EventRecord> events() const;

  static TraceFile from_workload(const std::vector<JobSpec>& jobs,
                                 uint64_t seed, const std::string& config_hash);
  static TraceFile from_sim(const SimTrace& sim);
};

// Record-level JSON codecs, shared by the trace container and tools.
nlohmann::json job_spec_to_json(const JobSpec& s);
JobSpec job_spec_from_json(const nlohmann::json& j);
nlohmann::json job_run_to_json(const JobRunRecord& r);
JobRunRecord job_run_from_json(const nlohmann::json& j);
nlohmann::json node_to_json(const Node& n);
Node node_from_json(const nlohmann::json& j);
nlohmann::json health_event_to_json(const HealthCheckEvent& e);
HealthCheckEvent health_event_from_json(const nlohmann::json& j);
nlohmann::json node_transition_to_json(const NodeTransition& t);
NodeTransition node_transition_from_json(const nlohmann::json& j);
nlohmann::json event_to_json(const EventRecord& e);
EventRecord event_from_json(const nlohmann::json& j);

}  // namespace relsim
