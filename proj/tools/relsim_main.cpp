// relsim command-line front end. Talks to the core exclusively through the
// C API in relsim.h; owns argument parsing, file IO, and output routing.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "relsim.h"

namespace {

using nlohmann::json;

struct CliError {
  int code;
  std::string msg;
};

[[noreturn]] void usage_fail(const std::string& msg) {
  throw CliError{2, msg};
}

[[noreturn]] void run_fail(const std::string& msg) {
  throw CliError{1, msg};
}

void check_rc(int rc) {
  if (rc != RELSIM_OK) run_fail(relsim_last_error());
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  relsim_string_free(s);
  return out;
}

struct TraceHandle {
  relsim_trace* t{nullptr};
  TraceHandle() = default;
  explicit TraceHandle(relsim_trace* p) : t(p) {}
  TraceHandle(const TraceHandle&) = delete;
  TraceHandle& operator=(const TraceHandle&) = delete;
  TraceHandle(TraceHandle&& o) noexcept : t(o.t) { o.t = nullptr; }
  ~TraceHandle() { relsim_trace_free(t); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) run_fail("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

TraceHandle open_trace(const std::string& path) {
  TraceHandle h;
  check_rc(relsim_trace_read(path.c_str(), &h.t));
  return h;
}

// Shared flags, inherited by every subcommand via fallthrough.
struct Shared {
  uint64_t seed{0};
  int32_t trials{1000};
  int32_t jobs{0};
  std::string config;
  std::string out;
  std::string format;

  std::string pick_format(const std::string& dflt,
                          std::initializer_list<const char*> allowed) const {
    std::string f = format.empty() ? dflt : format;
    for (const char* a : allowed)
      if (f == a) return f;
    usage_fail("--format " + f + " is not valid for this command");
  }

  void emit(const std::string& content) const {
    if (out.empty() || out == "-") {
      std::cout << content;
      if (!content.empty() && content.back() != '\n') std::cout << '\n';
      return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) run_fail("cannot write " + out);
    f << content;
    if (!f) run_fail("cannot write " + out);
    std::cerr << "# wrote " << out << "\n";
  }
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Reproducibility header: tool version, seed, and the resolved inputs of
// this run, as stderr comment lines.
void print_header(const std::string& command, uint64_t seed,
                  const KeyValues& resolved,
                  const std::string& config_text = "") {
  std::ostringstream os;
  os << "# relsim " << relsim_version() << " " << command << "\n";
  os << "# seed = " << seed << "\n";
  for (const auto& [k, v] : resolved) os << "# " << k << " = " << v << "\n";
  if (!config_text.empty()) {
    os << "# config:\n";
    std::istringstream lines(config_text);
    std::string line;
    while (std::getline(lines, line)) os << "#   " << line << "\n";
  }
  std::cerr << os.str();
}

std::string fnum(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<double> parse_levels(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      usage_fail("bad contour level: " + item);
    }
  }
  return out;
}

// "1-1,2-4,33-64" -> flat lo,hi pairs.
std::vector<int32_t> parse_buckets(const std::string& text) {
  std::vector<int32_t> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    size_t dash = item.find('-');
    if (dash == std::string::npos) usage_fail("bucket needs lo-hi: " + item);
    try {
      out.push_back(static_cast<int32_t>(std::stol(item.substr(0, dash))));
      out.push_back(static_cast<int32_t>(std::stol(item.substr(dash + 1))));
    } catch (const std::exception&) {
      usage_fail("bad bucket bounds: " + item);
    }
  }
  if (out.empty()) usage_fail("--buckets is empty");
  return out;
}

uint64_t header_seed(const relsim_trace* t) {
  char* s = nullptr;
  check_rc(relsim_trace_info_json(t, &s));
  json info = json::parse(take_string(s));
  return info["header"].value("seed", 0ULL);
}

// ---- subcommand bodies ----

struct EttrArgs {
  int32_t nodes{0};
  double rate{0.0};
  double u0{300.0};
  double wcp{300.0};
  double interval{0.0};
  double queue{0.0};
  double productive{30.0 * 86400.0};
  std::string policy{"daly-young"};
  std::string formula{"full"};
  bool mc{false};
};

void run_ettr(const Shared& g, const EttrArgs& a) {
  relsim_ettr_params p{a.nodes, a.rate,  a.u0,       a.wcp,
                       a.interval, a.queue, a.productive};
  double dt = a.interval;
  if (a.policy == "daly-young") {
    check_rc(relsim_optimal_checkpoint_interval(a.wcp, a.nodes, a.rate, &dt));
  } else if (a.policy == "numeric") {
    check_rc(relsim_numeric_optimal_interval(&p, &dt));
  } else if (dt <= 0.0) {
    usage_fail("--policy fixed needs --interval > 0");
  }
  p.checkpoint_interval_s = dt;

  print_header("ettr", g.seed,
               {{"nodes", std::to_string(a.nodes)},
                {"rate_per_node_day", fnum(a.rate)},
                {"u0_s", fnum(a.u0)},
                {"wcp_s", fnum(a.wcp)},
                {"queue_s", fnum(a.queue)},
                {"productive_s", fnum(a.productive)},
                {"interval_s", fnum(dt)},
                {"policy", a.policy},
                {"formula", a.formula}});

  json j{{"nodes", a.nodes},
         {"rate_per_node_day", a.rate},
         {"u0_s", a.u0},
         {"wcp_s", a.wcp},
         {"queue_s", a.queue},
         {"productive_s", a.productive},
         {"interval_s", dt},
         {"policy", a.policy},
         {"formula", a.formula}};
  if (a.formula == "full") {
    relsim_ettr_estimate e{};
    check_rc(relsim_expected_ettr_full(&p, &e));
    j["ettr"] = e.value;
    j["expected_failures"] = e.expected_failures;
    j["expected_slowdown"] = e.expected_slowdown;
    j["regime_term"] = e.regime_term;
  } else {
    double v = 0.0, nf = 0.0;
    check_rc(relsim_expected_ettr_simplified(&p, &v));
    check_rc(relsim_expected_failures(&p, &nf));
    j["ettr"] = v;
    j["expected_failures"] = nf;
  }
  if (a.mc) {
    double mean = 0.0, se = 0.0;
    check_rc(relsim_monte_carlo_ettr(&p, g.trials, g.seed, 0, 1.0, g.jobs,
                                     &mean, &se));
    j["monte_carlo"] = json{{"mean", mean},
                            {"stderr", se},
                            {"trials", g.trials},
                            {"seed", g.seed}};
  }
  g.emit(j.dump(2));
}

struct MttfArgs {
  int32_t gpus{0};
  double rate{0.0};
  int32_t gpus_per_node{8};
  std::string trace;
  std::string buckets;
};

void run_mttf(const Shared& g, const MttfArgs& a) {
  if (!a.trace.empty()) {
    if (a.buckets.empty()) usage_fail("--trace mode needs --buckets");
    std::vector<int32_t> b = parse_buckets(a.buckets);
    TraceHandle t = open_trace(a.trace);
    print_header("mttf", header_seed(t.t),
                 {{"trace", a.trace},
                  {"buckets", a.buckets},
                  {"rate_per_node_day", fnum(a.rate)}});
    std::string fmt = g.pick_format("csv", {"csv", "svg"});
    char* s = nullptr;
    if (fmt == "csv") {
      check_rc(relsim_mttf_by_size_csv(t.t, b.data(), b.size() / 2, a.rate, &s));
    } else {
      check_rc(relsim_mttf_by_size_svg(t.t, b.data(), b.size() / 2, a.rate, &s));
    }
    g.emit(take_string(s));
    return;
  }
  if (a.gpus <= 0) usage_fail("need --gpus (projection) or --trace (table)");
  double hours = 0.0;
  check_rc(relsim_project_mttf_hours(a.gpus, a.rate, a.gpus_per_node, &hours));
  print_header("mttf", g.seed,
               {{"gpus", std::to_string(a.gpus)},
                {"rate_per_node_day", fnum(a.rate)},
                {"gpus_per_node", std::to_string(a.gpus_per_node)}});
  char line[96];
  std::snprintf(line, sizeof line, "# projected MTTF = %.2f h\n", hours);
  std::cerr << line;
  json j{{"gpus", a.gpus},
         {"rate_per_node_day", a.rate},
         {"gpus_per_node", a.gpus_per_node},
         {"mttf_hours", hours},
         {"mttf_days", hours / 24.0}};
  g.emit(j.dump(2));
}

struct SweepArgs {
  int32_t nodes{0};
  double u0{300.0};
  double queue{0.0};
  double productive{30.0 * 86400.0};
  double rate_lo{5e-4}, rate_hi{1e-2};
  int32_t rate_points{25};
  double write_lo{30.0}, write_hi{3000.0};
  int32_t write_points{25};
  double min_interval{0.0};
  std::string formula{"simplified"};
  std::string levels;
};

void run_sweep(const Shared& g, const SweepArgs& a) {
  if (a.rate_points <= 0 || a.write_points <= 0)
    run_fail("no cells in sweep grid");
  relsim_sweep_spec s{a.nodes,      a.u0,          a.queue,
                      a.productive, a.rate_lo,     a.rate_hi,
                      a.rate_points, a.write_lo,   a.write_hi,
                      a.write_points, a.min_interval,
                      a.formula == "full" ? 1 : 0};
  print_header("sweep", g.seed,
               {{"nodes", std::to_string(a.nodes)},
                {"u0_s", fnum(a.u0)},
                {"queue_s", fnum(a.queue)},
                {"productive_s", fnum(a.productive)},
                {"rate_axis", fnum(a.rate_lo) + ".." + fnum(a.rate_hi) + " x" +
                                  std::to_string(a.rate_points)},
                {"write_axis", fnum(a.write_lo) + ".." + fnum(a.write_hi) +
                                   " x" + std::to_string(a.write_points)},
                {"formula", a.formula}});
  std::string fmt = g.pick_format("csv", {"csv", "svg"});
  char* out = nullptr;
  if (fmt == "csv") {
    check_rc(relsim_ettr_sweep_csv(&s, &out));
  } else if (a.levels.empty()) {
    check_rc(relsim_ettr_sweep_svg(&s, nullptr, 0, &out));
  } else {
    std::vector<double> lv = parse_levels(a.levels);
    check_rc(relsim_ettr_sweep_svg(&s, lv.data(), lv.size(), &out));
  }
  g.emit(take_string(out));
}

struct SimulateArgs {
  std::string workload;
  bool summary{false};
};

void run_simulate(const Shared& g, const SimulateArgs& a) {
  if (g.config.empty()) usage_fail("simulate needs --config <cluster config>");
  if (a.workload.empty()) usage_fail("simulate needs --workload <trace>");
  std::string cfg_text = read_file(g.config);
  TraceHandle w = open_trace(a.workload);
  print_header("simulate", g.seed,
               {{"config", g.config}, {"workload", a.workload}}, cfg_text);
  TraceHandle sim;
  check_rc(relsim_simulate(cfg_text.c_str(), w.t, g.seed, &sim.t));
  if (g.out.empty() || g.out == "-") {
    char* text = nullptr;
    check_rc(relsim_trace_serialize(sim.t, &text));
    std::cout << take_string(text);
  } else {
    check_rc(relsim_trace_write(sim.t, g.out.c_str()));
    std::cerr << "# wrote " << g.out << "\n";
  }
  if (a.summary) {
    char* s = nullptr;
    check_rc(relsim_sim_summary_json(sim.t, &s));
    std::cout << take_string(s) << "\n";
  }
}

struct GenloadArgs {
  long long count{0};
};

void run_genload(const Shared& g, const GenloadArgs& a, bool seed_given) {
  std::string cfg_text = g.config.empty() ? std::string() : read_file(g.config);
  if (a.count > 0)
    cfg_text += "\njob_count = " + std::to_string(a.count) + "\n";
  TraceHandle t;
  check_rc(relsim_generate_workload(cfg_text.c_str(), seed_given ? 1 : 0,
                                    g.seed, &t.t));
  print_header("genload", header_seed(t.t),
               {{"config", g.config.empty() ? "<defaults>" : g.config},
                {"job_count", a.count > 0 ? std::to_string(a.count)
                                          : std::string("<config>")}},
               cfg_text);
  if (g.out.empty() || g.out == "-") {
    char* text = nullptr;
    check_rc(relsim_trace_serialize(t.t, &text));
    std::cout << take_string(text);
  } else {
    check_rc(relsim_trace_write(t.t, g.out.c_str()));
    std::cerr << "# wrote " << g.out << "\n";
  }
}

struct AttributeArgs {
  std::string trace;
  double pre{600.0};
  double post{300.0};
  bool rate{false};
  int32_t min_gpus{128};
};

void run_attribute(const Shared& g, const AttributeArgs& a) {
  if (a.trace.empty()) usage_fail("attribute needs --trace");
  TraceHandle t = open_trace(a.trace);
  print_header("attribute", header_seed(t.t),
               {{"trace", a.trace},
                {"pre_window_s", fnum(a.pre)},
                {"post_window_s", fnum(a.post)}});
  if (a.rate) {
    double rate = 0.0, lo = 0.0, hi = 0.0, exposure = 0.0;
    long long failures = 0;
    check_rc(relsim_estimate_failure_rate(t.t, a.min_gpus, &rate, &lo, &hi,
                                          &failures, &exposure));
    json j{{"min_gpus", a.min_gpus},
           {"failures", failures},
           {"exposure_node_days", exposure},
           {"rate_per_node_day", rate},
           {"rate_per_1000_node_days", rate * 1000.0},
           {"ci90_lower_per_node_day", lo},
           {"ci90_upper_per_node_day", hi}};
    g.emit(j.dump(2));
    return;
  }
  char* s = nullptr;
  check_rc(relsim_attribute_csv(t.t, a.pre, a.post, &s));
  g.emit(take_string(s));
}

struct LemonArgs {
  std::string trace;
  std::string thresholds;
  std::string thresholds_out;
  std::string workload;
  double window_days{28.0};
  double recall_floor{0.5};
  int32_t min_gpus{512};
};

std::string read_thresholds(const std::string& path) {
  if (path.empty()) usage_fail("needs --thresholds <file>");
  return read_file(path);
}

void run_lemons_signals(const Shared& g, const LemonArgs& a) {
  if (a.trace.empty()) usage_fail("lemons signals needs --trace");
  TraceHandle t = open_trace(a.trace);
  print_header("lemons signals", header_seed(t.t),
               {{"trace", a.trace}, {"window_days", fnum(a.window_days)}});
  char* s = nullptr;
  check_rc(relsim_lemon_signals_csv(t.t, a.window_days * 86400.0, &s));
  g.emit(take_string(s));
}

void run_lemons_classify(const Shared& g, const LemonArgs& a) {
  if (a.trace.empty()) usage_fail("lemons classify needs --trace");
  TraceHandle t = open_trace(a.trace);
  std::string th = read_thresholds(a.thresholds);
  print_header("lemons classify", header_seed(t.t),
               {{"trace", a.trace},
                {"window_days", fnum(a.window_days)},
                {"thresholds", a.thresholds}});
  char* s = nullptr;
  check_rc(relsim_lemon_classify_csv(t.t, a.window_days * 86400.0, th.c_str(),
                                     &s));
  g.emit(take_string(s));
}

void run_lemons_evaluate(const Shared& g, const LemonArgs& a) {
  if (a.trace.empty()) usage_fail("lemons evaluate needs --trace");
  TraceHandle t = open_trace(a.trace);
  std::string th = read_thresholds(a.thresholds);
  print_header("lemons evaluate", header_seed(t.t),
               {{"trace", a.trace},
                {"window_days", fnum(a.window_days)},
                {"thresholds", a.thresholds}});
  char* s = nullptr;
  check_rc(relsim_lemon_evaluate_json(t.t, a.window_days * 86400.0, th.c_str(),
                                      &s));
  g.emit(take_string(s));
}

void run_lemons_tune(const Shared& g, const LemonArgs& a) {
  if (a.trace.empty()) usage_fail("lemons tune needs --trace");
  TraceHandle t = open_trace(a.trace);
  print_header("lemons tune", header_seed(t.t),
               {{"trace", a.trace},
                {"window_days", fnum(a.window_days)},
                {"recall_floor", fnum(a.recall_floor)}});
  char* s = nullptr;
  check_rc(relsim_lemon_tune_json(t.t, a.window_days * 86400.0, a.recall_floor,
                                  &s));
  std::string out = take_string(s);
  if (!a.thresholds_out.empty()) {
    json j = json::parse(out);
    std::ostringstream os;
    os << "# tuned lemon cutoffs (" << j.value("threshold_set_id", "")
       << ")\n";
    for (const auto& [name, cut] : j["cutoffs"].items())
      os << name << " = " << cut.get<double>() << "\n";
    std::ofstream f(a.thresholds_out);
    if (!f) run_fail("cannot write " + a.thresholds_out);
    f << os.str();
    std::cerr << "# wrote " << a.thresholds_out << "\n";
  }
  g.emit(out);
}

void run_lemons_ab(const Shared& g, const LemonArgs& a) {
  if (g.config.empty()) usage_fail("lemons ab needs --config <cluster config>");
  if (a.workload.empty()) usage_fail("lemons ab needs --workload <trace>");
  std::string cfg_text = read_file(g.config);
  std::string th = read_thresholds(a.thresholds);
  TraceHandle w = open_trace(a.workload);
  print_header("lemons ab", g.seed,
               {{"config", g.config},
                {"workload", a.workload},
                {"thresholds", a.thresholds},
                {"min_gpus", std::to_string(a.min_gpus)}},
               cfg_text);
  char* s = nullptr;
  check_rc(relsim_lemon_ab_compare_json(cfg_text.c_str(), w.t, th.c_str(),
                                        g.seed, a.min_gpus, &s));
  g.emit(take_string(s));
}

struct ReportArgs {
  std::string trace;
  double cap{0.0};
  double window_days{30.0};
  bool by_cause{false};
  std::string buckets;
  double rate{0.0};
};

void run_report(const Shared& g, const std::string& kind, const ReportArgs& a) {
  if (a.trace.empty()) usage_fail("report " + kind + " needs --trace");
  TraceHandle t = open_trace(a.trace);
  print_header("report " + kind, header_seed(t.t), {{"trace", a.trace}});
  char* s = nullptr;
  if (kind == "summary") {
    g.pick_format("json", {"json"});
    check_rc(relsim_sim_summary_json(t.t, &s));
  } else if (kind == "info") {
    g.pick_format("json", {"json"});
    check_rc(relsim_trace_info_json(t.t, &s));
  } else if (kind == "status") {
    g.pick_format("csv", {"csv"});
    check_rc(relsim_status_csv(t.t, &s));
  } else if (kind == "cascade") {
    g.pick_format("csv", {"csv"});
    check_rc(relsim_cascade_csv(t.t, a.cap, &s));
  } else if (kind == "goodput") {
    if (g.pick_format("csv", {"csv", "svg"}) == "csv")
      check_rc(relsim_goodput_csv(t.t, a.cap, &s));
    else
      check_rc(relsim_goodput_svg(t.t, a.cap, &s));
  } else {  // rolling
    double window = a.window_days * 86400.0;
    if (g.pick_format("csv", {"csv", "svg"}) == "csv")
      check_rc(relsim_rolling_rate_csv(t.t, window, a.by_cause ? 1 : 0, &s));
    else
      check_rc(relsim_rolling_rate_svg(t.t, window, &s));
  }
  g.emit(take_string(s));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reliability modeling for gang-scheduled GPU clusters"};
  app.set_version_flag("--version", std::string("relsim ") + relsim_version());
  app.require_subcommand(1);

  Shared g;
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--trials", g.trials, "Monte-Carlo trials");
  app.add_option("--jobs", g.jobs, "worker threads (0 = all cores)");
  app.add_option("--config", g.config, "flat key = value config file");
  app.add_option("--out", g.out, "output path (default stdout)");
  app.add_option("--format", g.format, "csv, json, or svg")
      ->check(CLI::IsMember({"csv", "json", "svg"}));

  EttrArgs ettr;
  CLI::App* c_ettr =
      app.add_subcommand("ettr", "closed-form expected ETTR of a run");
  c_ettr->fallthrough();
  c_ettr->add_option("--nodes", ettr.nodes, "allocation size, nodes")
      ->required();
  c_ettr->add_option("--rate", ettr.rate, "failures per node-day")->required();
  c_ettr->add_option("--u0", ettr.u0, "restart overhead, seconds");
  c_ettr->add_option("--wcp", ettr.wcp, "checkpoint write cost, seconds");
  c_ettr->add_option("--interval", ettr.interval,
                     "checkpoint interval, seconds (with --policy fixed)");
  c_ettr->add_option("--queue", ettr.queue, "mean requeue wait, seconds");
  c_ettr->add_option("--productive", ettr.productive,
                     "required productive time, seconds");
  c_ettr->add_option("--policy", ettr.policy, "checkpoint interval policy")
      ->check(CLI::IsMember({"fixed", "daly-young", "numeric"}));
  c_ettr->add_option("--formula", ettr.formula, "estimator variant")
      ->check(CLI::IsMember({"full", "simplified"}));
  c_ettr->add_flag("--mc", ettr.mc, "also run the Monte-Carlo estimator");
  c_ettr->callback([&] { run_ettr(g, ettr); });

  MttfArgs mttf;
  CLI::App* c_mttf = app.add_subcommand(
      "mttf", "projected MTTF, or the per-size empirical table from a trace");
  c_mttf->fallthrough();
  c_mttf->add_option("--gpus", mttf.gpus, "job size, GPUs");
  c_mttf->add_option("--rate", mttf.rate, "failures per node-day")->required();
  c_mttf->add_option("--gpus-per-node", mttf.gpus_per_node, "GPUs per node");
  c_mttf->add_option("--trace", mttf.trace, "sim trace for the table mode");
  c_mttf->add_option("--buckets", mttf.buckets,
                     "node-count buckets, e.g. 1-1,2-4,5-16");
  c_mttf->callback([&] { run_mttf(g, mttf); });

  SweepArgs sweep;
  CLI::App* c_sweep = app.add_subcommand(
      "sweep", "ETTR across a failure-rate x checkpoint-cost grid");
  c_sweep->fallthrough();
  c_sweep->add_option("--nodes", sweep.nodes, "allocation size")->required();
  c_sweep->add_option("--u0", sweep.u0, "restart overhead, seconds");
  c_sweep->add_option("--queue", sweep.queue, "mean requeue wait, seconds");
  c_sweep->add_option("--productive", sweep.productive,
                      "required productive time, seconds");
  c_sweep->add_option("--rate-lo", sweep.rate_lo, "rate axis low bound");
  c_sweep->add_option("--rate-hi", sweep.rate_hi, "rate axis high bound");
  c_sweep->add_option("--rate-points", sweep.rate_points, "rate axis points");
  c_sweep->add_option("--write-lo", sweep.write_lo, "write-cost low, seconds");
  c_sweep->add_option("--write-hi", sweep.write_hi, "write-cost high, seconds");
  c_sweep->add_option("--write-points", sweep.write_points,
                      "write-cost axis points");
  c_sweep->add_option("--min-interval", sweep.min_interval,
                      "interval floor, seconds (0 keeps default)");
  c_sweep->add_option("--formula", sweep.formula, "estimator variant")
      ->check(CLI::IsMember({"full", "simplified"}));
  c_sweep->add_option("--levels", sweep.levels,
                      "contour levels for --format svg, comma separated");
  c_sweep->callback([&] { run_sweep(g, sweep); });

  SimulateArgs sim;
  CLI::App* c_sim = app.add_subcommand(
      "simulate", "discrete-event cluster simulation of a workload trace");
  c_sim->fallthrough();
  c_sim->add_option("--workload", sim.workload, "workload trace (jsonl)");
  c_sim->add_flag("--summary", sim.summary, "print the outcome summary JSON");
  c_sim->callback([&] { run_simulate(g, sim); });

  GenloadArgs genload;
  CLI::App* c_gen =
      app.add_subcommand("genload", "draw a synthetic workload trace");
  c_gen->fallthrough();
  c_gen->add_option("--count", genload.count, "job count override");
  c_gen->callback(
      [&] { run_genload(g, genload, app.count("--seed") > 0); });

  AttributeArgs attr;
  CLI::App* c_attr = app.add_subcommand(
      "attribute", "blame failed attempts on co-located health events");
  c_attr->fallthrough();
  c_attr->add_option("--trace", attr.trace, "sim trace (jsonl)");
  c_attr->add_option("--pre", attr.pre, "window before attempt end, seconds");
  c_attr->add_option("--post", attr.post, "window after attempt end, seconds");
  c_attr->add_flag("--rate", attr.rate, "emit the fleet rate estimate instead");
  c_attr->add_option("--min-gpus", attr.min_gpus,
                     "rate mode: count attempts above this size");
  c_attr->callback([&] { run_attribute(g, attr); });

  LemonArgs lemon;
  CLI::App* c_lemon = app.add_subcommand(
      "lemons", "failure-attracting node signals, detection, and A/B");
  c_lemon->require_subcommand(1);
  auto lemon_common = [&](CLI::App* s, bool trace, bool thresholds) {
    s->fallthrough();
    if (trace) s->add_option("--trace", lemon.trace, "sim trace (jsonl)");
    s->add_option("--window-days", lemon.window_days, "signal window, days");
    if (thresholds)
      s->add_option("--thresholds", lemon.thresholds,
                    "flat cutoff file: <signal> = <value>");
  };
  CLI::App* c_sig =
      c_lemon->add_subcommand("signals", "per-node counters, CSV");
  lemon_common(c_sig, true, false);
  c_sig->callback([&] { run_lemons_signals(g, lemon); });
  CLI::App* c_cls =
      c_lemon->add_subcommand("classify", "apply cutoffs, verdict CSV");
  lemon_common(c_cls, true, true);
  c_cls->callback([&] { run_lemons_classify(g, lemon); });
  CLI::App* c_eval = c_lemon->add_subcommand(
      "evaluate", "verdicts vs seeded ground truth, JSON");
  lemon_common(c_eval, true, true);
  c_eval->callback([&] { run_lemons_evaluate(g, lemon); });
  CLI::App* c_tune =
      c_lemon->add_subcommand("tune", "grid-search cutoffs, JSON");
  lemon_common(c_tune, true, false);
  c_tune->add_option("--recall-floor", lemon.recall_floor,
                     "minimum acceptable recall");
  c_tune->add_option("--thresholds-out", lemon.thresholds_out,
                     "also write the cutoffs as a flat config file");
  c_tune->callback([&] { run_lemons_tune(g, lemon); });
  CLI::App* c_ab = c_lemon->add_subcommand(
      "ab", "same-seed simulation pair, detector off vs on, JSON");
  lemon_common(c_ab, false, true);
  c_ab->add_option("--workload", lemon.workload, "workload trace (jsonl)");
  c_ab->add_option("--min-gpus", lemon.min_gpus,
                   "large-job floor for the failure fraction");
  c_ab->callback([&] { run_lemons_ab(g, lemon); });

  ReportArgs rep;
  CLI::App* c_rep =
      app.add_subcommand("report", "artifacts derived from a sim trace");
  c_rep->require_subcommand(1);
  const char* kinds[] = {"summary", "info",    "status",
                         "goodput", "cascade", "rolling"};
  const char* kind_help[] = {
      "runs, states, Q/R/U totals, goodput loss (JSON)",
      "trace header and record counts (JSON)",
      "runs/attempts/GPU-hours by final state (CSV)",
      "lost GPU-hours by job size (CSV or SVG)",
      "requeue/preemption fan-out per run (CSV)",
      "trailing-window failure rate (CSV or SVG)"};
  for (size_t i = 0; i < 6; ++i) {
    CLI::App* s = c_rep->add_subcommand(kinds[i], kind_help[i]);
    s->fallthrough();
    s->add_option("--trace", rep.trace, "sim trace (jsonl)");
    if (std::string(kinds[i]) == "goodput" ||
        std::string(kinds[i]) == "cascade")
      s->add_option("--cap", rep.cap, "lost-work cap per attempt, seconds");
    if (std::string(kinds[i]) == "rolling") {
      s->add_option("--window-days", rep.window_days, "window length, days");
      s->add_flag("--by-cause", rep.by_cause, "add per-cause columns");
    }
    std::string kind = kinds[i];
    s->callback([&g, &rep, kind] { run_report(g, kind, rep); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.msg << "\n";
    return e.code;
  }
  return 0;
}
