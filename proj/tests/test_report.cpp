#include <doctest.h>

#include <cstdio>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/report.hpp"

using namespace relsim;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

SweepResult small_sweep() {
  SweepSpec spec;
  spec.n_nodes = 512;
  spec.restart_overhead = TimeSpan::seconds(300);
  spec.required_productive = TimeSpan::days(30);
  spec.failure_rate_per_day = {1e-3, 1e-2, 4};
  spec.checkpoint_write_s = {30.0, 300.0, 4};
  return ettr_sweep(spec);
}

bool well_formed_svg(const std::string& svg, const std::string& hash) {
  return svg.rfind("<svg", 0) == 0 &&
         svg.find("</svg>") != std::string::npos &&
         svg.find("<!-- relsim") != std::string::npos &&
         (hash.empty() || svg.find("config=" + hash) != std::string::npos);
}

}  // namespace

TEST_CASE("provenance comments carry exactly the known fields") {
  CHECK(provenance_comment({"deadbeef", 42}) ==
        "# relsim 1.0.0 config=deadbeef seed=42");
  CHECK(provenance_comment({"deadbeef", std::nullopt}) ==
        "# relsim 1.0.0 config=deadbeef");
  CHECK(provenance_comment({"", 7}) == "# relsim 1.0.0 seed=7");
  CHECK(provenance_comment({}) == "# relsim 1.0.0");
}

TEST_CASE("sweep CSV rows mirror the grid") {
  SweepResult sweep = small_sweep();
  std::string csv = sweep_csv(sweep, {"cafe", 5});
  std::vector<std::string> lines = lines_of(csv);
  REQUIRE(lines.size() == 2 + sweep.cells.size());
  CHECK(lines[0] == "# relsim 1.0.0 config=cafe seed=5");
  CHECK(lines[1] ==
        "rate_per_node_day,checkpoint_write_s,interval_s,ettr,valid,floored");
  CHECK(lines[2].find(",true,false") != std::string::npos);
}

TEST_CASE("goodput CSV leads with the fleet total") {
  GoodputBreakdown b;
  b.first_order_gpu_hours = 12.5;
  b.second_order_gpu_hours = 3.25;
  GoodputSizeRow row;
  row.gpus = 64;
  row.first_order_gpu_hours = 12.5;
  row.second_order_gpu_hours = 3.25;
  b.by_size = {row};
  std::vector<std::string> lines = lines_of(goodput_csv(b, {}));
  REQUIRE(lines.size() == 4);
  CHECK(lines[1] == "scope,gpus,first_order_gpu_hours,second_order_gpu_hours");
  CHECK(lines[2] == "total,,12.5,3.25");
  CHECK(lines[3] == "size,64,12.5,3.25");
}

TEST_CASE("status CSV spells states in log form") {
  StatusRow r;
  r.state = JobState::NodeFail;
  r.runs = 2;
  r.attempts = 5;
  r.gpu_hours = 7.5;
  std::vector<std::string> lines = lines_of(status_breakdown_csv({r}, {}));
  CHECK(lines[1] == "state,runs,attempts,gpu_hours");
  CHECK(lines[2] == "NODE_FAIL,2,5,7.5");
}

TEST_CASE("rolling CSV appends one column per cause when asked") {
  RollingRatePoint pt;
  pt.time = TimePoint{2 * 86400.0};
  pt.failures = 3;
  pt.exposure_node_days = 6.0;
  pt.rate_per_1000_node_days = 500.0;
  pt.by_cause[FailureCause::GpuMemory] = 2;

  std::vector<std::string> plain = lines_of(rolling_rate_csv({pt}, false, {}));
  CHECK(plain[1] == "time_days,failures,exposure_node_days,rate_per_1000_node_days");
  CHECK(plain[2] == "2,3,6,500");

  std::vector<std::string> wide = lines_of(rolling_rate_csv({pt}, true, {}));
  size_t commas = 0;
  for (char ch : wide[1])
    if (ch == ',') ++commas;
  CHECK(commas == 3 + static_cast<size_t>(kFailureCauseCount));
  CHECK(wide[1].find("GPU_MEMORY") != std::string::npos);
}

TEST_CASE("verdict and failure-record CSVs join lists with pipes") {
  LemonVerdict v;
  v.node_id = "n3";
  v.flagged = true;
  v.triggering_signals = {"tickets", "out_count"};
  v.threshold_set_id = "abc";
  std::vector<std::string> lines = lines_of(verdicts_csv({v}, {}));
  CHECK(lines[1] == "node_id,flagged,triggering_signals,threshold_set_id");
  CHECK(lines[2] == "n3,true,tickets|out_count,abc");

  FailureRecord r;
  r.job_id = "j1";
  r.logical_run_id = "r1";
  r.attempt_index = 2;
  r.gpus = 64;
  r.end_time = TimePoint{100.5};
  r.end_state = JobState::Failed;
  r.attributed_cause = FailureCause::GpuMemory;
  r.attributed_node = "n3";
  r.co_occurring = {FailureCause::IbLink, FailureCause::GpuDriver};
  r.nodes = {"n3", "n4"};
  std::vector<std::string> rl = lines_of(failure_records_csv({r}, {}));
  CHECK(rl[1].rfind("job_id,logical_run_id,attempt_index", 0) == 0);
  CHECK(rl[2].find("j1,r1,2,64,2,100.5,FAILED,GPU_MEMORY,n3,") !=
        std::string::npos);
  CHECK(rl[2].find("|") != std::string::npos);
}

TEST_CASE("signals and cascade CSVs render one row per item") {
  NodeSignals s;
  s.node_id = "n1";
  s.multi_node_node_fails = 4;
  s.window = TimeSpan::days(28);
  std::vector<std::string> sl = lines_of(signals_csv({s}, {}));
  REQUIRE(sl.size() == 3);
  CHECK(sl[2] == "n1,0,0,0,0,4,0,0,28");

  CascadeRow c;
  c.logical_run_id = "r9";
  c.gpus = 512;
  c.failure_requeues = 2;
  c.victims = 3;
  c.victim_gpu_hours = 1.5;
  std::vector<std::string> cl = lines_of(cascade_csv({c}, {}));
  CHECK(cl[1] == "logical_run_id,gpus,failure_requeues,victims,victim_gpu_hours");
  CHECK(cl[2] == "r9,512,2,3,1.5");
}

TEST_CASE("mttf CSV converts spans to hours") {
  MttfSizeRow row;
  row.nodes_lo = 2;
  row.nodes_hi = 2;
  row.mean_nodes = 2.0;
  row.attempts = 4;
  row.failures = 1;
  row.exposure_days = 3.0;
  row.empirical_mttf = TimeSpan::days(3);
  row.mttf_ci_lower = TimeSpan::hours(12);
  row.mttf_ci_upper = TimeSpan::hours(400);
  row.projected_mttf = TimeSpan::hours(100);
  MttfSizeTable table;
  table.rows = {row};
  std::vector<std::string> lines = lines_of(mttf_table_csv(table, {}));
  CHECK(lines[1] ==
        "nodes_lo,nodes_hi,mean_nodes,attempts,failures,exposure_days,"
        "empirical_mttf_h,mttf_ci_lo_h,mttf_ci_hi_h,projected_mttf_h");
  CHECK(lines[2] == "2,2,2,4,1,3,72,12,400,100");
}

TEST_CASE("contour SVG is self-contained and stamped") {
  SweepResult sweep = small_sweep();
  std::string svg = sweep_contour_svg(sweep, {"beef", 9});
  CHECK(well_formed_svg(svg, "beef"));
  CHECK(svg.find("seed=9") != std::string::npos);
  CHECK(svg.find("<rect") != std::string::npos);  // heatmap cells
  CHECK(svg.find("<path") != std::string::npos);  // contour lines
  CHECK(svg.find("http://www.w3.org/2000/svg") != std::string::npos);

  SweepResult empty = sweep;
  empty.cells.clear();
  try {
    (void)sweep_contour_svg(empty, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("no cells") != std::string::npos);
  }
}

TEST_CASE("the other chart renderers produce stamped SVG too") {
  MttfSizeRow row;
  row.nodes_lo = 2;
  row.nodes_hi = 4;
  row.mean_nodes = 3.0;
  row.attempts = 10;
  row.failures = 2;
  row.exposure_days = 8.0;
  row.empirical_mttf = TimeSpan::days(4);
  row.mttf_ci_lower = TimeSpan::days(1);
  row.mttf_ci_upper = TimeSpan::days(20);
  row.projected_mttf = TimeSpan::days(5);
  MttfSizeTable table;
  table.rows = {row};
  CHECK(well_formed_svg(mttf_by_size_svg(table, {"aa", 1}), "aa"));
  CHECK_THROWS_AS((void)mttf_by_size_svg(MttfSizeTable{}, {}), Error);

  RollingRatePoint pt;
  pt.time = TimePoint{86400.0};
  pt.failures = 1;
  pt.exposure_node_days = 4.0;
  pt.rate_per_1000_node_days = 250.0;
  RollingRatePoint pt2 = pt;
  pt2.time = TimePoint{2 * 86400.0};
  CHECK(well_formed_svg(rolling_rate_svg({pt, pt2}, {"bb", 2}), "bb"));
  CHECK_THROWS_AS((void)rolling_rate_svg({}, {}), Error);

  GoodputBreakdown b;
  b.first_order_gpu_hours = 10.0;
  b.second_order_gpu_hours = 5.0;
  GoodputSizeRow r;
  r.gpus = 32;
  r.first_order_gpu_hours = 10.0;
  r.second_order_gpu_hours = 5.0;
  b.by_size = {r};
  CHECK(well_formed_svg(goodput_histogram_svg(b, {"cc", 3}), "cc"));
  CHECK_THROWS_AS((void)goodput_histogram_svg(GoodputBreakdown{}, {}), Error);
}

TEST_CASE("text files round-trip and missing paths raise") {
  std::string path = "/tmp/relsim_report_test.txt";
  std::string content = "line one\nline two\n";
  write_text_file(path, content);
  CHECK(read_text_file(path) == content);
  std::remove(path.c_str());

  try {
    (void)read_text_file("/tmp/definitely-not-here-12345.txt");
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::io);
  }
}
