#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/ettr_analytic.hpp"
#include "core/failure_stats.hpp"
#include "core/lemon.hpp"
#include "core/simulator.hpp"
#include "core/workload.hpp"

namespace relsim {

// Stamped into every artifact so results stay traceable to their inputs.
struct Provenance {
  std::string config_hash;            // empty: no config involved
  std::optional<uint64_t> seed{};     // unset: deterministic artifact
};

// "# relsim <version> config=<hash> seed=<seed>" (fields present as known).
std::string provenance_comment(const Provenance& p);

// CSV renderings. First line is the provenance comment, second the header
// row. Fields never contain commas or quotes, so no escaping is applied.
// List-valued fields are joined with '|'.
std::string sweep_csv(const SweepResult& sweep, const Provenance& p);
std::string mttf_table_csv(const MttfSizeTable& table, const Provenance& p);
std::string rolling_rate_csv(const std::vector<RollingRatePoint>& series,
                             bool by_cause, const Provenance& p);
std::string goodput_csv(const GoodputBreakdown& breakdown,
                        const Provenance& p);
std::string status_breakdown_csv(const std::vector<StatusRow>& rows,
                                 const Provenance& p);
std::string signals_csv(const std::vector<NodeSignals>& signals,
                        const Provenance& p);
std::string verdicts_csv(const std::vector<LemonVerdict>& verdicts,
                         const Provenance& p);
std::string failure_records_csv(const std::vector<FailureRecord>& records,
                                const Provenance& p);
std::string cascade_csv(const std::vector<CascadeRow>& rows,
                        const Provenance& p);

// Self-contained SVG charts (no external assets); provenance rides in an
// XML comment. All raise on empty input.

// Filled log-log ETTR landscape over (r_f, w_cp) with labeled contour
// level sets, marching-squares extracted.
std::string sweep_contour_svg(
    const SweepResult& sweep, const Provenance& p,
    const std::vector<double>& levels = {0.7, 0.8, 0.9, 0.95, 0.99});

// Empirical MTTF points with confidence whiskers against the 1/N
// projection, log-log.
std::string mttf_by_size_svg(const MttfSizeTable& table, const Provenance& p);

// Trailing-window failure rate over time.
std::string rolling_rate_svg(const std::vector<RollingRatePoint>& series,
                             const Provenance& p);

// First- versus second-order lost GPU-hours, grouped by job size.
std::string goodput_histogram_svg(const GoodputBreakdown& breakdown,
                                  const Provenance& p);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace relsim
