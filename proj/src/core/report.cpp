#include "core/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/version.hpp"

namespace relsim {

namespace {

std::string fd(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fd2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string join(const std::vector<std::string>& parts, char sep = '|') {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Pixel mapping for one axis; p0 > p1 flips (SVG y grows downward).
struct Scale {
  double lo{0.0}, hi{1.0};
  double p0{0.0}, p1{1.0};
  double operator()(double v) const {
    return p0 + (v - lo) / (hi - lo) * (p1 - p0);
  }
};

struct Frame {
  double width{760.0}, height{540.0};
  double ml{72.0}, mr{24.0}, mt{40.0}, mb{56.0};
  double plot_left() const { return ml; }
  double plot_right() const { return width - mr; }
  double plot_top() const { return mt; }
  double plot_bottom() const { return height - mb; }
};

void svg_open(std::ostringstream& svg, const Frame& f, const Provenance& p,
              const std::string& title) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width
      << "\" height=\"" << f.height << "\" viewBox=\"0 0 " << f.width << " "
      << f.height << "\" font-family=\"sans-serif\">\n";
  svg << "<!-- " << xml_escape(provenance_comment(p).substr(2)) << " -->\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << f.width / 2 << "\" y=\"" << f.mt - 16
      << "\" text-anchor=\"middle\" font-size=\"15\" fill=\"#222\">"
      << xml_escape(title) << "</text>\n";
}

void svg_axes_box(std::ostringstream& svg, const Frame& f) {
  svg << "<rect x=\"" << f.plot_left() << "\" y=\"" << f.plot_top()
      << "\" width=\"" << f.plot_right() - f.plot_left() << "\" height=\""
      << f.plot_bottom() - f.plot_top()
      << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
}

void svg_axis_titles(std::ostringstream& svg, const Frame& f,
                     const std::string& x_title, const std::string& y_title) {
  svg << "<text x=\"" << (f.plot_left() + f.plot_right()) / 2 << "\" y=\""
      << f.height - 12
      << "\" text-anchor=\"middle\" font-size=\"13\" fill=\"#222\">"
      << xml_escape(x_title) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << (f.plot_top() + f.plot_bottom()) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" fill=\"#222\" "
         "transform=\"rotate(-90 18 "
      << (f.plot_top() + f.plot_bottom()) / 2 << ")\">" << xml_escape(y_title)
      << "</text>\n";
}

std::string tick_label(double v) {
  char buf[40];
  double a = std::fabs(v);
  if (v != 0.0 && (a < 1e-3 || a >= 1e5))
    std::snprintf(buf, sizeof buf, "%.0e", v);
  else
    std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Decade ticks for an axis holding log10 values.
void svg_log_ticks_x(std::ostringstream& svg, const Frame& f,
                     const Scale& sx) {
  for (int e = static_cast<int>(std::ceil(sx.lo - 1e-9));
       e <= static_cast<int>(std::floor(sx.hi + 1e-9)); ++e) {
    double px = sx(e);
    svg << "<line x1=\"" << px << "\" y1=\"" << f.plot_bottom() << "\" x2=\""
        << px << "\" y2=\"" << f.plot_top()
        << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << f.plot_bottom() + 18
        << "\" text-anchor=\"middle\" font-size=\"11\" fill=\"#333\">"
        << tick_label(std::pow(10.0, e)) << "</text>\n";
  }
}

void svg_log_ticks_y(std::ostringstream& svg, const Frame& f,
                     const Scale& sy) {
  for (int e = static_cast<int>(std::ceil(sy.lo - 1e-9));
       e <= static_cast<int>(std::floor(sy.hi + 1e-9)); ++e) {
    double py = sy(e);
    svg << "<line x1=\"" << f.plot_left() << "\" y1=\"" << py << "\" x2=\""
        << f.plot_right() << "\" y2=\"" << py
        << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << f.plot_left() - 6 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"#333\">"
        << tick_label(std::pow(10.0, e)) << "</text>\n";
  }
}

double nice_step(double span) {
  double raw = span / 5.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double frac = raw / mag;
  double step = frac < 1.5 ? 1.0 : frac < 3.5 ? 2.0 : frac < 7.5 ? 5.0 : 10.0;
  return step * mag;
}

void svg_linear_ticks_x(std::ostringstream& svg, const Frame& f,
                        const Scale& sx) {
  double step = nice_step(sx.hi - sx.lo);
  for (double v = std::ceil(sx.lo / step) * step; v <= sx.hi + 1e-9;
       v += step) {
    double px = sx(v);
    svg << "<line x1=\"" << px << "\" y1=\"" << f.plot_bottom() << "\" x2=\""
        << px << "\" y2=\"" << f.plot_top()
        << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << f.plot_bottom() + 18
        << "\" text-anchor=\"middle\" font-size=\"11\" fill=\"#333\">"
        << tick_label(v) << "</text>\n";
  }
}

void svg_linear_ticks_y(std::ostringstream& svg, const Frame& f,
                        const Scale& sy) {
  double step = nice_step(sy.hi - sy.lo);
  for (double v = std::ceil(sy.lo / step) * step; v <= sy.hi + 1e-9;
       v += step) {
    double py = sy(v);
    svg << "<line x1=\"" << f.plot_left() << "\" y1=\"" << py << "\" x2=\""
        << f.plot_right() << "\" y2=\"" << py
        << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << f.plot_left() - 6 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"#333\">"
        << tick_label(v) << "</text>\n";
  }
}

struct Seg {
  double x0, y0, x1, y1;
};

// Marching squares over one grid cell; corner layout
//   d(x0,y1) -- c(x1,y1)
//   a(x0,y0) -- b(x1,y0)
void cell_segments(double level, double x0, double x1, double y0, double y1,
                   double va, double vb, double vc, double vd,
                   std::vector<Seg>& out) {
  if (std::isnan(va) || std::isnan(vb) || std::isnan(vc) || std::isnan(vd))
    return;
  auto lerp = [level](double v0, double v1) {
    return (level - v0) / (v1 - v0);
  };
  int code = (va >= level ? 1 : 0) | (vb >= level ? 2 : 0) |
             (vc >= level ? 4 : 0) | (vd >= level ? 8 : 0);
  if (code == 0 || code == 15) return;

  double bx = x0 + (x1 - x0) * lerp(va, vb), by = y0;        // bottom
  double rx = x1, ry = y0 + (y1 - y0) * lerp(vb, vc);        // right
  double tx = x1 + (x0 - x1) * lerp(vc, vd), ty = y1;        // top
  double lx = x0, ly = y1 + (y0 - y1) * lerp(vd, va);        // left

  auto put = [&](double ax, double ay, double cx, double cy) {
    out.push_back({ax, ay, cx, cy});
  };
  switch (code) {
    case 1: put(lx, ly, bx, by); break;
    case 2: put(bx, by, rx, ry); break;
    case 3: put(lx, ly, rx, ry); break;
    case 4: put(rx, ry, tx, ty); break;
    case 6: put(bx, by, tx, ty); break;
    case 7: put(lx, ly, tx, ty); break;
    case 8: put(tx, ty, lx, ly); break;
    case 9: put(bx, by, tx, ty); break;
    case 11: put(rx, ry, tx, ty); break;
    case 12: put(rx, ry, lx, ly); break;
    case 13: put(bx, by, rx, ry); break;
    case 14: put(bx, by, lx, ly); break;
    case 5: {
      bool center = (va + vb + vc + vd) / 4.0 >= level;
      if (center) {
        put(bx, by, rx, ry);
        put(tx, ty, lx, ly);
      } else {
        put(bx, by, lx, ly);
        put(rx, ry, tx, ty);
      }
      break;
    }
    case 10: {
      bool center = (va + vb + vc + vd) / 4.0 >= level;
      if (center) {
        put(bx, by, lx, ly);
        put(rx, ry, tx, ty);
      } else {
        put(bx, by, rx, ry);
        put(tx, ty, lx, ly);
      }
      break;
    }
    default: break;
  }
}

std::string ettr_fill_color(double v) {
  if (std::isnan(v)) return "#d8d8d8";
  double t = std::clamp((v - 0.5) / 0.5, 0.0, 1.0);
  int r = static_cast<int>(std::lround(232 + t * (26 - 232)));
  int g = static_cast<int>(std::lround(245 + t * (107 - 245)));
  int b = static_cast<int>(std::lround(232 + t * (42 - 232)));
  char buf[12];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string provenance_comment(const Provenance& p) {
  std::string s = std::string("# ") + kToolName + " " + kToolVersion;
  if (!p.config_hash.empty()) s += " config=" + p.config_hash;
  if (p.seed) s += " seed=" + std::to_string(*p.seed);
  return s;
}

std::string sweep_csv(const SweepResult& sweep, const Provenance& p) {
  std::string out = provenance_comment(p) + "\n";
  out += "rate_per_node_day,checkpoint_write_s,interval_s,ettr,valid,floored\n";
  for (const SweepCell& c : sweep.cells) {
    out += fd(c.failure_rate_per_day) + "," + fd(c.checkpoint_write_s) + "," +
           fd(c.interval_s) + "," + fd(c.ettr) + "," +
           (c.valid ? "true" : "false") + "," +
           (c.floored ? "true" : "false") + "\n";
  }
  return out;
}

std::string mttf_table_csv(const MttfSizeTable& table, const Provenance& p) {
  std::string out = provenance_comment(p) + "\n";
  out +=
      "nodes_lo,nodes_hi,mean_nodes,attempts,failures,exposure_days,"
      "empirical_mttf_h,mttf_ci_lo_h,mttf_ci_hi_h,projected_mttf_h\n";
  for (const MttfSizeRow& r : table.rows) {
    out += std::to_string(r.nodes_lo) + "," + std::to_string(r.nodes_hi) +
           "," + fd(r.mean_nodes) + "," + std::to_string(r.attempts) + "," +
           std::to_string(r.failures) + "," + fd(r.exposure_days) + "," +
           fd(r.empirical_mttf.to_hours()) + "," +
           fd(r.mttf_ci_lower.to_hours()) + "," +
           fd(r.mttf_ci_upper.to_hours()) + "," +
           fd(r.projected_mttf.to_hours()) + "\n";
  }
  return out;
}

std::string rolling_rate_csv(const std::vector<RollingRatePoint>& series,
                             bool by_cause, const Provenance& p) {
  std::string out = provenance_comment(p) + "\n";
  out += "time_days,failures,exposure_node_days,rate_per_1000_node_days";
  if (by_cause)
    for (int c = 0; c < kFailureCauseCount; ++c)
      out += std::string(",") + to_string(static_cast<FailureCause>(c));
  out += "\n";
  for (const RollingRatePoint& pt : series) {
    out += fd(pt.time.s / kSecondsPerDay) + "," +
           std::to_string(pt.failures) + "," + fd(pt.exposure_node_days) +
           "," + fd(pt.rate_per_1000_node_days);
    if (by_cause) {
      for (int c = 0; c < kFailureCauseCount; ++c) {
        auto it = pt.by_cause.find(static_cast<FailureCause>(c));
        out += "," + std::to_string(it == pt.by_cause.end() ? 0 : it->second);
      }
    }
    out += "\n";
  }
  return out;
}

std::string goodput_csv(const GoodputBreakdown& breakdown,
                        const Provenance& p) {
  std::string out = provenance_comment(p) + "\n";
  out += "scope,gpus,first_order_gpu_hours,second_order_gpu_hours\n";
  out += "total,," + fd(breakdown.first_order_gpu_hours) + "," +
         fd(breakdown.second_order_gpu_hours) + "\n";
  for (const GoodputSizeRow& r : breakdown.by_size)
    out += "size," + std::to_string(r.gpus) + "," +
           fd(r.first_order_gpu_hours) + "," + fd(r.second_order_gpu_hours) +
           "\n";
  return out;
}

std::string status_breakdown_csv(const std::vector<StatusRow>& rows,
                                 const Provenance& p) {
  std::string out = provenance_comment(p) + "\n";
  out += "state,runs,attempts,gpu_hours\n";
  for (const StatusRow& r : rows)
    out += std::string(to_string(r.state)) + "," + std::to_string(r.runs) +
           "," + std::to_string(r.attempts) + "," + fd(r.gpu_hours) + "\n";
  return out;
}

std::string signals_csv(const std::vector<NodeSignals>& signals,
                        const Provenance& p) {
  std::string out = provenance_comment(p) + "\n";
  out +=
      "node_id,excl_jobid_count,xid_cnt,tickets,out_count,"
      "multi_node_node_fails,single_node_node_fails,"
      "single_node_node_failure_rate,window_days\n";
  for (const NodeSignals& s : signals)
    out += s.node_id + "," + std::to_string(s.excl_jobid_count) + "," +
           std::to_string(s.xid_cnt) + "," + std::to_string(s.tickets) + "," +
           std::to_string(s.out_count) + "," +
           std::to_string(s.multi_node_node_fails) + "," +
           std::to_string(s.single_node_node_fails) + "," +
           fd(s.single_node_node_failure_rate) + "," +
           fd(s.window.to_days()) + "\n";
  return out;
}

std::string verdicts_csv(const std::vector<LemonVerdict>& verdicts,
                         const Provenance& p) {
  std::string out = provenance_comment(p) + "\n";
  out += "node_id,flagged,triggering_signals,threshold_set_id\n";
  for (const LemonVerdict& v : verdicts)
    out += v.node_id + "," + (v.flagged ? "true" : "false") + "," +
           join(v.triggering_signals) + "," + v.threshold_set_id + "\n";
  return out;
}

std::string failure_records_csv(const std::vector<FailureRecord>& records,
                                const Provenance& p) {
  std::string out = provenance_comment(p) + "\n";
  out +=
      "job_id,logical_run_id,attempt_index,gpus,node_count,end_time_s,"
      "end_state,attributed_cause,attributed_node,co_occurring\n";
  for (const FailureRecord& r : records) {
    std::vector<std::string> co;
    co.reserve(r.co_occurring.size());
    for (FailureCause c : r.co_occurring) co.push_back(to_string(c));
    out += r.job_id + "," + r.logical_run_id + "," +
           std::to_string(r.attempt_index) + "," + std::to_string(r.gpus) +
           "," + std::to_string(r.nodes.size()) + "," + fd(r.end_time.s) +
           "," + to_string(r.end_state) + "," +
           to_string(r.attributed_cause) + "," + r.attributed_node + "," +
           join(co) + "\n";
  }
  return out;
}

std::string cascade_csv(const std::vector<CascadeRow>& rows,
                        const Provenance& p) {
  std::string out = provenance_comment(p) + "\n";
  out += "logical_run_id,gpus,failure_requeues,victims,victim_gpu_hours\n";
  for (const CascadeRow& r : rows)
    out += r.logical_run_id + "," + std::to_string(r.gpus) + "," +
           std::to_string(r.failure_requeues) + "," +
           std::to_string(r.victims) + "," + fd(r.victim_gpu_hours) + "\n";
  return out;
}

std::string sweep_contour_svg(const SweepResult& sweep, const Provenance& p,
                              const std::vector<double>& levels) {
  require(!sweep.cells.empty(), Errc::invalid_argument, "no cells");
  require(!levels.empty(), Errc::invalid_argument, "no contour levels");
  const size_t nx = sweep.rate_axis.size();
  const size_t ny = sweep.write_axis.size();
  require(nx >= 2 && ny >= 2 && sweep.cells.size() == nx * ny,
          Errc::invalid_argument, "sweep grid is malformed");

  std::vector<double> lx(nx), lyv(ny);
  for (size_t i = 0; i < nx; ++i) lx[i] = std::log10(sweep.rate_axis[i]);
  for (size_t j = 0; j < ny; ++j) lyv[j] = std::log10(sweep.write_axis[j]);
  auto at = [&](size_t i, size_t j) { return sweep.cells[i * ny + j].ettr; };

  Frame f;
  Scale sx{lx.front(), lx.back(), f.plot_left(), f.plot_right()};
  Scale sy{lyv.front(), lyv.back(), f.plot_bottom(), f.plot_top()};

  std::ostringstream svg;
  svg_open(svg, f, p, "expected ETTR at the optimal checkpoint interval");

  for (size_t i = 0; i + 1 < nx; ++i) {
    for (size_t j = 0; j + 1 < ny; ++j) {
      double v = (at(i, j) + at(i + 1, j) + at(i, j + 1) + at(i + 1, j + 1)) /
                 4.0;
      double x0 = sx(lx[i]), x1 = sx(lx[i + 1]);
      double y0 = sy(lyv[j]), y1 = sy(lyv[j + 1]);
      svg << "<rect x=\"" << std::min(x0, x1) << "\" y=\""
          << std::min(y0, y1) << "\" width=\"" << std::fabs(x1 - x0)
          << "\" height=\"" << std::fabs(y1 - y0) << "\" fill=\""
          << ettr_fill_color(v) << "\"/>\n";
    }
  }
  svg_log_ticks_x(svg, f, sx);
  svg_log_ticks_y(svg, f, sy);
  svg_axes_box(svg, f);

  for (double level : levels) {
    std::vector<Seg> segs;
    for (size_t i = 0; i + 1 < nx; ++i)
      for (size_t j = 0; j + 1 < ny; ++j)
        cell_segments(level, lx[i], lx[i + 1], lyv[j], lyv[j + 1], at(i, j),
                      at(i + 1, j), at(i + 1, j + 1), at(i, j + 1), segs);
    if (segs.empty()) continue;
    std::ostringstream path;
    for (const Seg& s : segs)
      path << "M" << fd2(sx(s.x0)) << " " << fd2(sy(s.y0)) << "L"
           << fd2(sx(s.x1)) << " " << fd2(sy(s.y1));
    svg << "<path d=\"" << path.str()
        << "\" stroke=\"#0b3d17\" stroke-width=\"1.6\" fill=\"none\"/>\n";
    std::vector<Seg> by_x = segs;
    std::sort(by_x.begin(), by_x.end(), [](const Seg& a, const Seg& b) {
      return a.x0 + a.x1 < b.x0 + b.x1;
    });
    const Seg& mid = by_x[by_x.size() / 2];
    svg << "<text x=\"" << fd2(sx((mid.x0 + mid.x1) / 2)) << "\" y=\""
        << fd2(sy((mid.y0 + mid.y1) / 2) - 4)
        << "\" font-size=\"11\" fill=\"#0b3d17\" stroke=\"white\" "
           "stroke-width=\"3\" paint-order=\"stroke\" "
           "text-anchor=\"middle\">"
        << tick_label(level) << "</text>\n";
  }
  svg_axis_titles(svg, f, "node failure rate (per node-day)",
                  "checkpoint write overhead (s)");
  svg << "</svg>\n";
  return svg.str();
}

std::string mttf_by_size_svg(const MttfSizeTable& table, const Provenance& p) {
  require(!table.rows.empty(), Errc::invalid_argument, "no rows");
  std::vector<MttfSizeRow> rows = table.rows;
  std::sort(rows.begin(), rows.end(),
            [](const MttfSizeRow& a, const MttfSizeRow& b) {
              return a.mean_nodes < b.mean_nodes;
            });
  double y_lo = 1e300, y_hi = -1e300;
  for (const MttfSizeRow& r : rows) {
    y_lo = std::min({y_lo, r.mttf_ci_lower.to_hours(),
                     r.projected_mttf.to_hours()});
    double hi_candidate = std::isfinite(r.mttf_ci_upper.s)
                              ? r.mttf_ci_upper.to_hours()
                              : r.mttf_ci_lower.to_hours() * 4.0;
    y_hi = std::max({y_hi, hi_candidate, r.projected_mttf.to_hours()});
  }
  Frame f;
  Scale sx{std::log10(rows.front().mean_nodes) - 0.1,
           std::log10(rows.back().mean_nodes) + 0.1, f.plot_left(),
           f.plot_right()};
  Scale sy{std::log10(y_lo) - 0.2, std::log10(y_hi) + 0.2, f.plot_bottom(),
           f.plot_top()};

  std::ostringstream svg;
  svg_open(svg, f, p, "MTTF by job size: simulated vs 1/N projection");
  svg_log_ticks_x(svg, f, sx);
  svg_log_ticks_y(svg, f, sy);
  svg_axes_box(svg, f);

  std::ostringstream proj;
  for (size_t i = 0; i < rows.size(); ++i)
    proj << (i ? "L" : "M") << fd2(sx(std::log10(rows[i].mean_nodes))) << " "
         << fd2(sy(std::log10(rows[i].projected_mttf.to_hours())));
  svg << "<path d=\"" << proj.str()
      << "\" stroke=\"#888\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\" "
         "fill=\"none\"/>\n";

  for (const MttfSizeRow& r : rows) {
    double px = sx(std::log10(r.mean_nodes));
    double lo = sy(std::log10(r.mttf_ci_lower.to_hours()));
    double hi = std::isfinite(r.mttf_ci_upper.s)
                    ? sy(std::log10(r.mttf_ci_upper.to_hours()))
                    : f.plot_top();
    svg << "<line x1=\"" << fd2(px) << "\" y1=\"" << fd2(lo) << "\" x2=\""
        << fd2(px) << "\" y2=\"" << fd2(hi)
        << "\" stroke=\"#1f6feb\" stroke-width=\"1.2\"/>\n";
    if (std::isfinite(r.empirical_mttf.s)) {
      double py = sy(std::log10(r.empirical_mttf.to_hours()));
      svg << "<circle cx=\"" << fd2(px) << "\" cy=\"" << fd2(py)
          << "\" r=\"4\" fill=\"#1f6feb\"/>\n";
    } else {
      svg << "<path d=\"M" << fd2(px - 5) << " " << fd2(lo) << "L"
          << fd2(px + 5) << " " << fd2(lo) << "\" stroke=\"#1f6feb\" "
             "stroke-width=\"2\"/>\n";
    }
  }
  svg << "<text x=\"" << f.plot_right() - 8 << "\" y=\"" << f.plot_top() + 18
      << "\" text-anchor=\"end\" font-size=\"11\" fill=\"#1f6feb\">"
         "simulated (90% CI)</text>\n";
  svg << "<text x=\"" << f.plot_right() - 8 << "\" y=\"" << f.plot_top() + 34
      << "\" text-anchor=\"end\" font-size=\"11\" fill=\"#888\">"
         "projection</text>\n";
  svg_axis_titles(svg, f, "job size (nodes)", "MTTF (hours)");
  svg << "</svg>\n";
  return svg.str();
}

std::string rolling_rate_svg(const std::vector<RollingRatePoint>& series,
                             const Provenance& p) {
  require(!series.empty(), Errc::invalid_argument, "no points");
  double x_lo = series.front().time.s / kSecondsPerDay;
  double x_hi = series.back().time.s / kSecondsPerDay;
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  double y_hi = 0.0;
  for (const RollingRatePoint& pt : series)
    y_hi = std::max(y_hi, pt.rate_per_1000_node_days);
  if (y_hi <= 0.0) y_hi = 1.0;

  Frame f;
  Scale sx{x_lo, x_hi, f.plot_left(), f.plot_right()};
  Scale sy{0.0, y_hi * 1.1, f.plot_bottom(), f.plot_top()};

  std::ostringstream svg;
  svg_open(svg, f, p, "trailing-window failure rate");
  svg_linear_ticks_x(svg, f, sx);
  svg_linear_ticks_y(svg, f, sy);
  svg_axes_box(svg, f);
  std::ostringstream path;
  for (size_t i = 0; i < series.size(); ++i)
    path << (i ? "L" : "M") << fd2(sx(series[i].time.s / kSecondsPerDay))
         << " " << fd2(sy(series[i].rate_per_1000_node_days));
  svg << "<path d=\"" << path.str()
      << "\" stroke=\"#b03030\" stroke-width=\"1.8\" fill=\"none\"/>\n";
  svg_axis_titles(svg, f, "time (days)", "failures per 1000 node-days");
  svg << "</svg>\n";
  return svg.str();
}

std::string goodput_histogram_svg(const GoodputBreakdown& breakdown,
                                  const Provenance& p) {
  require(!breakdown.by_size.empty(), Errc::invalid_argument, "no data");
  const std::vector<GoodputSizeRow>& rows = breakdown.by_size;
  double y_hi = 0.0;
  for (const GoodputSizeRow& r : rows)
    y_hi = std::max({y_hi, r.first_order_gpu_hours, r.second_order_gpu_hours});
  if (y_hi <= 0.0) y_hi = 1.0;

  Frame f;
  Scale sy{0.0, y_hi * 1.15, f.plot_bottom(), f.plot_top()};
  double span = f.plot_right() - f.plot_left();
  double slot = span / static_cast<double>(rows.size());
  double bar = std::min(slot * 0.36, 46.0);

  std::ostringstream svg;
  svg_open(svg, f, p, "lost GPU-hours by job size");
  svg_linear_ticks_y(svg, f, sy);
  svg_axes_box(svg, f);
  for (size_t i = 0; i < rows.size(); ++i) {
    double cx = f.plot_left() + slot * (static_cast<double>(i) + 0.5);
    double y1 = sy(rows[i].first_order_gpu_hours);
    double y2 = sy(rows[i].second_order_gpu_hours);
    svg << "<rect x=\"" << fd2(cx - bar) << "\" y=\"" << fd2(y1)
        << "\" width=\"" << fd2(bar) << "\" height=\""
        << fd2(f.plot_bottom() - y1) << "\" fill=\"#c0392b\"/>\n";
    svg << "<rect x=\"" << fd2(cx) << "\" y=\"" << fd2(y2) << "\" width=\""
        << fd2(bar) << "\" height=\"" << fd2(f.plot_bottom() - y2)
        << "\" fill=\"#e67e22\"/>\n";
    svg << "<text x=\"" << fd2(cx) << "\" y=\"" << f.plot_bottom() + 18
        << "\" text-anchor=\"middle\" font-size=\"11\" fill=\"#333\">"
        << rows[i].gpus << "</text>\n";
  }
  svg << "<rect x=\"" << f.plot_left() + 10 << "\" y=\"" << f.plot_top() + 10
      << "\" width=\"12\" height=\"12\" fill=\"#c0392b\"/>\n";
  svg << "<text x=\"" << f.plot_left() + 27 << "\" y=\"" << f.plot_top() + 20
      << "\" font-size=\"11\" fill=\"#333\">first order (node failures)"
         "</text>\n";
  svg << "<rect x=\"" << f.plot_left() + 10 << "\" y=\"" << f.plot_top() + 28
      << "\" width=\"12\" height=\"12\" fill=\"#e67e22\"/>\n";
  svg << "<text x=\"" << f.plot_left() + 27 << "\" y=\"" << f.plot_top() + 38
      << "\" font-size=\"11\" fill=\"#333\">second order (preempted by "
         "requeues)</text>\n";
  svg_axis_titles(svg, f, "job size (GPUs)", "lost GPU-hours");
  svg << "</svg>\n";
  return svg.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::io, "cannot open for writing: " + path);
  out.write(content.data(),
            static_cast<std::streamsize>(content.size()));
  out.flush();
  require(out.good(), Errc::io, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io, "cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  require(!in.bad(), Errc::io, "read failed: " + path);
  return buf.str();
}

}  // namespace relsim
