// SPDX-License-Identifier: Apache-2.0
#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "error.hpp"
#include "stats.hpp"

namespace vf::plot {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 560.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 780.0;
constexpr double kTop = 48.0;
constexpr double kBottom = 500.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void grow(double v) {
    if (std::isnan(v) || std::isinf(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
  void pad() {
    if (!valid()) {
      lo = 0.0;
      hi = 1.0;
    } else if (lo == hi) {
      const double d = (lo == 0.0) ? 1.0 : std::abs(lo) * 0.1;
      lo -= d;
      hi += d;
    } else {
      const double d = 0.05 * (hi - lo);
      lo -= d;
      hi += d;
    }
  }
};

std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  std::vector<double> ticks;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 1e-12 * span; t += step) {
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return ticks;
}

class Canvas {
public:
  Canvas(const std::filesystem::path& path, const AxisOptions& axes) : axes_(axes) {
    out_.open(path, std::ios::binary);
    if (!out_) throw Error(errc::io, "cannot open '" + path.string() + "' for writing");
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
         << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << " " << num(kHeight) << "\">\n";
    out_ << "<rect width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
         << "\" fill=\"white\"/>\n";
  }

  void set_ranges(Range x, Range y, bool log_x) {
    log_x_ = log_x;
    if (log_x_) {
      x.lo = std::log10(std::max(x.lo, 1e-300));
      x.hi = std::log10(std::max(x.hi, 1e-300));
      if (x.lo == x.hi) {
        x.lo -= 0.5;
        x.hi += 0.5;
      }
    }
    x.pad();
    y.pad();
    x_ = x;
    y_ = y;
  }

  double px(double v) const {
    const double u = log_x_ ? std::log10(std::max(v, 1e-300)) : v;
    return kLeft + (u - x_.lo) / (x_.hi - x_.lo) * (kRight - kLeft);
  }
  double py(double v) const { return kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (kBottom - kTop); }

  void frame() {
    out_ << "<g font-family=\"monospace\" font-size=\"13\" fill=\"black\">\n";
    out_ << "<text x=\"" << num((kLeft + kRight) / 2) << "\" y=\"24\" text-anchor=\"middle\">"
         << escape(axes_.title) << "</text>\n";
    out_ << "<text x=\"" << num((kLeft + kRight) / 2) << "\" y=\"" << num(kBottom + 40)
         << "\" text-anchor=\"middle\">" << escape(axes_.x_label) << "</text>\n";
    out_ << "<text x=\"18\" y=\"" << num((kTop + kBottom) / 2)
         << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << num((kTop + kBottom) / 2)
         << ")\">" << escape(axes_.y_label) << "</text>\n";
    out_ << "</g>\n";
    out_ << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
         << num(kRight - kLeft) << "\" height=\"" << num(kBottom - kTop)
         << "\" fill=\"none\" stroke=\"black\"/>\n";

    out_ << "<g font-family=\"monospace\" font-size=\"11\" fill=\"black\">\n";
    if (log_x_) {
      for (int k = static_cast<int>(std::ceil(x_.lo)); k <= static_cast<int>(std::floor(x_.hi));
           ++k) {
        const double x = kLeft + (k - x_.lo) / (x_.hi - x_.lo) * (kRight - kLeft);
        tick_x(x, "1e" + std::to_string(k));
      }
    } else {
      for (double t : linear_ticks(x_.lo, x_.hi)) tick_x(px(t), num(t));
    }
    for (double t : linear_ticks(y_.lo, y_.hi)) {
      const double y = py(t);
      out_ << "<line x1=\"" << num(kLeft - 4) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft)
           << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
      out_ << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4)
           << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
    }
    out_ << "</g>\n";
  }

  void legend(const std::vector<std::string>& labels) {
    if (labels.empty() || (labels.size() == 1 && labels[0].empty())) return;
    out_ << "<g font-family=\"monospace\" font-size=\"12\" fill=\"black\">\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const double y = kTop + 16.0 + 16.0 * static_cast<double>(i);
      out_ << "<rect x=\"" << num(kRight - 150) << "\" y=\"" << num(y - 9)
           << "\" width=\"10\" height=\"10\" fill=\"" << color(i) << "\"/>\n";
      out_ << "<text x=\"" << num(kRight - 136) << "\" y=\"" << num(y) << "\">"
           << escape(labels[i]) << "</text>\n";
    }
    out_ << "</g>\n";
  }

  void polyline(const Series& s, std::size_t color_index, bool markers) {
    std::string pts;
    auto flush = [&]() {
      if (!pts.empty()) {
        out_ << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << color(color_index)
             << "\" stroke-width=\"1.5\"/>\n";
        pts.clear();
      }
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isnan(s.x[i]) || std::isnan(s.y[i])) {
        flush();
        continue;
      }
      pts += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
      if (markers) {
        out_ << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
             << "\" r=\"3\" fill=\"" << color(color_index) << "\"/>\n";
      }
    }
    flush();
  }

  void dots(const Series& s, std::size_t color_index) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isnan(s.x[i]) || std::isnan(s.y[i])) continue;
      out_ << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
           << "\" r=\"2.5\" fill=\"" << color(color_index) << "\" fill-opacity=\"0.7\"/>\n";
    }
  }

  void raw(const std::string& s) { out_ << s; }

  void finish() {
    out_ << "</svg>\n";
    if (!out_) throw Error(errc::io, "SVG write failed");
  }

  static const char* color(std::size_t i) { return kPalette[i % kPaletteSize]; }

  static std::string escape(const std::string& s) {
    std::string r;
    for (char c : s) {
      if (c == '&') {
        r += "&amp;";
      } else if (c == '<') {
        r += "&lt;";
      } else if (c == '>') {
        r += "&gt;";
      } else {
        r += c;
      }
    }
    return r;
  }

private:
  void tick_x(double x, const std::string& label) {
    out_ << "<line x1=\"" << num(x) << "\" y1=\"" << num(kBottom) << "\" x2=\"" << num(x)
         << "\" y2=\"" << num(kBottom + 4) << "\" stroke=\"black\"/>\n";
    out_ << "<text x=\"" << num(x) << "\" y=\"" << num(kBottom + 18)
         << "\" text-anchor=\"middle\">" << label << "</text>\n";
  }

  std::ofstream out_;
  AxisOptions axes_;
  Range x_, y_;
  bool log_x_ = false;
};

}  // namespace

void write_lines(const std::filesystem::path& path, const AxisOptions& axes,
                 const std::vector<Series>& series, bool markers) {
  Range rx, ry;
  for (const auto& s : series) {
    for (double v : s.x) rx.grow(axes.log_x ? v : v);
    for (double v : s.y) ry.grow(v);
  }
  Canvas canvas(path, axes);
  canvas.set_ranges(rx, ry, axes.log_x);
  canvas.frame();
  for (std::size_t i = 0; i < series.size(); ++i) canvas.polyline(series[i], i, markers);
  std::vector<std::string> labels;
  for (const auto& s : series) labels.push_back(s.label);
  canvas.legend(labels);
  canvas.finish();
}

void write_scatter(const std::filesystem::path& path, const AxisOptions& axes,
                   const std::vector<Series>& series) {
  Range rx, ry;
  for (const auto& s : series) {
    for (double v : s.x) rx.grow(v);
    for (double v : s.y) ry.grow(v);
  }
  Canvas canvas(path, axes);
  canvas.set_ranges(rx, ry, axes.log_x);
  canvas.frame();
  for (std::size_t i = 0; i < series.size(); ++i) canvas.dots(series[i], i);
  std::vector<std::string> labels;
  for (const auto& s : series) labels.push_back(s.label);
  canvas.legend(labels);
  canvas.finish();
}

void write_boxes(const std::filesystem::path& path, const AxisOptions& axes,
                 const std::vector<std::string>& group_labels,
                 const std::vector<std::vector<double>>& groups) {
  Range ry;
  for (const auto& g : groups) {
    for (double v : g) ry.grow(v);
  }
  Range rx;
  rx.grow(0.0);
  rx.grow(static_cast<double>(groups.size()));
  Canvas canvas(path, axes);
  canvas.set_ranges(rx, ry, false);
  canvas.frame();
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto b = box_stats(groups[i]);
    if (std::isnan(b.median)) continue;
    const double cx = canvas.px(static_cast<double>(i) + 0.5);
    const double half = 0.28 * (canvas.px(1.0) - canvas.px(0.0));
    const char* col = Canvas::color(i);
    auto line = [&](double x1, double y1, double x2, double y2, const char* c) {
      canvas.raw("<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
                 "\" y2=\"" + num(y2) + "\" stroke=\"" + c + "\" stroke-width=\"1.5\"/>\n");
    };
    const double yq1 = canvas.py(b.q1), yq3 = canvas.py(b.q3);
    canvas.raw("<rect x=\"" + num(cx - half) + "\" y=\"" + num(yq3) + "\" width=\"" +
               num(2 * half) + "\" height=\"" + num(yq1 - yq3) + "\" fill=\"none\" stroke=\"" +
               col + "\" stroke-width=\"1.5\"/>\n");
    line(cx - half, canvas.py(b.median), cx + half, canvas.py(b.median), col);
    line(cx, yq3, cx, canvas.py(b.whisker_high), col);
    line(cx, yq1, cx, canvas.py(b.whisker_low), col);
    line(cx - half / 2, canvas.py(b.whisker_high), cx + half / 2, canvas.py(b.whisker_high), col);
    line(cx - half / 2, canvas.py(b.whisker_low), cx + half / 2, canvas.py(b.whisker_low), col);
    for (double o : b.outliers) {
      const double y = canvas.py(o);
      line(cx - 4, y, cx + 4, y, "#d62728");
      line(cx, y - 4, cx, y + 4, "#d62728");
    }
    canvas.raw("<text x=\"" + num(cx) + "\" y=\"" + num(kBottom + 18) +
               "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">" +
               Canvas::escape(group_labels[i]) + "</text>\n");
  }
  canvas.finish();
}

namespace {

bool has_prefix(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

}  // namespace

EmitResult emit_plots(const Report& report, const std::filesystem::path& dir) {
  EmitResult result;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(errc::io, "cannot create directory '" + dir.string() + "'");

  for (const auto& t : report.tables) {
    const bool is_curve = has_prefix(t.name, "curves.");
    const bool is_trend = has_prefix(t.name, "trend.");
    const bool is_scatter = has_prefix(t.name, "scatter.");
    const bool is_box = has_prefix(t.name, "box.");
    if (!is_curve && !is_trend && !is_scatter && !is_box) continue;
    if (t.empty()) {
      result.warnings.push_back("table '" + t.name + "' is empty; no plot written");
      continue;
    }
    const auto path = dir / (t.name + ".svg");
    AxisOptions axes;
    axes.title = t.name;

    if (is_curve || is_trend) {
      axes.x_label = t.columns.at(0);
      const auto x = t.column(t.columns.at(0));
      std::vector<Series> series;
      for (std::size_t c = 1; c < t.columns.size(); ++c) {
        series.push_back({t.columns[c], x, t.column(t.columns[c])});
      }
      write_lines(path, axes, series, is_trend);
    } else if (is_scatter) {
      axes.x_label = t.columns.at(0);
      axes.y_label = t.columns.at(1);
      axes.log_x = true;
      Series s{"", t.column(t.columns.at(0)), t.column(t.columns.at(1))};
      write_scatter(path, axes, {s});
    } else {
      axes.y_label = t.columns.at(0);
      std::vector<std::string> labels;
      std::vector<std::vector<double>> groups;
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& label = t.labels.at(r);
        std::size_t g = 0;
        for (; g < labels.size(); ++g) {
          if (labels[g] == label) break;
        }
        if (g == labels.size()) {
          labels.push_back(label);
          groups.emplace_back();
        }
        groups[g].push_back(t.rows[r][0]);
      }
      write_boxes(path, axes, labels, groups);
    }
    result.files.push_back(path);
  }
  return result;
}

}  // namespace vf::plot
