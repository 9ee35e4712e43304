#pragma once

// Serialization of sweep results.
//
// CSV: header `metric,d,n,seed,value,wall_ms,extra_json`, LF endings, reals in
// shortest round-trip form, extra_json quoted per RFC 4180.
// JSON summary: {"metric": ..., "per_d": [{d, n, mean, median, std, count}]}.
// SVG: mean vs log2(d) per n/d series with +-1 std error bars, no external assets.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "phaseprobe/error.hpp"
#include "phaseprobe/sweep.hpp"

namespace phaseprobe {

inline constexpr std::string_view kCsvHeader = "metric,d,n,seed,value,wall_ms,extra_json";

// Shortest decimal that round-trips; non-finite values print as nan/inf/-inf.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_real(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParameterError("CSV: malformed number '" + std::string(s) + "'");
  }
  return v;
}

inline std::string csv_quote(std::string_view field) {
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_row(const SweepRecord& r) {
  std::string line = r.metric;
  line += ',' + std::to_string(r.d);
  line += ',' + std::to_string(r.n);
  line += ',' + std::to_string(r.seed);
  line += ',' + format_real(r.value);
  line += ',' + format_real(r.wall_ms);
  line += ',' + csv_quote(r.extra_json);
  line += '\n';
  return line;
}

inline std::string to_csv(const std::vector<SweepRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) out += csv_row(r);
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline std::size_t parse_count(std::string_view s) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParameterError("CSV: malformed integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

// Parses CSV text produced by to_csv / CsvWriter. A trailing partial line (an
// interrupted write) is ignored.
inline std::vector<SweepRecord> parse_csv(std::string_view text) {
  std::vector<SweepRecord> out;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    const std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) break;
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!header_seen) {
      if (line != kCsvHeader) throw ParameterError("CSV: unexpected header");
      header_seen = true;
      continue;
    }
    const auto f = detail::split_csv_line(line);
    if (f.size() != 7) throw ParameterError("CSV: expected 7 fields");
    SweepRecord r;
    r.metric = f[0];
    r.d = detail::parse_count(f[1]);
    r.n = detail::parse_count(f[2]);
    r.seed = detail::parse_count(f[3]);
    r.value = parse_real(f[4]);
    r.wall_ms = parse_real(f[5]);
    r.extra_json = f[6];
    r.failed = std::isnan(r.value) && r.extra_json.find("\"error\"") != std::string::npos;
    out.push_back(std::move(r));
  }
  if (!header_seen) throw ParameterError("CSV: missing header");
  return out;
}

// Incremental CSV writer: header on open, each row flushed as written, so an
// interrupted sweep leaves a parseable prefix.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
    out_ << kCsvHeader << '\n';
    flush();
  }

  void write(const SweepRecord& r) {
    out_ << csv_row(r);
    flush();
  }

 private:
  void flush() {
    out_.flush();
    if (!out_) throw IoError("write to '" + path_.string() + "' failed");
  }

  std::filesystem::path path_;
  std::ofstream out_;
};

// Writes to a sibling temporary and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename into '" + path.string() + "': " + ec.message());
}

inline void emit_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path) {
  write_file_atomic(path, to_csv(records));
}

inline nlohmann::ordered_json summary_json(std::string_view metric, const std::vector<Aggregate>& aggregates) {
  nlohmann::ordered_json j;
  j["metric"] = metric;
  j["per_d"] = nlohmann::ordered_json::array();
  for (const auto& a : aggregates) {
    nlohmann::ordered_json row;
    row["d"] = a.d;
    row["n"] = a.n;
    row["mean"] = a.mean;
    row["median"] = a.median;
    row["std"] = a.std;
    row["count"] = a.count;
    j["per_d"].push_back(row);
  }
  return j;
}

inline void emit_json_summary(std::string_view metric, const std::vector<Aggregate>& aggregates,
                              const std::filesystem::path& path) {
  write_file_atomic(path, summary_json(metric, aggregates).dump(2) + "\n");
}

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string svg_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string series_label(const Aggregate& a) {
  if (std::isnan(a.ratio)) return "n = " + std::to_string(a.n);
  return "n/d = " + format_real(a.ratio);
}

}  // namespace detail

inline std::string render_svg(std::string_view title, const std::vector<Aggregate>& aggregates) {
  std::vector<const Aggregate*> points;
  for (const auto& a : aggregates) {
    if (a.count > 0) points.push_back(&a);
  }
  if (points.empty()) throw ParameterError("emit_svg: no aggregate rows to plot");

  constexpr double width = 720, height = 440, left = 80, right = 170, top = 50, bottom = 60;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Aggregate* a : points) {
    const double x = std::log2(static_cast<double>(a->d));
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, a->mean - a->std);
    ymax = std::max(ymax, a->mean + a->std);
  }
  if (xmax - xmin < 1e-12) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * plot_h; };

  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << detail::svg_num(left + plot_w / 2) << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">"
    << detail::svg_escape(title) << "</text>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  // x ticks at the grid dimensions
  std::vector<std::size_t> dims;
  for (const Aggregate* a : points) {
    if (std::find(dims.begin(), dims.end(), a->d) == dims.end()) dims.push_back(a->d);
  }
  std::sort(dims.begin(), dims.end());
  for (std::size_t d : dims) {
    const double x = px(std::log2(static_cast<double>(d)));
    s << "<line x1=\"" << detail::svg_num(x) << "\" y1=\"" << top + plot_h << "\" x2=\"" << detail::svg_num(x)
      << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << detail::svg_num(x) << "\" y=\"" << top + plot_h + 20 << "\" text-anchor=\"middle\">" << d
      << "</text>\n";
  }
  s << "<text x=\"" << detail::svg_num(left + plot_w / 2) << "\" y=\"" << height - 15
    << "\" text-anchor=\"middle\">d (log2 scale)</text>\n";

  for (int k = 0; k <= 5; ++k) {
    const double yv = ymin + (ymax - ymin) * k / 5.0;
    const double y = py(yv);
    s << "<line x1=\"" << left - 5 << "\" y1=\"" << detail::svg_num(y) << "\" x2=\"" << left << "\" y2=\""
      << detail::svg_num(y) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << left - 8 << "\" y=\"" << detail::svg_num(y + 4) << "\" text-anchor=\"end\">"
      << detail::svg_num(yv) << "</text>\n";
  }
  if (ymin < 0.0 && ymax > 0.0) {
    s << "<line x1=\"" << left << "\" y1=\"" << detail::svg_num(py(0.0)) << "\" x2=\"" << left + plot_w << "\" y2=\""
      << detail::svg_num(py(0.0)) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }

  // one polyline per series, in first-appearance order
  std::vector<std::string> labels;
  for (const Aggregate* a : points) {
    const std::string label = detail::series_label(*a);
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
  }
  for (std::size_t si = 0; si < labels.size(); ++si) {
    const char* color = kColors[si % std::size(kColors)];
    std::vector<const Aggregate*> series;
    for (const Aggregate* a : points) {
      if (detail::series_label(*a) == labels[si]) series.push_back(a);
    }
    std::sort(series.begin(), series.end(), [](const Aggregate* a, const Aggregate* b) { return a->d < b->d; });
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (i) s << ' ';
      s << detail::svg_num(px(std::log2(static_cast<double>(series[i]->d)))) << ','
        << detail::svg_num(py(series[i]->mean));
    }
    s << "\"/>\n";
    for (const Aggregate* a : series) {
      const double x = px(std::log2(static_cast<double>(a->d)));
      s << "<line x1=\"" << detail::svg_num(x) << "\" y1=\"" << detail::svg_num(py(a->mean - a->std)) << "\" x2=\""
        << detail::svg_num(x) << "\" y2=\"" << detail::svg_num(py(a->mean + a->std)) << "\" stroke=\"" << color
        << "\"/>\n";
      s << "<circle cx=\"" << detail::svg_num(x) << "\" cy=\"" << detail::svg_num(py(a->mean))
        << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
    }
    const double ly = top + 10 + 20.0 * static_cast<double>(si);
    s << "<line x1=\"" << left + plot_w + 15 << "\" y1=\"" << detail::svg_num(ly) << "\" x2=\""
      << left + plot_w + 40 << "\" y2=\"" << detail::svg_num(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << left + plot_w + 45 << "\" y=\"" << detail::svg_num(ly + 4) << "\">"
      << detail::svg_escape(labels[si]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

inline void emit_svg(std::string_view title, const std::vector<Aggregate>& aggregates,
                     const std::filesystem::path& path) {
  write_file_atomic(path, render_svg(title, aggregates));
}

}  // namespace phaseprobe
