#include "noiseforge/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace noiseforge {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace

uint64_t fnv1a_hash(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void write_series_csv(const std::string& path, uint64_t config_hash, uint64_t seed,
                      const std::vector<SeriesRow>& rows) {
  std::ofstream out = open_out(path);
  out << "time,observable_label,value,stderr,eta\n";
  char hash_buf[32];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016llx", static_cast<unsigned long long>(config_hash));
  out << "# config_hash=" << hash_buf << " seed=" << seed << "\n";
  for (const auto& r : rows) {
    out << format_double(r.time) << ',' << r.label << ',' << format_double(r.value) << ','
        << format_double(r.stderr) << ',';
    if (r.has_eta) out << format_double(r.eta);
    out << '\n';
  }
}

void write_table_csv(const std::string& path, uint64_t config_hash, uint64_t seed,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out = open_out(path);
  for (size_t c = 0; c < columns.size(); ++c) out << columns[c] << (c + 1 < columns.size() ? ',' : '\n');
  char hash_buf[32];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016llx", static_cast<unsigned long long>(config_hash));
  out << "# config_hash=" << hash_buf << " seed=" << seed << "\n";
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) out << row[c] << (c + 1 < row.size() ? ',' : '\n');
  }
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series) {
  constexpr int width = 660, height = 420;
  constexpr int ml = 64, mr = 150, mt = 36, mb = 48;
  constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                     "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series) {
    for (size_t j = 0; j < s.x.size(); ++j) {
      if (!std::isfinite(s.x[j]) || !std::isfinite(s.y[j])) continue;
      if (first) {
        xmin = xmax = s.x[j];
        ymin = ymax = s.y[j];
        first = false;
      } else {
        xmin = std::min(xmin, s.x[j]);
        xmax = std::max(xmax, s.x[j]);
        ymin = std::min(ymin, s.y[j]);
        ymax = std::max(ymax, s.y[j]);
      }
    }
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << title << "</text>\n";

  // Axes with five ticks per side.
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 4.0;
    const double yv = ymin + (ymax - ymin) * t / 4.0;
    out << "<line x1=\"" << px(xv) << "\" y1=\"" << height - mb << "\" x2=\"" << px(xv)
        << "\" y2=\"" << height - mb + 4 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << format_double(xv) << "</text>\n"
        << "<line x1=\"" << ml - 4 << "\" y1=\"" << py(yv) << "\" x2=\"" << ml << "\" y2=\""
        << py(yv) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(yv) << "</text>\n";
  }
  out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n"
      << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
      << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";

  for (size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % 8];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t j = 0; j < series[s].x.size(); ++j) {
      if (!std::isfinite(series[s].x[j]) || !std::isfinite(series[s].y[j])) continue;
      out << px(series[s].x[j]) << ',' << py(series[s].y[j]) << ' ';
    }
    out << "\"/>\n";
    const int ly = mt + 16 + static_cast<int>(s) * 16;
    out << "<line x1=\"" << width - mr + 8 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << width - mr + 28 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n"
        << "<text x=\"" << width - mr + 32 << "\" y=\"" << ly
        << "\" font-size=\"11\">" << series[s].name << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace noiseforge
