#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace noiseforge {

// Time-series rows in the shared CSV schema:
// time, observable_label, value, stderr, eta (eta empty without a reference).
struct SeriesRow {
  double time = 0.0;
  std::string label;
  double value = 0.0;
  double stderr = 0.0;
  bool has_eta = false;
  double eta = 0.0;
};

std::string format_double(double v);

// Writes header, a comment line with the config hash and seed, then the rows.
void write_series_csv(const std::string& path, uint64_t config_hash, uint64_t seed,
                      const std::vector<SeriesRow>& rows);

// Generic table writer with the same comment line.
void write_table_csv(const std::string& path, uint64_t config_hash, uint64_t seed,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<std::string>>& rows);

// FNV-1a over the canonical config text; stable across platforms.
uint64_t fnv1a_hash(const std::string& text);

// Single-file SVG line chart.
struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series);

}  // namespace noiseforge
