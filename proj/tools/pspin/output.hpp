#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pspin::cli {

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(const std::vector<double>& values);
  void add(std::vector<std::string> values);
};

/// Writes '#'-prefixed header lines followed by the table. Throws IoError.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const CsvTable& table);

void write_text(const std::filesystem::path& path, const std::string& content);

struct PlotSeries {
  std::string label;
  std::vector<double> y;
};

/// Line plot with shared x values. `description` is stored in <desc>.
std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::vector<double>& x, const std::vector<PlotSeries>& series,
                          const std::string& description);

/// Heatmap of a row-major rows x cols grid; row 0 is drawn at the bottom.
std::string svg_heatmap(const std::string& title, const std::string& x_label,
                        const std::string& y_label, int rows, int cols,
                        const std::vector<double>& values, const std::string& description);

}  // namespace pspin::cli
