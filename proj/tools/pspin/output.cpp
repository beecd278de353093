#include "pspin/output.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "pspin/config.hpp"

namespace pspin::cli {

std::string format_number(double v) { return fmt::format("{}", v); }

void CsvTable::add(const std::vector<double>& values) {
  std::vector<std::string> row;
  row.reserve(values.size());
  for (double v : values) {
    row.push_back(format_number(v));
  }
  rows.push_back(std::move(row));
}

void CsvTable::add(std::vector<std::string> values) { rows.push_back(std::move(values)); }

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << content;
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const CsvTable& table) {
  std::string text;
  for (const auto& line : header) {
    text += "# " + line + "\n";
  }
  const auto join = [](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      line += (k ? "," : "") + cells[k];
    }
    return line + "\n";
  };
  text += join(table.columns);
  for (const auto& row : table.rows) {
    text += join(row);
  }
  write_text(path, text);
}

namespace {

constexpr double kWidth = 720, kHeight = 440, kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                 "#9467bd", "#ff7f0e", "#17becf"};

std::string escape(const std::string& s) {
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

std::string header(const std::string& title, const std::string& description) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n<desc>{}</desc>\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
      kWidth, kHeight, escape(description), kWidth / 2, escape(title));
}

// Viridis-like ramp through five anchors.
std::string color_ramp(double u) {
  static constexpr std::array<std::array<double, 3>, 5> anchors = {
      {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  u = std::clamp(u, 0.0, 1.0) * (anchors.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(u), anchors.size() - 2);
  const double f = u - i;
  std::array<int, 3> rgb{};
  for (int k = 0; k < 3; ++k) {
    rgb[k] = static_cast<int>(std::lround(anchors[i][k] * (1 - f) + anchors[i + 1][k] * f));
  }
  return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

}  // namespace

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::vector<double>& x, const std::vector<PlotSeries>& series,
                          const std::string& description) {
  double x0 = x.empty() ? 0.0 : x.front(), x1 = x.empty() ? 1.0 : x.back();
  double y0 = 0.0, y1 = 0.0;
  bool first = true;
  for (const auto& s : series) {
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      y0 = first ? v : std::min(y0, v);
      y1 = first ? v : std::max(y1, v);
      first = false;
    }
  }
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 - y0 < 1e-12) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const auto px = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * pw; };
  const auto py = [&](double v) { return kTop + (1.0 - (v - y0) / (y1 - y0)) * ph; };

  std::string out = header(title, description);
  out += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      kLeft, kTop, pw, ph);
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{:.3g}</text>\n",
                       px(xv), kTop + ph + 18, xv);
    out += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n",
                       kLeft - 6, py(yv) + 4, yv);
  }
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + pw / 2, kHeight - 10, escape(x_label));
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % kPalette.size()];
    std::string points;
    for (std::size_t i = 0; i < std::min(x.size(), series[s].y.size()); ++i) {
      if (std::isfinite(series[s].y[i])) {
        points += fmt::format("{:.2f},{:.2f} ", px(x[i]), py(series[s].y[i]));
      }
    }
    out += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color,
        points);
    const double ly = kTop + 16.0 * (s + 1);
    out += fmt::format(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>"
        "<text x=\"{}\" y=\"{}\">{}</text>\n",
        kLeft + pw + 10, ly, kLeft + pw + 30, ly, color, kLeft + pw + 36, ly + 4,
        escape(series[s].label));
  }
  return out + "</svg>\n";
}

std::string svg_heatmap(const std::string& title, const std::string& x_label,
                        const std::string& y_label, int rows, int cols,
                        const std::vector<double>& values, const std::string& description) {
  const double vmax = values.empty() ? 1.0 : *std::max_element(values.begin(), values.end());
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const double cw = pw / cols, ch = ph / rows;
  std::string out = header(title, description);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double v = values.at(static_cast<std::size_t>(i) * cols + j);
      out += fmt::format(
          "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
          kLeft + j * cw, kTop + (rows - 1 - i) * ch, cw + 0.05, ch + 0.05,
          color_ramp(vmax > 0 ? v / vmax : 0.0));
    }
  }
  out += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      kLeft, kTop, pw, ph);
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + pw / 2, kHeight - 10, escape(x_label));
  out += fmt::format(
      "<text x=\"20\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">{}</text>\n",
      kTop + ph / 2, kTop + ph / 2, escape(y_label));
  out += fmt::format("<text x=\"{}\" y=\"{}\">max {:.3g}</text>\n", kLeft + pw + 10, kTop + 12,
                     vmax);
  return out + "</svg>\n";
}

}  // namespace pspin::cli
