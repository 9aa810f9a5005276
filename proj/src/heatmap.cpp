#include "swiftsarsa/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <vector>

namespace swiftsarsa {
namespace {

struct Rgb {
  double r, g, b;
};

// Five-stop dark-violet-to-yellow ramp, interpolated linearly.
constexpr Rgb kRamp[] = {
    {0.267, 0.005, 0.329},
    {0.229, 0.322, 0.545},
    {0.128, 0.567, 0.551},
    {0.369, 0.789, 0.383},
    {0.993, 0.906, 0.144},
};

std::string color_at(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double scaled = t * 4.0;
  const int lo = std::min(3, static_cast<int>(scaled));
  const double frac = scaled - lo;
  auto mix = [&](double a, double b) { return a + (b - a) * frac; };
  const int r = static_cast<int>(std::lround(
      255.0 * mix(kRamp[lo].r, kRamp[lo + 1].r)));
  const int g = static_cast<int>(std::lround(
      255.0 * mix(kRamp[lo].g, kRamp[lo + 1].g)));
  const int b = static_cast<int>(std::lround(
      255.0 * mix(kRamp[lo].b, kRamp[lo + 1].b)));
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string esc(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_heatmap_svg(const SweepTable& table,
                               const HeatmapOptions& options) {
  std::vector<double> thetas, alphas;
  for (const SweepRow& row : table) {
    thetas.push_back(row.meta_step_size);
    alphas.push_back(row.init_step_size);
  }
  auto uniq = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(thetas);
  uniq(alphas);
  if (thetas.empty() || alphas.empty()) {
    throw std::invalid_argument("heatmap: empty sweep table");
  }

  // Mean over the clean seeds of each cell; a cell with no clean seed at
  // all is "missing".
  std::map<std::pair<double, double>, std::pair<double, int>> cells;
  for (const SweepRow& row : table) {
    if (std::isnan(row.lifetime_reward)) continue;
    auto& [sum, count] = cells[{row.meta_step_size, row.init_step_size}];
    sum += row.lifetime_reward;
    ++count;
  }
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto& [key, agg] : cells) {
    const double mean = agg.first / agg.second;
    lo = any ? std::min(lo, mean) : mean;
    hi = any ? std::max(hi, mean) : mean;
    any = true;
  }
  if (!any) {
    lo = 0.0;
    hi = 1.0;
  } else if (hi == lo) {
    hi = lo + 1.0;
  }

  const int cell = options.cell_px;
  const int left = 96, top = 48, bottom = 72, right = 132;
  const int grid_w = cell * static_cast<int>(alphas.size());
  const int grid_h = cell * static_cast<int>(thetas.size());
  const int width = left + grid_w + right;
  const int height = top + grid_h + bottom;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
  svg += "<defs>\n<linearGradient id=\"ramp\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">\n";
  for (int i = 0; i <= 4; ++i) {
    svg += "  <stop offset=\"" + std::to_string(i * 25) + "%\" stop-color=\"" +
           color_at(i / 4.0) + "\"/>\n";
  }
  svg += "</linearGradient>\n";
  svg += "<pattern id=\"missing\" width=\"8\" height=\"8\" "
         "patternUnits=\"userSpaceOnUse\">"
         "<rect width=\"8\" height=\"8\" fill=\"#c8c8c8\"/>"
         "<path d=\"M0 8 L8 0\" stroke=\"#888888\" stroke-width=\"2\"/>"
         "</pattern>\n</defs>\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + std::to_string(left + grid_w / 2) + "\" y=\"28\" "
         "text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         esc(options.title) + "</text>\n";

  for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
    // Larger meta step sizes sit higher on the axis.
    const int y = top + static_cast<int>(thetas.size() - 1 - ti) * cell;
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
      const int x = left + static_cast<int>(ai) * cell;
      const auto it = cells.find({thetas[ti], alphas[ai]});
      std::string fill;
      std::string note;
      if (it == cells.end()) {
        fill = "url(#missing)";
        note = "no clean runs";
      } else {
        const double mean = it->second.first / it->second.second;
        fill = color_at((mean - lo) / (hi - lo));
        note = "mean=" + format_double(mean) + " over " +
               std::to_string(it->second.second) + " run(s)";
      }
      svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
             "\" width=\"" + std::to_string(cell) + "\" height=\"" +
             std::to_string(cell) + "\" fill=\"" + fill +
             "\" stroke=\"white\" stroke-width=\"1\"><title>theta=" +
             format_double(thetas[ti]) + " alpha_init=" +
             format_double(alphas[ai]) + " " + esc(note) +
             "</title></rect>\n";
    }
  }

  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    const int x = left + static_cast<int>(ai) * cell + cell / 2;
    svg += "<text x=\"" + std::to_string(x) + "\" y=\"" +
           std::to_string(top + grid_h + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">" + format_double(alphas[ai]) + "</text>\n";
  }
  svg += "<text x=\"" + std::to_string(left + grid_w / 2) + "\" y=\"" +
         std::to_string(top + grid_h + 44) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">alpha_init (log-spaced)</text>\n";

  for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
    const int y = top + static_cast<int>(thetas.size() - 1 - ti) * cell +
                  cell / 2 + 4;
    svg += "<text x=\"" + std::to_string(left - 8) + "\" y=\"" +
           std::to_string(y) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"12\">" + format_double(thetas[ti]) + "</text>\n";
  }
  svg += "<text x=\"18\" y=\"" + std::to_string(top + grid_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 " +
         std::to_string(top + grid_h / 2) +
         ")\">theta (log-spaced; 0 = no step-size adaptation)</text>\n";

  const int legend_x = left + grid_w + 36;
  svg += "<rect x=\"" + std::to_string(legend_x) + "\" y=\"" +
         std::to_string(top) + "\" width=\"18\" height=\"" +
         std::to_string(grid_h) +
         "\" fill=\"url(#ramp)\" stroke=\"#444444\"/>\n";
  svg += "<text x=\"" + std::to_string(legend_x + 26) + "\" y=\"" +
         std::to_string(top + 12) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" +
         format_double(hi) + "</text>\n";
  svg += "<text x=\"" + std::to_string(legend_x + 26) + "\" y=\"" +
         std::to_string(top + grid_h) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" +
         format_double(lo) + "</text>\n";
  svg += "<rect x=\"" + std::to_string(legend_x) + "\" y=\"" +
         std::to_string(top + grid_h + 16) +
         "\" width=\"18\" height=\"12\" fill=\"url(#missing)\" "
         "stroke=\"#444444\"/>\n";
  svg += "<text x=\"" + std::to_string(legend_x + 26) + "\" y=\"" +
         std::to_string(top + grid_h + 26) +
         "\" font-family=\"sans-serif\" font-size=\"11\">missing</text>\n";
  svg += "</svg>\n";
  return svg;
}

void write_heatmap(const SweepTable& table, const std::string& path,
                   const HeatmapOptions& options) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << render_heatmap_svg(table, options);
  if (!file) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace swiftsarsa
