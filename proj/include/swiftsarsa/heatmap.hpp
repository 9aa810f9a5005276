#pragma once

#include <string>

#include "swiftsarsa/harness.hpp"

namespace swiftsarsa {

// Self-contained SVG heatmap of a sweep table: initial step size on the
// x axis, meta step size on the y axis (both log-spaced grids, labeled with
// their values), cell color = mean lifetime reward across seeds. Cells whose
// runs all errored are drawn hatched gray.
struct HeatmapOptions {
  std::string title = "lifetime reward";
  int cell_px = 56;
};

std::string render_heatmap_svg(const SweepTable& table,
                               const HeatmapOptions& options = {});

void write_heatmap(const SweepTable& table, const std::string& path,
                   const HeatmapOptions& options = {});

}  // namespace swiftsarsa
