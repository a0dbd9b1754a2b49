#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace synclab::harness {

enum class LineStyle { Solid, Dashed, Dotted };

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  LineStyle style = LineStyle::Solid;
};

struct Panel {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  std::vector<Series> series;
};

/// Panels are stacked vertically; each gets its own axes and legend.
struct Figure {
  std::string title;
  std::vector<Panel> panels;
  int width = 800;
  int panel_height = 300;
};

[[nodiscard]] std::string render_svg(const Figure& figure);
void write_svg(const std::filesystem::path& path, const Figure& figure);

}  // namespace synclab::harness
