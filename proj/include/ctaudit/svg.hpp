#pragma once

#include <string>

#include "ctaudit/association.hpp"

namespace ctaudit {

struct SvgOptions {
  int width_px = 640;
  int height_px = 480;
  std::string title;  // optional first caption line
};

/// Standalone SVG of the determinant figure. The inner viewBox covers the
/// [0,col1] x [0,col2] rectangle plus 5% padding, y pointing up. Throws
/// ValidationError for a zero-area rectangle.
std::string render_svg(const FigureModel& figure, const SvgOptions& options = {});

}  // namespace ctaudit
