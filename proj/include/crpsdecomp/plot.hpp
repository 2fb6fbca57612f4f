#pragma once

#include <string>
#include <vector>

#include "crpsdecomp/report.hpp"

namespace crpsdecomp {

enum class McbAxis { Vertical, Horizontal };

struct PlotOptions {
  McbAxis mcb_axis = McbAxis::Vertical;  // DSC takes the other axis
  int width = 640;
  int height = 480;
  int isolines = 4;  // minimum number of constant-score lines
};

// One labeled point per result. Lines of constant mean score have unit slope
// since S = MCB - DSC + UNC. Throws std::invalid_argument on an empty set or
// results whose UNC differ by more than 1e-9.
std::string render_mcb_dsc_svg(const std::vector<ReportDocument>& reports, const PlotOptions& options = {});

}  // namespace crpsdecomp
