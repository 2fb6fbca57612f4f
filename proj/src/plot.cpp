#include "crpsdecomp/plot.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace crpsdecomp {

namespace {

struct Point {
  std::string label;
  double dsc, mcb, score;
};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_mcb_dsc_svg(const std::vector<ReportDocument>& reports, const PlotOptions& opt) {
  std::vector<Point> pts;
  double unc = 0.0;
  for (const auto& rep : reports) {
    for (const auto& r : rep.results) {
      if (pts.empty()) unc = r.unc;
      if (std::abs(r.unc - unc) > 1e-9)
        throw std::invalid_argument(
            fmt::format("reports do not share one uncertainty ({} vs {}); isolines would not be comparable", unc, r.unc));
      std::string label(to_string(r.method));
      if (rep.provenance.label) label = *rep.provenance.label + ": " + label;
      pts.push_back({std::move(label), r.dsc, r.mcb, r.mean_score});
    }
  }
  if (pts.empty()) throw std::invalid_argument("nothing to plot");

  // Data box in (DSC, MCB) coordinates.
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  for (const auto& p : pts) {
    x0 = std::min(x0, p.dsc);
    x1 = std::max(x1, p.dsc);
    y0 = std::min(y0, p.mcb);
    y1 = std::max(y1, p.mcb);
  }
  const double span = std::max({x1 - x0, y1 - y0, unc, 1e-12});
  x1 = std::max(x1, x0 + 0.25 * span) + 0.1 * span;
  y1 = std::max(y1, y0 + 0.25 * span) + 0.1 * span;
  x0 -= 0.05 * span;
  y0 -= 0.05 * span;

  const bool mcb_vertical = opt.mcb_axis == McbAxis::Vertical;
  const double margin = 60.0;
  const double w = opt.width, h = opt.height;
  const double pw = w - 2 * margin, ph = h - 2 * margin;
  const double hx0 = mcb_vertical ? x0 : y0, hx1 = mcb_vertical ? x1 : y1;
  const double vy0 = mcb_vertical ? y0 : x0, vy1 = mcb_vertical ? y1 : x1;
  auto sx = [&](double v) { return margin + (v - hx0) / (hx1 - hx0) * pw; };
  auto sy = [&](double v) { return h - margin - (v - vy0) / (vy1 - vy0) * ph; };
  auto screen = [&](double dsc, double mcb) {
    return mcb_vertical ? std::pair{sx(dsc), sy(mcb)} : std::pair{sx(mcb), sy(dsc)};
  };

  // Scores through the points, topped up with evenly spaced ones.
  std::vector<double> scores;
  for (const auto& p : pts) scores.push_back(p.score);
  const double c_lo = y0 - x1, c_hi = y1 - x0;  // range of MCB - DSC inside the box
  const int extra = std::max(opt.isolines, 4) + 1;
  for (int k = 1; k < extra; ++k) scores.push_back(unc + c_lo + (c_hi - c_lo) * k / extra);
  std::sort(scores.begin(), scores.end());
  std::vector<double> lines;
  for (double s : scores)
    if (lines.empty() || s - lines.back() > 1e-9 * std::max(1.0, std::abs(s))) lines.push_back(s);

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n",
      opt.width, opt.height, opt.width, opt.height);
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", opt.width, opt.height);

  svg += "<g class=\"isolines\" stroke=\"#999999\" stroke-dasharray=\"4 3\" fill=\"none\">\n";
  std::string labels;
  for (double s : lines) {
    const double c = s - unc;  // MCB = DSC + c
    const double a = std::max(x0, y0 - c), b = std::min(x1, y1 - c);
    if (!(a < b)) continue;
    auto [ax, ay] = screen(a, a + c);
    auto [bx, by] = screen(b, b + c);
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", ax, ay, bx, by);
    labels += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" fill=\"#666666\">S = {:.4g}</text>\n", bx + 3, by - 3, s);
  }
  svg += "</g>\n<g class=\"isoline-labels\">\n" + labels + "</g>\n";

  auto [ox, oy] = screen(0.0, 0.0);
  svg += "<g class=\"axes\" stroke=\"black\">\n";
  svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\"/>\n", margin,
                     margin, pw, ph);
  svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke-width=\"0.5\"/>\n", margin, oy,
                     margin + pw, oy);
  svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke-width=\"0.5\"/>\n", ox, margin,
                     ox, margin + ph);
  svg += "</g>\n";
  for (int k = 0; k <= 4; ++k) {
    const double hv = hx0 + (hx1 - hx0) * k / 4, vv = vy0 + (vy1 - vy0) * k / 4;
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.3g}</text>\n", sx(hv), h - margin + 14, hv);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.3g}</text>\n", margin - 4, sy(vv) + 4, vv);
  }
  const char* hname = mcb_vertical ? "DSC" : "MCB";
  const char* vname = mcb_vertical ? "MCB" : "DSC";
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", margin + pw / 2, h - 20, hname);
  svg += fmt::format("<text x=\"16\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2f})\">{}</text>\n",
                     margin + ph / 2, margin + ph / 2, vname);
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\" class=\"unc\">UNC = {:.6g}</text>\n",
                     margin + pw - 6, margin + 16, unc);

  svg += "<g class=\"points\">\n";
  for (const auto& p : pts) {
    auto [px, py] = screen(p.dsc, p.mcb);
    svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"black\"/>\n", px, py);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", px + 6, py - 6, escape(p.label));
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace crpsdecomp
