#include <algorithm>
#include <cstdio>
#include <string>

#include "dimscope/session.hpp"

namespace dimscope {

namespace {

// Shared with the browser UI.
constexpr const char* kPalette[] = {"#e6194b", "#00bcd4", "#3cb44b", "#ffe119", "#4363d8", "#f58231",
                                    "#911eb4", "#f032e6", "#bcf60c", "#008080", "#9a6324", "#800000"};
constexpr const char* kNeutral = "#999999";

constexpr double kPanelWidth = 760.0;
constexpr double kPanelHeight = 200.0;
constexpr double kPanelGap = 40.0;
constexpr double kMargin = 30.0;
constexpr double kGraphSize = 400.0;

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

const char* colorFor(int index) {
  if (index < 0) return kNeutral;
  return kPalette[static_cast<std::size_t>(index) % std::size(kPalette)];
}

}  // namespace

std::string renderSvg(const ViewModel& view, const Dataset& dataset) {
  const std::size_t panelCount = std::max<std::size_t>(view.panels.size(), 1);
  const double legendHeight = 30.0 + 14.0 * static_cast<double>(view.legend.size());
  const double height = std::max(kGraphSize + legendHeight + 2 * kMargin,
                                 kMargin + panelCount * (kPanelHeight + kPanelGap));
  const double width = kMargin + kPanelWidth + kMargin + kGraphSize + kMargin;
  const double graphLeft = kMargin + kPanelWidth + kMargin;

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  svg += "<g id=\"pcp-panels\">\n";
  if (view.panels.empty()) {
    const std::string message = view.advisory ? *view.advisory : "no panels for the current selection";
    svg += "<text id=\"pcp-empty\" x=\"" + num(kMargin) + "\" y=\"" + num(kMargin + 20) + "\">" +
           escape(message) + "</text>\n";
  }
  for (std::size_t p = 0; p < view.panels.size(); ++p) {
    const PanelView& panel = view.panels[p];
    const double top = kMargin + p * (kPanelHeight + kPanelGap);
    const std::size_t axes = panel.axes.size();
    auto axisX = [&](std::size_t a) {
      return axes <= 1 ? kMargin + kPanelWidth / 2
                       : kMargin + kPanelWidth * static_cast<double>(a) / static_cast<double>(axes - 1);
    };
    auto valueY = [&](double t) { return top + kPanelHeight * (1.0 - t); };

    svg += "<g id=\"pcp-panel-" + std::to_string(p) + "\" class=\"pcp-panel\" data-provenance=\"" +
           panel.provenance + "\">\n";
    svg += "<g class=\"polylines\" stroke-opacity=\"" + num(view.state.opacity) + "\" fill=\"none\">\n";
    for (std::size_t i = 0; i < panel.polylines.size(); ++i) {
      const auto& row = panel.polylines[i];
      const char* color = colorFor(i < panel.colors.size() ? panel.colors[i] : kNeutralColor);
      // Missing values break the line into separate runs.
      std::string points;
      std::size_t runLength = 0;
      auto flush = [&] {
        if (runLength >= 2) {
          svg += "<polyline class=\"item\" stroke=\"" + std::string(color) + "\" points=\"" + points +
                 "\"/>\n";
        }
        points.clear();
        runLength = 0;
      };
      for (std::size_t a = 0; a < row.size(); ++a) {
        if (isMissing(row[a])) {
          flush();
          continue;
        }
        if (!points.empty()) points.push_back(' ');
        points += num(axisX(a)) + "," + num(valueY(row[a]));
        ++runLength;
      }
      flush();
    }
    svg += "</g>\n";
    for (std::size_t a = 0; a < axes; ++a) {
      const PanelAxis& axis = panel.axes[a];
      const double x = axisX(a);
      svg += "<line class=\"axis\" data-dim=\"" + std::to_string(axis.dim) + "\" x1=\"" + num(x) +
             "\" y1=\"" + num(top) + "\" x2=\"" + num(x) + "\" y2=\"" + num(top + kPanelHeight) +
             "\" stroke=\"black\"/>\n";
      svg += "<text class=\"axis-label\" x=\"" + num(x) + "\" y=\"" + num(top + kPanelHeight + 14) +
             "\" text-anchor=\"middle\" font-size=\"10\">" + escape(axis.label) + "</text>\n";
      svg += "<text class=\"axis-max\" x=\"" + num(x + 2) + "\" y=\"" + num(top - 2) +
             "\" font-size=\"8\">" + num(axis.max) + "</text>\n";
      svg += "<text class=\"axis-min\" x=\"" + num(x + 2) + "\" y=\"" + num(top + kPanelHeight - 2) +
             "\" font-size=\"8\">" + num(axis.min) + "</text>\n";
    }
    svg += "</g>\n";
  }
  svg += "</g>\n";

  svg += "<g id=\"dimension-graph\" transform=\"translate(" + num(graphLeft) + "," + num(kMargin) +
         ")\">\n";
  svg += "<rect width=\"" + num(kGraphSize) + "\" height=\"" + num(kGraphSize) +
         "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
  auto dotPosition = [&](std::size_t dim) -> Point2 {
    for (const auto& dot : view.graph.dots) {
      if (dot.dim == dim) return {dot.position[0] * kGraphSize, (1.0 - dot.position[1]) * kGraphSize};
    }
    return {0.0, 0.0};
  };
  for (const auto& [j, k] : view.graph.edges) {
    const Point2 a = dotPosition(j);
    const Point2 b = dotPosition(k);
    svg += "<line class=\"edge\" x1=\"" + num(a[0]) + "\" y1=\"" + num(a[1]) + "\" x2=\"" + num(b[0]) +
           "\" y2=\"" + num(b[1]) + "\" stroke=\"#555555\"/>\n";
  }
  for (const auto& dot : view.graph.dots) {
    const Point2 p = dotPosition(dot.dim);
    svg += "<circle class=\"dot\" data-dim=\"" + std::to_string(dot.dim) + "\" cx=\"" + num(p[0]) +
           "\" cy=\"" + num(p[1]) + "\" r=\"3\" fill=\"black\"><title>" +
           escape(dataset.numericMeta(dot.dim).label) + "</title></circle>\n";
  }
  svg += "<text x=\"4\" y=\"" + num(kGraphSize + 16) + "\" font-size=\"10\">hidden: " +
         std::to_string(view.graph.hidden.size()) + "  stress: " + num(view.graph.stress) +
         "</text>\n";
  svg += "</g>\n";

  svg += "<g id=\"legend\" transform=\"translate(" + num(graphLeft) + "," +
         num(kMargin + kGraphSize + 30) + ")\">\n";
  for (std::size_t e = 0; e < view.legend.size(); ++e) {
    const auto& entry = view.legend[e];
    const double y = static_cast<double>(e) * 14.0;
    svg += "<rect class=\"swatch\" x=\"0\" y=\"" + num(y) + "\" width=\"10\" height=\"10\" fill=\"" +
           colorFor(entry.color) + "\"/>\n";
    svg += "<text x=\"14\" y=\"" + num(y + 9) + "\" font-size=\"10\">" + escape(entry.label) +
           "</text>\n";
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace dimscope
