#include "scooter/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

namespace scooter {

namespace {

constexpr double kWidth = 900.0;
constexpr double kPanelHeight = 240.0;
constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kGap = 50.0;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

std::string label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
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

struct Panel {
  std::string name;
  std::function<double(const TrajectorySample&)> value;
  double band = 0.0;  // zero: no band drawn
};

void draw_panel(std::string& svg, const Trajectory& traj, const Panel& panel, double top) {
  const double t0 = traj.samples.front().t;
  const double t1 = std::max(traj.samples.back().t, t0 + 1e-9);
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& s : traj.samples) {
    lo = std::min(lo, panel.value(s));
    hi = std::max(hi, panel.value(s));
  }
  lo = std::min(lo, -panel.band);
  hi = std::max(hi, panel.band);
  if (hi - lo < 1e-12) {
    hi += 1.0;
    lo -= 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  auto px = [&](double t) { return kMarginLeft + (t - t0) / (t1 - t0) * plot_w; };
  auto py = [&](double y) { return top + (hi - y) / (hi - lo) * kPanelHeight; };

  svg += "<rect x=\"" + num(kMarginLeft) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(kPanelHeight) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  svg += "<text x=\"" + num(kMarginLeft) + "\" y=\"" + num(top - 8) +
         "\" font-size=\"14\">" + escape(panel.name) + "</text>\n";
  for (double y : {lo + pad, 0.0, hi - pad}) {
    svg += "<text x=\"" + num(kMarginLeft - 6) + "\" y=\"" + num(py(y) + 4) +
           "\" font-size=\"11\" text-anchor=\"end\">" + label(y) + "</text>\n";
  }
  svg += "<text x=\"" + num(kMarginLeft + plot_w) + "\" y=\"" + num(top + kPanelHeight + 16) +
         "\" font-size=\"11\" text-anchor=\"end\">t = " + label(t1) + " s</text>\n";
  svg += "<line x1=\"" + num(px(t0)) + "\" y1=\"" + num(py(0)) + "\" x2=\"" + num(px(t1)) +
         "\" y2=\"" + num(py(0)) + "\" stroke=\"#bbb\"/>\n";
  if (panel.band > 0.0) {
    for (double y : {panel.band, -panel.band}) {
      svg += "<line x1=\"" + num(px(t0)) + "\" y1=\"" + num(py(y)) + "\" x2=\"" + num(px(t1)) +
             "\" y2=\"" + num(py(y)) +
             "\" stroke=\"#c33\" stroke-dasharray=\"6,4\"/>\n";
    }
  }

  // Decimate to at most ~2000 vertices per curve.
  const std::size_t stride = std::max<std::size_t>(1, traj.samples.size() / 2000);
  svg += "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.2\" points=\"";
  for (std::size_t i = 0; i < traj.samples.size(); i += stride) {
    const auto& s = traj.samples[i];
    svg += num(px(s.t)) + ',' + num(py(panel.value(s))) + ' ';
  }
  const auto& last = traj.samples.back();
  svg += num(px(last.t)) + ',' + num(py(panel.value(last)));
  svg += "\"/>\n";
}

}  // namespace

std::string trajectory_svg(const Trajectory& traj, std::string_view title) {
  const double height = kMarginTop + 3 * kPanelHeight + 3 * kGap;
  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" font-size=\"16\" text-anchor=\"middle\">" +
         escape(title) + "</text>\n";
  if (traj.samples.empty()) {
    svg += "</svg>\n";
    return svg;
  }
  const std::vector<Panel> panels{
      {"roll angle theta [rad]", [](const TrajectorySample& s) { return s.theta; },
       traj.summary.theta_bound},
      {"roll rate theta_dot [rad/s]", [](const TrajectorySample& s) { return s.theta_dot; },
       traj.summary.theta_dot_bound},
      {"torque tau [N m]", [](const TrajectorySample& s) { return s.tau; }, 0.0},
  };
  double top = kMarginTop + 10;
  for (const Panel& p : panels) {
    draw_panel(svg, traj, p, top);
    top += kPanelHeight + kGap;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace scooter
