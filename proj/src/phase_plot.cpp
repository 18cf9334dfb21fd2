#include "vmg/phase_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

namespace vmg {

namespace {

constexpr double kWidth = 640.0, kHeight = 480.0, kMargin = 50.0;

struct Box {
  double x0, x1, y0, y1;
  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
  bool inside(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void polyline(std::ostream& os, const std::string& pts, const char* colour, double width) {
  if (pts.empty()) return;
  os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"" << width
     << "\" points=\"" << pts << "\"/>\n";
}

}  // namespace

void emit_phase_plot(std::ostream& os, const Trajectory& traj) {
  if (traj.samples.empty()) throw InvalidArgument("emit_phase_plot: empty trajectory");
  const auto& p = traj.params;
  const double w = p.cubic.w;
  const double gamma = traj.samples.back().gamma;

  Box box{-0.5 * w, 3.0 * w, 0.0, p.cubic.psi_c0 + 2.4 * p.cubic.h};
  for (const auto& s : traj.samples) {
    box.x0 = std::min(box.x0, s.state.avg_flow);
    box.x1 = std::max(box.x1, s.state.avg_flow);
    box.y0 = std::min(box.y0, s.state.pressure_rise);
    box.y1 = std::max(box.y1, s.state.pressure_rise);
  }
  const double dx = 0.05 * (box.x1 - box.x0), dy = 0.05 * (box.y1 - box.y0);
  box = {box.x0 - dx, box.x1 + dx, box.y0 - dy, box.y1 + dy};

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes through the origin when visible, else along the frame
  const double ax = box.inside(0.0, box.y0) ? box.px(0.0) : kMargin;
  const double ay = box.inside(box.x0, 0.0) ? box.py(0.0) : kHeight - kMargin;
  os << "<line x1=\"" << fmt(kMargin) << "\" y1=\"" << fmt(ay) << "\" x2=\"" << fmt(kWidth - kMargin)
     << "\" y2=\"" << fmt(ay) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << fmt(ax) << "\" y1=\"" << fmt(kMargin) << "\" x2=\"" << fmt(ax)
     << "\" y2=\"" << fmt(kHeight - kMargin) << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << fmt(kWidth - kMargin) << "\" y=\"" << fmt(kHeight - 15) << "\" font-size=\"14\" text-anchor=\"end\">Phi</text>\n";
  os << "<text x=\"15\" y=\"" << fmt(kMargin - 15) << "\" font-size=\"14\">Psi</text>\n";

  std::string cubic, throttle, orbit;
  constexpr int kCurve = 400;
  for (int k = 0; k <= kCurve; ++k) {
    const double x = box.x0 + (box.x1 - box.x0) * k / kCurve;
    const double y = psi_c(p, x);
    if (box.inside(x, y)) cubic += fmt(box.px(x)) + ',' + fmt(box.py(y)) + ' ';
    const double psi = std::max(0.0, box.y0) + (box.y1 - std::max(0.0, box.y0)) * k / kCurve;
    const double phi = gamma * std::sqrt(psi);
    if (box.inside(phi, psi)) throttle += fmt(box.px(phi)) + ',' + fmt(box.py(psi)) + ' ';
  }
  for (const auto& s : traj.samples) {
    orbit += fmt(box.px(s.state.avg_flow)) + ',' + fmt(box.py(s.state.pressure_rise)) + ' ';
  }
  polyline(os, cubic, "#1f77b4", 2.0);
  polyline(os, throttle, "#2ca02c", 2.0);
  if (traj.samples.size() > 1) polyline(os, orbit, "#d62728", 1.0);
  const auto& last = traj.samples.back().state;
  os << "<circle cx=\"" << fmt(box.px(last.avg_flow)) << "\" cy=\"" << fmt(box.py(last.pressure_rise))
     << "\" r=\"4\" fill=\"#d62728\"/>\n";
  os << "<text x=\"" << fmt(kWidth - kMargin) << "\" y=\"" << fmt(kMargin) << "\" font-size=\"12\" text-anchor=\"end\">gamma = "
     << fmt(gamma) << "</text>\n";
  os << "</svg>\n";
}

void emit_phase_plot(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream os(path);
  if (!os) throw Error("IOError", "cannot open " + path.string() + " for writing");
  emit_phase_plot(os, traj);
}

}  // namespace vmg
