#include "prt/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace prt {

namespace {

struct Axis {
  double lo, hi;
  double scale(double v, double px_lo, double px_hi) const {
    if (hi <= lo) return (px_lo + px_hi) / 2;
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

Axis fit_axis(double lo, double hi) {
  if (hi <= lo) hi = lo + 1;
  const double pad = 0.08 * (hi - lo);
  lo = std::max(0.0, lo - pad);
  hi = hi + pad;
  return {lo, hi};
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string scatter_svg(const std::vector<SweepCell>& cells, const std::string& title) {
  const int W = 760, H = 540;
  const double left = 70, right = W - 30, top = 50, bottom = H - 60;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const SweepCell& c : cells) {
    xmin = std::min(xmin, c.net_mean);
    xmax = std::max(xmax, c.net_mean);
    ymin = std::min(ymin, c.aswt_mean);
    ymax = std::max(ymax, c.aswt_mean);
  }
  if (cells.empty()) xmin = ymin = 0, xmax = ymax = 1;
  Axis xa = fit_axis(xmin, xmax), ya = fit_axis(ymin, ymax);

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << W / 2 << "' y='26' text-anchor='middle' font-size='16'>" << title
     << "</text>\n";

  // Axes with five ticks each.
  os << "<line x1='" << left << "' y1='" << bottom << "' x2='" << right << "' y2='" << bottom
     << "' stroke='black'/>\n";
  os << "<line x1='" << left << "' y1='" << top << "' x2='" << left << "' y2='" << bottom
     << "' stroke='black'/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xa.lo + (xa.hi - xa.lo) * i / 5.0;
    const double px = xa.scale(fx, left, right);
    os << "<line x1='" << px << "' y1='" << bottom << "' x2='" << px << "' y2='" << bottom + 5
       << "' stroke='black'/>\n";
    os << "<text x='" << px << "' y='" << bottom + 20 << "' text-anchor='middle' font-size='11'>"
       << fmt(fx) << "</text>\n";
    const double fy = ya.lo + (ya.hi - ya.lo) * i / 5.0;
    const double py = ya.scale(fy, bottom, top);
    os << "<line x1='" << left - 5 << "' y1='" << py << "' x2='" << left << "' y2='" << py
       << "' stroke='black'/>\n";
    os << "<text x='" << left - 8 << "' y='" << py + 4 << "' text-anchor='end' font-size='11'>"
       << fmt(fy) << "</text>\n";
  }
  os << "<text x='" << (left + right) / 2 << "' y='" << H - 18
     << "' text-anchor='middle' font-size='13'>NET (empty trips)</text>\n";
  os << "<text x='20' y='" << (top + bottom) / 2
     << "' text-anchor='middle' font-size='13' transform='rotate(-90 20 " << (top + bottom) / 2
     << ")'>ASWT (s)</text>\n";

  for (const SweepCell& c : cells) {
    const double px = xa.scale(c.net_mean, left, right);
    const double py = ya.scale(c.aswt_mean, bottom, top);
    // Point: small black diamond.
    os << "<path d='M" << px << ' ' << py - 4 << " L" << px + 4 << ' ' << py << " L" << px << ' '
       << py + 4 << " L" << px - 4 << ' ' << py << " Z' fill='black'/>\n";
    if (c.is_base)
      os << "<circle cx='" << px << "' cy='" << py
         << "' r='10' fill='none' stroke='black' stroke-width='1.5'/>\n";
    if (c.is_best)
      os << "<circle cx='" << px << "' cy='" << py
         << "' r='14' fill='none' stroke='black' stroke-width='1.5' stroke-dasharray='6,4'/>\n";
    if (c.is_suggested)
      os << "<circle cx='" << px << "' cy='" << py
         << "' r='18' fill='none' stroke='black' stroke-width='1.5' stroke-dasharray='2,3'/>\n";
    os << "<text x='" << px + 8 << "' y='" << py - 8 << "' font-size='10'>" << c.label
       << "</text>\n";
  }

  os << "<text x='" << right - 240 << "' y='" << top + 4
     << "' font-size='11'>solid: base   dashed: best QC   dotted: suggested</text>\n";
  os << "</svg>\n";
  return os.str();
}

void write_report(const SweepResult& result, const std::string& out_dir, bool svg) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream os(out_dir + "/summary.csv");
    if (!os) throw std::runtime_error("cannot write " + out_dir + "/summary.csv");
    write_summary_csv(os, result.runs);
  }
  {
    std::ofstream os(out_dir + "/report.csv");
    write_cells_csv(os, result.cells);
  }
  if (!svg) return;
  std::map<std::pair<int, double>, std::vector<SweepCell>> variants;
  for (const SweepCell& c : result.cells) variants[{c.fleet, c.lambda_gph}].push_back(c);
  for (const auto& [key, cells] : variants) {
    char name[96], title[96];
    std::snprintf(name, sizeof name, "%s/scatter_%d_%g.svg", out_dir.c_str(), key.first,
                  key.second);
    std::snprintf(title, sizeof title, "J=%d, lambda=%g groups/h", key.first, key.second);
    std::ofstream os(name);
    os << scatter_svg(cells, title);
  }
}

}  // namespace prt
