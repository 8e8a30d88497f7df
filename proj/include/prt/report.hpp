#pragma once

#include <string>
#include <vector>

#include "prt/metrics.hpp"

namespace prt {

// ASWT (y) versus NET (x), one point per configuration of a (J, lambda)
// variant. The base configuration is ringed solid, the smallest-QC one
// dashed, the suggested one dotted. Self-contained SVG, no plotting library.
std::string scatter_svg(const std::vector<SweepCell>& variant_cells, const std::string& title);

// Writes summary.csv, report.csv and one scatter_<J>_<lambda>.svg per
// variant into out_dir. Set svg=false to skip the plots.
void write_report(const SweepResult& result, const std::string& out_dir, bool svg = true);

}  // namespace prt
