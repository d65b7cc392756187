#pragma once

#include <string>

#include "phenollm/metrics.hpp"

namespace phenollm {

struct ReportFiles {
  std::string metrics_csv;
  std::string accuracy_svg;
  std::string rubric_svg;
  std::string summary_txt;
};

// Renders the metric grid as strings. Output is a pure function of the
// metrics (no timestamps, fixed ordering, fixed precision), so reruns are
// byte-identical.
ReportFiles render_report(const std::map<CellKey, CellMetrics>& cells);

// Writes the four files into dir (created if needed) and returns their
// paths.
ReportFiles write_report(const std::map<CellKey, CellMetrics>& cells,
                         const std::string& dir);

}  // namespace phenollm
