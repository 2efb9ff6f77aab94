#pragma once
#include <string>

#include "vortiline/csvio.hpp"

namespace vortiline {

// Inputs for the run report.  Any table may be empty; the matching panel
// then renders a placeholder note instead of series.
struct ReportTables {
  CsvTable envelope;     // time, omega, env_single, env_double, flags...
  CsvTable identity;     // time, relative_residual, ...
  CsvTable diagnostics;  // time, resolved, ...
  std::string title = "vortiline report";
};

// Standalone SVG with three panels: growth vs envelopes (log scale),
// identity residuals (log scale), and a hypothesis-flag timeline.  Pure
// function of the inputs: the same tables always yield the same bytes
// (fixed layout, fixed fonts, fixed numeric formatting).
std::string render_report_svg(const ReportTables& in);

}  // namespace vortiline
