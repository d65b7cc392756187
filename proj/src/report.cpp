#include "phenollm/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "phenollm/errors.hpp"

namespace phenollm {

namespace fs = std::filesystem;

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string cell_label(const CellKey& key) {
  return std::string(strategy_name(key.strategy)) + "/" +
         format_name(key.format);
}

// Minimal horizontal bar chart; one row per metric cell.
std::string bar_chart_svg(const std::string& title,
                          const std::vector<std::pair<std::string, double>>& rows) {
  const int bar_h = 18, gap = 6, label_w = 260, chart_w = 400, pad = 10;
  const int height = pad * 2 + 30 +
                     static_cast<int>(rows.size()) * (bar_h + gap);
  const int width = label_w + chart_w + 70;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<style>text{font-family:monospace;font-size:12px;}</style>\n";
  svg << "<text x=\"" << pad << "\" y=\"" << pad + 12 << "\">" << title
      << "</text>\n";
  int y = pad + 30;
  for (const auto& [label, value] : rows) {
    const int w = static_cast<int>(value * chart_w + 0.5);
    svg << "<text x=\"" << pad << "\" y=\"" << y + 13 << "\">" << label
        << "</text>\n";
    svg << "<rect x=\"" << label_w << "\" y=\"" << y << "\" width=\""
        << chart_w << "\" height=\"" << bar_h
        << "\" fill=\"#eeeeee\"/>\n";
    svg << "<rect x=\"" << label_w << "\" y=\"" << y << "\" width=\"" << w
        << "\" height=\"" << bar_h << "\" fill=\"#4477aa\"/>\n";
    svg << "<text x=\"" << label_w + chart_w + 6 << "\" y=\"" << y + 13
        << "\">" << render_percent(value) << "</text>\n";
    y += bar_h + gap;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

ReportFiles render_report(const std::map<CellKey, CellMetrics>& cells) {
  ReportFiles files;

  std::ostringstream csv;
  csv << "strategy,format,model,total,yes_rate,no_rate,unparseable_rate,"
         "accuracy,balanced_accuracy,q1_rate,q2_rate,q3_rate,q4_rate\n";
  for (const auto& [key, m] : cells) {
    csv << strategy_name(key.strategy) << "," << format_name(key.format) << ","
        << key.model << "," << m.total << "," << fixed4(m.yes_rate()) << ","
        << fixed4(m.no_rate()) << "," << fixed4(m.unparseable_rate()) << ","
        << fixed4(m.accuracy()) << "," << fixed4(m.balanced_accuracy());
    for (int q = 1; q <= 4; ++q) csv << "," << fixed4(m.q_rate(q));
    csv << "\n";
  }
  files.metrics_csv = csv.str();

  std::vector<std::pair<std::string, double>> acc_rows;
  for (const auto& [key, m] : cells) {
    acc_rows.emplace_back(cell_label(key), m.accuracy());
  }
  files.accuracy_svg = bar_chart_svg("accuracy by strategy and format", acc_rows);

  std::vector<std::pair<std::string, double>> rubric_rows;
  for (const auto& [key, m] : cells) {
    for (int q = 1; q <= 4; ++q) {
      rubric_rows.emplace_back(cell_label(key) + " q" + std::to_string(q),
                               m.q_rate(q));
    }
  }
  files.rubric_svg = bar_chart_svg("grounding rubric pass rates", rubric_rows);

  std::ostringstream txt;
  txt << "results by strategy and format\n";
  txt << "==============================\n";
  for (const auto& [key, m] : cells) {
    txt << "\n" << cell_label(key) << " (" << key.model << ", n=" << m.total
        << ")\n";
    txt << "  accuracy " << render_percent(m.accuracy()) << ", balanced "
        << render_percent(m.balanced_accuracy()) << "\n";
    txt << "  yes " << render_percent(m.yes_rate()) << ", no "
        << render_percent(m.no_rate()) << ", unparseable "
        << render_percent(m.unparseable_rate()) << "\n";
    txt << "  rubric q1 " << render_percent(m.q_rate(1)) << ", q2 "
        << render_percent(m.q_rate(2)) << ", q3 " << render_percent(m.q_rate(3))
        << ", q4 " << render_percent(m.q_rate(4)) << "\n";
  }
  files.summary_txt = txt.str();
  return files;
}

ReportFiles write_report(const std::map<CellKey, CellMetrics>& cells,
                         const std::string& dir) {
  const ReportFiles rendered = render_report(cells);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoFailure("cannot create report dir: " + ec.message());

  const auto write = [&](const std::string& name, const std::string& body) {
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot write " + path.string());
    out << body;
    return path.string();
  };
  ReportFiles paths;
  paths.metrics_csv = write("metrics.csv", rendered.metrics_csv);
  paths.accuracy_svg = write("accuracy.svg", rendered.accuracy_svg);
  paths.rubric_svg = write("rubric.svg", rendered.rubric_svg);
  paths.summary_txt = write("summary.txt", rendered.summary_txt);
  return paths;
}

}  // namespace phenollm
