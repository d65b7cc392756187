#include "phenollm/table.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "phenollm/errors.hpp"

namespace phenollm {

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string trimmed_decimal(double v) {
  std::string s = fixed(v, 6);
  std::size_t last = s.find_last_not_of('0');
  if (s[last] == '.') last += 1;  // keep one zero after the point
  return s.substr(0, last + 1);
}

bool is_integral(double v) {
  return std::floor(v) == v && std::abs(v) < 1e15;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) {
    if (cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

double parse_number(const std::string& token, const std::string& where) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw MalformedRow("unparseable value '" + token + "' in " + where);
  }
  return value;
}

void check_header(const std::vector<std::string>& fields,
                  const FeatureSchema& schema) {
  if (fields.empty() || fields[0] != "date") throw MissingColumn("date");
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (i + 1 >= fields.size()) throw MissingColumn(schema.column(i).header_name);
    if (fields[i + 1] != schema.column(i).header_name) {
      throw MissingColumn(schema.column(i).header_name);
    }
  }
  if (fields.size() != schema.size() + 1) {
    throw MalformedRow("header has " + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(schema.size() + 1));
  }
}

FeatureWindow assemble(SchemaPtr schema, std::vector<Date> dates,
                       std::vector<FeatureWindow::Row> rows) {
  return FeatureWindow(std::move(schema), std::move(dates), std::move(rows));
}

}  // namespace

const char* format_name(DataFormat format) {
  switch (format) {
    case DataFormat::Csv: return "csv";
    case DataFormat::Markdown: return "markdown";
    case DataFormat::Tabular: return "tabular";
    case DataFormat::Latex: return "latex";
  }
  return "unknown";
}

std::optional<DataFormat> parse_format_name(const std::string& name) {
  if (name == "csv") return DataFormat::Csv;
  if (name == "markdown") return DataFormat::Markdown;
  if (name == "tabular") return DataFormat::Tabular;
  if (name == "latex") return DataFormat::Latex;
  return std::nullopt;
}

std::string render_cell(double value, const FeatureColumn& column,
                        DataFormat format) {
  if (column.fixed_decimals >= 0) {
    const int decimals =
        column.fixed_decimals + (format == DataFormat::Latex ? 1 : 0);
    return fixed(value, decimals);
  }
  if (is_integral(value)) {
    return format == DataFormat::Markdown ? fixed(value, 0) : fixed(value, 1);
  }
  return trimmed_decimal(value);
}

std::string serialize_table(const FeatureWindow& window, DataFormat format) {
  const FeatureSchema& schema = *window.schema();
  std::ostringstream out;
  const std::size_t n = schema.size();

  auto row_cells = [&](std::size_t r, const char* missing, char sep,
                       bool skip_missing) {
    std::string line = window.dates()[r].iso();
    for (std::size_t c = 0; c < n; ++c) {
      const auto& v = window.at(r, c);
      if (!v && skip_missing) continue;
      line += sep;
      line += v ? render_cell(*v, schema.column(c), format) : missing;
    }
    return line;
  };

  switch (format) {
    case DataFormat::Csv: {
      out << "date";
      for (std::size_t c = 0; c < n; ++c) out << ',' << schema.column(c).header_name;
      for (std::size_t r = 0; r < window.days(); ++r) {
        out << '\n' << row_cells(r, "", ',', false);
      }
      break;
    }
    case DataFormat::Markdown: {
      out << "date";
      for (std::size_t c = 0; c < n; ++c) out << '|' << schema.column(c).header_name;
      out << '|';
      for (std::size_t r = 0; r < window.days(); ++r) {
        out << '\n' << row_cells(r, "nan", '|', false) << '|';
      }
      break;
    }
    case DataFormat::Tabular: {
      out << "date";
      for (std::size_t c = 0; c < n; ++c) out << ' ' << schema.column(c).header_name;
      for (std::size_t r = 0; r < window.days(); ++r) {
        out << '\n' << row_cells(r, "", ' ', true);
      }
      break;
    }
    case DataFormat::Latex: {
      out << "\\begin{tabular}{l" << std::string(n, 'r') << "}\n\\toprule\ndate";
      for (std::size_t c = 0; c < n; ++c) {
        out << " & " << schema.column(c).header_name;
      }
      out << " \\\\\n\\midrule";
      for (std::size_t r = 0; r < window.days(); ++r) {
        std::string line = window.dates()[r].iso();
        for (std::size_t c = 0; c < n; ++c) {
          const auto& v = window.at(r, c);
          line += " & ";
          line += v ? render_cell(*v, schema.column(c), format) : "NaN";
        }
        out << '\n' << line << " \\\\";
      }
      out << "\n\\bottomrule\n\\end{tabular}";
      break;
    }
  }
  return out.str();
}

FeatureWindow parse_table(const std::string& text, DataFormat format,
                          SchemaPtr schema) {
  if (!schema) throw InvalidWindow("null schema");
  std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw MalformedRow("empty table");

  const std::size_t n = schema->size();
  std::vector<Date> dates;
  std::vector<FeatureWindow::Row> rows;

  auto parse_data_fields = [&](std::vector<std::string> fields,
                               const char* missing_token) {
    const Date date = Date::parse_iso(fields.at(0));
    if (fields.size() != n + 1) {
      throw MalformedRow("row " + date.iso() + " has " +
                         std::to_string(fields.size() - 1) + " of " +
                         std::to_string(n) + " values");
    }
    FeatureWindow::Row row(n);
    for (std::size_t c = 0; c < n; ++c) {
      const std::string& token = fields[c + 1];
      if (token == missing_token) continue;
      row[c] = parse_number(token, "row " + date.iso());
    }
    dates.push_back(date);
    rows.push_back(std::move(row));
  };

  switch (format) {
    case DataFormat::Csv: {
      check_header(split(lines[0], ','), *schema);
      for (std::size_t i = 1; i < lines.size(); ++i) {
        parse_data_fields(split(lines[i], ','), "");
      }
      break;
    }
    case DataFormat::Markdown: {
      auto strip_trailing_pipe = [](std::vector<std::string> fields) {
        if (!fields.empty() && fields.back().empty()) fields.pop_back();
        return fields;
      };
      check_header(strip_trailing_pipe(split(lines[0], '|')), *schema);
      for (std::size_t i = 1; i < lines.size(); ++i) {
        parse_data_fields(strip_trailing_pipe(split(lines[i], '|')), "nan");
      }
      break;
    }
    case DataFormat::Tabular: {
      check_header(split(lines[0], ' '), *schema);
      for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<std::string> fields = split(lines[i], ' ');
        if (fields.size() < n + 1) {
          throw AmbiguousTabular("row " + fields.at(0) + " has " +
                                 std::to_string(fields.size() - 1) + " of " +
                                 std::to_string(n) +
                                 " values; omitted fields cannot be realigned");
        }
        parse_data_fields(std::move(fields), "\x01never");
      }
      break;
    }
    case DataFormat::Latex: {
      // Expected scaffold:
      //   \begin{tabular}{...} / \toprule / header / \midrule / rows /
      //   \bottomrule / \end{tabular}
      if (lines.size() < 7 || lines[0].rfind("\\begin{tabular}", 0) != 0 ||
          lines[1] != "\\toprule" || lines[3] != "\\midrule" ||
          lines[lines.size() - 2] != "\\bottomrule" ||
          lines.back() != "\\end{tabular}") {
        throw MalformedRow("latex tabular scaffold not recognized");
      }
      auto split_amp = [](std::string line) {
        if (line.size() >= 3 && line.compare(line.size() - 3, 3, " \\\\") == 0) {
          line.erase(line.size() - 3);
        }
        std::vector<std::string> fields;
        std::string cur;
        for (std::size_t i = 0; i < line.size(); ++i) {
          if (i + 2 < line.size() && line[i] == ' ' && line[i + 1] == '&' &&
              line[i + 2] == ' ') {
            fields.push_back(cur);
            cur.clear();
            i += 2;
          } else {
            cur += line[i];
          }
        }
        fields.push_back(cur);
        return fields;
      };
      check_header(split_amp(lines[2]), *schema);
      for (std::size_t i = 4; i + 2 < lines.size(); ++i) {
        parse_data_fields(split_amp(lines[i]), "NaN");
      }
      break;
    }
  }

  if (dates.empty()) throw MalformedRow("table has no data rows");
  return assemble(std::move(schema), std::move(dates), std::move(rows));
}

}  // namespace phenollm
