#pragma once

#include <optional>
#include <string>

#include "phenollm/window.hpp"

namespace phenollm {

enum class DataFormat { Csv, Markdown, Tabular, Latex };

const char* format_name(DataFormat format);
std::optional<DataFormat> parse_format_name(const std::string& name);

// Renders one value the way the given format displays it. Columns with a
// pinned precision keep it (LaTeX adds one digit); integral values carry a
// trailing ".0" everywhere except Markdown, which drops the decimal point.
std::string render_cell(double value, const FeatureColumn& column,
                        DataFormat format);

// Missing-value policy per format: CSV leaves the field empty, Markdown
// writes "nan", LaTeX writes "NaN", Tabular omits the field entirely.
std::string serialize_table(const FeatureWindow& window, DataFormat format);

// Inverse of serialize_table. Tabular input with a short row throws
// AmbiguousTabular because the omitted fields cannot be realigned.
FeatureWindow parse_table(const std::string& text, DataFormat format,
                          SchemaPtr schema);

}  // namespace phenollm
