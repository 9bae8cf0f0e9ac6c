#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace evenlab::app {

using Json = nlohmann::ordered_json;

// 17 significant digits; non-finite values become null in JSON.
std::string format_number(double v);

// JSON text with every float at 17 significant digits. indent < 0 gives
// the compact single-line form.
std::string render_json(const Json& value, int indent = 2);

// Long-format CSV for sweep-shaped reports (depth-sweep, intervals,
// landscape). ValidationError for any other report.
std::string emit_plot_table(const Json& report);

// Writes via a temporary file in the target directory and a rename, so a
// reader never sees a partial report. "-" writes to stdout.
void write_output(const std::string& path, const std::string& content);

}  // namespace evenlab::app
