#include "evenlab_app/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <system_error>
#include <unistd.h>

#include <fmt/format.h>

#include "evenlab/errors.hpp"

namespace evenlab::app {

std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  return fmt::format("{:.17g}", v);
}

namespace {

void render(const Json& v, int indent, int depth, std::string& out) {
  const bool pretty = indent >= 0;
  const auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(key).dump();
        out += pretty ? ": " : ":";
        render(item, indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      bool scalars = true;
      for (const auto& item : v) scalars = scalars && !item.is_structured();
      out += '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += scalars || !pretty ? ", " : ",";
        first = false;
        if (!scalars) newline(depth + 1);
        render(item, indent, depth + 1, out);
      }
      if (!scalars) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += format_number(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) {
    const double d = v.get<double>();
    return std::isfinite(d) ? format_number(d) : "";
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }
  return v.dump();
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string line;
  bool first = true;
  for (const std::string& c : cells) {
    if (!first) line += ',';
    first = false;
    line += c;
  }
  return line + "\n";
}

}  // namespace

std::string render_json(const Json& value, int indent) {
  std::string out;
  render(value, indent, 0, out);
  return out;
}

std::string emit_plot_table(const Json& report) {
  const std::string kind = report.value("experiment", std::string());
  std::string out;
  if (kind == "depth-sweep") {
    out += csv_line({"experiment", "H", "p_hat", "ci_lo", "ci_hi", "target", "ratio", "ratio_ci_lo", "ratio_ci_hi"});
    for (const Json& row : report.at("rows")) {
      const Json& ratio = row.at("ratio_to_previous");
      const bool has = !ratio.is_null();
      out += csv_line({kind, csv_cell(row.at("H")), csv_cell(row.at("estimate")), csv_cell(row.at("ci_lo")),
                       csv_cell(row.at("ci_hi")), csv_cell(row.at("target")), has ? csv_cell(ratio.at("ratio")) : "",
                       has ? csv_cell(ratio.at("ci_lo")) : "", has ? csv_cell(ratio.at("ci_hi")) : ""});
    }
    return out;
  }
  if (kind == "intervals") {
    out += csv_line({"experiment", "scheme", "n", "lo", "hi", "coverage"});
    for (const Json& row : report.at("rows")) {
      out += csv_line({kind, csv_cell(row.at("scheme")), csv_cell(row.at("n")), csv_cell(row.at("lo")),
                       csv_cell(row.at("hi")), csv_cell(row.at("coverage"))});
    }
    return out;
  }
  if (kind == "landscape") {
    out += csv_line({"experiment", "start_id", "final_loss", "oracle_loss", "classification"});
    const Json& oracle = report.at("oracle").at("min_loss");
    for (const Json& row : report.at("multistart").at("rows")) {
      out += csv_line({kind, csv_cell(row.at("start_id")), csv_cell(row.at("loss")), csv_cell(oracle),
                       csv_cell(row.at("classification"))});
    }
    return out;
  }
  throw_validation("emit_plot_table: '" + kind +
                   "' reports have no sweep rows (csv output exists for depth-sweep, intervals, landscape)");
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content << std::flush;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += fmt::format(".tmp.{}", static_cast<long>(::getpid()));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw_validation("out: cannot open '" + tmp.string() + "' for writing");
    f << content;
    f.flush();
    if (!f) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw_validation("out: write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw_validation("out: cannot rename onto '" + path + "': " + ec.message());
  }
}

}  // namespace evenlab::app
