#include "levisqueeze/output.hpp"

#include "levisqueeze/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace levisqueeze {

OutputFormat parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  throw ValidationError("unknown format '" + std::string(name) + "' (expected csv or json)");
}

std::string_view to_string(OutputFormat format) { return format == OutputFormat::kCsv ? "csv" : "json"; }

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw std::logic_error("Table::add_row: expected " + std::to_string(columns_.size()) + " cells, got " +
                           std::to_string(row.size()));
  }
  rows_.push_back(std::move(row));
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string cell_text(const Cell& cell) {
  if (const double* d = std::get_if<double>(&cell)) return format_double(*d);
  return csv_field(std::get<std::string>(cell));
}

}  // namespace

void write_csv(std::ostream& out, const Table& table) {
  const auto& cols = table.columns();
  for (size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << csv_field(cols[i]);
  out << '\n';
  for (const auto& row : table.rows()) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << '\n';
  }
}

nlohmann::json table_to_json(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows()) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& cell : row) {
      if (const double* d = std::get_if<double>(&cell)) {
        r.push_back(std::isfinite(*d) ? nlohmann::json(*d) : nlohmann::json(format_double(*d)));
      } else {
        r.push_back(std::get<std::string>(cell));
      }
    }
    rows.push_back(std::move(r));
  }
  return {{"columns", table.columns()}, {"rows", std::move(rows)}};
}

void write_document(std::ostream& out, const Document& doc, OutputFormat format) {
  if (format == OutputFormat::kCsv) {
    write_csv(out, doc.table);
    return;
  }
  nlohmann::json j = doc.summary;
  if (!doc.table.columns().empty()) j["table"] = table_to_json(doc.table);
  out << j.dump(2) << '\n';
}

std::string sidecar_path(const std::string& path) { return path + ".json"; }

void write_outputs(const std::string& path, const Document& doc, OutputFormat format,
                   const nlohmann::json& sidecar) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file '" + path + "'");
  write_document(out, doc, format);
  std::ofstream side(sidecar_path(path), std::ios::binary);
  if (!side) throw ValidationError("cannot open sidecar file '" + sidecar_path(path) + "'");
  side << sidecar.dump(2) << '\n';
  if (!out || !side) throw ValidationError("write failed for '" + path + "'");
}

}  // namespace levisqueeze
