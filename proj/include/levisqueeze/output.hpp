#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace levisqueeze {

enum class OutputFormat { kCsv, kJson };

OutputFormat parse_output_format(std::string_view name);
std::string_view to_string(OutputFormat format);

using Cell = std::variant<double, std::string>;

class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// Header row plus one line per row, comma separated, LF endings. String
/// cells containing commas, quotes or newlines are quoted.
void write_csv(std::ostream& out, const Table& table);

nlohmann::json table_to_json(const Table& table);

/// A command result: the table plus scalar summary fields. CSV output carries
/// only the table; JSON output carries both.
struct Document {
  Table table{{}};
  nlohmann::json summary = nlohmann::json::object();
};

void write_document(std::ostream& out, const Document& doc, OutputFormat format);

/// Writes `doc` to `path` and the sidecar to `path + ".json"`.
void write_outputs(const std::string& path, const Document& doc, OutputFormat format,
                   const nlohmann::json& sidecar);

std::string sidecar_path(const std::string& path);

}  // namespace levisqueeze
