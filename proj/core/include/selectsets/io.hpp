#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace selectsets {

// Tabular output with typed cells. CSV is the primary format; JSON mirrors it
// one-to-one (an array of flat objects keyed by column name). All doubles are
// serialized with 17 significant digits in both formats, so emitted values
// round-trip to the exact bit pattern.
using Cell = std::variant<std::string, double, std::int64_t, std::uint64_t, bool>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> cells);
};

// %.17g rendering (the shortest text guaranteed to round-trip a double).
std::string format_double(double value);

std::string cell_text(const Cell& cell);

void write_csv(std::ostream& os, const Table& table);
void write_json(std::ostream& os, const Table& table);

// Multiple tables in one stream: CSV blocks separated by a blank line; JSON
// as an object keyed by block name.
struct NamedTable {
  std::string name;
  Table table;
};
void write_csv(std::ostream& os, const std::vector<NamedTable>& blocks);
void write_json(std::ostream& os, const std::vector<NamedTable>& blocks);

}  // namespace selectsets
