#include "selectsets/io.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace selectsets {

void Table::add_row(std::vector<Cell> cells) {
  if (cells.size() != header.size())
    throw std::invalid_argument("io: row width does not match header");
  rows.push_back(std::move(cells));
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string cell_text(const Cell& cell) {
  switch (cell.index()) {
    case 0: return std::get<std::string>(cell);
    case 1: return format_double(std::get<double>(cell));
    case 2: return std::to_string(std::get<std::int64_t>(cell));
    case 3: return std::to_string(std::get<std::uint64_t>(cell));
    case 4: return std::get<bool>(cell) ? "1" : "0";
  }
  throw std::logic_error("io: corrupt cell");
}

void write_csv(std::ostream& os, const Table& table) {
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c) os << ',';
    os << table.header[c];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << cell_text(row[c]);
    }
    os << '\n';
  }
}

namespace {

void json_escape(std::ostream& os, const std::string& s) {
  os << '"';
  for (char ch : s) {
    switch (ch) {
      case '"': os << "\\\""; break;
      case '\\': os << "\\\\"; break;
      case '\n': os << "\\n"; break;
      case '\t': os << "\\t"; break;
      default: os << ch;
    }
  }
  os << '"';
}

void json_cell(std::ostream& os, const Cell& cell) {
  switch (cell.index()) {
    case 0:
      json_escape(os, std::get<std::string>(cell));
      return;
    case 1: {
      const double v = std::get<double>(cell);
      // JSON has no nan/inf literals; emit null for them.
      if (std::isfinite(v))
        os << format_double(v);
      else
        os << "null";
      return;
    }
    case 2: os << std::get<std::int64_t>(cell); return;
    case 3: os << std::get<std::uint64_t>(cell); return;
    case 4: os << (std::get<bool>(cell) ? "true" : "false"); return;
  }
  throw std::logic_error("io: corrupt cell");
}

void json_table(std::ostream& os, const Table& table) {
  os << '[';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (r) os << ',';
    os << '{';
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c) os << ',';
      json_escape(os, table.header[c]);
      os << ':';
      json_cell(os, table.rows[r][c]);
    }
    os << '}';
  }
  os << ']';
}

}  // namespace

void write_json(std::ostream& os, const Table& table) {
  json_table(os, table);
  os << '\n';
}

void write_csv(std::ostream& os, const std::vector<NamedTable>& blocks) {
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (b) os << '\n';
    write_csv(os, blocks[b].table);
  }
}

void write_json(std::ostream& os, const std::vector<NamedTable>& blocks) {
  os << '{';
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (b) os << ',';
    json_escape(os, blocks[b].name);
    os << ':';
    json_table(os, blocks[b].table);
  }
  os << "}\n";
}

}  // namespace selectsets
