#include "loopgrating/table.hpp"

#include <cstdio>

#include "loopgrating/error.hpp"

namespace loopgrating {

std::string format_value(double v) {
  if (v == 0.0) v = 0.0;  // drops the sign of −0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

TableWriter::TableWriter(std::ostream& os, const std::vector<std::string>& columns)
    : os_(os), width_(columns.size()) {
  os_ << '#';
  for (std::size_t k = 0; k < columns.size(); ++k) os_ << (k ? "\t" : " ") << columns[k];
  os_ << '\n';
}

void TableWriter::row(std::initializer_list<double> values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_value(v));
  row(cells);
}

void TableWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw Error(ErrorCode::InvalidArgument, "row width does not match header");
  for (std::size_t k = 0; k < cells.size(); ++k) os_ << (k ? "\t" : "") << cells[k];
  os_ << '\n';
}

}  // namespace loopgrating
