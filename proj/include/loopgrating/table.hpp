#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace loopgrating {

/// 12 significant digits in scientific notation; −0 is written as 0.
std::string format_value(double v);

/// Tab-separated table with one '#'-prefixed header line.
class TableWriter {
 public:
  TableWriter(std::ostream& os, const std::vector<std::string>& columns);

  void row(std::initializer_list<double> values);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& os_;
  std::size_t width_;
};

}  // namespace loopgrating
