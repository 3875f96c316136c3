#pragma once

#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace wfr {

// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

// Minimal CSV writer: header first, then numeric rows.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  void row(std::span<const double> values);
  void row(std::initializer_list<double> values);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace wfr
