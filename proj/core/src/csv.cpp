#include "cohres/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace cohres {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  if (std::strtod(buf, nullptr) != v)
    std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os,
               const std::vector<std::pair<std::string, std::string>>& metadata,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows) {
  for (const auto& [key, value] : metadata)
    os << "# " << key << ": " << value << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    os << (i ? "," : "") << columns[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << row[i];
    os << "\n";
  }
}

}  // namespace cohres
