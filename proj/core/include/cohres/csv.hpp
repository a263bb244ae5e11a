#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace cohres {

inline constexpr const char* kToolVersion = "cohres 0.1.0";

// Shortest round-trippable decimal representation ("%.15g", then widened to
// %.17g when 15 digits do not reproduce the value).
std::string format_double(double v);

// `#`-prefixed metadata lines followed by a header row and data rows; cells
// are written verbatim (callers pre-format numeric cells for determinism).
void write_csv(std::ostream& os,
               const std::vector<std::pair<std::string, std::string>>& metadata,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace cohres
