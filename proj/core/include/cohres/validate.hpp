#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cohres {

// One cross-check: a closed-form quantity against its oracle value, or a
// fitted order against its expected value.
struct ValidationRow {
  std::string suite;     // grid | sld | commutators | fault
  std::string point;     // parameter point, serialized
  std::string quantity;  // entry / residual / slope label
  double closed = 0.0;
  double oracle = 0.0;
  double error = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  std::string preset;

  bool all_pass() const;
  std::size_t failure_count() const;
};

// Presets:
//   all           grid + sld + commutators
//   grid          closed-form vs. finite-difference information matrices on
//                 the 81-point validation grid, in both reference frames
//   sld           Lyapunov residuals of every logarithmic derivative against
//                 oracle state derivatives
//   commutators   leading-order fits of commutator norms and weak-
//                 commutativity traces as s -> 0
//   fault-nu-flip negative control: rebuilds the separation operator with the
//                 sign of nu flipped and expects the residual check to fail
ValidationReport run_validate(const std::string& preset = "all");

void write_validation_csv(const ValidationReport& report, std::ostream& os);

}  // namespace cohres
