#pragma once

#include "cohres/measurement.hpp"
#include "cohres/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cohres {

// Monte Carlo experiment description, parsed from flat key=value text.
// Recognized keys (sections in [brackets] are cosmetic):
//   s, q, gamma_r, gamma_i          parameter point
//   sigma, delta, alpha             optics (alpha accepts "geometric",
//                                   "centroid", or a number)
//   povm                            projector_v | projector_e | hg0_centroid |
//                                   hg0_geometric | counting
//   slots, trials, seed             acquisition size and RNG stream seed
//   free                            s | q  (parameter estimated by the MLE)
//   bracket_lo, bracket_hi          optional search bracket override
struct Scenario {
  ParamPoint point;
  OpticalConfig cfg;
  PovmKind povm = PovmKind::projector_v;
  bool counting_only = false;
  std::int64_t slots = 0;
  int trials = 0;
  std::uint64_t seed = 1;
  Var free = Var::s;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

// Throws ParseError (with 1-based line number) on malformed or invalid input.
Scenario parse_scenario(std::istream& is, const std::string& name = "scenario");
Scenario parse_scenario_file(const std::string& path);

struct SimulationSummary {
  double mean = 0.0;
  double sample_variance = 0.0;
  double crb = 0.0;        // inverse per-trial information of the measurement
  double vt_inverse = 0.0; // inverse per-trial Bayesian information
  double ratio = 0.0;      // sample_variance / vt_inverse
  int trials = 0;
  std::int64_t slots = 0;
};

// Runs the scenario: per-trial splittable RNG streams, one MLE per trial.
SimulationSummary run_simulation(const Scenario& sc,
                                 std::vector<DetectionRecord>* records_out,
                                 std::vector<double>* estimates_out = nullptr);

void write_simulation_summary_csv(const Scenario& sc,
                                  const SimulationSummary& summary,
                                  std::ostream& os);

}  // namespace cohres
