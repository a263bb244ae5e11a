#pragma once

#include "cohres/bounds.hpp"
#include "cohres/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cohres {

// Binary spatial-mode measurements considered by the measurement lab.
//   projector_v    bright centroid-adapted mode v1 vs. its complement
//   projector_e    antisymmetric geometric mode e1 vs. its complement
//   hg0_centroid   fundamental Gaussian mode centred on the intensity centroid
//   hg0_geometric  fundamental Gaussian mode centred on the geometric midpoint
enum class PovmKind { projector_v, projector_e, hg0_centroid, hg0_geometric };

std::string_view povm_kind_name(PovmKind kind);

// A binary projective measurement frozen ("aligned") at a reference parameter
// point: the device does not move when the true parameters drift.
struct BinaryPOVM {
  PovmKind kind = PovmKind::projector_v;
  ParamPoint ref;          // alignment point
  double center = 0.0;     // mode centre in frame coordinates (hg0 kinds)
  Vec2 proj_coeffs = Vec2::Zero();  // column over {psi(ref), phi(ref)}
};

BinaryPOVM make_binary_povm(PovmKind kind, const ParamPoint& ref,
                            const OpticalConfig& cfg);

// Probability of the POVM's own outcome given the photon arrived, for a state
// at p (which may differ from the alignment point).
double binary_outcome_probability(const ParamPoint& p, const OpticalConfig& cfg,
                                  const BinaryPOVM& povm);

// Derivative treatment for the separation response of the measurement.
//   exact        static device: only the state moves under d/ds
//   qubit_approx entrywise derivative of the tracked qubit family -- the
//                device is (unphysically) assumed to follow the basis/centre.
//                Deliberate negative control for misaligned configurations.
enum class MeasMode { exact, qubit_approx };

// Per-slot classical Fisher information for s of the three-outcome experiment
// {vacuum, outcome 0, outcome 1}:
//   FI = nbar (dp)^2 / (p (1-p)) + prior_ss        (include_prior = true)
double spade_fisher_s(const ParamPoint& p, const OpticalConfig& cfg,
                      const BinaryPOVM& povm, MeasMode mode,
                      bool include_prior = true);

// Relative information loss of the misaligned (geometric e1) projector versus
// the aligned (centroid v1) projector at small separation:
//   1 - FI_e / FI_v, evaluated at s = 1e-3 sigma in the centroid frame.
double misalignment_relative_difference(const ParamPoint& p,
                                        const OpticalConfig& cfg);

// Fisher information of plain photon counting; identical to the arrival-prior
// information and exposed to document that counting alone saturates the
// intensity and coherence bounds as s -> 0.
BoundMatrix counting_fisher(const ParamPoint& p, const OpticalConfig& cfg);

// Outcome tallies of one simulated acquisition.
struct DetectionRecord {
  std::int64_t slot_count = 0;
  std::int64_t n_vacuum = 0;
  std::int64_t n_out0 = 0;
  std::int64_t n_out1 = 0;
  std::uint64_t seed = 0;

  std::int64_t total() const { return n_vacuum + n_out0 + n_out1; }
};

// Samples `slots` temporal slots: vacuum with probability 1 - nbar, otherwise
// outcome 0/1 with the POVM probabilities.  Deterministic for a fixed seed.
DetectionRecord simulate_detections(const ParamPoint& p,
                                    const OpticalConfig& cfg,
                                    const BinaryPOVM& povm, std::int64_t slots,
                                    std::uint64_t seed);

void write_detection_records_csv(const std::vector<DetectionRecord>& records,
                                 std::ostream& os);

// Maximum-likelihood estimation of a single free parameter from detection
// records.  When `povm` is empty the likelihood uses photon counting only
// (vacuum vs. any photon).  Each record is estimated separately; the result
// aggregates the per-record estimates.
struct MleSpec {
  ParamPoint truth_template;  // fixed parameters; free entry ignored
  Var free = Var::s;
  std::optional<BinaryPOVM> povm;  // empty -> counting-only likelihood
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;  // <= lo -> defaults per parameter
};

struct MleResult {
  double mean = 0.0;
  double sample_variance = 0.0;
  std::vector<double> estimates;  // one per record
};

MleResult mle_estimate(const std::vector<DetectionRecord>& records,
                       const OpticalConfig& cfg, const MleSpec& spec);

}  // namespace cohres
