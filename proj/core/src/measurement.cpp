#include "cohres/measurement.hpp"

#include "cohres/csv.hpp"
#include "cohres/errors.hpp"
#include "cohres/detail/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

namespace cohres {

namespace {

constexpr double kProbTol = 1e-30;  // p0 p1 below tol: no usable contrast

std::string describe(const ParamPoint& p, const OpticalConfig& cfg) {
  std::ostringstream os;
  os << "(s=" << p.s << ", q=" << p.q << ", gamma_r=" << p.gamma_r
     << ", gamma_i=" << p.gamma_i << "; alpha=" << cfg.alpha << ")";
  return os.str();
}

double hg0_center(PovmKind kind, const ParamPoint& p,
                  const OpticalConfig& cfg) {
  // Position of the mode centre in frame coordinates: the intensity centroid
  // q x1 + (1-q) x2 = (alpha - q) s, or the geometric midpoint
  // (x1 + x2)/2 = (2 alpha - 1) s / 2.
  if (kind == PovmKind::hg0_centroid) return (cfg.alpha - p.q) * p.s;
  return (2.0 * cfg.alpha - 1.0) * p.s / 2.0;
}

double hg0_center_ds(PovmKind kind, const ParamPoint& p,
                     const OpticalConfig& cfg) {
  if (kind == PovmKind::hg0_centroid) return cfg.alpha - p.q;
  return (2.0 * cfg.alpha - 1.0) / 2.0;
}

// Value and s-derivative of the outcome probability p0(s).
struct ProbJet {
  double p0 = 0.0;
  double dp0 = 0.0;
};

// Overlap of the frozen measurement mode with each displaced PSF, plus its
// derivative as the true sources move while the device stays put.
ProbJet outcome_jet(const ParamPoint& p, const OpticalConfig& cfg,
                    const BinaryPOVM& povm, MeasMode mode) {
  const ModelTerms t = model_terms(p, cfg);
  const double sig2 = cfg.sigma * cfg.sigma;
  const std::array<double, 2> x = source_positions(p, cfg);
  const std::array<double, 2> xp = {-(1.0 - cfg.alpha), cfg.alpha};

  double tm[2];   // <mode | psf_m>
  double td[2];   // d/ds of the same
  switch (povm.kind) {
    case PovmKind::projector_v:
    case PovmKind::projector_e: {
      if (mode == MeasMode::qubit_approx) break;  // handled by caller
      const std::array<double, 2> y = source_positions(povm.ref, cfg);
      const Vec2& v = povm.proj_coeffs;
      for (int m = 0; m < 2; ++m) {
        tm[m] = 0.0;
        td[m] = 0.0;
        for (int i = 0; i < 2; ++i) {
          const double d = y[i] - x[m];
          const double ov = std::exp(-d * d / (8.0 * sig2));
          tm[m] += v(i) * ov;
          td[m] += v(i) * ov * d * xp[m] / (4.0 * sig2);
        }
      }
      break;
    }
    case PovmKind::hg0_centroid:
    case PovmKind::hg0_geometric: {
      const bool tracked = (mode == MeasMode::qubit_approx);
      const double cen =
          tracked ? hg0_center(povm.kind, p, cfg) : povm.center;
      const double cen_ds =
          tracked ? hg0_center_ds(povm.kind, p, cfg) : 0.0;
      for (int m = 0; m < 2; ++m) {
        const double d = cen - x[m];
        tm[m] = std::exp(-d * d / (8.0 * sig2));
        td[m] = tm[m] * d * (xp[m] - cen_ds) / (4.0 * sig2);
      }
      break;
    }
  }

  if (mode == MeasMode::qubit_approx &&
      (povm.kind == PovmKind::projector_v ||
       povm.kind == PovmKind::projector_e)) {
    // The tracked projector follows the basis; its outcome probability is a
    // diagonal entry of the tracked qubit family, differentiated entrywise.
    ProbJet jet;
    if (povm.kind == PovmKind::projector_e) {
      const Vec3 r = bloch_vector(p, cfg).r_vec;
      const Vec3 dr = bloch_vector_derivative(p, cfg, Var::s);
      jet.p0 = 0.5 * (1.0 + r(2));
      jet.dp0 = 0.5 * dr(2);
    } else {
      Mat2c rho, drho;
      tracked_qubit_family(p, cfg, BasisTag::centroid_v, rho, drho);
      jet.p0 = rho(0, 0).real();
      jet.dp0 = drho(0, 0).real();
    }
    return jet;
  }

  const double w11 = p.q;
  const double w22 = 1.0 - p.q;
  const double w12 = t.k * p.gamma_r;
  const double num = w11 * tm[0] * tm[0] + w22 * tm[1] * tm[1] +
                     2.0 * w12 * tm[0] * tm[1];
  const double dnum = 2.0 * w11 * tm[0] * td[0] + 2.0 * w22 * tm[1] * td[1] +
                      2.0 * w12 * (td[0] * tm[1] + tm[0] * td[1]);
  const double d_dot = 4.0 * t.beta * p.gamma_r * t.k;

  ProbJet jet;
  jet.p0 = num / t.D;
  jet.dp0 = dnum / t.D - jet.p0 * d_dot / t.D;
  return jet;
}

}  // namespace

std::string_view povm_kind_name(PovmKind kind) {
  switch (kind) {
    case PovmKind::projector_v: return "projector_v";
    case PovmKind::projector_e: return "projector_e";
    case PovmKind::hg0_centroid: return "hg0_centroid";
    case PovmKind::hg0_geometric: return "hg0_geometric";
  }
  return "unknown";
}

BinaryPOVM make_binary_povm(PovmKind kind, const ParamPoint& ref,
                            const OpticalConfig& cfg) {
  BinaryPOVM povm;
  povm.kind = kind;
  povm.ref = ref;
  switch (kind) {
    case PovmKind::projector_v:
      povm.proj_coeffs =
          basis_coefficients(ref, cfg, BasisTag::centroid_v).col(0);
      break;
    case PovmKind::projector_e:
      povm.proj_coeffs =
          basis_coefficients(ref, cfg, BasisTag::geometric_e).col(0);
      break;
    case PovmKind::hg0_centroid:
    case PovmKind::hg0_geometric:
      povm.center = hg0_center(kind, ref, cfg);
      break;
  }
  return povm;
}

double binary_outcome_probability(const ParamPoint& p,
                                  const OpticalConfig& cfg,
                                  const BinaryPOVM& povm) {
  const double p0 = outcome_jet(p, cfg, povm, MeasMode::exact).p0;
  return std::clamp(p0, 0.0, 1.0);
}

double spade_fisher_s(const ParamPoint& p, const OpticalConfig& cfg,
                      const BinaryPOVM& povm, MeasMode mode,
                      bool include_prior) {
  const ProbJet jet = outcome_jet(p, cfg, povm, mode);
  const double p1 = 1.0 - jet.p0;
  if (jet.p0 * p1 <= kProbTol)
    throw NumericDegeneracyError(
        "measurement outcome probability degenerate " + describe(p, cfg) +
        ", kind " + std::string(povm_kind_name(povm.kind)));
  const double nbar = mean_photon_number(p, cfg);
  double fi = nbar * jet.dp0 * jet.dp0 / (jet.p0 * p1);
  if (include_prior) {
    if (nbar <= 0.0 || nbar >= 1.0)
      throw DegeneratePriorError("prior degenerate at nbar in {0, 1} " +
                                 describe(p, cfg));
    const ModelTerms t = model_terms(p, cfg);
    const double dn_s = cfg.delta * 4.0 * t.beta * p.gamma_r * t.k;
    fi += dn_s * dn_s / (nbar * (1.0 - nbar));
  }
  return fi;
}

double misalignment_relative_difference(const ParamPoint& p,
                                        const OpticalConfig& cfg) {
  // Small-separation comparison in the intensity-centroid frame.
  ParamPoint ps = p;
  ps.s = 1e-3 * cfg.sigma;
  OpticalConfig frame = cfg;
  frame.alpha = p.q;
  const BinaryPOVM aligned =
      make_binary_povm(PovmKind::projector_v, ps, frame);
  const BinaryPOVM misaligned =
      make_binary_povm(PovmKind::projector_e, ps, frame);
  const double fi_v = spade_fisher_s(ps, frame, aligned, MeasMode::exact);
  const double fi_e = spade_fisher_s(ps, frame, misaligned, MeasMode::exact);
  return 1.0 - fi_e / fi_v;
}

BoundMatrix counting_fisher(const ParamPoint& p, const OpticalConfig& cfg) {
  return prior_fisher(p, cfg);
}

DetectionRecord simulate_detections(const ParamPoint& p,
                                    const OpticalConfig& cfg,
                                    const BinaryPOVM& povm, std::int64_t slots,
                                    std::uint64_t seed) {
  if (slots <= 0) throw DomainError("slot count must be positive");
  const double nbar = mean_photon_number(p, cfg);
  const double p0 = binary_outcome_probability(p, cfg, povm);
  const double t_vac = 1.0 - nbar;
  const double t_out0 = t_vac + nbar * p0;

  DetectionRecord rec;
  rec.slot_count = slots;
  rec.seed = seed;
  detail::SplitMix64 rng(seed);
  for (std::int64_t i = 0; i < slots; ++i) {
    const double u = rng.uniform();
    if (u < t_vac)
      ++rec.n_vacuum;
    else if (u < t_out0)
      ++rec.n_out0;
    else
      ++rec.n_out1;
  }
  return rec;
}

void write_detection_records_csv(const std::vector<DetectionRecord>& records,
                                 std::ostream& os) {
  std::vector<std::pair<std::string, std::string>> meta = {
      {"tool", std::string(kToolVersion)},
      {"records", std::to_string(records.size())}};
  std::vector<std::string> cols = {"trial", "slots", "n_vacuum",
                                   "n_out0", "n_out1", "seed"};
  std::vector<std::vector<std::string>> rows;
  rows.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const DetectionRecord& r = records[i];
    rows.push_back({std::to_string(i), std::to_string(r.slot_count),
                    std::to_string(r.n_vacuum), std::to_string(r.n_out0),
                    std::to_string(r.n_out1), std::to_string(r.seed)});
  }
  write_csv(os, meta, cols, rows);
}

namespace {

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

Bracket default_bracket(Var free, const OpticalConfig& cfg) {
  switch (free) {
    case Var::s: return {1e-3 * cfg.sigma, 4.0 * cfg.sigma};
    case Var::q: return {1e-4, 0.5};
    case Var::gamma_r: return {-0.999, 0.999};
    case Var::gamma_i: return {-0.999, 0.999};
  }
  return {0.0, 1.0};
}

double set_free(ParamPoint p, Var free, double x, const OpticalConfig& cfg,
                const MleSpec& spec, const DetectionRecord& rec) {
  switch (free) {
    case Var::s: p.s = x; break;
    case Var::q: p.q = x; break;
    case Var::gamma_r: p.gamma_r = x; break;
    case Var::gamma_i: p.gamma_i = x; break;
  }
  const double nbar = mean_photon_number(p, cfg);
  if (nbar <= 0.0 || nbar >= 1.0) return -1e300;
  double ll = 0.0;
  if (rec.n_vacuum > 0) ll += rec.n_vacuum * std::log1p(-nbar);
  const std::int64_t n_ph = rec.n_out0 + rec.n_out1;
  if (!spec.povm) {
    if (n_ph > 0) ll += n_ph * std::log(nbar);
    return ll;
  }
  const double p0 = binary_outcome_probability(p, cfg, *spec.povm);
  if (rec.n_out0 > 0) {
    if (p0 <= 0.0) return -1e300;
    ll += rec.n_out0 * std::log(nbar * p0);
  }
  if (rec.n_out1 > 0) {
    if (p0 >= 1.0) return -1e300;
    ll += rec.n_out1 * std::log(nbar * (1.0 - p0));
  }
  return ll;
}

// Golden-section maximization on [a, b]; unimodality is not assumed by the
// caller, which restarts the search on subintervals.
double golden_max(double a, double b, const std::function<double(double)>& f,
                  double* best_val) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  const double tol = 1e-10 * (b - a);
  double lo = a, hi = b;
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = f(x1);
    }
  }
  const double x = 0.5 * (lo + hi);
  *best_val = f(x);
  return x;
}

}  // namespace

MleResult mle_estimate(const std::vector<DetectionRecord>& records,
                       const OpticalConfig& cfg, const MleSpec& spec) {
  if (records.empty()) throw DomainError("no detection records");
  Bracket br{spec.bracket_lo, spec.bracket_hi};
  if (!(br.hi > br.lo)) br = default_bracket(spec.free, cfg);

  MleResult res;
  res.estimates.reserve(records.size());
  for (const DetectionRecord& rec : records) {
    if (rec.n_out0 + rec.n_out1 == 0)
      throw EstimationError(
          "record contains no photon detections; the likelihood pushes the "
          "estimate to the bracket edge");
    auto ll = [&](double x) {
      return set_free(spec.truth_template, spec.free, x, cfg, spec, rec);
    };
    // Three restarts guard against the plateaus a frozen projector induces.
    double best_x = br.lo;
    double best_v = -1e301;
    for (int sub = 0; sub < 3; ++sub) {
      const double a = br.lo + (br.hi - br.lo) * sub / 3.0;
      const double b = br.lo + (br.hi - br.lo) * (sub + 1) / 3.0;
      double v = 0.0;
      const double x = golden_max(a, b, ll, &v);
      if (v > best_v) {
        best_v = v;
        best_x = x;
      }
    }
    res.estimates.push_back(best_x);
  }

  double sum = 0.0;
  for (double e : res.estimates) sum += e;
  res.mean = sum / static_cast<double>(res.estimates.size());
  double ss = 0.0;
  for (double e : res.estimates) ss += (e - res.mean) * (e - res.mean);
  res.sample_variance =
      res.estimates.size() > 1
          ? ss / static_cast<double>(res.estimates.size() - 1)
          : 0.0;
  return res;
}

}  // namespace cohres
