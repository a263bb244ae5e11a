#include "cohres/bounds.hpp"

#include "cohres/errors.hpp"
#include "cohres/detail/numeric.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <sstream>

namespace cohres {

namespace {

constexpr double kPureDeficitTol = 1e-14;  // below: treat as exactly pure
constexpr double kJacobianTol = 1e-14;     // |dr/ds| below: chart singular

std::string describe(const ParamPoint& p, const OpticalConfig& cfg) {
  std::ostringstream os;
  os << "(s=" << p.s << ", q=" << p.q << ", gamma_r=" << p.gamma_r
     << ", gamma_i=" << p.gamma_i << "; alpha=" << cfg.alpha << ")";
  return os.str();
}

// Everything the information formulas consume: Bloch point, the four
// tangent vectors (with the separation one augmented by basis leakage),
// radial speeds, and the derivative-subspace weight X.
struct QfiIngredients {
  Vec3 r = Vec3::Zero();
  double deficit = 0.0;
  double nbar = 0.0;
  std::array<Vec3, 4> g{};   // g_s includes the 2 nu (r3, 0, -r1) leakage
  std::array<Vec3, 4> dr{};  // plain Bloch derivatives
  std::array<double, 4> h{};
  double extra_ss = 0.0;     // X
};

// Derivative-subspace weight X = 2 (1+r3) w1 + 2 (1-r3) w2 + 4 r1 mu.
// The Bloch components are expanded through D = 1 + 2 c gamma_r k so that
// the complements stay exact when r3 approaches -1 (s << sigma):
//   1 + r3 = (1-c)(1 - 2 gamma_r k)/D,  1 - r3 = (1+c)(1 + 2 gamma_r k)/D,
//   r1 = -(1-2q) S/D.
double extra_ss_term(const ParamPoint& p, const OpticalConfig& cfg,
                     const ExtendedBasisData& eb) {
  const ModelTerms t = model_terms(p, cfg);
  const double gk2 = 2.0 * p.gamma_r * t.k;
  const double one_plus_r3 = t.one_minus_c * (1.0 - gk2) / t.D;
  const double one_minus_r3 = (1.0 + t.c) * (1.0 + gk2) / t.D;
  const double r1 = -(1.0 - 2.0 * p.q) * t.S / t.D;
  return 2.0 * one_plus_r3 * eb.w1 + 2.0 * one_minus_r3 * eb.w2 +
         4.0 * r1 * eb.mu;
}

QfiIngredients qfi_ingredients(const ParamPoint& p, const OpticalConfig& cfg) {
  QfiIngredients in;
  const BlochState st = bloch_vector(p, cfg);
  const PurityInfo pu = purity(p, cfg);
  const ExtendedBasisData eb = extended_basis(p, cfg);
  in.r = st.r_vec;
  in.deficit = pu.deficit;
  in.nbar = st.nbar;
  for (Var v : kAllVars) {
    const int i = index(v);
    in.dr[i] = bloch_vector_derivative(p, cfg, v);
    in.g[i] = in.dr[i];
    in.h[i] = in.r.dot(in.dr[i]);
  }
  in.g[index(Var::s)] +=
      2.0 * eb.nu * Vec3(in.r(2), 0.0, -in.r(0));
  in.extra_ss = extra_ss_term(p, cfg, eb);
  return in;
}

}  // namespace

std::string_view bound_kind_name(BoundKind kind) {
  switch (kind) {
    case BoundKind::qfi_state: return "qfi_state";
    case BoundKind::prior_fi: return "prior_fi";
    case BoundKind::van_trees_info: return "van_trees_info";
    case BoundKind::qubit_approx: return "qubit_approx";
    case BoundKind::indirect: return "indirect";
  }
  return "unknown";
}

BoundMatrix qfi_state_matrix(const ParamPoint& p, const OpticalConfig& cfg) {
  const QfiIngredients in = qfi_ingredients(p, cfg);
  if (in.deficit < kPureDeficitTol)
    throw SingularStateError(
        "QFI matrix singular for pure states; use qfi_ss_entry " +
        describe(p, cfg));
  BoundMatrix out;
  out.kind = BoundKind::qfi_state;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      const double f =
          in.g[i].dot(in.g[j]) + in.h[i] * in.h[j] / in.deficit;
      out.entries(i, j) = f;
      out.entries(j, i) = f;
    }
  out.entries(0, 0) += in.extra_ss;
  return out;
}

double qfi_ss_entry(const ParamPoint& p, const OpticalConfig& cfg) {
  const BlochState st = bloch_vector(p, cfg);
  const PurityInfo pu = purity(p, cfg);
  const ExtendedBasisData eb = extended_basis(p, cfg);
  const Vec3 dr = bloch_vector_derivative(p, cfg, Var::s);
  const Vec3 g =
      dr + 2.0 * eb.nu * Vec3(st.r_vec(2), 0.0, -st.r_vec(0));
  double f = g.squaredNorm() + extra_ss_term(p, cfg, eb);
  if (pu.deficit >= kPureDeficitTol) {
    const double h = st.r_vec.dot(dr);
    f += h * h / pu.deficit;
  }
  return f;
}

double qfi_ss_extra(const ParamPoint& p, const OpticalConfig& cfg) {
  return extra_ss_term(p, cfg, extended_basis(p, cfg));
}

double qfi_ss_qubit_entry(const ParamPoint& p, const OpticalConfig& cfg,
                          BasisTag basis) {
  const PurityInfo pu = purity(p, cfg);
  if (basis == BasisTag::geometric_e) {
    const Vec3 r = bloch_vector(p, cfg).r_vec;
    const Vec3 dr = bloch_vector_derivative(p, cfg, Var::s);
    double f = dr.squaredNorm();
    if (pu.deficit >= kPureDeficitTol) {
      const double h = r.dot(dr);
      f += h * h / pu.deficit;
    }
    return f;
  }
  Mat2c rho, drho;
  tracked_qubit_family(p, cfg, basis, rho, drho);
  const Vec3 rv(2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(),
                (rho(0, 0) - rho(1, 1)).real());
  const Vec3 drv(2.0 * drho(0, 1).real(), -2.0 * drho(0, 1).imag(),
                 (drho(0, 0) - drho(1, 1)).real());
  double f = drv.squaredNorm();
  if (pu.deficit >= kPureDeficitTol) {
    const double h = rv.dot(drv);
    f += h * h / pu.deficit;
  }
  return f;
}

BoundMatrix prior_fisher(const ParamPoint& p, const OpticalConfig& cfg) {
  const double nbar = mean_photon_number(p, cfg);
  if (nbar <= 0.0 || nbar >= 1.0)
    throw DegeneratePriorError(
        "photon-arrival prior carries no information at nbar in {0, 1} " +
        describe(p, cfg));
  const Vec4 grad = mean_photon_gradient(p, cfg);
  BoundMatrix out;
  out.kind = BoundKind::prior_fi;
  out.entries = grad * grad.transpose() / (nbar * (1.0 - nbar));
  return out;
}

BoundMatrix van_trees_info(const ParamPoint& p, const OpticalConfig& cfg) {
  const double nbar = mean_photon_number(p, cfg);
  BoundMatrix out = qfi_state_matrix(p, cfg);
  out.entries *= nbar;
  out.entries += prior_fisher(p, cfg).entries;
  out.kind = BoundKind::van_trees_info;
  return out;
}

double van_trees_ss(const ParamPoint& p, const OpticalConfig& cfg) {
  const double nbar = mean_photon_number(p, cfg);
  if (nbar <= 0.0 || nbar >= 1.0)
    throw DegeneratePriorError("prior degenerate at nbar in {0, 1} " +
                               describe(p, cfg));
  const ModelTerms t = model_terms(p, cfg);
  const double dn_s = cfg.delta * 4.0 * t.beta * p.gamma_r * t.k;
  return nbar * qfi_ss_entry(p, cfg) + dn_s * dn_s / (nbar * (1.0 - nbar));
}

BoundMatrix qubit_approx_info(const ParamPoint& p, const OpticalConfig& cfg,
                              BasisTag basis) {
  BoundMatrix out = van_trees_info(p, cfg);
  out.kind = BoundKind::qubit_approx;
  const double nbar = mean_photon_number(p, cfg);
  const BoundMatrix prior = prior_fisher(p, cfg);
  const PurityInfo pu = purity(p, cfg);

  if (basis == BasisTag::geometric_e) {
    // The g-vector formula with the leakage term removed.
    const Vec3 r = bloch_vector(p, cfg).r_vec;
    const Vec3 dr_s = bloch_vector_derivative(p, cfg, Var::s);
    const double h_s = r.dot(dr_s);
    for (Var v : kAllVars) {
      const int j = index(v);
      const Vec3 dr_j = bloch_vector_derivative(p, cfg, v);
      const double h_j = r.dot(dr_j);
      const double f =
          dr_s.dot(dr_j) + h_s * h_j / pu.deficit;
      out.entries(0, j) = nbar * f + prior.entries(0, j);
      out.entries(j, 0) = out.entries(0, j);
    }
    return out;
  }

  // Centroid basis: differentiate the tracked 2x2 family entrywise and pair
  // its SLD with the in-span parameter SLDs rotated into the same basis.
  Mat2c rho, drho;
  tracked_qubit_family(p, cfg, basis, rho, drho);
  const Vec3 rv(2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(),
                (rho(0, 0) - rho(1, 1)).real());
  const Vec3 drv(2.0 * drho(0, 1).real(), -2.0 * drho(0, 1).imag(),
                 (drho(0, 0) - drho(1, 1)).real());
  const BlochOperator ls =
      bloch_lyapunov_solve(rv, pu.deficit, 0.0, 0.5 * drv, basis);
  const Mat2c ls_m = ls.matrix();
  const Mat2 o = basis_overlap_e_v(p, cfg);
  const Mat2c oc = o.cast<std::complex<double>>();

  out.entries(0, 0) =
      nbar * (drv.squaredNorm() +
              rv.dot(drv) * rv.dot(drv) / pu.deficit) +
      prior.entries(0, 0);
  for (Var v : {Var::q, Var::gamma_r, Var::gamma_i}) {
    const int j = index(v);
    const Mat2c lth_v =
        oc.adjoint() * sld_scalar(p, cfg, v).matrix() * oc;
    const double f = (rho * ls_m * lth_v).trace().real();
    out.entries(0, j) = nbar * f + prior.entries(0, j);
    out.entries(j, 0) = out.entries(0, j);
  }
  return out;
}

MisalignmentScaling centroid_misalignment_error(const ParamPoint& p,
                                                const OpticalConfig& cfg,
                                                double eps, double eps_lo,
                                                double eps_hi) {
  if (eps <= 0.0) throw DomainError("misalignment eps must be positive");
  OpticalConfig aligned = cfg;
  aligned.alpha = p.q;
  const double f0 = qfi_ss_entry(p, aligned);

  auto delta_at = [&](double e) {
    OpticalConfig shifted = cfg;
    shifted.alpha = p.q + e;
    if (shifted.alpha > 1.0)
      throw DomainError("misaligned frame leaves the unit interval");
    return std::abs(qfi_ss_entry(p, shifted) - f0);
  };

  MisalignmentScaling out;
  out.delta_qfi = delta_at(eps);
  const std::vector<double> es = detail::logspace(eps_lo, eps_hi, 9);
  std::vector<double> ds(es.size());
  for (std::size_t i = 0; i < es.size(); ++i) ds[i] = delta_at(es[i]);
  out.fitted_order = detail::loglog_slope(es, ds);
  return out;
}

Mat4 purity_chart_jacobian(const ParamPoint& p, const OpticalConfig& cfg) {
  const PurityInfo pu = purity(p, cfg);
  const Vec3 r = bloch_vector(p, cfg).r_vec;
  Mat4 j = Mat4::Identity();
  for (Var v : kAllVars) {
    const int i = index(v);
    j(0, i) = r.dot(bloch_vector_derivative(p, cfg, v)) / pu.r;
  }
  return j;
}

Mat4 purity_chart_jacobian_inverse(const ParamPoint& p,
                                   const OpticalConfig& cfg) {
  const Mat4 j = purity_chart_jacobian(p, cfg);
  const double rdot_s = j(0, 0);
  if (std::abs(rdot_s) < kJacobianTol)
    throw SingularJacobianError(
        "purity insensitive to the separation: chart not invertible " +
        describe(p, cfg));
  Mat4 inv = Mat4::Identity();
  inv(0, 0) = 1.0 / rdot_s;
  for (int i = 1; i < 4; ++i) inv(0, i) = -j(0, i) / rdot_s;
  return inv;
}

IndirectResult indirect_info(const ParamPoint& p, const OpticalConfig& cfg,
                             bool assert_r_above_r_inf) {
  const PurityInfo pu = purity(p, cfg);
  IndirectResult res;
  res.r_inf = std::sqrt(pu.r_inf_sq);
  if (p.gamma_r < 0.0) {
    const ModelTerms t = model_terms(p, cfg);
    const double c0 = -2.0 * p.gamma_r * t.k;
    if (c0 > 0.0 && c0 <= 1.0)
      res.s0 = cfg.sigma * std::sqrt(-8.0 * std::log(c0));
    res.bijective = false;
    if (!assert_r_above_r_inf)
      throw NonBijectiveError(
          "purity is not monotone in the separation for gamma_r < 0; the "
          "caller must assert r > r_inf to select the near branch " +
              describe(p, cfg),
          res.s0.value_or(0.0));
  }

  const QfiIngredients in = qfi_ingredients(p, cfg);
  if (in.deficit < kPureDeficitTol)
    throw SingularStateError("indirect route undefined for pure states " +
                             describe(p, cfg));
  const double rdot_s = in.h[0] / pu.r;
  if (std::abs(rdot_s) < kJacobianTol)
    throw SingularJacobianError(
        "purity insensitive to the separation " + describe(p, cfg));

  // Fisher matrix in the chart (r, q, gamma_r, gamma_i): the radial
  // coordinate decouples from the in-span angular information.
  Mat4 fv = Mat4::Zero();
  fv(0, 0) = 1.0 / in.deficit;
  for (int j = 1; j < 4; ++j) {
    const double rdot_j = in.h[j] / pu.r;
    fv(0, j) = rdot_j / in.deficit;
    fv(j, 0) = fv(0, j);
  }
  for (int i = 1; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      fv(i, j) = in.dr[i].dot(in.dr[j]) + in.h[i] * in.h[j] / in.deficit;
      fv(j, i) = fv(i, j);
    }

  Mat4 k = Mat4::Identity();
  k(0, 0) = rdot_s;
  for (int j = 1; j < 4; ++j) k(0, j) = in.h[j] / pu.r;

  res.bound.kind = BoundKind::indirect;
  res.bound.entries = in.nbar * (k.transpose() * fv * k).eval() +
                      prior_fisher(p, cfg).entries;
  return res;
}

double indirect_gap_ss(const ParamPoint& p, const OpticalConfig& cfg) {
  const BlochState st = bloch_vector(p, cfg);
  const ExtendedBasisData eb = extended_basis(p, cfg);
  const Vec3 dr = bloch_vector_derivative(p, cfg, Var::s);
  const Vec3 g =
      dr + 2.0 * eb.nu * Vec3(st.r_vec(2), 0.0, -st.r_vec(0));
  const Vec3 rhat = st.r_vec.normalized();
  const Vec3 g_perp = g - rhat.dot(g) * rhat;
  return st.nbar * (g_perp.squaredNorm() + extra_ss_term(p, cfg, eb));
}

Mat4 bmse_bound(const BoundMatrix& info, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(info.entries);
  const Vec4 vals = es.eigenvalues();
  const double scale = vals.cwiseAbs().maxCoeff();
  Vec4 inv = Vec4::Zero();
  for (int i = 0; i < 4; ++i)
    if (std::abs(vals(i)) > rel_tol * scale) inv(i) = 1.0 / vals(i);
  return es.eigenvectors() * inv.asDiagonal() *
         es.eigenvectors().transpose();
}

double separation_from_purity(double r_target, const ParamPoint& p_template,
                              const OpticalConfig& cfg, double tol) {
  auto r_of = [&](double s) {
    ParamPoint p = p_template;
    p.s = s;
    return purity(p, cfg).r;
  };
  double lo = 1e-6 * cfg.sigma;
  double hi = 40.0 * cfg.sigma;
  if (p_template.gamma_r < 0.0) {
    // Restrict to the near branch, where r decreases monotonically.
    const ModelTerms t = model_terms(p_template, cfg);
    const double c0 = -2.0 * p_template.gamma_r * t.k;
    if (c0 > 0.0 && c0 < 1.0)
      hi = std::min(hi, cfg.sigma * std::sqrt(-8.0 * std::log(c0)));
  }
  double flo = r_of(lo) - r_target;
  double fhi = r_of(hi) - r_target;
  if (flo * fhi > 0.0)
    throw DomainError("purity target outside the attainable bracket");
  while (hi - lo > tol * cfg.sigma) {
    const double mid = 0.5 * (lo + hi);
    const double fm = r_of(mid) - r_target;
    if (flo * fm <= 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace cohres
