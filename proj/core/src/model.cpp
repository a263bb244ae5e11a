#include "cohres/model.hpp"

#include "cohres/errors.hpp"

#include <cmath>
#include <complex>
#include <sstream>

namespace cohres {

namespace {

constexpr double kOverlapTol = 1e-14;   // c above 1 - tol: basis degenerate
constexpr double kDenomTol = 1e-12;     // D below tol: zero-intensity state
constexpr double kBoundaryTol = 1e-12;  // k below tol: intensity boundary

std::string describe(const ParamPoint& p, const OpticalConfig& cfg) {
  std::ostringstream os;
  os << "(s=" << p.s << ", q=" << p.q << ", gamma_r=" << p.gamma_r
     << ", gamma_i=" << p.gamma_i << "; sigma=" << cfg.sigma
     << ", delta=" << cfg.delta << ", alpha=" << cfg.alpha << ")";
  return os.str();
}

// Intensity weights over {psi, phi} divided by the normalizer D.
Mat2c weight_matrix(const ParamPoint& p, const ModelTerms& t) {
  const std::complex<double> gamma(p.gamma_r, p.gamma_i);
  Mat2c w;
  w(0, 0) = p.q;
  w(1, 1) = 1.0 - p.q;
  w(0, 1) = t.k * gamma;
  w(1, 0) = t.k * std::conj(gamma);
  return w / t.D;
}

}  // namespace

double overlap_c(double s, double sigma) {
  if (sigma <= 0.0) throw DomainError("overlap_c: sigma must be positive");
  if (s < 0.0) throw DomainError("overlap_c: separation must be non-negative");
  const double u = s / sigma;
  return std::exp(-u * u / 8.0);
}

void check_domain(const ParamPoint& p, const OpticalConfig& cfg) {
  if (cfg.sigma <= 0.0)
    throw ConfigError("sigma must be positive " + describe(p, cfg));
  if (!(cfg.delta > 0.0) || cfg.delta >= 1.0)
    throw ConfigError("delta must lie in (0, 1) " + describe(p, cfg));
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0)
    throw ConfigError("alpha must lie in [0, 1] " + describe(p, cfg));
  if (p.s < 0.0)
    throw DomainError("separation must be non-negative " + describe(p, cfg));
  if (p.q < 0.0 || p.q > 1.0)
    throw DomainError("relative intensity must lie in [0, 1] " +
                      describe(p, cfg));
  if (p.coherence_sq() > 1.0 + 1e-12)
    throw DomainError("coherence magnitude exceeds 1 " + describe(p, cfg));
}

ModelTerms model_terms(const ParamPoint& p, const OpticalConfig& cfg) {
  check_domain(p, cfg);
  ModelTerms t;
  const double u = p.s / cfg.sigma;
  const double e = u * u / 8.0;  // s^2 / (8 sigma^2)
  t.c = std::exp(-e);
  t.one_minus_c = -std::expm1(-e);
  t.one_minus_c2 = -std::expm1(-2.0 * e);
  t.S = std::sqrt(t.one_minus_c2);
  t.k = std::sqrt(p.q * (1.0 - p.q));
  t.D = 1.0 + 2.0 * t.c * p.gamma_r * t.k;
  t.beta = -p.s * t.c / (8.0 * cfg.sigma * cfg.sigma);
  return t;
}

double mean_photon_number(const ParamPoint& p, const OpticalConfig& cfg) {
  const ModelTerms t = model_terms(p, cfg);
  double nbar = cfg.delta * t.D;
  if (nbar < 0.0 && nbar > -1e-15) nbar = 0.0;  // roundoff at D = 0
  if (nbar < 0.0 || nbar > 1.0)
    throw ConfigError("mean photon number outside [0, 1]: delta too large " +
                      describe(p, cfg));
  return nbar;
}

Vec4 mean_photon_gradient(const ParamPoint& p, const OpticalConfig& cfg) {
  const ModelTerms t = model_terms(p, cfg);
  Vec4 grad = Vec4::Zero();
  grad(index(Var::s)) = cfg.delta * 4.0 * t.beta * p.gamma_r * t.k;
  if (p.gamma_r == 0.0) {
    grad(index(Var::q)) = 0.0;  // nbar constant in q for incoherent sources
  } else {
    if (t.k < kBoundaryTol)
      throw DerivativeDivergenceError(
          "d(nbar)/dq diverges at the intensity boundary " + describe(p, cfg));
    grad(index(Var::q)) = cfg.delta * t.c * p.gamma_r * (1.0 - 2.0 * p.q) / t.k;
  }
  grad(index(Var::gamma_r)) = cfg.delta * 2.0 * t.c * t.k;
  grad(index(Var::gamma_i)) = 0.0;
  return grad;
}

std::array<double, 2> source_positions(const ParamPoint& p,
                                       const OpticalConfig& cfg) {
  return {-(1.0 - cfg.alpha) * p.s, cfg.alpha * p.s};
}

BlochState bloch_vector(const ParamPoint& p, const OpticalConfig& cfg) {
  const ModelTerms t = model_terms(p, cfg);
  if (t.D <= kDenomTol)
    throw DegenerateStateError("zero-intensity state: no photon ever arrives " +
                               describe(p, cfg));
  BlochState st;
  st.basis_tag = BasisTag::geometric_e;
  st.c = t.c;
  st.nbar = cfg.delta * t.D;
  st.r_vec = -Vec3((1.0 - 2.0 * p.q) * t.S, 2.0 * p.gamma_i * t.k * t.S,
                   t.c + 2.0 * p.gamma_r * t.k) /
             t.D;
  return st;
}

Vec3 bloch_vector_derivative(const ParamPoint& p, const OpticalConfig& cfg,
                             Var which) {
  const ModelTerms t = model_terms(p, cfg);
  if (t.D <= kDenomTol)
    throw DegenerateStateError("zero-intensity state " + describe(p, cfg));
  const Vec3 r = bloch_vector(p, cfg).r_vec;

  Vec3 v_x = Vec3::Zero();
  double d_x = 0.0;
  switch (which) {
    case Var::s: {
      const double c_s = 2.0 * t.beta;
      // S_s = -2 beta c / S stays finite: both beta and S vanish like s.
      const double S_s = (t.S > 0.0) ? -2.0 * t.beta * t.c / t.S : 0.0;
      v_x = Vec3((1.0 - 2.0 * p.q) * S_s, 2.0 * p.gamma_i * t.k * S_s, c_s);
      d_x = 2.0 * p.gamma_r * t.k * c_s;
      break;
    }
    case Var::q: {
      if (t.k < kBoundaryTol) {
        if (p.gamma_r != 0.0 || p.gamma_i != 0.0)
          throw BoundaryError(
              "Bloch derivative in q diverges at the intensity boundary " +
              describe(p, cfg));
        v_x = Vec3(-2.0 * t.S, 0.0, 0.0);
        d_x = 0.0;
        break;
      }
      const double k_q = (1.0 - 2.0 * p.q) / (2.0 * t.k);
      v_x = Vec3(-2.0 * t.S, 2.0 * p.gamma_i * k_q * t.S, 2.0 * p.gamma_r * k_q);
      d_x = 2.0 * t.c * p.gamma_r * k_q;
      break;
    }
    case Var::gamma_r:
      v_x = Vec3(0.0, 0.0, 2.0 * t.k);
      d_x = 2.0 * t.c * t.k;
      break;
    case Var::gamma_i:
      v_x = Vec3(0.0, 2.0 * t.k * t.S, 0.0);
      d_x = 0.0;
      break;
  }
  return -(v_x + r * d_x) / t.D;
}

PurityInfo purity(const ParamPoint& p, const OpticalConfig& cfg) {
  const ModelTerms t = model_terms(p, cfg);
  if (t.D <= kDenomTol)
    throw DegenerateStateError("zero-intensity state " + describe(p, cfg));
  PurityInfo out;
  const double coh_deficit = std::max(0.0, 1.0 - p.coherence_sq());
  out.deficit =
      4.0 * t.k * t.k * t.one_minus_c2 * coh_deficit / (t.D * t.D);
  out.r = bloch_vector(p, cfg).r_vec.norm();
  out.r_inc_sq = 1.0 - 4.0 * p.q * (1.0 - p.q) * t.one_minus_c2;
  out.r_inf_sq =
      std::max(0.0, 1.0 + 4.0 * p.q * (1.0 - p.q) * (p.coherence_sq() - 1.0));
  return out;
}

Mat2 basis_coefficients(const ParamPoint& p, const OpticalConfig& cfg,
                        BasisTag which) {
  const ModelTerms t = model_terms(p, cfg);
  if (t.one_minus_c < kOverlapTol)
    throw DegenerateOverlapError(
        "PSF overlap too close to 1: basis vectors undefined " +
        describe(p, cfg));
  Mat2 b;
  if (which == BasisTag::geometric_e) {
    const double nm = std::sqrt(2.0 * t.one_minus_c);
    const double np = std::sqrt(2.0 * (1.0 + t.c));
    b.col(0) = Vec2(1.0, -1.0) / nm;
    b.col(1) = Vec2(1.0, 1.0) / np;
  } else {
    const double q = p.q;
    const double n1 =
        std::sqrt(1.0 - 2.0 * q * (1.0 - q) * t.one_minus_c);
    const double a = 1.0 - q * t.one_minus_c;
    const double bb = -(t.c + q * t.one_minus_c);
    b.col(0) = Vec2(q, 1.0 - q) / n1;
    b.col(1) = Vec2(a, bb) / (t.S * n1);
  }
  return b;
}

Mat2 basis_coefficients_dc(const ParamPoint& p, const OpticalConfig& cfg,
                           BasisTag which) {
  const ModelTerms t = model_terms(p, cfg);
  if (t.one_minus_c < kOverlapTol)
    throw DegenerateOverlapError("PSF overlap too close to 1 " +
                                 describe(p, cfg));
  Mat2 db;
  if (which == BasisTag::geometric_e) {
    const double nm = 2.0 * t.one_minus_c;
    const double np = 2.0 * (1.0 + t.c);
    db.col(0) = Vec2(1.0, -1.0) * std::pow(nm, -1.5);
    db.col(1) = -Vec2(1.0, 1.0) * std::pow(np, -1.5);
  } else {
    const double q = p.q;
    const double n1sq = 1.0 - 2.0 * q * (1.0 - q) * t.one_minus_c;
    const double n1 = std::sqrt(n1sq);
    const double dn1 = q * (1.0 - q) / n1;
    const double a = 1.0 - q * t.one_minus_c;
    const double bb = -(t.c + q * t.one_minus_c);
    const double da = q;
    const double dbb = -(1.0 - q);
    const double dS = -t.c / t.S;
    const double sn1 = t.S * n1;
    const double dsn1 = dS * n1 + t.S * dn1;
    db.col(0) = -Vec2(q, 1.0 - q) * dn1 / n1sq;
    db.col(1) = Vec2(da, dbb) / sn1 - Vec2(a, bb) * dsn1 / (sn1 * sn1);
  }
  return db;
}

Mat2 gram_times_basis(const ParamPoint& p, const OpticalConfig& cfg,
                      BasisTag which) {
  const ModelTerms t = model_terms(p, cfg);
  if (t.one_minus_c < kOverlapTol)
    throw DegenerateOverlapError("PSF overlap too close to 1 " +
                                 describe(p, cfg));
  Mat2 u;
  if (which == BasisTag::geometric_e) {
    // G e1 = sqrt((1-c)/2) (1, -1)^T: the Gram factor cancels the
    // 1/sqrt(1-c) column growth analytically.
    const double fm = std::sqrt(t.one_minus_c / 2.0);
    const double fp = std::sqrt((1.0 + t.c) / 2.0);
    u.col(0) = Vec2(fm, -fm);
    u.col(1) = Vec2(fp, fp);
  } else {
    const double q = p.q;
    const double n1 =
        std::sqrt(1.0 - 2.0 * q * (1.0 - q) * t.one_minus_c);
    u.col(0) = Vec2(q + t.c * (1.0 - q), t.c * q + (1.0 - q)) / n1;
    u.col(1) = t.S * Vec2(1.0 - q, -q) / n1;
  }
  return u;
}

Mat2 gram_times_basis_ds(const ParamPoint& p, const OpticalConfig& cfg,
                         BasisTag which) {
  const ModelTerms t = model_terms(p, cfg);
  if (t.one_minus_c < kOverlapTol)
    throw DegenerateOverlapError("PSF overlap too close to 1 " +
                                 describe(p, cfg));
  const double c_s = 2.0 * t.beta;
  Mat2 du;
  if (which == BasisTag::geometric_e) {
    // d/ds sqrt((1-c)/2) = -c_s / (2 sqrt(2(1-c))) = -beta/sqrt(2(1-c)),
    // finite as s -> 0 because beta vanishes like s as well.
    const double dfm = -t.beta / std::sqrt(2.0 * t.one_minus_c);
    const double dfp = t.beta / std::sqrt(2.0 * (1.0 + t.c));
    du.col(0) = Vec2(dfm, -dfm);
    du.col(1) = Vec2(dfp, dfp);
  } else {
    const double q = p.q;
    const double n1sq = 1.0 - 2.0 * q * (1.0 - q) * t.one_minus_c;
    const double n1 = std::sqrt(n1sq);
    const double dn1 = q * (1.0 - q) / n1 * c_s;  // chain through c
    const double S_s = -2.0 * t.beta * t.c / t.S;
    const Vec2 top(q + t.c * (1.0 - q), t.c * q + (1.0 - q));
    const Vec2 dtop(c_s * (1.0 - q), c_s * q);
    du.col(0) = dtop / n1 - top * dn1 / n1sq;
    const Vec2 dir(1.0 - q, -q);
    du.col(1) = dir * (S_s * n1 - t.S * dn1) / n1sq;
  }
  return du;
}

Mat2c qubit_density(const BlochState& state) {
  const Vec3& r = state.r_vec;
  Mat2c rho;
  rho(0, 0) = 0.5 * (1.0 + r(2));
  rho(1, 1) = 0.5 * (1.0 - r(2));
  rho(0, 1) = 0.5 * std::complex<double>(r(0), -r(1));
  rho(1, 0) = 0.5 * std::complex<double>(r(0), r(1));
  return rho;
}

Mat2c qubit_density(const ParamPoint& p, const OpticalConfig& cfg) {
  return qubit_density(bloch_vector(p, cfg));
}

void tracked_qubit_family(const ParamPoint& p, const OpticalConfig& cfg,
                          BasisTag which, Mat2c& rho, Mat2c& drho_ds) {
  const ModelTerms t = model_terms(p, cfg);
  if (t.D <= kDenomTol)
    throw DegenerateStateError("zero-intensity state " + describe(p, cfg));
  const Mat2c w = weight_matrix(p, t);
  const double d_dot = 4.0 * t.beta * p.gamma_r * t.k;
  const Mat2c dw = -w * (d_dot / t.D);

  const Mat2 u = gram_times_basis(p, cfg, which);
  const Mat2 du = gram_times_basis_ds(p, cfg, which);
  const Mat2c uc = u.cast<std::complex<double>>();
  const Mat2c duc = du.cast<std::complex<double>>();

  rho = uc.adjoint() * w * uc;
  drho_ds = duc.adjoint() * w * uc + uc.adjoint() * dw * uc +
            uc.adjoint() * w * duc;
  rho = 0.5 * (rho + Mat2c(rho.adjoint()));
  drho_ds = 0.5 * (drho_ds + Mat2c(drho_ds.adjoint()));
}

Mat2 basis_overlap_e_v(const ParamPoint& p, const OpticalConfig& cfg) {
  const Mat2 ue = gram_times_basis(p, cfg, BasisTag::geometric_e);
  const Mat2 bv = basis_coefficients(p, cfg, BasisTag::centroid_v);
  return ue.transpose() * bv;
}

}  // namespace cohres
