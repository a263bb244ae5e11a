#include "cohres/sld.hpp"

#include "cohres/errors.hpp"

#include <cmath>
#include <complex>
#include <sstream>

namespace cohres {

namespace {

constexpr double kPurityTol = 1e-8;   // purity above 1 - tol: SLD singular
constexpr double kDirTol = 1e-12;     // |r| below tol: direction undefined

std::string describe(const ParamPoint& p, const OpticalConfig& cfg) {
  std::ostringstream os;
  os << "(s=" << p.s << ", q=" << p.q << ", gamma_r=" << p.gamma_r
     << ", gamma_i=" << p.gamma_i << "; alpha=" << cfg.alpha << ")";
  return os.str();
}

// 1 - e^{-2x} - 2x e^{-x}, which is x^3/3 + O(x^4); the direct form loses
// all significant digits for small x, so a truncated series takes over
// below 0.1 (crossover error ~6e-14 relative).
double expm_n(double x) {
  if (x < 0.1) {
    return x * x * x *
           (1.0 / 3 +
            x * (-1.0 / 3 +
                 x * (11.0 / 60 +
                      x * (-13.0 / 180 +
                           x * (19.0 / 840 +
                                x * (-1.0 / 168 +
                                     x * (247.0 / 181440 +
                                          x * (-251.0 / 907200 +
                                               x * (1013.0 / 19958400 +
                                                    x * (-509.0 /
                                                         59875200))))))))));
  }
  return -std::expm1(-2.0 * x) - 2.0 * x * std::exp(-x);
}

// 1 - (1 + 2x) e^{-2x} = 2x^2 + O(x^3), same treatment (series below 0.01).
double expm_f(double x) {
  if (x < 0.01) {
    return x * x *
           (2.0 +
            x * (-8.0 / 3 +
                 x * (2.0 +
                      x * (-16.0 / 15 +
                           x * (4.0 / 9 +
                                x * (-16.0 / 105 + x * (2.0 / 45)))))));
  }
  return -std::expm1(-2.0 * x) - 2.0 * x * std::exp(-2.0 * x);
}

}  // namespace

Mat2c BlochOperator::matrix() const {
  Mat2c m;
  m(0, 0) = lam0 + lam_vec(2);
  m(1, 1) = lam0 - lam_vec(2);
  m(0, 1) = std::complex<double>(lam_vec(0), -lam_vec(1));
  m(1, 0) = std::complex<double>(lam_vec(0), lam_vec(1));
  return m;
}

BlochOperator bloch_lyapunov_solve(const Vec3& r, double deficit, double a0,
                                   const Vec3& a_vec, BasisTag basis) {
  if (deficit <= 0.0)
    throw SingularStateError("Lyapunov solve needs a strictly mixed state");
  BlochOperator op;
  op.basis = basis;
  op.lam0 = 2.0 * (a0 - r.dot(a_vec)) / deficit;
  op.lam_vec = 2.0 * a_vec - op.lam0 * r;
  return op;
}

BlochOperator sld_scalar(const ParamPoint& p, const OpticalConfig& cfg,
                         Var which) {
  if (which == Var::s)
    throw DomainError(
        "sld_scalar handles in-span parameters only; the separation needs the "
        "extended-basis operator");
  const PurityInfo pu = purity(p, cfg);
  if (pu.r * pu.r >= 1.0 - kPurityTol)
    throw SingularStateError("state too pure for a bounded SLD " +
                             describe(p, cfg));
  const Vec3 r = bloch_vector(p, cfg).r_vec;
  const Vec3 dr = bloch_vector_derivative(p, cfg, which);
  return bloch_lyapunov_solve(r, pu.deficit, 0.0, 0.5 * dr);
}

BlochOperator sld_purity(double r, const Vec3& r_dir) {
  if (r <= kDirTol)
    throw DomainError("purity SLD undefined at the fully mixed state");
  if (r * r >= 1.0 - kPurityTol)
    throw SingularStateError("purity SLD unbounded at a pure state");
  const double norm = r_dir.norm();
  if (std::abs(norm - 1.0) > 1e-9)
    throw DomainError("purity SLD direction must be a unit vector");
  const double deficit = 1.0 - r * r;
  BlochOperator op;
  op.lam0 = -r / deficit;
  op.lam_vec = (r_dir / norm) / deficit;
  return op;
}

Mat2 ExtendedBasisData::c_matrix() const {
  Mat2 c;
  c << n3, mu / n3, 0.0, n4;
  return c;
}

ExtendedBasisData extended_basis(const ParamPoint& p,
                                 const OpticalConfig& cfg) {
  const ModelTerms t = model_terms(p, cfg);
  if (t.one_minus_c < 1e-14)
    throw DegenerateOverlapError(
        "derivative subspace undefined at coincident sources " +
        describe(p, cfg));
  const double sig2 = cfg.sigma * cfg.sigma;
  const double alpha = cfg.alpha;
  const double m = 1.0 - 2.0 * alpha;
  const double m2 = m * m;
  const double a4 = 4.0 * alpha * (1.0 - alpha);

  ExtendedBasisData d;
  d.beta = t.beta;
  d.zeta = (p.s * p.s - 4.0 * sig2) * t.c / (64.0 * sig2 * sig2);

  // Writing the omega formulas from the struct comment directly subtracts
  // O(1) quantities whose difference shrinks like powers of
  // x = s^2/(8 sigma^2); for s ~ 1e-3 sigma that wipes out every digit of
  // n3^2 and n4^2.  With the positive building blocks
  //   n = 1 - e^{-2x} - 2x e^{-x},   f = 1 - (1 + 2x) e^{-2x},
  //   g = (1 - c^2) + 2 x c,         den = 16 sigma^2 (1 - c^2),
  // the same quantities regroup exactly into sums of positive terms:
  //   w1 den       = (1+c) n / (1-c) + m^2 g
  //   w2 den       = (1-c) g / (1+c) + m^2 n
  //   mu           = m f / (8 sigma^2 S (1-c^2))
  //   w1 w2 - mu^2 = n g (4 alpha (1-alpha))^2 / den^2.
  const double x = p.s * p.s / (8.0 * sig2);
  const double n_term = expm_n(x);
  const double f_term = expm_f(x);
  const double g_term = t.one_minus_c2 + 2.0 * x * t.c;
  const double den = 16.0 * sig2 * t.one_minus_c2;
  const double a_num = (1.0 + t.c) * n_term / t.one_minus_c + m2 * g_term;
  const double b_num = t.one_minus_c * g_term / (1.0 + t.c) + m2 * n_term;
  d.w1 = a_num / den;
  d.w2 = b_num / den;
  d.mu = m * f_term / (8.0 * sig2 * t.S * t.one_minus_c2);
  d.nu = d.beta * m / t.S;
  d.omega1_sq = d.w1 + d.nu * d.nu;
  d.omega2_sq = d.w2 + d.nu * d.nu;

  if (!(d.w1 > 0.0))
    throw NumericDegeneracyError(
        "first derivative-subspace norm lost to cancellation " +
        describe(p, cfg));
  d.n3 = std::sqrt(d.w1);
  const double n4_sq = n_term * g_term * a4 * a4 / (den * a_num);
  if (!(n4_sq > 0.0))
    throw NumericDegeneracyError(
        "second derivative-subspace norm lost to cancellation " +
        describe(p, cfg));
  d.n4 = std::sqrt(n4_sq);

  d.e3_coeffs = Vec4(1.0 / d.n3, 0.0, 0.0, -d.nu / d.n3);
  d.e4_coeffs = Vec4(-d.mu / (d.w1 * d.n4), 1.0 / d.n4, d.nu / d.n4,
                     d.nu * d.mu / (d.w1 * d.n4));
  return d;
}

Mat2c ExtendedOperator::block_11() const {
  return block_11_qubit.matrix() + block_11_extra.matrix();
}

Mat4c ExtendedOperator::full() const {
  Mat4c m = Mat4c::Zero();
  m.topLeftCorner<2, 2>() = block_11();
  m.topRightCorner<2, 2>() = block_12.cast<std::complex<double>>();
  m.bottomLeftCorner<2, 2>() =
      block_12.transpose().cast<std::complex<double>>();
  m.bottomRightCorner<2, 2>() = block_22.cast<std::complex<double>>();
  return m;
}

ExtendedOperator sld_separation_with(const ParamPoint& p,
                                     const OpticalConfig& cfg,
                                     const ExtendedBasisData& basis_data) {
  const PurityInfo pu = purity(p, cfg);
  if (pu.r * pu.r >= 1.0 - kPurityTol)
    throw SingularStateError("state too pure for a bounded SLD " +
                             describe(p, cfg));
  const Vec3 r = bloch_vector(p, cfg).r_vec;
  const Vec3 dr = bloch_vector_derivative(p, cfg, Var::s);

  ExtendedOperator op;
  op.basis_data = basis_data;
  op.block_11_qubit = bloch_lyapunov_solve(r, pu.deficit, 0.0, 0.5 * dr);
  op.block_11_extra.lam0 = 0.0;
  op.block_11_extra.lam_vec =
      2.0 * basis_data.nu * Vec3(r(2), 0.0, -r(0));
  op.block_12 = 2.0 * basis_data.c_matrix().transpose();
  op.block_22 = Mat2::Zero();
  return op;
}

ExtendedOperator sld_separation(const ParamPoint& p,
                                const OpticalConfig& cfg) {
  return sld_separation_with(p, cfg, extended_basis(p, cfg));
}

}  // namespace cohres
