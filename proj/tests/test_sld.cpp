#include <doctest.h>

#include "cohres/errors.hpp"
#include "cohres/model.hpp"
#include "cohres/oracle.hpp"
#include "cohres/sld.hpp"

#include <cmath>
#include <complex>

using namespace cohres;

namespace {

const OpticalConfig kGeo{1.0, 1e-2, 0.5};

ParamPoint pt(double s, double q, double gr, double gi) {
  ParamPoint p;
  p.s = s;
  p.q = q;
  p.gamma_r = gr;
  p.gamma_i = gi;
  return p;
}

Mat2c density(const Vec3& r) {
  Mat2c rho;
  rho(0, 0) = 0.5 * (1.0 + r(2));
  rho(1, 1) = 0.5 * (1.0 - r(2));
  rho(0, 1) = 0.5 * std::complex<double>(r(0), -r(1));
  rho(1, 0) = 0.5 * std::complex<double>(r(0), r(1));
  return rho;
}

}  // namespace

TEST_CASE("Lyapunov solve reproduces its source") {
  const Vec3 r(0.3, -0.2, 0.5);
  const Vec3 a(0.11, 0.07, -0.4);
  const double a0 = 0.23;
  const double deficit = 1.0 - r.squaredNorm();
  const BlochOperator op = bloch_lyapunov_solve(r, deficit, a0, a);

  const Mat2c rho = density(r);
  const Mat2c lam = op.matrix();
  const Mat2c lhs = 0.5 * (rho * lam + lam * rho);
  Mat2c rhs = a0 * Mat2c::Identity();
  rhs(0, 0) += a(2);
  rhs(1, 1) -= a(2);
  rhs(0, 1) += std::complex<double>(a(0), -a(1));
  rhs(1, 0) += std::complex<double>(a(0), a(1));
  CHECK((lhs - rhs).norm() < 1e-13);
}

TEST_CASE("scalar logarithmic derivatives") {
  const ParamPoint p = pt(0.8, 0.3, 0.25, 0.15);
  const Mat2c rho = qubit_density(p, kGeo);
  for (Var v : {Var::q, Var::gamma_r, Var::gamma_i}) {
    const BlochOperator op = sld_scalar(p, kGeo, v);
    const Mat2c lam = op.matrix();
    const Vec3 dr = bloch_vector_derivative(p, kGeo, v);
    const Mat2c drho = density(dr) - 0.5 * Mat2c::Identity();
    CHECK((0.5 * (rho * lam + lam * rho) - drho).norm() < 1e-12);
    // SLDs are traceless under the state: tr[rho L] = d tr rho = 0.
    CHECK(std::abs((rho * lam).trace()) < 1e-13);
  }

  // The separation leaves the qubit span; the scalar solver refuses it.
  CHECK_THROWS_AS(sld_scalar(p, kGeo, Var::s), DomainError);
  // Pure states make the Lyapunov equation singular.
  CHECK_THROWS_AS(sld_scalar(pt(0.8, 0.3, 0.6, 0.8), kGeo, Var::q),
                  SingularStateError);
}

TEST_CASE("purity logarithmic derivative example") {
  const BlochOperator op = sld_purity(0.5, Vec3(0.0, 0.0, 1.0));
  CHECK(op.lam0 == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
  CHECK(op.lam_vec(0) == doctest::Approx(0.0));
  CHECK(op.lam_vec(1) == doctest::Approx(0.0));
  CHECK(op.lam_vec(2) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));

  // Defining property: (rho L + L rho)/2 = d rho / d r along the radial ray.
  const Vec3 r(0.0, 0.0, 0.5);
  const Mat2c rho = density(r);
  const Mat2c lam = op.matrix();
  const Mat2c drho = density(Vec3(0.0, 0.0, 1.0)) - 0.5 * Mat2c::Identity();
  CHECK((0.5 * (rho * lam + lam * rho) - drho).norm() < 1e-14);
}

TEST_CASE("extended-basis scalars match the mode-overlap oracle") {
  OpticalConfig cfg = kGeo;
  for (double alpha : {0.3, 0.5, 0.75}) {
    for (double s : {0.5, 1.0, 2.5}) {
      cfg.alpha = alpha;
      const ParamPoint p = pt(s, 0.3, 0.25, 0.15);
      const ExtendedBasisData d = extended_basis(p, cfg);
      const OracleOverlaps ov = oracle_mode_overlaps(p, cfg);
      CHECK(d.omega1_sq == doctest::Approx(ov.omega1_sq).epsilon(1e-9));
      CHECK(d.omega2_sq == doctest::Approx(ov.omega2_sq).epsilon(1e-9));
      CHECK(d.mu == doctest::Approx(ov.mu).epsilon(1e-9));
      CHECK(d.nu == doctest::Approx(ov.nu).epsilon(1e-9));

      // Closed forms for the raw PSF derivative overlaps.
      const ModelTerms t = model_terms(p, cfg);
      const double zeta = d.zeta;
      CHECK(ov.psi_dphi ==
            doctest::Approx(2.0 * alpha * t.beta).epsilon(1e-9));
      CHECK(ov.dpsi_dphi ==
            doctest::Approx(4.0 * alpha * (1.0 - alpha) * zeta)
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("extended-basis internal consistency") {
  OpticalConfig cfg = kGeo;
  cfg.alpha = 0.35;
  const ParamPoint p = pt(0.8, 0.3, 0.25, 0.15);
  const ExtendedBasisData d = extended_basis(p, cfg);

  // Stored complements agree with naive subtraction at moderate s.
  CHECK(d.w1 ==
        doctest::Approx(d.omega1_sq - d.nu * d.nu).epsilon(1e-12));
  CHECK(d.w2 ==
        doctest::Approx(d.omega2_sq - d.nu * d.nu).epsilon(1e-12));

  // C^T C reproduces the reduced overlap matrix [[w1, mu], [mu, w2]].
  const Mat2 c = d.c_matrix();
  const Mat2 ctc = c.transpose() * c;
  CHECK(ctc(0, 0) == doctest::Approx(d.w1).epsilon(1e-13));
  CHECK(ctc(0, 1) == doctest::Approx(d.mu).epsilon(1e-13));
  CHECK(ctc(1, 1) == doctest::Approx(d.w2).epsilon(1e-13));

  // e3, e4 are orthonormal under the Gram matrix of
  // {d_s e1, d_s e2, e1, e2} and orthogonal to the in-span pair.
  Mat4 gram;
  gram << d.omega1_sq, d.mu, 0.0, d.nu,
      d.mu, d.omega2_sq, -d.nu, 0.0,
      0.0, -d.nu, 1.0, 0.0,
      d.nu, 0.0, 0.0, 1.0;
  const Vec4 e3 = d.e3_coeffs;
  const Vec4 e4 = d.e4_coeffs;
  CHECK(e3.dot(gram * e3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e4.dot(gram * e4) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e3.dot(gram * e4) == doctest::Approx(0.0).epsilon(1e-12));
  // Rows 3 and 4 of gram * e are the overlaps with e1 and e2.
  CHECK((gram * e3)(2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((gram * e3)(3) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((gram * e4)(2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((gram * e4)(3) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("extended basis survives deep sub-wavelength separations") {
  // Reference values from a 50-digit evaluation of the naive formulas.
  struct Ref {
    double s, alpha;
    double w1, w2, mu, nu, n3, n4;
  };
  const Ref refs[] = {
      {1e-3, 0.05, 0.10125000260416653, 7.8125001318359172e-9,
       2.8125000585937445e-5, -0.22499998593750015, 0.31819805562599928,
       2.6933046593963078e-9},
      {1e-4, 0.5, 2.6041666666666667e-11, 7.8125e-11, 0.0, 0.0,
       5.1031036307982877e-6, 8.8388347648318441e-6},
      {0.35, 0.2, 0.045318128674971312, 0.00095787310011436068,
       0.0065790554174580049, -0.14885303916089109, 0.21288055025053677,
       0.001661113465211933},
  };
  for (const Ref& r : refs) {
    OpticalConfig cfg = kGeo;
    cfg.alpha = r.alpha;
    const ExtendedBasisData d = extended_basis(pt(r.s, 0.3, 0.0, 0.0), cfg);
    CHECK(d.w1 == doctest::Approx(r.w1).epsilon(1e-12));
    CHECK(d.w2 == doctest::Approx(r.w2).epsilon(1e-12));
    CHECK(d.mu == doctest::Approx(r.mu).epsilon(1e-12));
    CHECK(d.nu == doctest::Approx(r.nu).epsilon(1e-12));
    CHECK(d.n3 == doctest::Approx(r.n3).epsilon(1e-12));
    CHECK(d.n4 == doctest::Approx(r.n4).epsilon(1e-12));
  }

  CHECK_THROWS_AS(extended_basis(pt(1e-9, 0.3, 0.0, 0.0), kGeo),
                  DegenerateOverlapError);
}

TEST_CASE("separation operator assembly") {
  OpticalConfig cfg = kGeo;
  cfg.alpha = 0.4;
  const ParamPoint p = pt(0.8, 0.3, 0.25, 0.15);
  const ExtendedOperator op = sld_separation(p, cfg);

  // Block structure: coupling block is 2 C^T, tail block vanishes.
  const Mat2 c = op.basis_data.c_matrix();
  CHECK((op.block_12 - 2.0 * c.transpose()).norm() < 1e-14);
  CHECK(op.block_22.norm() == 0.0);

  // tr[rho_ext Lambda] = 0: the embedded state only sees the 2x2 corner.
  const Mat2c rho = qubit_density(p, cfg);
  CHECK(std::abs((rho * op.block_11()).trace()) < 1e-13);

  const Mat4c full = op.full();
  CHECK((full - full.adjoint()).norm() < 1e-13);
}
