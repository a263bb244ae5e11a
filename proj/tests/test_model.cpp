#include <doctest.h>

#include "cohres/errors.hpp"
#include "cohres/model.hpp"
#include "cohres/oracle.hpp"

#include <cmath>

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

// Symmetric-difference derivative of a scalar function of one parameter.
template <typename F>
double fd(F f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("overlap and cached complements") {
  CHECK(overlap_c(0.0, 1.0) == doctest::Approx(1.0));
  CHECK(overlap_c(2.0, 1.0) == doctest::Approx(std::exp(-0.5)));
  CHECK(overlap_c(1.0, 0.5) == doctest::Approx(std::exp(-0.5)));

  const ParamPoint p = pt(0.7, 0.3, 0.25, 0.15);
  const ModelTerms t = model_terms(p, kGeo);
  CHECK(t.c == doctest::Approx(std::exp(-0.7 * 0.7 / 8.0)).epsilon(1e-15));
  CHECK(t.one_minus_c == doctest::Approx(1.0 - t.c).epsilon(1e-13));
  CHECK(t.one_minus_c2 ==
        doctest::Approx(t.one_minus_c * (1.0 + t.c)).epsilon(1e-15));
  CHECK(t.S == doctest::Approx(std::sqrt(1.0 - t.c * t.c)).epsilon(1e-15));
  CHECK(t.k == doctest::Approx(std::sqrt(0.3 * 0.7)).epsilon(1e-15));
  CHECK(t.D == doctest::Approx(1.0 + 2.0 * t.c * 0.25 * t.k).epsilon(1e-15));
  CHECK(t.beta == doctest::Approx(-0.7 * t.c / 8.0).epsilon(1e-15));

  // The complements must stay accurate where naive subtraction would not.
  const ModelTerms small = model_terms(pt(1e-6, 0.5, 0.0, 0.0), kGeo);
  CHECK(small.one_minus_c ==
        doctest::Approx(1.25e-13).epsilon(1e-9));  // s^2/(8 sigma^2)
  CHECK(small.one_minus_c2 == doctest::Approx(2.5e-13).epsilon(1e-9));
}

TEST_CASE("domain checks") {
  CHECK_THROWS_AS(check_domain(pt(-1.0, 0.5, 0.0, 0.0), kGeo), DomainError);
  CHECK_THROWS_AS(check_domain(pt(1.0, -0.1, 0.0, 0.0), kGeo), DomainError);
  CHECK_THROWS_AS(check_domain(pt(1.0, 1.1, 0.0, 0.0), kGeo), DomainError);
  CHECK_THROWS_AS(check_domain(pt(1.0, 0.5, 0.8, 0.7), kGeo), DomainError);

  OpticalConfig bad = kGeo;
  bad.sigma = 0.0;
  CHECK_THROWS_AS(check_domain(pt(1.0, 0.5, 0.0, 0.0), bad), ConfigError);
  bad = kGeo;
  bad.delta = 0.0;
  CHECK_THROWS_AS(check_domain(pt(1.0, 0.5, 0.0, 0.0), bad), ConfigError);

  CHECK_NOTHROW(check_domain(pt(1.0, 0.0, 0.0, 0.0), kGeo));
  CHECK_NOTHROW(check_domain(pt(1.0, 0.5, 1.0, 0.0), kGeo));
}

TEST_CASE("mean photon number and gradient") {
  const ParamPoint p = pt(0.5, 0.3, 0.25, 0.15);
  const ModelTerms t = model_terms(p, kGeo);
  CHECK(mean_photon_number(p, kGeo) ==
        doctest::Approx(kGeo.delta * t.D).epsilon(1e-15));
  CHECK(mean_photon_number(pt(0.5, 0.3, 0.0, 0.4), kGeo) ==
        doctest::Approx(kGeo.delta).epsilon(1e-15));

  const Vec4 grad = mean_photon_gradient(p, kGeo);
  for (Var v : kAllVars) {
    auto nbar_at = [&](double x) {
      ParamPoint q = p;
      switch (v) {
        case Var::s: q.s = x; break;
        case Var::q: q.q = x; break;
        case Var::gamma_r: q.gamma_r = x; break;
        case Var::gamma_i: q.gamma_i = x; break;
      }
      return mean_photon_number(q, kGeo);
    };
    double x0 = 0.0;
    switch (v) {
      case Var::s: x0 = p.s; break;
      case Var::q: x0 = p.q; break;
      case Var::gamma_r: x0 = p.gamma_r; break;
      case Var::gamma_i: x0 = p.gamma_i; break;
    }
    const double num = fd(nbar_at, x0, 1e-6);
    CHECK(grad(index(v)) == doctest::Approx(num).epsilon(1e-7));
  }

  // gamma_r = 0 kills the q-dependence identically, even on the boundary.
  CHECK(mean_photon_gradient(pt(0.5, 0.0, 0.0, 0.0), kGeo)(index(Var::q)) ==
        0.0);
  // Otherwise d(nbar)/dq diverges like (1-2q)/k at the boundary.
  CHECK_THROWS_AS(mean_photon_gradient(pt(0.5, 0.0, 0.25, 0.0), kGeo),
                  DerivativeDivergenceError);
}

TEST_CASE("source positions and the centroid frame") {
  OpticalConfig cfg = kGeo;
  cfg.alpha = 0.3;
  const ParamPoint p = pt(2.0, 0.3, 0.0, 0.0);
  const auto x = source_positions(p, cfg);
  CHECK(x[0] == doctest::Approx(-0.7 * 2.0).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(0.3 * 2.0).epsilon(1e-15));
  // alpha = q puts the intensity-weighted centroid at the origin.
  CHECK(p.q * x[0] + (1.0 - p.q) * x[1] == doctest::Approx(0.0));
  // Separation is frame independent.
  CHECK(x[1] - x[0] == doctest::Approx(p.s).epsilon(1e-15));
}

TEST_CASE("Bloch vector closed form and oracle agreement") {
  const ParamPoint p = pt(0.8, 0.3, 0.25, 0.15);
  const BlochState st = bloch_vector(p, kGeo);
  const ModelTerms t = model_terms(p, kGeo);
  CHECK(st.r_vec(0) ==
        doctest::Approx(-(1.0 - 2.0 * p.q) * t.S / t.D).epsilon(1e-14));
  CHECK(st.r_vec(1) ==
        doctest::Approx(-2.0 * p.gamma_i * t.k * t.S / t.D).epsilon(1e-14));
  CHECK(st.r_vec(2) ==
        doctest::Approx(-(t.c + 2.0 * p.gamma_r * t.k) / t.D).epsilon(1e-14));
  CHECK(st.nbar == doctest::Approx(mean_photon_number(p, kGeo)));

  for (const ParamPoint& q :
       {p, pt(0.1, 0.5, -0.5, 0.0), pt(2.5, 0.75, 0.0, 0.6)}) {
    const Vec3 closed = bloch_vector(q, kGeo).r_vec;
    const Vec3 oracle = oracle_bloch_vector(q, kGeo);
    CHECK((closed - oracle).norm() < 1e-10);
  }

  // Destructive interference can push the arrival rate to zero.
  CHECK_THROWS_AS(bloch_vector(pt(1e-6, 0.5, -1.0, 0.0), kGeo),
                  DegenerateStateError);
}

TEST_CASE("Bloch derivatives against finite differences") {
  const ParamPoint p = pt(0.8, 0.3, 0.25, 0.15);
  OpticalConfig cfg = kGeo;
  cfg.alpha = 0.4;
  for (Var v : kAllVars) {
    const Vec3 closed = bloch_vector_derivative(p, cfg, v);
    const double h = 1e-6;
    ParamPoint lo = p;
    ParamPoint hi = p;
    switch (v) {
      case Var::s: lo.s -= h; hi.s += h; break;
      case Var::q: lo.q -= h; hi.q += h; break;
      case Var::gamma_r: lo.gamma_r -= h; hi.gamma_r += h; break;
      case Var::gamma_i: lo.gamma_i -= h; hi.gamma_i += h; break;
    }
    const Vec3 num =
        (bloch_vector(hi, cfg).r_vec - bloch_vector(lo, cfg).r_vec) /
        (2.0 * h);
    CHECK((closed - num).norm() < 1e-7 * (1.0 + closed.norm()));
  }

  // q-derivative at the boundary: finite for gamma = 0, divergent otherwise.
  CHECK_NOTHROW(bloch_vector_derivative(pt(0.8, 0.0, 0.0, 0.0), cfg, Var::q));
  CHECK_THROWS_AS(
      bloch_vector_derivative(pt(0.8, 0.0, 0.25, 0.0), cfg, Var::q),
      BoundaryError);
}

TEST_CASE("purity closed forms") {
  const ParamPoint p = pt(0.8, 0.3, 0.25, 0.15);
  const PurityInfo pu = purity(p, kGeo);
  const Vec3 r = bloch_vector(p, kGeo).r_vec;
  CHECK(pu.r == doctest::Approx(r.norm()).epsilon(1e-13));
  CHECK(pu.deficit == doctest::Approx(1.0 - r.squaredNorm()).epsilon(1e-12));

  const ModelTerms t = model_terms(p, kGeo);
  CHECK(pu.deficit ==
        doctest::Approx(4.0 * t.k * t.k * t.one_minus_c2 *
                        (1.0 - p.coherence_sq()) / (t.D * t.D))
            .epsilon(1e-13));
  CHECK(pu.r_inc_sq ==
        doctest::Approx(1.0 - 4.0 * p.q * (1.0 - p.q) * t.one_minus_c2)
            .epsilon(1e-13));
  CHECK(pu.r_inf_sq ==
        doctest::Approx(1.0 + 4.0 * p.q * (1.0 - p.q) *
                        (p.coherence_sq() - 1.0))
            .epsilon(1e-13));

  // Fully coherent sources stay pure at any separation.
  CHECK(purity(pt(0.8, 0.3, 0.6, 0.8), kGeo).deficit ==
        doctest::Approx(0.0).epsilon(1e-15));
  // The deficit stays meaningful where 1 - |r|^2 would be pure roundoff.
  const PurityInfo tiny = purity(pt(1e-5, 0.5, 0.0, 0.0), kGeo);
  CHECK(tiny.deficit == doctest::Approx(2.5e-11).epsilon(1e-6));
}

TEST_CASE("orthonormal bases under the PSF Gram matrix") {
  const ParamPoint p = pt(0.9, 0.3, 0.1, -0.2);
  OpticalConfig cfg = kGeo;
  cfg.alpha = p.q;
  const ModelTerms t = model_terms(p, cfg);
  Mat2 gram;
  gram << 1.0, t.c, t.c, 1.0;
  for (BasisTag tag : {BasisTag::geometric_e, BasisTag::centroid_v}) {
    const Mat2 b = basis_coefficients(p, cfg, tag);
    const Mat2 ident = b.transpose() * gram * b;
    CHECK((ident - Mat2::Identity()).norm() < 1e-12);
    // gram_times_basis must equal the plain product where it is stable.
    const Mat2 gb = gram_times_basis(p, cfg, tag);
    CHECK((gb - gram * b).norm() < 1e-12);
  }
}

TEST_CASE("basis derivatives against finite differences") {
  const ParamPoint p = pt(0.9, 0.3, 0.1, -0.2);
  OpticalConfig cfg = kGeo;
  cfg.alpha = 0.35;
  const double h = 1e-6;
  for (BasisTag tag : {BasisTag::geometric_e, BasisTag::centroid_v}) {
    ParamPoint lo = p;
    ParamPoint hi = p;
    lo.s -= h;
    hi.s += h;

    // Chain rule d/ds = 2 beta d/dc for the coefficient matrix.
    const Mat2 db_ds = 2.0 * model_terms(p, cfg).beta *
                       basis_coefficients_dc(p, cfg, tag);
    const Mat2 num_b = (basis_coefficients(hi, cfg, tag) -
                        basis_coefficients(lo, cfg, tag)) /
                       (2.0 * h);
    CHECK((db_ds - num_b).norm() < 1e-7);

    const Mat2 dgb = gram_times_basis_ds(p, cfg, tag);
    const Mat2 num_gb =
        (gram_times_basis(hi, cfg, tag) - gram_times_basis(lo, cfg, tag)) /
        (2.0 * h);
    CHECK((dgb - num_gb).norm() < 1e-7);
  }
}

TEST_CASE("tracked qubit family") {
  const ParamPoint p = pt(0.9, 0.3, 0.1, -0.2);
  OpticalConfig cfg = kGeo;
  cfg.alpha = p.q;
  for (BasisTag tag : {BasisTag::geometric_e, BasisTag::centroid_v}) {
    Mat2c rho, drho;
    tracked_qubit_family(p, cfg, tag, rho, drho);
    CHECK((rho - rho.adjoint()).norm() < 1e-14);
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-13);
    CHECK(std::abs(rho.trace().imag()) < 1e-15);

    const double h = 1e-6;
    ParamPoint lo = p;
    ParamPoint hi = p;
    lo.s -= h;
    hi.s += h;
    Mat2c rlo, rhi, scratch;
    tracked_qubit_family(lo, cfg, tag, rlo, scratch);
    tracked_qubit_family(hi, cfg, tag, rhi, scratch);
    CHECK((drho - (rhi - rlo) / (2.0 * h)).norm() < 1e-7);
  }

  // In the geometric_e basis the tracked state is the Bloch state itself.
  Mat2c rho, drho;
  tracked_qubit_family(p, cfg, BasisTag::geometric_e, rho, drho);
  CHECK((rho - qubit_density(p, cfg)).norm() < 1e-13);
}

TEST_CASE("basis change between the two frames") {
  const ParamPoint p = pt(0.9, 0.3, 0.1, -0.2);
  OpticalConfig cfg = kGeo;
  cfg.alpha = p.q;
  const Mat2 o = basis_overlap_e_v(p, cfg);
  CHECK((o.transpose() * o - Mat2::Identity()).norm() < 1e-12);

  // Conjugating the tracked v-state by O must reproduce the e-state.
  Mat2c rho_e, rho_v, scratch;
  tracked_qubit_family(p, cfg, BasisTag::geometric_e, rho_e, scratch);
  tracked_qubit_family(p, cfg, BasisTag::centroid_v, rho_v, scratch);
  const Mat2c rotated =
      o.cast<std::complex<double>>() * rho_v *
      o.transpose().cast<std::complex<double>>();
  CHECK((rotated - rho_e).norm() < 1e-12);
}
