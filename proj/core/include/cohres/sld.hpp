#pragma once

#include "cohres/model.hpp"
#include "cohres/types.hpp"

namespace cohres {

// 2x2 Hermitian operator in Bloch form: lam0 * I + lam_vec . sigma.
struct BlochOperator {
  double lam0 = 0.0;
  Vec3 lam_vec = Vec3::Zero();
  BasisTag basis = BasisTag::geometric_e;

  Mat2c matrix() const;
};

// Solves the Lyapunov condition A = (rho L + L rho)/2 for a qubit state with
// Bloch vector r and source A = a0 * I + a_vec . sigma:
//   lam0 = 2 (a0 - r.a) / (1 - r^2),  lam_vec = 2 a - lam0 r.
// `deficit` is 1 - r^2 supplied by the caller in stable form.
BlochOperator bloch_lyapunov_solve(const Vec3& r, double deficit, double a0,
                                   const Vec3& a_vec,
                                   BasisTag basis = BasisTag::geometric_e);

// Logarithmic derivative for one of the in-span parameters {q, gamma_r,
// gamma_i}.  Throws SingularStateError when purity >= 1 - 1e-8 and
// BoundaryError for Var::q at the intensity boundary.
BlochOperator sld_scalar(const ParamPoint& p, const OpticalConfig& cfg,
                         Var which);

// Logarithmic derivative for the purity itself:
//   lam0 = -r/(1-r^2),  lam_vec = r_dir/(1-r^2)  with r_dir a unit vector.
BlochOperator sld_purity(double r, const Vec3& r_dir);

// Scalars and Gram-Schmidt data for the derivative-subspace construction.
// With P = alpha^2 + (1-alpha)^2 and the overlap derivatives
//   beta = -s c/(8 sigma^2),  zeta = (s^2 - 4 sigma^2) c/(64 sigma^4),
// the mode-derivative inner products reduce to
//   omega1_sq = [P/(8 sigma^2) - 4 alpha(1-alpha) zeta - beta^2/(1-c)]/(1-c)
//   omega2_sq = [P/(8 sigma^2) + 4 alpha(1-alpha) zeta - beta^2/(1+c)]/(1+c)
//   mu  = (1-2 alpha)/S [1/(8 sigma^2) - 2 beta^2/(1-c^2)]
//   nu  = beta (1-2 alpha)/S
// The differences w1 = omega1_sq - nu^2 and w2 = omega2_sq - nu^2 are the
// squared Gram-Schmidt norms before and after removing the mu coupling; they
// are stored separately because for s << sigma they are many orders of
// magnitude smaller than omega^2 and nu^2 and must be assembled from
// cancellation-free groupings rather than by subtraction.
// e3 and e4 are expansion coefficients over {d_s e1, d_s e2, e1, e2}.
struct ExtendedBasisData {
  double beta = 0.0;
  double zeta = 0.0;
  double omega1_sq = 0.0;
  double omega2_sq = 0.0;
  double w1 = 0.0;  // omega1_sq - nu^2 (= n3^2), cancellation-free
  double w2 = 0.0;  // omega2_sq - nu^2, cancellation-free
  double mu = 0.0;
  double nu = 0.0;
  double n3 = 0.0;  // norm of the first Gram-Schmidt vector
  double n4 = 0.0;  // norm of the second
  Vec4 e3_coeffs = Vec4::Zero();
  Vec4 e4_coeffs = Vec4::Zero();

  // Overlaps C_ij = <e_{2+i} | d_s e_j>; lower-triangular-free closed form
  // [[n3, mu/n3], [0, n4]].
  Mat2 c_matrix() const;
};

ExtendedBasisData extended_basis(const ParamPoint& p, const OpticalConfig& cfg);

// 4x4 Hermitian operator on span{e1, e2, e3, e4}, stored blockwise.
struct ExtendedOperator {
  BlochOperator block_11_qubit;  // in-span part sourced by the Bloch motion
  BlochOperator block_11_extra;  // in-span part sourced by basis leakage
  Mat2 block_12 = Mat2::Zero();  // coupling to the derivative subspace
  Mat2 block_22 = Mat2::Zero();  // zero for the separation SLD
  ExtendedBasisData basis_data;

  Mat2c block_11() const;  // qubit + extra
  Mat4c full() const;      // Hermitian assembly
};

// Logarithmic derivative for the separation in the extended basis:
//   block_11 = Lyapunov solve sourced by g = d_s r + 2 nu (r3, 0, -r1)
//   block_12 = 2 C^T,  block_22 = 0.
ExtendedOperator sld_separation(const ParamPoint& p, const OpticalConfig& cfg);

// Same assembly from caller-supplied basis data; the validation suite uses
// this hook to demonstrate that a corrupted nu is caught by the residual
// checks.
ExtendedOperator sld_separation_with(const ParamPoint& p,
                                     const OpticalConfig& cfg,
                                     const ExtendedBasisData& basis_data);

}  // namespace cohres
