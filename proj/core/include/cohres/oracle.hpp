#pragma once

#include "cohres/bounds.hpp"
#include "cohres/types.hpp"

#include <Eigen/Dense>

namespace cohres {

// Brute-force verification layer: truncated Hermite-Gauss representation of
// the states, numeric Lyapunov solves, and finite-difference information
// matrices.  Everything here is independent of the closed forms it checks.

inline constexpr int kOracleDefaultOrder = 40;
inline constexpr double kOracleKernelTol = 1e-12;

// A displaced Gaussian expanded over Hermite-Gauss modes at the frame origin:
// coeff_n = exp(-a^2/2) a^n / sqrt(n!) with a = offset/(2 sigma).
struct ModeExpansion {
  double center = 0.0;
  double sigma = 1.0;
  int order = kOracleDefaultOrder;
  Eigen::VectorXd coeffs;
  double tail = 0.0;  // 1 - sum coeffs^2 lost to truncation
};

// Throws TruncationError when the missing tail exceeds `tail_tol`.
ModeExpansion expand_psf(double center_offset, double sigma,
                         int order = kOracleDefaultOrder,
                         double tail_tol = 1e-9);

// d(coeffs)/d(center_offset) of the expansion above.
Eigen::VectorXd expand_psf_derivative(double center_offset, double sigma,
                                      int order = kOracleDefaultOrder);

// Normalized single-photon state in the truncated mode basis.
struct DenseState {
  Eigen::MatrixXcd rho;
  double nbar = 0.0;
};

DenseState build_state(const ParamPoint& p, const OpticalConfig& cfg,
                       int order = kOracleDefaultOrder);

// Parameter derivative of the normalized state via the product rule on the
// expansion coefficients (exact; no finite differences).
Eigen::MatrixXcd state_derivative(const ParamPoint& p, const OpticalConfig& cfg,
                                  Var which, int order = kOracleDefaultOrder);

// Symmetric-difference derivative used by the finite-difference information
// matrix; step h in the parameter's natural units.
Eigen::MatrixXcd state_derivative_fd(const ParamPoint& p,
                                     const OpticalConfig& cfg, Var which,
                                     double h, int order = kOracleDefaultOrder);

// Numeric logarithmic derivative: in rho's eigenbasis
//   L_jk = 2 <j|drho|k> / (lambda_j + lambda_k),
// kernel pairs (sum below kernel_tol * trace) dropped.
Eigen::MatrixXcd numeric_sld(const Eigen::MatrixXcd& rho,
                             const Eigen::MatrixXcd& drho,
                             double kernel_tol = kOracleKernelTol);

// Finite-difference quantum Fisher information matrix with mandatory
// Richardson verification; h must lie in [1e-7, 1e-4] natural units.
BoundMatrix numeric_qfi(const ParamPoint& p, const OpticalConfig& cfg,
                        int order = kOracleDefaultOrder, double h = 1e-5);

// Orthonormal in-span frame [e1 e2] as mode-basis column vectors.
Eigen::MatrixXd oracle_qubit_frame(const ParamPoint& p,
                                   const OpticalConfig& cfg,
                                   int order = kOracleDefaultOrder);

// Extended frame [e1 e2 e3 e4] including the numerically Gram-Schmidt
// orthonormalized derivative subspace.
Eigen::MatrixXd oracle_extended_frame(const ParamPoint& p,
                                      const OpticalConfig& cfg,
                                      int order = kOracleDefaultOrder);

// Numeric values of the derivative-subspace inner products, for cross-checking
// the closed-form extended-basis scalars.
struct OracleOverlaps {
  double omega1_sq = 0.0;  // <d_s e1 | d_s e1>
  double omega2_sq = 0.0;  // <d_s e2 | d_s e2>
  double mu = 0.0;         // <d_s e1 | d_s e2>
  double nu = 0.0;         // <e2 | d_s e1>
  double psi_dphi = 0.0;   // <psi | d_s phi>
  double dpsi_dphi = 0.0;  // <d_s psi | d_s phi>
};

OracleOverlaps oracle_mode_overlaps(const ParamPoint& p,
                                    const OpticalConfig& cfg,
                                    int order = kOracleDefaultOrder);

// Bloch vector extracted from the dense state through the oracle frame.
Vec3 oracle_bloch_vector(const ParamPoint& p, const OpticalConfig& cfg,
                         int order = kOracleDefaultOrder);

}  // namespace cohres
