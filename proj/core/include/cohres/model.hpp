#pragma once

#include "cohres/types.hpp"

#include <array>

namespace cohres {

// Gaussian PSF overlap c = exp(-s^2 / (8 sigma^2)).
double overlap_c(double s, double sigma);

// Frequently shared scalar kernel, evaluated once with cancellation-safe
// complements (1-c and 1-c^2 via expm1).
struct ModelTerms {
  double c = 0.0;            // PSF overlap
  double one_minus_c = 0.0;  // 1 - c
  double one_minus_c2 = 0.0; // 1 - c^2
  double S = 0.0;            // sqrt(1 - c^2)
  double k = 0.0;            // sqrt(q (1-q))
  double D = 0.0;            // 1 + 2 c gamma_r k  (intensity normalizer)
  double beta = 0.0;         // -s c / (8 sigma^2); dc/ds = 2 beta
};

ModelTerms model_terms(const ParamPoint& p, const OpticalConfig& cfg);

// Throws DomainError / ConfigError when (p, cfg) leave the model's domain.
void check_domain(const ParamPoint& p, const OpticalConfig& cfg);

// Mean photon number per coherence slot, nbar = delta (1 + 2 c gamma_r k).
double mean_photon_number(const ParamPoint& p, const OpticalConfig& cfg);

// Gradient of nbar with respect to (s, q, gamma_r, gamma_i).
Vec4 mean_photon_gradient(const ParamPoint& p, const OpticalConfig& cfg);

// Source coordinates {x1, x2} in the alpha frame: x1 = -(1-alpha) s, x2 = alpha s.
std::array<double, 2> source_positions(const ParamPoint& p,
                                       const OpticalConfig& cfg);

// Bloch vector of the normalized single-photon qubit in the geometric_e basis:
//   r = -(1/D) ((1-2q) S,  2 gamma_i k S,  c + 2 gamma_r k).
BlochState bloch_vector(const ParamPoint& p, const OpticalConfig& cfg);

// Partial derivative of the geometric_e Bloch vector with respect to one
// parameter.  Throws BoundaryError for Var::q at q in {0,1} unless gamma = 0.
Vec3 bloch_vector_derivative(const ParamPoint& p, const OpticalConfig& cfg,
                             Var which);

// Purity r = |r_vec| together with companions used by the bound modules:
//   deficit    1 - r^2, evaluated in closed form without cancellation:
//              4 k^2 (1-c^2) (1 - gamma_r^2 - gamma_i^2) / D^2
//   r_inc_sq   purity^2 of the incoherent mixture, 1 - 4 q(1-q)(1-c^2)
//   r_inf_sq   limit of r^2 as s -> infinity, 1 + 4 q(1-q)(|gamma|^2 - 1)
struct PurityInfo {
  double r = 0.0;
  double deficit = 0.0;
  double r_inc_sq = 0.0;
  double r_inf_sq = 0.0;
};

PurityInfo purity(const ParamPoint& p, const OpticalConfig& cfg);

// Orthonormal basis vectors expanded over the raw PSF kets {psi, phi}:
// column j holds the coefficients of basis vector j.  The columns are
// orthonormal under the Gram matrix [[1, c], [c, 1]].
Mat2 basis_coefficients(const ParamPoint& p, const OpticalConfig& cfg,
                        BasisTag which);

// Derivative of basis_coefficients with respect to the overlap c
// (chain rule: d/ds = 2 beta d/dc).
Mat2 basis_coefficients_dc(const ParamPoint& p, const OpticalConfig& cfg,
                           BasisTag which);

// Gram matrix times the basis columns, i.e. column j = G b_j, written in a
// cancellation-safe closed form (entries stay well conditioned as s -> 0,
// unlike the raw product with the 1/sqrt(1-c) column growth).
Mat2 gram_times_basis(const ParamPoint& p, const OpticalConfig& cfg,
                      BasisTag which);

// s-derivative of gram_times_basis at fixed q.
Mat2 gram_times_basis_ds(const ParamPoint& p, const OpticalConfig& cfg,
                         BasisTag which);

// Density matrix (I + r.sigma)/2 for a Bloch vector.
Mat2c qubit_density(const BlochState& state);
Mat2c qubit_density(const ParamPoint& p, const OpticalConfig& cfg);

// 2x2 state family obtained by tracking the matrix elements of the
// single-photon state in the (s-dependent) basis `which`; returns the state
// and its entrywise s-derivative.  This is the "qubit model" family whose
// Fisher information ignores any leakage into the derivative subspace.
void tracked_qubit_family(const ParamPoint& p, const OpticalConfig& cfg,
                          BasisTag which, Mat2c& rho, Mat2c& drho_ds);

// Basis-change matrix O_kj = <e_k | v_j> between the two orthonormal bases.
Mat2 basis_overlap_e_v(const ParamPoint& p, const OpticalConfig& cfg);

}  // namespace cohres
