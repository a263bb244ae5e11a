#pragma once

#include "cohres/sld.hpp"
#include "cohres/types.hpp"

#include <optional>
#include <string_view>

namespace cohres {

enum class BoundKind {
  qfi_state,
  prior_fi,
  van_trees_info,
  qubit_approx,
  indirect,
};

std::string_view bound_kind_name(BoundKind kind);

// 4x4 symmetric information/bound matrix over theta = (s, q, gamma_r, gamma_i).
struct BoundMatrix {
  Mat4 entries = Mat4::Zero();
  BoundKind kind = BoundKind::qfi_state;

  double operator()(Var i, Var j) const { return entries(index(i), index(j)); }
};

// Quantum Fisher information matrix of the normalized single-photon state.
// Entries combine the in-span Bloch metric with the derivative-subspace
// contribution for the separation row:
//   F_ij = g_i.g_j + h_i h_j / (1 - r^2),  g_s = d_s r + 2 nu (r3, 0, -r1),
//   F_ss += 2(1+r3)(omega1^2-nu^2) + 2(1-r3)(omega2^2-nu^2) + 4 r1 mu.
BoundMatrix qfi_state_matrix(const ParamPoint& p, const OpticalConfig& cfg);

// ss entry alone; remains valid for pure states (|gamma| = 1 or q in {0,1})
// where the full matrix is singular: the radial term h^2/(1-r^2) vanishes
// identically along pure families and is dropped below deficit ~ 1e-14.
double qfi_ss_entry(const ParamPoint& p, const OpticalConfig& cfg);

// Derivative-subspace part of the ss entry (the "extra" contribution X).
double qfi_ss_extra(const ParamPoint& p, const OpticalConfig& cfg);

// In-span ("qubit") ss entry in a chosen basis: the Fisher information of the
// tracked 2x2 matrix family of that basis.
double qfi_ss_qubit_entry(const ParamPoint& p, const OpticalConfig& cfg,
                          BasisTag basis);

// Classical Fisher information of the photon-arrival prior nbar(theta):
//   F_jk = (d_j nbar)(d_k nbar) / (nbar (1 - nbar)),  rank <= 1.
BoundMatrix prior_fisher(const ParamPoint& p, const OpticalConfig& cfg);

// Bayesian information matrix whose inverse lower-bounds the mean squared
// error: nbar * qfi_state_matrix + prior_fisher.
BoundMatrix van_trees_info(const ParamPoint& p, const OpticalConfig& cfg);

// ss diagonal of van_trees_info, evaluated through the pure-safe ss path so
// boundary parameters (|gamma| = 1, q -> 0/1) remain computable.
double van_trees_ss(const ParamPoint& p, const OpticalConfig& cfg);

// van_trees_info with the separation row/column replaced by the qubit-model
// values of the requested basis (no derivative-subspace contribution).
BoundMatrix qubit_approx_info(const ParamPoint& p, const OpticalConfig& cfg,
                              BasisTag basis);

// QFI error induced by misaligning the reference frame to alpha = q + eps,
// together with the order of the error fitted over log-spaced eps values.
struct MisalignmentScaling {
  double delta_qfi = 0.0;    // |F_ss(alpha=q+eps) - F_ss(alpha=q)| at eps
  double fitted_order = 0.0; // log-log slope over [eps_lo, eps_hi]
};

MisalignmentScaling centroid_misalignment_error(const ParamPoint& p,
                                                const OpticalConfig& cfg,
                                                double eps,
                                                double eps_lo = 1e-4,
                                                double eps_hi = 1e-2);

// Forward Jacobian d(r, q, gamma_r, gamma_i)/d(s, q, gamma_r, gamma_i):
// identity except the first row, which is the gradient of the purity.
Mat4 purity_chart_jacobian(const ParamPoint& p, const OpticalConfig& cfg);

// Inverse direction d(theta)/d(r, q, gamma_r, gamma_i), with the s-row from
// implicit differentiation ds/dr = 1/(dr/ds).
Mat4 purity_chart_jacobian_inverse(const ParamPoint& p,
                                   const OpticalConfig& cfg);

// Information matrix of the indirect route that estimates the separation
// through the purity, plus the bijectivity diagnosis of r(s).
struct IndirectResult {
  BoundMatrix bound;
  bool bijective = true;
  std::optional<double> s0;  // stationary separation when gamma_r < 0
  double r_inf = 0.0;        // purity limit as s -> infinity
};

// Throws NonBijectiveError for gamma_r < 0 unless the caller asserts that the
// operating point satisfies r > r_inf (resolving the two-branch ambiguity).
IndirectResult indirect_info(const ParamPoint& p, const OpticalConfig& cfg,
                             bool assert_r_above_r_inf = false);

// Difference (direct - indirect) of the ss information entries in the form
// nbar (|g_perp|^2 + X): positive by construction and free of cancellation.
double indirect_gap_ss(const ParamPoint& p, const OpticalConfig& cfg);

// Moore-Penrose pseudo-inverse of an information matrix: the matrix
// mean-squared-error bound, with rank-deficient directions zeroed.
Mat4 bmse_bound(const BoundMatrix& info, double rel_tol = 1e-12);

// Inverts r -> s by bracketed bisection on s in [1e-6 sigma, 40 sigma].
double separation_from_purity(double r_target, const ParamPoint& p_template,
                              const OpticalConfig& cfg, double tol = 1e-12);

}  // namespace cohres
