#pragma once

#include <Eigen/Dense>
#include <array>
#include <string_view>

namespace cohres {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat2c = Eigen::Matrix2cd;
using Mat4c = Eigen::Matrix4cd;

// Estimation target for the two-source problem.
//   s        source separation (same length unit as the PSF width)
//   q        relative intensity of source 1, in [0,1]
//   gamma_r  real part of the mutual coherence factor
//   gamma_i  imaginary part of the mutual coherence factor
struct ParamPoint {
  double s = 1.0;
  double q = 0.5;
  double gamma_r = 0.0;
  double gamma_i = 0.0;

  double coherence_sq() const { return gamma_r * gamma_r + gamma_i * gamma_i; }
};

// Imaging-system configuration.
//   sigma  Gaussian PSF standard deviation
//   delta  intensity scale: mean photon number per coherence slot for
//          incoherent sources (0 < delta << 1)
//   alpha  reference-frame weight: the coordinate origin sits at
//          x0 = alpha*x1 + (1-alpha)*x2, so the sources are at
//          x1 = -(1-alpha)*s and x2 = alpha*s.  alpha = 1/2 is the
//          geometric midpoint, alpha = q the intensity centroid.
struct OpticalConfig {
  double sigma = 1.0;
  double delta = 1e-2;
  double alpha = 0.5;
};

// Orthonormal two-mode bases spanning the two PSFs.
//   geometric_e  antisymmetric/symmetric combination pair (e1, e2);
//                e1 is the antisymmetric (dark) mode
//   centroid_v   intensity-weighted pair (v1, v2) adapted to q;
//                v1 is the bright mode centred at the intensity centroid
enum class BasisTag { geometric_e, centroid_v };

// Parameter index; doubles as row/column index of 4x4 bound matrices.
enum class Var : int { s = 0, q = 1, gamma_r = 2, gamma_i = 3 };

inline constexpr int index(Var v) { return static_cast<int>(v); }

inline constexpr std::string_view var_name(Var v) {
  switch (v) {
    case Var::s: return "s";
    case Var::q: return "q";
    case Var::gamma_r: return "gamma_r";
    case Var::gamma_i: return "gamma_i";
  }
  return "?";
}

inline constexpr std::array<Var, 4> kAllVars = {Var::s, Var::q, Var::gamma_r,
                                                Var::gamma_i};

// Bloch description of the single-photon qubit state in a tagged basis,
// with the overlap and mean photon number cached alongside.
struct BlochState {
  Vec3 r_vec = Vec3::Zero();
  BasisTag basis_tag = BasisTag::geometric_e;
  double c = 0.0;
  double nbar = 0.0;
};

}  // namespace cohres
