#include "cohres/oracle.hpp"

#include "cohres/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <sstream>

namespace cohres {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Cd = std::complex<double>;

// Expansion vectors and their s-derivatives for both sources.
struct ModePair {
  VectorXd psi, phi, dpsi, dphi;
};

ModePair mode_pair(const ParamPoint& p, const OpticalConfig& cfg, int order) {
  const std::array<double, 2> x = source_positions(p, cfg);
  ModePair mp;
  mp.psi = expand_psf(x[0], cfg.sigma, order).coeffs;
  mp.phi = expand_psf(x[1], cfg.sigma, order).coeffs;
  // x1 = -(1-alpha) s and x2 = alpha s move with these rates.
  mp.dpsi = expand_psf_derivative(x[0], cfg.sigma, order) *
            (-(1.0 - cfg.alpha));
  mp.dphi = expand_psf_derivative(x[1], cfg.sigma, order) * cfg.alpha;
  return mp;
}

MatrixXcd mixture(const VectorXd& u, const VectorXd& v, const ParamPoint& p,
                  double k) {
  // q |u><u| + (1-q) |v><v| + k gamma |u><v| + k conj(gamma) |v><u|
  const Cd gamma(p.gamma_r, p.gamma_i);
  MatrixXcd m = p.q * (u * u.transpose()).cast<Cd>();
  m += (1.0 - p.q) * (v * v.transpose()).cast<Cd>();
  m += k * gamma * (u * v.transpose()).cast<Cd>();
  m += k * std::conj(gamma) * (v * u.transpose()).cast<Cd>();
  return m;
}

}  // namespace

ModeExpansion expand_psf(double center_offset, double sigma, int order,
                         double tail_tol) {
  if (sigma <= 0.0) throw DomainError("expand_psf: sigma must be positive");
  if (order < 2) throw DomainError("expand_psf: order must be at least 2");
  ModeExpansion ex;
  ex.center = center_offset;
  ex.sigma = sigma;
  ex.order = order;
  ex.coeffs.resize(order);
  const double a = center_offset / (2.0 * sigma);
  ex.coeffs(0) = std::exp(-a * a / 2.0);
  for (int n = 1; n < order; ++n)
    ex.coeffs(n) = ex.coeffs(n - 1) * a / std::sqrt(double(n));
  ex.tail = std::max(0.0, 1.0 - ex.coeffs.squaredNorm());
  if (ex.tail > tail_tol) {
    std::ostringstream os;
    os << "mode truncation at order " << order << " loses weight " << ex.tail
       << " for offset " << center_offset << " (sigma " << sigma << ")";
    throw TruncationError(os.str(), ex.tail);
  }
  return ex;
}

VectorXd expand_psf_derivative(double center_offset, double sigma, int order) {
  const ModeExpansion ex = expand_psf(center_offset, sigma, order);
  const double a = center_offset / (2.0 * sigma);
  VectorXd d(order);
  // dc_n/da = sqrt(n) c_{n-1} - a c_n, then da/d(offset) = 1/(2 sigma).
  d(0) = -a * ex.coeffs(0);
  for (int n = 1; n < order; ++n)
    d(n) = std::sqrt(double(n)) * ex.coeffs(n - 1) - a * ex.coeffs(n);
  return d / (2.0 * sigma);
}

DenseState build_state(const ParamPoint& p, const OpticalConfig& cfg,
                       int order) {
  const ModelTerms t = model_terms(p, cfg);
  if (t.D <= 1e-12)
    throw DegenerateStateError("zero-intensity state in the oracle");
  const ModePair mp = mode_pair(p, cfg, order);
  DenseState st;
  st.rho = mixture(mp.psi, mp.phi, p, t.k) / t.D;
  st.nbar = cfg.delta * t.D;
  return st;
}

MatrixXcd state_derivative(const ParamPoint& p, const OpticalConfig& cfg,
                           Var which, int order) {
  const ModelTerms t = model_terms(p, cfg);
  if (t.D <= 1e-12)
    throw DegenerateStateError("zero-intensity state in the oracle");
  const ModePair mp = mode_pair(p, cfg, order);
  const Cd gamma(p.gamma_r, p.gamma_i);
  const MatrixXcd rho = mixture(mp.psi, mp.phi, p, t.k) / t.D;

  switch (which) {
    case Var::s: {
      MatrixXcd d =
          p.q * ((mp.dpsi * mp.psi.transpose()).cast<Cd>() +
                 (mp.psi * mp.dpsi.transpose()).cast<Cd>());
      d += (1.0 - p.q) * ((mp.dphi * mp.phi.transpose()).cast<Cd>() +
                          (mp.phi * mp.dphi.transpose()).cast<Cd>());
      d += t.k * gamma * ((mp.dpsi * mp.phi.transpose()).cast<Cd>() +
                          (mp.psi * mp.dphi.transpose()).cast<Cd>());
      d += t.k * std::conj(gamma) *
           ((mp.dphi * mp.psi.transpose()).cast<Cd>() +
            (mp.phi * mp.dpsi.transpose()).cast<Cd>());
      const double d_dot = 4.0 * t.beta * p.gamma_r * t.k;
      return d / t.D - rho * (d_dot / t.D);
    }
    case Var::q: {
      if (t.k < 1e-12)
        throw BoundaryError(
            "oracle state derivative in q diverges at the intensity boundary");
      const double k_q = (1.0 - 2.0 * p.q) / (2.0 * t.k);
      MatrixXcd d = (mp.psi * mp.psi.transpose()).cast<Cd>();
      d -= (mp.phi * mp.phi.transpose()).cast<Cd>();
      d += k_q * gamma * (mp.psi * mp.phi.transpose()).cast<Cd>();
      d += k_q * std::conj(gamma) * (mp.phi * mp.psi.transpose()).cast<Cd>();
      const double d_q = 2.0 * t.c * p.gamma_r * k_q;
      return d / t.D - rho * (d_q / t.D);
    }
    case Var::gamma_r: {
      MatrixXcd d = t.k * ((mp.psi * mp.phi.transpose()).cast<Cd>() +
                           (mp.phi * mp.psi.transpose()).cast<Cd>());
      const double d_g = 2.0 * t.c * t.k;
      return d / t.D - rho * (d_g / t.D);
    }
    case Var::gamma_i: {
      const Cd iu(0.0, 1.0);
      MatrixXcd d = t.k * iu * (mp.psi * mp.phi.transpose()).cast<Cd>();
      d -= t.k * iu * (mp.phi * mp.psi.transpose()).cast<Cd>();
      return d / t.D;  // D does not depend on gamma_i
    }
  }
  throw DomainError("unknown parameter");
}

MatrixXcd state_derivative_fd(const ParamPoint& p, const OpticalConfig& cfg,
                              Var which, double h, int order) {
  const double step = (which == Var::s) ? h * cfg.sigma : h;
  auto shifted = [&](double sign) {
    ParamPoint ps = p;
    switch (which) {
      case Var::s: ps.s += sign * step; break;
      case Var::q: ps.q += sign * step; break;
      case Var::gamma_r: ps.gamma_r += sign * step; break;
      case Var::gamma_i: ps.gamma_i += sign * step; break;
    }
    return build_state(ps, cfg, order).rho;
  };
  return (shifted(1.0) - shifted(-1.0)) / (2.0 * step);
}

MatrixXcd numeric_sld(const MatrixXcd& rho, const MatrixXcd& drho,
                      double kernel_tol) {
  if ((drho - drho.adjoint()).norm() > 1e-10 * std::max(1.0, drho.norm()))
    throw DomainError("numeric_sld: derivative must be Hermitian");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho);
  const VectorXd lam = es.eigenvalues();
  const MatrixXcd v = es.eigenvectors();
  const MatrixXcd a = v.adjoint() * drho * v;
  const double cut = kernel_tol * std::abs(rho.trace());
  MatrixXcd l = MatrixXcd::Zero(rho.rows(), rho.cols());
  for (int j = 0; j < lam.size(); ++j)
    for (int k = 0; k < lam.size(); ++k) {
      const double denom = lam(j) + lam(k);
      if (denom > cut) l(j, k) = 2.0 * a(j, k) / denom;
    }
  return v * l * v.adjoint();
}

namespace {

Mat4 fd_qfi_at(const ParamPoint& p, const OpticalConfig& cfg, int order,
               double h) {
  const DenseState st = build_state(p, cfg, order);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(st.rho);
  const VectorXd lam = es.eigenvalues();
  const MatrixXcd v = es.eigenvectors();
  const double cut = kOracleKernelTol * std::abs(st.rho.trace());

  std::array<MatrixXcd, 4> a;
  for (Var var : kAllVars)
    a[index(var)] =
        v.adjoint() * state_derivative_fd(p, cfg, var, h, order) * v;

  Mat4 f = Mat4::Zero();
  for (int i = 0; i < 4; ++i)
    for (int jj = i; jj < 4; ++jj) {
      double sum = 0.0;
      for (int m = 0; m < lam.size(); ++m)
        for (int n = 0; n < lam.size(); ++n) {
          const double denom = lam(m) + lam(n);
          if (denom > cut)
            sum += 2.0 *
                   (a[i](m, n) * std::conj(a[jj](m, n))).real() / denom;
        }
      f(i, jj) = sum;
      f(jj, i) = sum;
    }
  return f;
}

}  // namespace

BoundMatrix numeric_qfi(const ParamPoint& p, const OpticalConfig& cfg,
                        int order, double h) {
  if (h < 1e-7 || h > 1e-4)
    throw StepError("finite-difference step outside [1e-7, 1e-4]");
  const Mat4 f1 = fd_qfi_at(p, cfg, order, h);
  const Mat4 f2 = fd_qfi_at(p, cfg, order, h / 2.0);
  const Mat4 rich = (4.0 * f2 - f1) / 3.0;

  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double diag =
          std::sqrt(std::max(0.0, rich(i, i)) * std::max(0.0, rich(j, j)));
      const double scale =
          std::max({std::abs(rich(i, j)), diag, 1e-9});
      if (std::abs(f1(i, j) - f2(i, j)) / scale > 1e-4) {
        std::ostringstream os;
        os << "finite-difference QFI not step-converged at entry (" << i
           << "," << j << "): h=" << h << " gives " << f1(i, j) << ", h/2 "
           << f2(i, j);
        throw StepError(os.str());
      }
    }

  BoundMatrix out;
  out.kind = BoundKind::qfi_state;
  out.entries = rich;
  return out;
}

MatrixXd oracle_qubit_frame(const ParamPoint& p, const OpticalConfig& cfg,
                            int order) {
  const ModePair mp = mode_pair(p, cfg, order);
  const double dot = mp.psi.dot(mp.phi);
  MatrixXd frame(order, 2);
  frame.col(0) = (mp.psi - mp.phi) / std::sqrt(2.0 - 2.0 * dot);
  frame.col(1) = (mp.psi + mp.phi) / std::sqrt(2.0 + 2.0 * dot);
  return frame;
}

MatrixXd oracle_extended_frame(const ParamPoint& p, const OpticalConfig& cfg,
                               int order) {
  const ModePair mp = mode_pair(p, cfg, order);
  const double dot = mp.psi.dot(mp.phi);
  const double ddot = mp.dpsi.dot(mp.phi) + mp.psi.dot(mp.dphi);
  const double nm = std::sqrt(2.0 - 2.0 * dot);
  const double np = std::sqrt(2.0 + 2.0 * dot);

  const VectorXd e1 = (mp.psi - mp.phi) / nm;
  const VectorXd e2 = (mp.psi + mp.phi) / np;
  const VectorXd de1 =
      (mp.dpsi - mp.dphi) / nm - e1 * (-ddot / (nm * nm));
  const VectorXd de2 = (mp.dpsi + mp.dphi) / np - e2 * (ddot / (np * np));

  VectorXd g3 = de1 - e1 * e1.dot(de1) - e2 * e2.dot(de1);
  const double n3 = g3.norm();
  if (n3 <= 1e-13)
    throw NumericDegeneracyError(
        "oracle Gram-Schmidt: first derivative direction degenerate");
  const VectorXd e3 = g3 / n3;
  VectorXd g4 =
      de2 - e1 * e1.dot(de2) - e2 * e2.dot(de2) - e3 * e3.dot(de2);
  const double n4 = g4.norm();
  if (n4 <= 1e-13)
    throw NumericDegeneracyError(
        "oracle Gram-Schmidt: second derivative direction degenerate");

  MatrixXd frame(order, 4);
  frame.col(0) = e1;
  frame.col(1) = e2;
  frame.col(2) = e3;
  frame.col(3) = g4 / n4;
  return frame;
}

OracleOverlaps oracle_mode_overlaps(const ParamPoint& p,
                                    const OpticalConfig& cfg, int order) {
  const ModePair mp = mode_pair(p, cfg, order);
  const double dot = mp.psi.dot(mp.phi);
  const double ddot = mp.dpsi.dot(mp.phi) + mp.psi.dot(mp.dphi);
  const double nm = std::sqrt(2.0 - 2.0 * dot);
  const double np = std::sqrt(2.0 + 2.0 * dot);

  const VectorXd e1 = (mp.psi - mp.phi) / nm;
  const VectorXd e2 = (mp.psi + mp.phi) / np;
  const VectorXd de1 =
      (mp.dpsi - mp.dphi) / nm - e1 * (-ddot / (nm * nm));
  const VectorXd de2 = (mp.dpsi + mp.dphi) / np - e2 * (ddot / (np * np));

  OracleOverlaps ov;
  ov.omega1_sq = de1.dot(de1);
  ov.omega2_sq = de2.dot(de2);
  ov.mu = de1.dot(de2);
  ov.nu = e2.dot(de1);
  ov.psi_dphi = mp.psi.dot(mp.dphi);
  ov.dpsi_dphi = mp.dpsi.dot(mp.dphi);
  return ov;
}

Vec3 oracle_bloch_vector(const ParamPoint& p, const OpticalConfig& cfg,
                         int order) {
  const DenseState st = build_state(p, cfg, order);
  const MatrixXd frame = oracle_qubit_frame(p, cfg, order);
  const MatrixXcd rho2 =
      frame.cast<Cd>().adjoint() * st.rho * frame.cast<Cd>();
  return Vec3(2.0 * rho2(0, 1).real(), -2.0 * rho2(0, 1).imag(),
              (rho2(0, 0) - rho2(1, 1)).real());
}

}  // namespace cohres
