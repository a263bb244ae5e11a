#include "cohres/validate.hpp"

#include "cohres/bounds.hpp"
#include "cohres/csv.hpp"
#include "cohres/errors.hpp"
#include "cohres/model.hpp"
#include "cohres/oracle.hpp"
#include "cohres/sld.hpp"
#include "cohres/detail/numeric.hpp"

#include <cmath>
#include <complex>
#include <ostream>
#include <sstream>

namespace cohres {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Cd = std::complex<double>;

constexpr double kGridTol = 1e-6;
constexpr double kScalarResidualTol = 1e-10;
constexpr double kSeparationResidualTol = 1e-8;
constexpr double kPurityResidualTol = 1e-12;
constexpr double kAssemblyTol = 1e-12;
constexpr double kSlopeTol = 0.05;

struct GridPoint {
  ParamPoint p;
  OpticalConfig cfg;
};

std::string point_label(const ParamPoint& p, const OpticalConfig& cfg) {
  std::ostringstream os;
  os << "s/sigma=" << p.s / cfg.sigma << " q=" << p.q << " gr=" << p.gamma_r
     << " gi=" << p.gamma_i << " alpha=" << cfg.alpha;
  return os.str();
}

std::vector<GridPoint> validation_grid() {
  const double s_over[] = {0.1, 1.0, 2.0};
  const double qs[] = {0.25, 0.5, 0.75};
  const double grs[] = {-0.5, 0.0, 0.5};
  const double gis[] = {0.0, 0.2, 0.4};
  std::vector<GridPoint> pts;
  for (double so : s_over)
    for (double q : qs)
      for (double gr : grs)
        for (double gi : gis) {
          ParamPoint p;
          p.s = so;
          p.q = q;
          p.gamma_r = gr;
          p.gamma_i = gi;
          if (p.coherence_sq() > 1.0) continue;  // none on this grid
          for (int frame = 0; frame < 2; ++frame) {
            OpticalConfig cfg;
            cfg.alpha = frame == 0 ? 0.5 : q;
            pts.push_back({p, cfg});
          }
        }
  return pts;
}

ValidationRow make_row(std::string suite, std::string point,
                       std::string quantity, double closed, double oracle,
                       double error, double tol, std::string note = "") {
  ValidationRow row;
  row.suite = std::move(suite);
  row.point = std::move(point);
  row.quantity = std::move(quantity);
  row.closed = closed;
  row.oracle = oracle;
  row.error = error;
  row.tol = tol;
  row.pass = error <= tol;
  row.note = std::move(note);
  return row;
}

ValidationRow error_row(std::string suite, std::string point,
                        const std::exception& e) {
  ValidationRow row;
  row.suite = std::move(suite);
  row.point = std::move(point);
  row.quantity = "exception";
  row.tol = 0.0;
  row.error = 1.0;
  row.pass = false;
  row.note = e.what();
  return row;
}

const char* entry_name(int i) {
  static const char* names[] = {"s", "q", "gr", "gi"};
  return names[i];
}

std::vector<ValidationRow> grid_rows_at(const GridPoint& gp) {
  std::vector<ValidationRow> rows;
  const std::string label = point_label(gp.p, gp.cfg);
  try {
    const BoundMatrix closed = qfi_state_matrix(gp.p, gp.cfg);
    const BoundMatrix oracle = numeric_qfi(gp.p, gp.cfg);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        const double a = closed.entries(i, j);
        const double b = oracle.entries(i, j);
        const double diag = std::sqrt(
            std::fabs(closed.entries(i, i) * closed.entries(j, j)));
        const double err = detail::relative_error(a, b, diag);
        std::string quantity =
            std::string("F_") + entry_name(i) + entry_name(j);
        rows.push_back(
            make_row("grid", label, std::move(quantity), a, b, err, kGridTol));
      }
  } catch (const std::exception& e) {
    rows.push_back(error_row("grid", label, e));
  }
  return rows;
}

// Lifts a 2x2 span-basis operator into the truncated mode space.
MatrixXcd embed2(const MatrixXd& frame, const Mat2c& op) {
  return frame.cast<Cd>() * op * frame.cast<Cd>().adjoint();
}

MatrixXcd embed4(const MatrixXd& frame, const Mat4c& op) {
  return frame.cast<Cd>() * op * frame.cast<Cd>().adjoint();
}

double lyapunov_residual(const MatrixXcd& rho, const MatrixXcd& l,
                         const MatrixXcd& drho) {
  return (0.5 * (rho * l + l * rho) - drho).norm();
}

std::vector<ValidationRow> sld_rows_at(const GridPoint& gp) {
  std::vector<ValidationRow> rows;
  const std::string label = point_label(gp.p, gp.cfg);
  try {
    const DenseState st = build_state(gp.p, gp.cfg);
    const MatrixXd frame2 = oracle_qubit_frame(gp.p, gp.cfg);
    const MatrixXd frame4 = oracle_extended_frame(gp.p, gp.cfg);

    for (Var v : {Var::q, Var::gamma_r, Var::gamma_i}) {
      const MatrixXcd l = embed2(frame2, sld_scalar(gp.p, gp.cfg, v).matrix());
      const MatrixXcd drho = state_derivative(gp.p, gp.cfg, v);
      const double res = lyapunov_residual(st.rho, l, drho);
      rows.push_back(make_row("sld", label,
                              "residual_" + std::string(var_name(v)), res, 0.0,
                              res, kScalarResidualTol));
    }

    const ExtendedOperator op = sld_separation(gp.p, gp.cfg);
    const MatrixXcd l4 = embed4(frame4, op.full());
    const MatrixXcd drho_s = state_derivative(gp.p, gp.cfg, Var::s);
    const double res_s = lyapunov_residual(st.rho, l4, drho_s);
    rows.push_back(
        make_row("sld", label, "residual_s", res_s, 0.0, res_s,
                 kSeparationResidualTol));

    // The quadratic form of the assembled 4x4 operator must reproduce the
    // closed-form ss information entry.
    const MatrixXcd f4 = frame4.cast<Cd>();
    const Eigen::Matrix4cd rho_ext = f4.adjoint() * st.rho * f4;
    const Eigen::Matrix4cd l_ext = op.full();
    const double f_ss_op = (rho_ext * l_ext * l_ext).trace().real();
    const double f_ss = qfi_ss_entry(gp.p, gp.cfg);
    rows.push_back(make_row("sld", label, "assembly_F_ss", f_ss_op, f_ss,
                            detail::relative_error(f_ss_op, f_ss),
                            kAssemblyTol));

    // Purity SLD in Bloch space against its defining derivative.
    const Vec3 r_vec = bloch_vector(gp.p, gp.cfg).r_vec;
    const double r = r_vec.norm();
    const Vec3 r_dir = r_vec / r;
    const Mat2c rho_qb = qubit_density(gp.p, gp.cfg);
    const Mat2c lp = sld_purity(r, r_dir).matrix();
    BlochOperator target;
    target.lam0 = 0.0;
    target.lam_vec = 0.5 * r_dir;
    const double res_p =
        (0.5 * (rho_qb * lp + lp * rho_qb) - target.matrix()).norm();
    rows.push_back(make_row("sld", label, "residual_purity", res_p, 0.0, res_p,
                            kPurityResidualTol));
  } catch (const std::exception& e) {
    rows.push_back(error_row("sld", label, e));
  }
  return rows;
}

void commutator_rows(std::vector<ValidationRow>& rows) {
  ParamPoint p;
  p.q = 0.3;
  p.gamma_r = 0.25;
  p.gamma_i = 0.15;
  OpticalConfig cfg;
  cfg.alpha = 0.4;
  const std::vector<double> ss = detail::logspace(1e-3, 1e-2, 5);

  struct PairSpec {
    int a, b;       // -1 encodes the separation operator
    double norm_slope;
    double trace_slope;
  };
  const std::vector<PairSpec> pairs = {
      {-1, index(Var::q), 0.0, 1.0},       {-1, index(Var::gamma_r), 0.0, 1.0},
      {-1, index(Var::gamma_i), 0.0, 1.0}, {index(Var::q), index(Var::gamma_r), 1.0, 2.0},
      {index(Var::q), index(Var::gamma_i), 1.0, 2.0},
      {index(Var::gamma_r), index(Var::gamma_i), 1.0, 2.0}};

  std::vector<std::array<double, 12>> samples(ss.size());
  for (std::size_t is = 0; is < ss.size(); ++is) {
    ParamPoint ps = p;
    ps.s = ss[is] * cfg.sigma;
    std::array<Mat4c, 4> ops;
    for (Var v : {Var::q, Var::gamma_r, Var::gamma_i}) {
      Mat4c m = Mat4c::Zero();
      m.topLeftCorner<2, 2>() = sld_scalar(ps, cfg, v).matrix();
      ops[static_cast<std::size_t>(index(v))] = m;
    }
    const Mat4c l_s = sld_separation(ps, cfg).full();
    Mat4c rho_ext = Mat4c::Zero();
    rho_ext.topLeftCorner<2, 2>() = qubit_density(ps, cfg);

    for (std::size_t ip = 0; ip < pairs.size(); ++ip) {
      const Mat4c& a =
          pairs[ip].a < 0 ? l_s : ops[static_cast<std::size_t>(pairs[ip].a)];
      const Mat4c& b = ops[static_cast<std::size_t>(pairs[ip].b)];
      const Mat4c comm = a * b - b * a;
      samples[is][2 * ip] = comm.norm();
      samples[is][2 * ip + 1] = std::abs((rho_ext * comm).trace());
    }
  }

  auto name_of = [](int idx) {
    return idx < 0 ? std::string("s") : std::string(var_name(kAllVars[idx]));
  };
  const std::string label = point_label(p, cfg) + " s/sigma in [1e-3 .. 1e-2]";
  for (std::size_t ip = 0; ip < pairs.size(); ++ip) {
    std::vector<double> norms(ss.size()), traces(ss.size());
    for (std::size_t is = 0; is < ss.size(); ++is) {
      norms[is] = samples[is][2 * ip];
      traces[is] = samples[is][2 * ip + 1];
    }
    const std::string pair_name =
        "[" + name_of(pairs[ip].a) + "," + name_of(pairs[ip].b) + "]";
    const double sn = detail::loglog_slope(ss, norms);
    rows.push_back(make_row("commutators", label, "norm_slope " + pair_name,
                            sn, pairs[ip].norm_slope,
                            std::fabs(sn - pairs[ip].norm_slope), kSlopeTol));
    const double st = detail::loglog_slope(ss, traces);
    rows.push_back(make_row("commutators", label, "trace_slope " + pair_name,
                            st, pairs[ip].trace_slope,
                            std::fabs(st - pairs[ip].trace_slope), kSlopeTol));
  }
}

void fault_rows(std::vector<ValidationRow>& rows) {
  ParamPoint p;
  p.s = 0.5;
  p.q = 0.75;
  p.gamma_r = 0.5;
  OpticalConfig cfg;
  cfg.alpha = p.q;  // nu vanishes in the geometric frame; use the centroid one
  const std::string label = point_label(p, cfg);

  const DenseState st = build_state(p, cfg);
  const MatrixXd frame4 = oracle_extended_frame(p, cfg);
  const MatrixXcd drho_s = state_derivative(p, cfg, Var::s);

  const double res_good = lyapunov_residual(
      st.rho, embed4(frame4, sld_separation(p, cfg).full()), drho_s);
  rows.push_back(make_row("fault", label, "residual_s (reference)", res_good,
                          0.0, res_good, kSeparationResidualTol));

  ExtendedBasisData eb = extended_basis(p, cfg);
  eb.nu = -eb.nu;
  const double res_bad = lyapunov_residual(
      st.rho, embed4(frame4, sld_separation_with(p, cfg, eb).full()), drho_s);
  rows.push_back(make_row("fault", label, "residual_s (nu sign flipped)",
                          res_bad, 0.0, res_bad, kSeparationResidualTol,
                          "negative control: expected to fail"));
}

}  // namespace

bool ValidationReport::all_pass() const {
  for (const ValidationRow& r : rows)
    if (!r.pass) return false;
  return true;
}

std::size_t ValidationReport::failure_count() const {
  std::size_t n = 0;
  for (const ValidationRow& r : rows)
    if (!r.pass) ++n;
  return n;
}

ValidationReport run_validate(const std::string& preset) {
  ValidationReport report;
  report.preset = preset;
  const bool all = preset == "all";
  if (!all && preset != "grid" && preset != "sld" && preset != "commutators" &&
      preset != "fault-nu-flip")
    throw DomainError("unknown validation preset: " + preset);

  const std::vector<GridPoint> grid = validation_grid();
  if (all || preset == "grid") {
    std::vector<std::vector<ValidationRow>> slots(grid.size());
    detail::parallel_for(grid.size(),
                         [&](std::size_t i) { slots[i] = grid_rows_at(grid[i]); });
    for (auto& s : slots)
      report.rows.insert(report.rows.end(), s.begin(), s.end());
  }
  if (all || preset == "sld") {
    std::vector<std::vector<ValidationRow>> slots(grid.size());
    detail::parallel_for(grid.size(),
                         [&](std::size_t i) { slots[i] = sld_rows_at(grid[i]); });
    for (auto& s : slots)
      report.rows.insert(report.rows.end(), s.begin(), s.end());
  }
  if (all || preset == "commutators") commutator_rows(report.rows);
  if (preset == "fault-nu-flip") fault_rows(report.rows);
  return report;
}

void write_validation_csv(const ValidationReport& report, std::ostream& os) {
  std::vector<std::pair<std::string, std::string>> meta = {
      {"tool", std::string(kToolVersion)},
      {"preset", report.preset},
      {"rows", std::to_string(report.rows.size())},
      {"failures", std::to_string(report.failure_count())}};
  const std::vector<std::string> cols = {"suite",  "point", "quantity",
                                         "closed", "oracle", "error",
                                         "tol",    "pass",  "note"};
  std::vector<std::vector<std::string>> rows;
  rows.reserve(report.rows.size());
  for (const ValidationRow& r : report.rows)
    rows.push_back({r.suite, r.point, r.quantity, format_double(r.closed),
                    format_double(r.oracle), format_double(r.error),
                    format_double(r.tol), r.pass ? "1" : "0", r.note});
  write_csv(os, meta, cols, rows);
}

}  // namespace cohres
