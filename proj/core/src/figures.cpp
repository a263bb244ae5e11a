#include "cohres/figures.hpp"

#include "cohres/bounds.hpp"
#include "cohres/csv.hpp"
#include "cohres/errors.hpp"
#include "cohres/measurement.hpp"
#include "cohres/oracle.hpp"
#include "cohres/detail/numeric.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace cohres {

namespace {

struct FigureContext {
  OpticalConfig cfg;
  int points = 0;             // 0: per-figure default
  double s_over_sigma = 0.0;  // 0: per-figure default
  bool gamma_override = false;
  double gamma_r = 0.0;
};

FigureContext make_context(const std::map<std::string, double>& overrides) {
  FigureContext ctx;
  for (const auto& [key, value] : overrides) {
    if (key == "delta") ctx.cfg.delta = value;
    else if (key == "sigma") ctx.cfg.sigma = value;
    else if (key == "points") ctx.points = static_cast<int>(value);
    else if (key == "s_over_sigma") ctx.s_over_sigma = value;
    else if (key == "gamma_r") {
      ctx.gamma_override = true;
      ctx.gamma_r = value;
    } else {
      throw DomainError("unknown figure override '" + key + "'");
    }
  }
  return ctx;
}

std::string fmt(double v) { return format_double(v); }

std::string gamma_label(double g) {
  std::ostringstream os;
  os << "gr" << g;
  return os.str();
}

void base_metadata(FigureDataset& ds, const OpticalConfig& cfg) {
  ds.metadata.emplace_back("tool", kToolVersion);
  ds.metadata.emplace_back("figure", ds.id);
  ds.metadata.emplace_back("sigma", fmt(cfg.sigma));
  ds.metadata.emplace_back("delta", fmt(cfg.delta));
  ds.metadata.emplace_back("info_unit", "delta/(4 sigma^2)");
}

// Fills per-row cells in parallel, keeping row order deterministic.
template <typename Fn>
void fill_rows(FigureDataset& ds, std::size_t n, Fn&& fn) {
  std::vector<std::vector<std::string>> rows(n);
  detail::parallel_for(n, [&](std::size_t i) { rows[i] = fn(i); });
  for (auto& r : rows) ds.rows.push_back(std::move(r));
}

FigureDataset figure1(const FigureContext& ctx) {
  FigureDataset ds;
  ds.id = "fig1";
  OpticalConfig cfg = ctx.cfg;
  cfg.alpha = 0.5;
  const int n = ctx.points > 0 ? ctx.points : 60;
  const std::vector<double> gammas =
      ctx.gamma_override ? std::vector<double>{ctx.gamma_r}
                         : std::vector<double>{-0.9, -0.5, 0.0, 0.5, 0.9};
  const std::vector<double> svals =
      detail::logspace(1e-2 * cfg.sigma, 6.0 * cfg.sigma, n);
  const double unit = cfg.delta / (4.0 * cfg.sigma * cfg.sigma);

  ds.columns = {"s_over_sigma"};
  const char* vars[] = {"ss", "qq", "grgr", "gigi"};
  for (double g : gammas)
    for (const char* v : vars) {
      ds.columns.push_back("quantum_" + std::string(v) + "_" + gamma_label(g));
      ds.columns.push_back("classical_" + std::string(v) + "_" +
                           gamma_label(g));
    }
  ds.columns.push_back("note");

  base_metadata(ds, cfg);
  ds.metadata.emplace_back("frame", "geometric (alpha=1/2)");
  ds.metadata.emplace_back("q", "0.5");
  ds.metadata.emplace_back(
      "content",
      "Bayesian information diagonals split into quantum (nbar*QFI) and "
      "classical (arrival prior) parts, in info_unit");

  fill_rows(ds, svals.size(), [&](std::size_t i) {
    std::vector<std::string> row;
    row.push_back(fmt(svals[i] / cfg.sigma));
    for (double g : gammas) {
      ParamPoint p;
      p.s = svals[i];
      p.q = 0.5;
      p.gamma_r = g;
      const double nbar = mean_photon_number(p, cfg);
      const BoundMatrix qfi = qfi_state_matrix(p, cfg);
      const BoundMatrix prior = prior_fisher(p, cfg);
      for (int d = 0; d < 4; ++d) {
        row.push_back(fmt(nbar * qfi.entries(d, d) / unit));
        row.push_back(fmt(prior.entries(d, d) / unit));
      }
    }
    row.emplace_back();
    return row;
  });
  return ds;
}

FigureDataset figure2(const FigureContext& ctx) {
  FigureDataset ds;
  ds.id = "fig2";
  OpticalConfig cfg = ctx.cfg;
  cfg.alpha = 0.5;
  const int n = ctx.points > 0 ? ctx.points : 99;
  const double s =
      (ctx.s_over_sigma > 0.0 ? ctx.s_over_sigma : 1e-3) * cfg.sigma;
  const std::vector<double> gammas =
      ctx.gamma_override ? std::vector<double>{ctx.gamma_r}
                         : std::vector<double>{-0.5, 0.0, 0.5};
  const std::vector<double> qs = detail::linspace(0.01, 0.99, n);
  const double unit = cfg.delta / (4.0 * cfg.sigma * cfg.sigma);

  ds.columns = {"q"};
  const char* vars[] = {"ss", "qq", "grgr", "gigi"};
  for (double g : gammas)
    for (const char* v : vars)
      ds.columns.push_back("vt_" + std::string(v) + "_" + gamma_label(g));
  ds.columns.push_back("note");

  base_metadata(ds, cfg);
  ds.metadata.emplace_back("frame", "geometric (alpha=1/2)");
  ds.metadata.emplace_back("s_over_sigma", fmt(s / cfg.sigma));
  ds.metadata.emplace_back(
      "content", "Bayesian information diagonals vs relative intensity");

  // Explicit skipped rows at the exact boundary.
  auto skipped = [&](double q, const char* why) {
    std::vector<std::string> row;
    row.push_back(fmt(q));
    for (std::size_t i = 0; i < gammas.size() * 4; ++i) row.emplace_back();
    row.emplace_back(why);
    return row;
  };
  ds.rows.push_back(skipped(
      0.0, "skipped: pure state at q=0 (QFI matrix singular, prior rank 0)"));

  fill_rows(ds, qs.size(), [&](std::size_t i) {
    std::vector<std::string> row;
    row.push_back(fmt(qs[i]));
    for (double g : gammas) {
      ParamPoint p;
      p.s = s;
      p.q = qs[i];
      p.gamma_r = g;
      const BoundMatrix vt = van_trees_info(p, cfg);
      for (int d = 0; d < 4; ++d) row.push_back(fmt(vt.entries(d, d) / unit));
    }
    row.emplace_back();
    return row;
  });

  ds.rows.push_back(skipped(
      1.0, "skipped: pure state at q=1 (QFI matrix singular, prior rank 0)"));
  return ds;
}

FigureDataset figure3(const FigureContext& ctx) {
  FigureDataset ds;
  ds.id = "fig3";
  OpticalConfig base = ctx.cfg;
  const int n = ctx.points > 0 ? ctx.points : 99;
  const double s =
      (ctx.s_over_sigma > 0.0 ? ctx.s_over_sigma : 1e-3) * base.sigma;
  const std::vector<double> gammas = {0.0, 0.5, -0.5};
  const double unit = base.delta / (4.0 * base.sigma * base.sigma);

  ds.columns = {"q"};
  for (double g : gammas) {
    ds.columns.push_back("direct_ss_" + gamma_label(g));
    ds.columns.push_back("indirect_ss_" + gamma_label(g));
  }
  ds.columns.push_back("s0_over_sigma_" + gamma_label(-0.5));
  ds.columns.push_back("note");

  base_metadata(ds, base);
  ds.metadata.emplace_back("frame", "centroid (alpha=q)");
  ds.metadata.emplace_back("s_over_sigma", fmt(s / base.sigma));
  ds.metadata.emplace_back(
      "content",
      "separation information: direct route vs purity route; for gamma_r<0 "
      "the near branch r > r_inf is asserted");

  std::vector<double> qs = detail::linspace(0.01, 0.99, n);

  auto value_row = [&](double q, bool boundary) {
    std::vector<std::string> row;
    row.push_back(fmt(boundary ? std::round(q) : q));
    std::string note;
    OpticalConfig cfg = base;
    cfg.alpha = q;
    for (double g : gammas) {
      ParamPoint p;
      p.s = s;
      p.q = q;
      p.gamma_r = g;
      row.push_back(fmt(van_trees_ss(p, cfg) / unit));
      if (boundary) {
        row.emplace_back();  // purity route undefined at a pure state
      } else {
        const IndirectResult ind = indirect_info(p, cfg, true);
        row.push_back(fmt(ind.bound.entries(0, 0) / unit));
      }
    }
    {
      ParamPoint p;
      p.s = s;
      p.q = q;
      p.gamma_r = -0.5;
      const ModelTerms t = model_terms(p, cfg);
      const double c0 = -2.0 * p.gamma_r * t.k;
      if (c0 > 0.0 && c0 < 1.0)
        row.push_back(
            fmt(std::sqrt(-8.0 * std::log(c0))));
      else
        row.emplace_back();
    }
    if (boundary)
      note =
          "boundary evaluated at q=" + fmt(q) +
          "; purity route undefined (pure state)";
    row.push_back(note);
    return row;
  };

  ds.rows.push_back(value_row(1e-8, true));
  fill_rows(ds, qs.size(), [&](std::size_t i) { return value_row(qs[i], false); });
  ds.rows.push_back(value_row(1.0 - 1e-8, true));
  return ds;
}

FigureDataset figure4(const FigureContext& ctx) {
  FigureDataset ds;
  ds.id = "fig4";
  OpticalConfig base = ctx.cfg;
  const int n = ctx.points > 0 ? ctx.points : 91;
  const double s =
      (ctx.s_over_sigma > 0.0 ? ctx.s_over_sigma : 1e-3) * base.sigma;
  const double alpha_fixed = 0.7;
  const std::vector<double> qs = detail::linspace(0.05, 0.95, n);

  ds.columns = {"q",
                "qfi_ss_centroid_gr0",
                "qfi_ss_alpha0.7_gr0",
                "qfi_ss_centroid_gr0.5",
                "qfi_ss_alpha0.7_gr0.5",
                "frame_matches_centroid",
                "note"};
  base_metadata(ds, base);
  ds.metadata.emplace_back("s_over_sigma", fmt(s / base.sigma));
  ds.metadata.emplace_back("fixed_alpha", fmt(alpha_fixed));
  ds.metadata.emplace_back(
      "content",
      "state-level QFI ss entry (units 1/sigma^2): centroid frame vs a frame "
      "misaligned except at q = fixed_alpha");

  fill_rows(ds, qs.size(), [&](std::size_t i) {
    const double q = qs[i];
    std::vector<std::string> row;
    row.push_back(fmt(q));
    for (double g : {0.0, 0.5}) {
      ParamPoint p;
      p.s = s;
      p.q = q;
      p.gamma_r = g;
      OpticalConfig centroid = base;
      centroid.alpha = q;
      OpticalConfig fixed = base;
      fixed.alpha = alpha_fixed;
      row.push_back(fmt(qfi_ss_entry(p, centroid)));
      row.push_back(fmt(qfi_ss_entry(p, fixed)));
    }
    row.push_back(std::fabs(q - alpha_fixed) < 1e-12 ? "1" : "0");
    row.emplace_back();
    return row;
  });
  return ds;
}

FigureDataset figure5(const FigureContext& ctx) {
  FigureDataset ds;
  ds.id = "fig5";
  OpticalConfig cfg = ctx.cfg;
  cfg.alpha = 0.5;
  const int n = ctx.points > 0 ? ctx.points : 41;
  const std::vector<double> gammas = {-0.5, 0.0, 0.5};
  const std::vector<double> svals =
      detail::logspace(1e-3 * cfg.sigma, 1.0 * cfg.sigma, n);
  const double unit = cfg.delta / (4.0 * cfg.sigma * cfg.sigma);

  ds.columns = {"s_over_sigma"};
  for (double g : gammas) {
    ds.columns.push_back("quantum_qubit_ss_" + gamma_label(g));
    ds.columns.push_back("quantum_extra_ss_" + gamma_label(g));
    ds.columns.push_back("quantum_total_ss_" + gamma_label(g));
  }
  ds.columns.push_back("note");

  base_metadata(ds, cfg);
  ds.metadata.emplace_back("frame", "geometric (alpha=1/2)");
  ds.metadata.emplace_back("q", "0.5");
  ds.metadata.emplace_back(
      "content",
      "in-span (qubit) vs derivative-subspace (extra) parts of the quantum "
      "separation information; they sum to the total in this frame");

  fill_rows(ds, svals.size(), [&](std::size_t i) {
    std::vector<std::string> row;
    row.push_back(fmt(svals[i] / cfg.sigma));
    for (double g : gammas) {
      ParamPoint p;
      p.s = svals[i];
      p.q = 0.5;
      p.gamma_r = g;
      const double nbar = mean_photon_number(p, cfg);
      const double total = qfi_ss_entry(p, cfg);
      const double extra = qfi_ss_extra(p, cfg);
      row.push_back(fmt(nbar * (total - extra) / unit));
      row.push_back(fmt(nbar * extra / unit));
      row.push_back(fmt(nbar * total / unit));
    }
    row.emplace_back();
    return row;
  });
  return ds;
}

FigureDataset figure6(const FigureContext& ctx) {
  FigureDataset ds;
  ds.id = "fig6";
  OpticalConfig base = ctx.cfg;
  const int n = ctx.points > 0 ? ctx.points : 91;
  const double s =
      (ctx.s_over_sigma > 0.0 ? ctx.s_over_sigma : 1e-2) * base.sigma;
  const std::vector<double> gammas = {0.5, -0.5};
  const std::vector<double> qs = detail::linspace(0.05, 0.95, n);
  const double unit = base.delta / (4.0 * base.sigma * base.sigma);

  ds.columns = {"q"};
  for (double g : gammas) {
    ds.columns.push_back("fi_v_exact_" + gamma_label(g));
    ds.columns.push_back("fi_v_qubit_" + gamma_label(g));
    ds.columns.push_back("fi_e_exact_" + gamma_label(g));
    ds.columns.push_back("fi_e_qubit_" + gamma_label(g));
    ds.columns.push_back("vt_ss_" + gamma_label(g));
  }
  ds.columns.push_back("note");

  base_metadata(ds, base);
  ds.metadata.emplace_back("frame", "centroid (alpha=q)");
  ds.metadata.emplace_back("s_over_sigma", fmt(s / base.sigma));
  ds.metadata.emplace_back(
      "content",
      "per-slot classical information of binary projectors, exact (static "
      "device) vs qubit-model (tracking) derivatives, against the Bayesian "
      "bound; fi_e_qubit exceeding vt_ss is the deliberate pitfall");

  fill_rows(ds, qs.size(), [&](std::size_t i) {
    const double q = qs[i];
    std::vector<std::string> row;
    row.push_back(fmt(q));
    for (double g : gammas) {
      ParamPoint p;
      p.s = s;
      p.q = q;
      p.gamma_r = g;
      OpticalConfig cfg = base;
      cfg.alpha = q;
      const BinaryPOVM pv = make_binary_povm(PovmKind::projector_v, p, cfg);
      const BinaryPOVM pe = make_binary_povm(PovmKind::projector_e, p, cfg);
      row.push_back(fmt(spade_fisher_s(p, cfg, pv, MeasMode::exact) / unit));
      row.push_back(
          fmt(spade_fisher_s(p, cfg, pv, MeasMode::qubit_approx) / unit));
      row.push_back(fmt(spade_fisher_s(p, cfg, pe, MeasMode::exact) / unit));
      row.push_back(
          fmt(spade_fisher_s(p, cfg, pe, MeasMode::qubit_approx) / unit));
      row.push_back(fmt(van_trees_ss(p, cfg) / unit));
    }
    row.emplace_back();
    return row;
  });
  return ds;
}

FigureDataset figure7(const FigureContext& ctx) {
  FigureDataset ds;
  ds.id = "fig7";
  OpticalConfig base = ctx.cfg;
  const int n = ctx.points > 0 ? ctx.points : 97;
  const std::vector<double> gammas = {0.0, 0.5, -0.5};
  const std::vector<double> qs = detail::linspace(0.02, 0.98, n);

  ds.columns = {"q"};
  for (double g : gammas)
    ds.columns.push_back("rel_loss_" + gamma_label(g));
  ds.columns.push_back("note");

  base_metadata(ds, base);
  ds.metadata.emplace_back("frame", "centroid (alpha=q)");
  ds.metadata.emplace_back("s_over_sigma", "0.001");
  ds.metadata.emplace_back(
      "content",
      "relative information loss 1 - FI(e1 projector)/FI(v1 projector) at "
      "small separation");

  fill_rows(ds, qs.size(), [&](std::size_t i) {
    std::vector<std::string> row;
    row.push_back(fmt(qs[i]));
    for (double g : gammas) {
      ParamPoint p;
      p.q = qs[i];
      p.gamma_r = g;
      row.push_back(fmt(misalignment_relative_difference(p, base)));
    }
    row.emplace_back();
    return row;
  });
  return ds;
}

FigureDataset figure8(const FigureContext& ctx) {
  FigureDataset ds;
  ds.id = "fig8";
  OpticalConfig cfg = ctx.cfg;
  cfg.alpha = 0.5;  // centroid frame of the balanced point
  const double s =
      (ctx.s_over_sigma > 0.0 ? ctx.s_over_sigma : 1e-4) * cfg.sigma;
  const double unit = cfg.delta / (4.0 * cfg.sigma * cfg.sigma);
  const std::vector<double> gvals = {-0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6};

  ds.columns = {"gamma_r",     "gamma_i",  "direct_ss", "indirect_ss",
                "gap_ss",      "rel_diff", "bijective", "s0_over_sigma",
                "note"};
  base_metadata(ds, cfg);
  ds.metadata.emplace_back("q", "0.5");
  ds.metadata.emplace_back("s_over_sigma", fmt(s / cfg.sigma));
  ds.metadata.emplace_back(
      "content",
      "direct vs purity-route separation information over the coherence "
      "plane; rel_diff = (direct - indirect)/direct vanishes only on the "
      "gamma_i = 0 axis");

  std::vector<std::pair<double, double>> grid;
  for (double gr : gvals)
    for (double gi : gvals) grid.emplace_back(gr, gi);

  fill_rows(ds, grid.size(), [&](std::size_t i) {
    const auto [gr, gi] = grid[i];
    ParamPoint p;
    p.s = s;
    p.gamma_r = gr;
    p.gamma_i = gi;
    std::vector<std::string> row;
    row.push_back(fmt(gr));
    row.push_back(fmt(gi));
    const double direct = van_trees_ss(p, cfg);
    const IndirectResult ind = indirect_info(p, cfg, true);
    const double gap = indirect_gap_ss(p, cfg);
    row.push_back(fmt(direct / unit));
    row.push_back(fmt(ind.bound.entries(0, 0) / unit));
    row.push_back(fmt(gap / unit));
    row.push_back(fmt(gap / direct));
    row.push_back(ind.bijective ? "1" : "0");
    if (ind.s0)
      row.push_back(fmt(*ind.s0 / cfg.sigma));
    else
      row.emplace_back();
    row.emplace_back();
    return row;
  });
  return ds;
}

}  // namespace

FigureDataset run_figure(const std::string& figure_id,
                         const std::map<std::string, double>& overrides) {
  const FigureContext ctx = make_context(overrides);
  if (figure_id == "fig1") return figure1(ctx);
  if (figure_id == "fig2") return figure2(ctx);
  if (figure_id == "fig3") return figure3(ctx);
  if (figure_id == "fig4") return figure4(ctx);
  if (figure_id == "fig5") return figure5(ctx);
  if (figure_id == "fig6") return figure6(ctx);
  if (figure_id == "fig7") return figure7(ctx);
  if (figure_id == "fig8") return figure8(ctx);
  throw DomainError("unknown figure id: " + figure_id);
}

const std::vector<std::string>& known_figures() {
  static const std::vector<std::string> ids = {"fig1", "fig2", "fig3", "fig4",
                                               "fig5", "fig6", "fig7", "fig8"};
  return ids;
}

void write_figure_csv(const FigureDataset& dataset, std::ostream& os) {
  write_csv(os, dataset.metadata, dataset.columns, dataset.rows);
}

}  // namespace cohres
