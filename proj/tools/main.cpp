#include "CLI11.hpp"

#include "cohres/bounds.hpp"
#include "cohres/csv.hpp"
#include "cohres/errors.hpp"
#include "cohres/figures.hpp"
#include "cohres/measurement.hpp"
#include "cohres/model.hpp"
#include "cohres/scenario.hpp"
#include "cohres/validate.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitUsage = 2;

// Writes through to a file when a path is given, stdout otherwise.
int with_output(const std::string& path,
                const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(std::cout);
    return kExitSuccess;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot open output file '" << path << "'\n";
    return kExitUsage;
  }
  fn(out);
  return kExitSuccess;
}

double parse_alpha(const std::string& text, double q) {
  if (text == "geometric") return 0.5;
  if (text == "centroid") return q;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size())
    throw cohres::DomainError("alpha must be 'geometric', 'centroid', or a "
                              "number, got '" +
                              text + "'");
  return v;
}

const char* entry_label(int i, int j) {
  static const char* names[4][4] = {{"ss", "sq", "sgr", "sgi"},
                                    {"sq", "qq", "qgr", "qgi"},
                                    {"sgr", "qgr", "grgr", "grgi"},
                                    {"sgi", "qgi", "grgi", "gigi"}};
  return names[i][j];
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cohres: exact quantum and classical precision limits for resolving "
      "two partially coherent point sources"};
  app.require_subcommand(1);

  // --- figure ---------------------------------------------------------------
  auto* fig = app.add_subcommand("figure", "emit a study dataset as CSV");
  std::string fig_id;
  fig->add_option("id", fig_id, "dataset id (fig1..fig8)")->required();
  std::string fig_out;
  fig->add_option("-o,--out", fig_out, "output file (default: stdout)");
  int fig_points = 0;
  fig->add_option("--points", fig_points, "sweep density override");
  double fig_delta = 0.0, fig_sigma = 0.0, fig_sos = 0.0, fig_gr = 0.0;
  fig->add_option("--delta", fig_delta, "photon-flux parameter override");
  fig->add_option("--sigma", fig_sigma, "PSF width override");
  fig->add_option("--s-over-sigma", fig_sos,
                  "separation override for fixed-separation figures");
  auto* fig_gr_opt = fig->add_option(
      "--gamma-r", fig_gr, "replace the coherence legend with a single value");

  // --- validate -------------------------------------------------------------
  auto* val = app.add_subcommand(
      "validate", "cross-check closed forms against the numeric oracle");
  std::string preset = "all";
  val->add_option("--preset", preset, "validation preset")
      ->check(CLI::IsMember(
          {"all", "grid", "sld", "commutators", "fault-nu-flip"}));
  std::string val_out;
  val->add_option("-o,--out", val_out, "report CSV (default: stdout)");

  // --- simulate -------------------------------------------------------------
  auto* sim = app.add_subcommand(
      "simulate", "run a Monte Carlo estimation experiment from a scenario");
  std::string scenario_path;
  sim->add_option("scenario", scenario_path, "scenario file (key=value lines)")
      ->required();
  std::string sim_out, sim_records;
  sim->add_option("-o,--out", sim_out, "summary CSV (default: stdout)");
  sim->add_option("--records", sim_records,
                  "also write per-trial detection tallies to this CSV");

  // --- bound ----------------------------------------------------------------
  auto* bnd = app.add_subcommand(
      "bound", "print information matrices at one parameter point");
  double b_s = 1.0, b_q = 0.5, b_gr = 0.0, b_gi = 0.0;
  double b_sigma = 1.0, b_delta = 1e-2;
  std::string b_alpha = "geometric";
  bnd->add_option("--s", b_s, "separation")->required();
  bnd->add_option("--q", b_q, "relative intensity");
  bnd->add_option("--gr", b_gr, "coherence, real part");
  bnd->add_option("--gi", b_gi, "coherence, imaginary part");
  bnd->add_option("--alpha", b_alpha, "frame: geometric | centroid | <float>");
  bnd->add_option("--sigma", b_sigma, "PSF width");
  bnd->add_option("--delta", b_delta, "photon-flux parameter");
  std::string bnd_out;
  bnd->add_option("-o,--out", bnd_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (fig->parsed()) {
      std::map<std::string, double> overrides;
      if (fig_points > 0) overrides["points"] = fig_points;
      if (fig_delta > 0.0) overrides["delta"] = fig_delta;
      if (fig_sigma > 0.0) overrides["sigma"] = fig_sigma;
      if (fig_sos > 0.0) overrides["s_over_sigma"] = fig_sos;
      if (fig_gr_opt->count() > 0) overrides["gamma_r"] = fig_gr;
      const cohres::FigureDataset ds = cohres::run_figure(fig_id, overrides);
      return with_output(
          fig_out, [&](std::ostream& os) { cohres::write_figure_csv(ds, os); });
    }

    if (val->parsed()) {
      const cohres::ValidationReport report = cohres::run_validate(preset);
      const int io = with_output(val_out, [&](std::ostream& os) {
        cohres::write_validation_csv(report, os);
      });
      if (io != kExitSuccess) return io;
      if (!report.all_pass()) {
        std::cerr << "validate: " << report.failure_count() << " of "
                  << report.rows.size() << " checks failed\n";
        return kExitValidationFailure;
      }
      std::cerr << "validate: " << report.rows.size() << " checks passed\n";
      return kExitSuccess;
    }

    if (sim->parsed()) {
      const cohres::Scenario sc = cohres::parse_scenario_file(scenario_path);
      std::vector<cohres::DetectionRecord> records;
      const cohres::SimulationSummary summary =
          cohres::run_simulation(sc, &records);
      if (!sim_records.empty()) {
        const int io = with_output(sim_records, [&](std::ostream& os) {
          cohres::write_detection_records_csv(records, os);
        });
        if (io != kExitSuccess) return io;
      }
      return with_output(sim_out, [&](std::ostream& os) {
        cohres::write_simulation_summary_csv(sc, summary, os);
      });
    }

    if (bnd->parsed()) {
      cohres::ParamPoint p;
      p.s = b_s;
      p.q = b_q;
      p.gamma_r = b_gr;
      p.gamma_i = b_gi;
      cohres::OpticalConfig cfg;
      cfg.sigma = b_sigma;
      cfg.delta = b_delta;
      cfg.alpha = parse_alpha(b_alpha, b_q);
      cohres::check_domain(p, cfg);

      std::vector<std::pair<std::string, std::string>> meta = {
          {"tool", std::string(cohres::kToolVersion)},
          {"s", cohres::format_double(p.s)},
          {"q", cohres::format_double(p.q)},
          {"gamma_r", cohres::format_double(p.gamma_r)},
          {"gamma_i", cohres::format_double(p.gamma_i)},
          {"sigma", cohres::format_double(cfg.sigma)},
          {"delta", cohres::format_double(cfg.delta)},
          {"alpha", cohres::format_double(cfg.alpha)}};
      meta.emplace_back(
          "nbar", cohres::format_double(cohres::mean_photon_number(p, cfg)));
      meta.emplace_back(
          "purity", cohres::format_double(cohres::purity(p, cfg).r));

      std::vector<std::vector<std::string>> rows;
      auto emit = [&](const char* kind, const auto& compute) {
        try {
          const cohres::BoundMatrix m = compute();
          for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j)
              rows.push_back({kind, entry_label(i, j),
                              cohres::format_double(m.entries(i, j)), ""});
        } catch (const cohres::Error& e) {
          rows.push_back({kind, "unavailable", "", e.what()});
        }
      };
      emit("qfi_state", [&] { return cohres::qfi_state_matrix(p, cfg); });
      emit("prior_fi", [&] { return cohres::prior_fisher(p, cfg); });
      emit("van_trees_info", [&] { return cohres::van_trees_info(p, cfg); });
      emit("indirect", [&] {
        return cohres::indirect_info(p, cfg, true).bound;
      });
      try {
        rows.push_back({"van_trees_ss", "ss",
                        cohres::format_double(cohres::van_trees_ss(p, cfg)),
                        "pure-safe ss diagonal"});
      } catch (const cohres::Error& e) {
        rows.push_back({"van_trees_ss", "unavailable", "", e.what()});
      }

      return with_output(bnd_out, [&](std::ostream& os) {
        cohres::write_csv(os, meta, {"kind", "entry", "value", "note"}, rows);
      });
    }
  } catch (const cohres::ParseError& e) {
    std::cerr << "error";
    if (e.line > 0) std::cerr << " (line " << e.line << ")";
    std::cerr << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const cohres::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const cohres::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const cohres::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitValidationFailure;
  }

  return kExitUsage;
}
