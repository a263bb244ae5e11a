#include <doctest.h>

#include "cohres/errors.hpp"
#include "cohres/figures.hpp"
#include "cohres/validate.hpp"

#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

using namespace cohres;

namespace {

std::string serialize(const FigureDataset& ds) {
  std::ostringstream os;
  write_figure_csv(ds, os);
  return os.str();
}

// Every cell is either a finite number, the trailing free-text note, or an
// empty conditional cell.  Skipped values must be explained in the note
// column; the one exception is s0_over_sigma, whose emptiness is itself the
// result (no stationary separation exists on the bijective branch).
void check_cells(const FigureDataset& ds) {
  REQUIRE(!ds.columns.empty());
  REQUIRE(ds.columns.back() == "note");
  for (const auto& row : ds.rows) {
    REQUIRE(row.size() == ds.columns.size());
    bool needs_note = false;
    for (std::size_t i = 0; i + 1 < row.size(); ++i) {
      if (row[i].empty()) {
        if (ds.columns[i] != "s0_over_sigma") needs_note = true;
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(row[i].c_str(), &end);
      INFO("column ", ds.columns[i], " cell '", row[i], "'");
      CHECK(*end == '\0');
      CHECK(std::isfinite(v));
    }
    if (needs_note) CHECK_FALSE(row.back().empty());
  }
}

}  // namespace

TEST_CASE("figure registry") {
  const auto& ids = known_figures();
  CHECK(ids.size() == 8);
  const std::set<std::string> want = {"fig1", "fig2", "fig3", "fig4",
                                      "fig5", "fig6", "fig7", "fig8"};
  CHECK(std::set<std::string>(ids.begin(), ids.end()) == want);
  CHECK_THROWS_AS(run_figure("fig9"), DomainError);
}

TEST_CASE("figure datasets are finite, annotated, and deterministic") {
  for (const std::string& id : known_figures()) {
    CAPTURE(id);
    const FigureDataset a = run_figure(id);
    CHECK(a.id == id);
    CHECK(!a.rows.empty());
    check_cells(a);
    const FigureDataset b = run_figure(id);
    CHECK(serialize(a) == serialize(b));  // bit-identical regeneration
  }
}

TEST_CASE("figure overrides") {
  const FigureDataset small = run_figure("fig1", {{"points", 7.0}});
  CHECK(small.rows.size() == 7);
  const FigureDataset shifted = run_figure("fig2", {{"s_over_sigma", 1e-2}});
  bool found = false;
  for (const auto& [key, value] : shifted.metadata)
    if (key == "s_over_sigma" && value == "0.01") found = true;
  CHECK(found);
  CHECK_THROWS_AS(run_figure("fig1", {{"bogus", 1.0}}), DomainError);
}

TEST_CASE("CSV serialization shape") {
  const FigureDataset ds = run_figure("fig1", {{"points", 5.0}});
  const std::string text = serialize(ds);
  std::istringstream is(text);
  std::string line;
  int meta = 0;
  int rows = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] == '#') {
      CHECK_FALSE(header_seen);  // metadata precedes the header
      ++meta;
    } else if (!header_seen) {
      header_seen = true;
      CHECK(line.rfind("s_over_sigma", 0) == 0);
    } else {
      ++rows;
    }
  }
  CHECK(meta >= 2);
  CHECK(rows == 5);
}

TEST_CASE("direct-vs-indirect figure flags the ambiguous half plane") {
  const FigureDataset ds = run_figure("fig8");
  int gr_col = -1, gi_col = -1, bij_col = -1, rel_col = -1, gap_col = -1;
  for (std::size_t i = 0; i < ds.columns.size(); ++i) {
    if (ds.columns[i] == "gamma_r") gr_col = static_cast<int>(i);
    if (ds.columns[i] == "gamma_i") gi_col = static_cast<int>(i);
    if (ds.columns[i] == "bijective") bij_col = static_cast<int>(i);
    if (ds.columns[i] == "rel_diff") rel_col = static_cast<int>(i);
    if (ds.columns[i] == "gap_ss") gap_col = static_cast<int>(i);
  }
  REQUIRE(gr_col >= 0);
  REQUIRE(gi_col >= 0);
  REQUIRE(bij_col >= 0);
  REQUIRE(rel_col >= 0);
  REQUIRE(gap_col >= 0);
  for (const auto& row : ds.rows) {
    const double gr = std::strtod(row[gr_col].c_str(), nullptr);
    const double gi = std::strtod(row[gi_col].c_str(), nullptr);
    CHECK(row[bij_col] == (gr < 0.0 ? "0" : "1"));
    const double gap = std::strtod(row[gap_col].c_str(), nullptr);
    CHECK(gap >= 0.0);
    if (gr == 0.0 && gi == 0.0) {
      const double rel = std::strtod(row[rel_col].c_str(), nullptr);
      CHECK(rel < 1e-8);
      CHECK(rel > 0.0);
    }
  }
}

TEST_CASE("validation presets") {
  // The logarithmic-derivative suite passes end to end.
  const ValidationReport sld = run_validate("sld");
  CHECK(sld.all_pass());
  CHECK(sld.rows.size() > 100);

  // The deliberately corrupted basis is caught: that is the point.
  const ValidationReport fault = run_validate("fault-nu-flip");
  CHECK_FALSE(fault.all_pass());
  CHECK(fault.failure_count() >= 1);
  CHECK(fault.failure_count() < fault.rows.size());

  CHECK_THROWS_AS(run_validate("bogus-preset"), DomainError);

  std::ostringstream os;
  write_validation_csv(sld, os);
  CHECK(os.str().find("suite,point,quantity") != std::string::npos);
}
