#include <doctest.h>

#include "cohres/errors.hpp"
#include "cohres/scenario.hpp"

#include <sstream>
#include <string>

using namespace cohres;

namespace {

Scenario parse(const std::string& text) {
  std::istringstream is(text);
  return parse_scenario(is, "test");
}

int parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line;
  }
  return -1;
}

const char* kGood =
    "# comment line\n"
    "[source]\n"
    "s = 0.5\n"
    "q = 0.25\n"
    "gamma_r = 0.5\n"
    "\n"
    "[optics]\n"
    "sigma = 1.0\n"
    "delta = 0.01\n"
    "alpha = centroid\n"
    "\n"
    "[acquisition]\n"
    "povm = projector_v\n"
    "slots = 1000\n"
    "trials = 3\n"
    "seed = 11\n"
    "free = s\n";

}  // namespace

TEST_CASE("scenario happy path") {
  const Scenario sc = parse(kGood);
  CHECK(sc.point.s == doctest::Approx(0.5));
  CHECK(sc.point.q == doctest::Approx(0.25));
  CHECK(sc.point.gamma_r == doctest::Approx(0.5));
  CHECK(sc.point.gamma_i == doctest::Approx(0.0));
  CHECK(sc.cfg.alpha == doctest::Approx(0.25));  // centroid resolves to q
  CHECK(sc.povm == PovmKind::projector_v);
  CHECK_FALSE(sc.counting_only);
  CHECK(sc.slots == 1000);
  CHECK(sc.trials == 3);
  CHECK(sc.seed == 11);
  CHECK(sc.free == Var::s);
}

TEST_CASE("alpha spellings") {
  CHECK(parse("s=1\nalpha=geometric\nslots=10\ntrials=1\n").cfg.alpha ==
        doctest::Approx(0.5));
  CHECK(parse("s=1\nalpha=0.3\nslots=10\ntrials=1\n").cfg.alpha ==
        doctest::Approx(0.3));
  CHECK(parse("s=1\nq=0.2\nalpha=centroid\nslots=10\ntrials=1\n").cfg.alpha ==
        doctest::Approx(0.2));
}

TEST_CASE("counting scenarios") {
  const Scenario sc = parse("s=1\npovm=counting\nslots=10\ntrials=1\nfree=q\n");
  CHECK(sc.counting_only);
  CHECK(sc.free == Var::q);
}

TEST_CASE("parse failures carry line numbers") {
  CHECK(parse_error_line("s=1\nslots=10\ntrials=1\nbogus_key=3\n") == 4);
  CHECK(parse_error_line("s=abc\nslots=10\ntrials=1\n") == 1);
  CHECK(parse_error_line("s=1\n\ns=2\nslots=10\ntrials=1\n") == 3);
  CHECK(parse_error_line("s=1\nslots=0\ntrials=1\n") == 2);
  CHECK(parse_error_line("s=1\nslots=10\ntrials=-2\n") == 3);
  CHECK(parse_error_line("s=1\nslots=10\ntrials=1\npovm=magic\n") == 4);
  CHECK(parse_error_line("s=1\nslots=10\ntrials=1\nfree=gamma_r\n") == 4);
  CHECK(parse_error_line("s=1\nslots=10\ntrials=1\n[oops\n") == 4);
  CHECK(parse_error_line("s=1\n=3\nslots=10\ntrials=1\n") == 2);
  // Missing required keys are reported, though without a line.
  CHECK(parse_error_line("s=1\ntrials=1\n") == 0);
  CHECK(parse_error_line("s=1\nslots=10\n") == 0);
  // Domain violations surface as parse errors too.
  CHECK_THROWS_AS(parse("s=-1\nslots=10\ntrials=1\n"), ParseError);
  CHECK_THROWS_AS(parse("s=1\ngamma_r=0.9\ngamma_i=0.9\nslots=10\ntrials=1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_scenario_file("/nonexistent/path.cfg"), ParseError);
}

TEST_CASE("simulation summary is reproducible") {
  Scenario sc = parse(kGood);
  sc.slots = 50000;
  sc.trials = 6;
  const SimulationSummary a = run_simulation(sc, nullptr);
  const SimulationSummary b = run_simulation(sc, nullptr);
  CHECK(a.mean == b.mean);  // bit-identical
  CHECK(a.sample_variance == b.sample_variance);
  CHECK(a.trials == 6);
  CHECK(a.slots == 50000);
  CHECK(a.crb > 0.0);
  CHECK(a.vt_inverse > 0.0);
  CHECK(a.ratio > 0.0);
  CHECK(std::fabs(a.mean - sc.point.s) < 0.2);

  std::ostringstream os;
  write_simulation_summary_csv(sc, a, os);
  const std::string text = os.str();
  CHECK(text.find("# tool:") != std::string::npos);
  CHECK(text.find("ratio") != std::string::npos);

  std::vector<DetectionRecord> records;
  std::vector<double> estimates;
  const SimulationSummary c = run_simulation(sc, &records, &estimates);
  CHECK(c.mean == a.mean);
  CHECK(records.size() == 6);
  CHECK(estimates.size() == 6);
}

TEST_CASE("counting simulation estimates the intensity") {
  Scenario sc = parse(
      "s = 0.001\n"
      "q = 0.25\n"
      "gamma_r = 0.5\n"
      "alpha = centroid\n"
      "povm = counting\n"
      "free = q\n"
      "slots = 1000000\n"
      "trials = 4\n"
      "seed = 5\n");
  const SimulationSummary sum = run_simulation(sc, nullptr);
  CHECK(std::fabs(sum.mean - 0.25) < 0.15 * 0.25);
  CHECK(sum.ratio > 0.0);
}
