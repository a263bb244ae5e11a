#pragma once

#include "cohres/types.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cohres {

// One sweep axis plus the frame policy for a figure run.
struct SweepSpec {
  std::string parameter;  // "s" | "q" | "gamma_r" | "gamma_i"
  double start = 0.0;
  double stop = 0.0;
  int points = 0;
  bool log_scale = false;
  std::string alpha_policy = "geometric";  // geometric | centroid | <number>
};

// A figure dataset ready for CSV serialization.  Cells are pre-formatted so
// that empty fields (skipped singular points) survive round trips; the final
// column is always a free-text note.
struct FigureDataset {
  std::string id;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;
};

// Reproduces one of the bundled study datasets:
//   fig1  Bayesian information diagonals vs. separation, balanced sources,
//         quantum and classical contributions per coherence value
//   fig2  information diagonals vs. relative intensity, geometric frame
//   fig3  separation information vs. relative intensity, centroid frame,
//         direct and purity-route columns
//   fig4  separation information vs. intensity for aligned/misaligned frames
//   fig5  in-span vs. derivative-subspace contributions vs. separation
//   fig6  classical information of four binary measurements vs. intensity
//   fig7  relative information loss of the misaligned projector vs. intensity
//   fig8  direct-vs-indirect relative difference over the coherence plane
FigureDataset run_figure(const std::string& figure_id,
                         const std::map<std::string, double>& overrides = {});

const std::vector<std::string>& known_figures();

void write_figure_csv(const FigureDataset& dataset, std::ostream& os);

}  // namespace cohres
