#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cartograph/carto.hpp"
#include "cartograph/dynamics.hpp"
#include "cartograph/trainer.hpp"

namespace cartograph::render {

// Data-map styling. Region markers: easy_to_learn red triangles (#d62728),
// hard_to_learn blue circles (#1f77b4), ambiguous black pluses (#000000),
// other grey squares (#9e9e9e). Marker opacity encodes the correctness bin.
struct MapStyle {
  std::size_t sample_cap = 25000;
  std::uint64_t sample_seed = 0;
  int max_correctness_bins = 5;
  int width = 900;
  int height = 700;
  bool side_histograms = false;
  std::string title = "Data map";
};

// The affine transform from metric space to SVG pixels:
//   x = left + width  * variability / 0.5
//   y = top  + height * (1 - confidence)
struct MapFrame {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;

  double x(double variability) const { return left + width * variability / 0.5; }
  double y(double confidence) const { return top + height * (1.0 - confidence); }
  double variability_at(double px) const { return (px - left) / width * 0.5; }
  double confidence_at(double py) const { return 1.0 - (py - top) / height; }
};

MapFrame map_frame(const MapStyle& style);

// Bin edges over [0, 1] for correctness values of runs with `epochs` epochs.
// With epochs + 1 <= max_bins every attainable value k/epochs gets its own bin
// (edges at the midpoints); otherwise max_bins equal-width bins.
std::vector<double> correctness_bin_edges(int epochs, int max_bins);

// Bin index of `value` under `edges`; the last bin is closed.
int correctness_bin(double value, const std::vector<double>& edges);

// Scatter of variability (x) vs confidence (y), one <use class="marker ...">
// element per plotted instance centered at its (x, y) attributes, which are
// written with two decimals. Tables larger than sample_cap are thinned to a
// uniform sample of exactly sample_cap rows (cartograph-rng v1, sample_seed).
// A leading comment records run id, seed, cap and bin edges. Throws
// DataError on an empty table.
std::string render_map(const dynamics::MetricsTable& table, const carto::RegionAssignment& regions,
                       const MapStyle& style = {});

// Indices of the rows render_map plots, ascending.
std::vector<std::size_t> map_sample(std::size_t rows, const MapStyle& style);

struct CurveStyle {
  int width = 720;
  int height = 480;
  std::string title = "Training curves";
};

// Train and validation accuracy per epoch on a [0, 1] axis; one polyline per
// series (class "curve train" / "curve validation"), or a single circle per
// series when only one epoch exists. Throws DataError on an empty log.
std::string render_curves(const trainer::CurveLog& curves, const CurveStyle& style = {});

}  // namespace cartograph::render
