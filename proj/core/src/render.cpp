#include "cartograph/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "cartograph/error.hpp"
#include "cartograph/provenance.hpp"
#include "cartograph/rng.hpp"

namespace cartograph::render {

namespace {

constexpr int kLegendWidth = 210;
constexpr int kHistogramBand = 70;
constexpr int kHistogramBins = 25;

std::string px(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.2f", v);
  return buf.data();
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Comments may not contain "--".
std::string comment_safe(std::string s) {
  for (std::size_t pos = s.find("--"); pos != std::string::npos; pos = s.find("--", pos)) s.replace(pos, 2, "- -");
  return s;
}

struct MarkerSpec {
  const char* id;
  const char* color;
  const char* label;
};

MarkerSpec marker_for(carto::Region region) {
  switch (region) {
    case carto::Region::easy_to_learn: return {"m-easy", "#d62728", "easy-to-learn"};
    case carto::Region::hard_to_learn: return {"m-hard", "#1f77b4", "hard-to-learn"};
    case carto::Region::ambiguous: return {"m-ambiguous", "#000000", "ambiguous"};
    case carto::Region::other: return {"m-other", "#9e9e9e", "other"};
  }
  return {"m-other", "#9e9e9e", "other"};
}

double bin_opacity(int bin, int bins) {
  return bins <= 1 ? 1.0 : 0.25 + 0.75 * static_cast<double>(bin) / static_cast<double>(bins - 1);
}

std::string bin_label(const std::vector<double>& edges, int bin, bool per_value, int epochs) {
  if (per_value) return format_significant(static_cast<double>(bin) / static_cast<double>(epochs), 3);
  const bool last = bin + 2 == static_cast<int>(edges.size());
  return "[" + format_significant(edges[bin], 3) + ", " + format_significant(edges[bin + 1], 3) + (last ? "]" : ")");
}

void axis_ticks(std::ostringstream& svg, const MapFrame& f) {
  svg << "<g class=\"axes\" stroke=\"#333333\" stroke-width=\"1\" fill=\"none\">\n";
  svg << "<rect x=\"" << px(f.left) << "\" y=\"" << px(f.top) << "\" width=\"" << px(f.width) << "\" height=\""
      << px(f.height) << "\"/>\n</g>\n";
  svg << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = 0.1 * i;
    const double x = f.x(v);
    svg << "<line x1=\"" << px(x) << "\" y1=\"" << px(f.top + f.height) << "\" x2=\"" << px(x) << "\" y2=\""
        << px(f.top + f.height + 5) << "\" stroke=\"#333333\"/>";
    svg << "<text x=\"" << px(x) << "\" y=\"" << px(f.top + f.height + 18) << "\" text-anchor=\"middle\">"
        << format_significant(v, 2) << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double v = 0.2 * i;
    const double y = f.y(v);
    svg << "<line x1=\"" << px(f.left - 5) << "\" y1=\"" << px(y) << "\" x2=\"" << px(f.left) << "\" y2=\"" << px(y)
        << "\" stroke=\"#333333\"/>";
    svg << "<text x=\"" << px(f.left - 8) << "\" y=\"" << px(y + 4) << "\" text-anchor=\"end\">"
        << format_significant(v, 2) << "</text>\n";
  }
  svg << "</g>\n";
}

void histogram(std::ostringstream& svg, const std::vector<double>& values, double lo, double hi, bool horizontal,
               const MapFrame& f) {
  std::vector<std::size_t> counts(kHistogramBins, 0);
  for (double v : values) {
    auto b = static_cast<int>((v - lo) / (hi - lo) * kHistogramBins);
    counts[static_cast<std::size_t>(std::clamp(b, 0, kHistogramBins - 1))]++;
  }
  const double peak = static_cast<double>(std::max<std::size_t>(1, *std::max_element(counts.begin(), counts.end())));
  const double band = kHistogramBand - 10;
  svg << "<g class=\"histogram " << (horizontal ? "variability" : "confidence") << "\" fill=\"#bbbbbb\">\n";
  for (int b = 0; b < kHistogramBins; ++b) {
    const double len = band * static_cast<double>(counts[b]) / peak;
    if (horizontal) {
      const double x0 = f.left + f.width * b / kHistogramBins;
      svg << "<rect x=\"" << px(x0) << "\" y=\"" << px(f.top - 5 - len) << "\" width=\""
          << px(f.width / kHistogramBins) << "\" height=\"" << px(len) << "\"/>\n";
    } else {
      const double y0 = f.top + f.height * (kHistogramBins - 1 - b) / kHistogramBins;
      svg << "<rect x=\"" << px(f.left + f.width + 5) << "\" y=\"" << px(y0) << "\" width=\"" << px(len)
          << "\" height=\"" << px(f.height / kHistogramBins) << "\"/>\n";
    }
  }
  svg << "</g>\n";
}

}  // namespace

MapFrame map_frame(const MapStyle& style) {
  if (style.width <= 0 || style.height <= 0) throw std::invalid_argument("map width and height must be positive");
  MapFrame f;
  f.left = 70;
  f.top = 50 + (style.side_histograms ? kHistogramBand : 0);
  f.width = style.width - f.left - kLegendWidth - (style.side_histograms ? kHistogramBand : 0);
  f.height = style.height - f.top - 60;
  if (f.width <= 10 || f.height <= 10) throw std::invalid_argument("map is too small for its margins");
  return f;
}

std::vector<double> correctness_bin_edges(int epochs, int max_bins) {
  epochs = std::max(epochs, 1);
  max_bins = std::max(max_bins, 1);
  std::vector<double> edges;
  if (epochs + 1 <= max_bins) {
    edges.push_back(0.0);
    for (int k = 0; k < epochs; ++k) edges.push_back((k + 0.5) / epochs);
    edges.push_back(1.0);
  } else {
    for (int b = 0; b <= max_bins; ++b) edges.push_back(static_cast<double>(b) / max_bins);
  }
  return edges;
}

int correctness_bin(double value, const std::vector<double>& edges) {
  const int bins = static_cast<int>(edges.size()) - 1;
  if (std::isnan(value)) return 0;
  int b = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), value) - edges.begin()) - 1;
  return std::clamp(b, 0, bins - 1);
}

std::vector<std::size_t> map_sample(std::size_t rows, const MapStyle& style) {
  if (style.sample_cap < 1) throw std::invalid_argument("sample_cap must be >= 1");
  std::vector<std::size_t> idx;
  if (rows <= style.sample_cap) {
    idx.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) idx[i] = i;
    return idx;
  }
  Rng rng(style.sample_seed);
  idx = sample_without_replacement(rows, style.sample_cap, rng);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::string render_map(const dynamics::MetricsTable& table, const carto::RegionAssignment& regions,
                       const MapStyle& style) {
  if (table.rows.empty()) throw DataError("cannot render a data map of an empty table");
  const MapFrame f = map_frame(style);
  const auto sample = map_sample(table.rows.size(), style);

  int epochs = 1;
  for (const auto& r : table.rows) epochs = std::max(epochs, r.epochs_used);
  const auto edges = correctness_bin_edges(epochs, style.max_correctness_bins);
  const int bins = static_cast<int>(edges.size()) - 1;
  const bool per_value = epochs + 1 <= std::max(style.max_correctness_bins, 1);

  std::unordered_map<std::string_view, carto::Region> region_of;
  region_of.reserve(regions.guids.size());
  for (std::size_t i = 0; i < regions.guids.size() && i < regions.regions.size(); ++i) {
    region_of.emplace(regions.guids[i], regions.regions[i]);
  }

  nlohmann::json meta = {
      {"artifact", "cartograph-map"},
      {"tool", std::string(tool_version())},
      {"run_id", table.meta.run_id},
      {"sample_seed", style.sample_seed},
      {"sample_cap", style.sample_cap},
      {"instances", table.rows.size()},
      {"displayed", sample.size()},
      {"correctness_bin_edges", edges},
      {"transform", {{"x", "left + width * variability / 0.5"},
                     {"y", "top + height * (1 - confidence)"},
                     {"left", f.left},
                     {"top", f.top},
                     {"width", f.width},
                     {"height", f.height}}},
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<!-- " << comment_safe(meta.dump()) << " -->\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" version=\"1.1\" "
      << "width=\"" << style.width << "\" height=\"" << style.height << "\" viewBox=\"0 0 " << style.width << ' '
      << style.height << "\">\n";
  svg << "<defs>\n"
      << "<g id=\"m-easy\"><polygon points=\"0,-4.5 4,2.5 -4,2.5\" fill=\"#d62728\"/></g>\n"
      << "<g id=\"m-hard\"><circle cx=\"0\" cy=\"0\" r=\"3.2\" fill=\"#1f77b4\"/></g>\n"
      << "<g id=\"m-ambiguous\"><path d=\"M-4,0H4M0,-4V4\" stroke=\"#000000\" stroke-width=\"1.4\" fill=\"none\"/></g>\n"
      << "<g id=\"m-other\"><rect x=\"-2.2\" y=\"-2.2\" width=\"4.4\" height=\"4.4\" fill=\"#9e9e9e\"/></g>\n"
      << "</defs>\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << style.width << "\" height=\"" << style.height << "\" fill=\"#ffffff\"/>\n";
  svg << "<text x=\"" << px(f.left + f.width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"16\">" << xml_escape(style.title) << "</text>\n";
  axis_ticks(svg, f);
  svg << "<text x=\"" << px(f.left + f.width / 2) << "\" y=\"" << px(f.top + f.height + 40)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">variability</text>\n";
  svg << "<text transform=\"translate(" << px(f.left - 45) << ',' << px(f.top + f.height / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">confidence</text>\n";

  if (style.side_histograms) {
    std::vector<double> var, conf;
    for (std::size_t i : sample) {
      var.push_back(table.rows[i].variability);
      conf.push_back(table.rows[i].confidence);
    }
    histogram(svg, var, 0.0, 0.5, true, f);
    histogram(svg, conf, 0.0, 1.0, false, f);
  }

  svg << "<g class=\"markers\">\n";
  for (std::size_t i : sample) {
    const auto& r = table.rows[i];
    auto it = region_of.find(r.guid);
    const carto::Region region = it == region_of.end() ? carto::Region::other : it->second;
    const int bin = correctness_bin(r.correctness, edges);
    svg << "<use class=\"marker " << carto::to_string(region) << "\" xlink:href=\"#" << marker_for(region).id
        << "\" x=\"" << px(f.x(r.variability)) << "\" y=\"" << px(f.y(r.confidence)) << "\" opacity=\""
        << format_significant(bin_opacity(bin, bins), 3) << "\"/>\n";
  }
  svg << "</g>\n";

  // Legend: regions, then correctness bins.
  const double lx = style.width - kLegendWidth + 20;
  double ly = f.top + 10;
  svg << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<text x=\"" << px(lx) << "\" y=\"" << px(ly) << "\" font-weight=\"bold\">region</text>\n";
  for (auto region : {carto::Region::easy_to_learn, carto::Region::ambiguous, carto::Region::hard_to_learn,
                      carto::Region::other}) {
    ly += 20;
    const auto m = marker_for(region);
    svg << "<use xlink:href=\"#" << m.id << "\" x=\"" << px(lx + 6) << "\" y=\"" << px(ly - 4) << "\"/>";
    svg << "<text x=\"" << px(lx + 18) << "\" y=\"" << px(ly) << "\">" << m.label << "</text>\n";
  }
  ly += 34;
  svg << "<text x=\"" << px(lx) << "\" y=\"" << px(ly) << "\" font-weight=\"bold\">correctness</text>\n";
  for (int b = 0; b < bins; ++b) {
    ly += 20;
    svg << "<rect x=\"" << px(lx + 1) << "\" y=\"" << px(ly - 10) << "\" width=\"10\" height=\"10\" fill=\"#444444\" "
        << "opacity=\"" << format_significant(bin_opacity(b, bins), 3) << "\"/>";
    svg << "<text x=\"" << px(lx + 18) << "\" y=\"" << px(ly) << "\">" << xml_escape(bin_label(edges, b, per_value, epochs))
        << "</text>\n";
  }
  if (sample.size() < table.rows.size()) {
    ly += 30;
    svg << "<text x=\"" << px(lx) << "\" y=\"" << px(ly) << "\">showing " << sample.size() << " of "
        << table.rows.size() << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

std::string render_curves(const trainer::CurveLog& curves, const CurveStyle& style) {
  if (curves.empty()) throw DataError("cannot render an empty curve log");
  if (style.width <= 0 || style.height <= 0) throw std::invalid_argument("curve width and height must be positive");
  const double left = 70, top = 50, right = 170, bottom = 60;
  const double w = style.width - left - right;
  const double h = style.height - top - bottom;
  if (w <= 10 || h <= 10) throw std::invalid_argument("curve plot is too small for its margins");

  const int first = curves.front().epoch;
  const int last = curves.back().epoch;
  auto x_of = [&](int epoch) {
    if (last == first) return left + w / 2;
    return left + w * static_cast<double>(epoch - first) / static_cast<double>(last - first);
  };
  auto y_of = [&](double acc) { return top + h * (1.0 - acc); };

  nlohmann::json meta = {{"artifact", "cartograph-curves"},
                         {"tool", std::string(tool_version())},
                         {"epochs", curves.size()},
                         {"transform", {{"left", left}, {"top", top}, {"width", w}, {"height", h}}}};

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<!-- " << comment_safe(meta.dump()) << " -->\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << style.width << "\" height=\""
      << style.height << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << style.width << "\" height=\"" << style.height << "\" fill=\"#ffffff\"/>\n";
  svg << "<text x=\"" << px(left + w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"16\">" << xml_escape(style.title) << "</text>\n";
  svg << "<rect class=\"frame\" x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(w) << "\" height=\""
      << px(h) << "\" fill=\"none\" stroke=\"#333333\"/>\n";

  svg << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = y_of(0.2 * i);
    svg << "<line x1=\"" << px(left - 5) << "\" y1=\"" << px(y) << "\" x2=\"" << px(left) << "\" y2=\"" << px(y)
        << "\" stroke=\"#333333\"/><text x=\"" << px(left - 8) << "\" y=\"" << px(y + 4) << "\" text-anchor=\"end\">"
        << format_significant(0.2 * i, 2) << "</text>\n";
  }
  const int span = std::max(1, last - first);
  const int step = std::max(1, span / 10);
  for (int e = first; e <= last; e += step) {
    const double x = x_of(e);
    svg << "<line x1=\"" << px(x) << "\" y1=\"" << px(top + h) << "\" x2=\"" << px(x) << "\" y2=\"" << px(top + h + 5)
        << "\" stroke=\"#333333\"/><text x=\"" << px(x) << "\" y=\"" << px(top + h + 18)
        << "\" text-anchor=\"middle\">" << e << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text x=\"" << px(left + w / 2) << "\" y=\"" << px(top + h + 40)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">epoch</text>\n";
  svg << "<text transform=\"translate(" << px(left - 45) << ',' << px(top + h / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">accuracy</text>\n";

  struct Series {
    const char* name;
    const char* color;
    double trainer::CurvePoint::*field;
  };
  const std::array<Series, 2> series = {Series{"train", "#d62728", &trainer::CurvePoint::train_accuracy},
                                        Series{"validation", "#1f77b4", &trainer::CurvePoint::validation_accuracy}};
  for (const auto& s : series) {
    if (curves.size() == 1) {
      svg << "<circle class=\"point " << s.name << "\" cx=\"" << px(x_of(curves[0].epoch)) << "\" cy=\""
          << px(y_of(curves[0].*s.field)) << "\" r=\"4\" fill=\"" << s.color << "\"/>\n";
    } else {
      svg << "<polyline class=\"curve " << s.name << "\" fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < curves.size(); ++i) {
        if (i) svg << ' ';
        svg << px(x_of(curves[i].epoch)) << ',' << px(y_of(curves[i].*s.field));
      }
      svg << "\"/>\n";
    }
  }

  const double lx = style.width - right + 20;
  double ly = top + 10;
  svg << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (const auto& s : series) {
    auto best = std::max_element(curves.begin(), curves.end(), [&](const auto& a, const auto& b) {
      return a.*s.field < b.*s.field;
    });
    svg << "<line x1=\"" << px(lx) << "\" y1=\"" << px(ly - 4) << "\" x2=\"" << px(lx + 20) << "\" y2=\"" << px(ly - 4)
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>";
    svg << "<text x=\"" << px(lx + 26) << "\" y=\"" << px(ly) << "\">" << s.name << "</text>\n";
    ly += 16;
    char buf[64];
    std::snprintf(buf, sizeof buf, "max %.1f%% @ epoch %d", 100.0 * ((*best).*s.field), best->epoch);
    svg << "<text x=\"" << px(lx + 26) << "\" y=\"" << px(ly) << "\" font-size=\"10\" fill=\"#555555\">" << buf
        << "</text>\n";
    ly += 22;
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace cartograph::render
