#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "cartograph/error.hpp"
#include "cartograph/render.hpp"
#include "cartograph/synthetic.hpp"

using namespace cartograph;
using namespace cartograph::render;
namespace pt = boost::property_tree;

namespace {

pt::ptree parse_xml(const std::string& text) {
  std::istringstream in(text);
  pt::ptree tree;
  pt::read_xml(in, tree);
  return tree;
}

struct Marker {
  std::string cls;
  double x = 0.0;
  double y = 0.0;
};

void collect_markers(const pt::ptree& node, std::vector<Marker>& out) {
  for (const auto& [name, child] : node) {
    if (name == "use") {
      const auto cls = child.get<std::string>("<xmlattr>.class", "");
      if (cls.rfind("marker ", 0) == 0) {
        out.push_back({cls.substr(7), child.get<double>("<xmlattr>.x"), child.get<double>("<xmlattr>.y")});
      }
    } else if (name != "<xmlattr>") {
      collect_markers(child, out);
    }
  }
}

std::size_t count_elements(const pt::ptree& node, const std::string& element, const std::string& cls) {
  std::size_t n = 0;
  for (const auto& [name, child] : node) {
    if (name == "<xmlattr>") continue;
    if (name == element && child.get<std::string>("<xmlattr>.class", "") == cls) ++n;
    n += count_elements(child, element, cls);
  }
  return n;
}

}  // namespace

TEST_CASE("frame transform inverts") {
  for (bool hist : {false, true}) {
    MapStyle style;
    style.side_histograms = hist;
    const auto f = map_frame(style);
    CHECK(f.width > 0);
    CHECK(f.height > 0);
    for (double v : {0.0, 0.123, 0.5}) CHECK(f.variability_at(f.x(v)) == doctest::Approx(v));
    for (double c : {0.0, 0.77, 1.0}) CHECK(f.confidence_at(f.y(c)) == doctest::Approx(c));
    CHECK(f.y(1.0) == f.top);
    CHECK(f.x(0.0) == f.left);
  }
}

TEST_CASE("correctness bins") {
  const auto four = correctness_bin_edges(4, 5);
  CHECK(four == std::vector<double>{0.0, 0.125, 0.375, 0.625, 0.875, 1.0});
  for (int k = 0; k <= 4; ++k) CHECK(correctness_bin(k / 4.0, four) == k);

  const auto twenty = correctness_bin_edges(20, 5);
  CHECK(twenty.size() == 6);
  CHECK(correctness_bin(1.0, twenty) == 4);
  CHECK(correctness_bin(0.0, twenty) == 0);
}

TEST_CASE("map is well-formed and markers invert to the metrics") {
  const auto table = synthetic::random_metrics(500, 5, 3);
  const auto regions = carto::classify(table);
  MapStyle style;
  style.title = "Map <test> & co";
  const auto svg = render_map(table, regions, style);
  const auto tree = parse_xml(svg);
  CHECK(tree.get_child_optional("svg").has_value());

  std::vector<Marker> markers;
  collect_markers(tree, markers);
  REQUIRE(markers.size() == 500);
  const auto f = map_frame(style);
  for (std::size_t i = 0; i < markers.size(); ++i) {
    const auto& r = table.rows[i];
    CHECK(markers[i].cls == std::string(carto::to_string(regions.region_of(r.guid))));
    CHECK(std::abs(markers[i].x - f.x(r.variability)) <= 0.5);
    CHECK(std::abs(markers[i].y - f.y(r.confidence)) <= 0.5);
    CHECK(std::abs(f.variability_at(markers[i].x) - r.variability) <= 0.5 * 0.5 / f.width);
    CHECK(std::abs(f.confidence_at(markers[i].y) - r.confidence) <= 0.5 / f.height);
  }
  CHECK(svg.find("#d62728") != std::string::npos);
  CHECK(svg.find("#1f77b4") != std::string::npos);
}

TEST_CASE("large tables are thinned to the cap") {
  const auto table = synthetic::random_metrics(3000, 20, 8);
  const auto regions = carto::classify(table);
  MapStyle style;
  style.sample_cap = 1000;
  style.side_histograms = true;
  const auto svg = render_map(table, regions, style);
  std::vector<Marker> markers;
  collect_markers(parse_xml(svg), markers);
  CHECK(markers.size() == 1000);
  CHECK(render_map(table, regions, style) == svg);

  const auto sample = map_sample(3000, style);
  CHECK(sample.size() == 1000);
  CHECK(std::is_sorted(sample.begin(), sample.end()));
  style.sample_seed = 1;
  CHECK(map_sample(3000, style) != sample);
}

TEST_CASE("render errors") {
  CHECK_THROWS_AS(render_map({}, {}, {}), DataError);
  CHECK_THROWS_AS(render_curves({}, {}), DataError);
}

TEST_CASE("training curves") {
  trainer::CurveLog curves;
  for (int e = 1; e <= 20; ++e) curves.push_back({e, 0.5 + e * 0.02, 0.4 + e * 0.0235, 1.0 / e});
  const auto svg = render_curves(curves);
  const auto tree = parse_xml(svg);
  CHECK(count_elements(tree, "polyline", "curve train") == 1);
  CHECK(count_elements(tree, "polyline", "curve validation") == 1);
  CHECK(svg.find("max 87.0% @ epoch 20") != std::string::npos);

  const auto single = render_curves({{1, 0.9, 0.8, 0.3}});
  const auto t1 = parse_xml(single);
  CHECK(count_elements(t1, "circle", "point train") == 1);
  CHECK(count_elements(t1, "circle", "point validation") == 1);
}
