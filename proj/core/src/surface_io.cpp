#include "hourglass/surface_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hourglass {

namespace {

using Json = nlohmann::ordered_json;

std::string format_coord(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_keys(const Json& obj, const std::set<std::string>& allowed,
                bool lax, const std::string& where) {
  if (lax) return;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      fail(ErrorCode::FormatError, "unknown key '" + it.key() + "' in " + where);
  }
}

double parse_coord(const Json& value, Rational* exact, bool* all_exact) {
  std::string text;
  if (value.is_string()) {
    text = value.get<std::string>();
  } else if (value.is_number()) {
    *all_exact = false;
    return value.get<double>();
  } else {
    fail(ErrorCode::FormatError, "coordinate must be a string or number");
  }
  auto r = Rational::parse(text);
  if (r) {
    *exact = *r;
    return r->to_double();
  }
  *all_exact = false;
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    fail(ErrorCode::FormatError, "unparsable coordinate '" + text + "'");
  }
}

}  // namespace

SurfaceSpec read_surface_spec(const std::string& text, bool lax) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::FormatError, std::string("invalid JSON: ") + e.what());
  }
  check_keys(doc, {"polygons", "gluings", "name", "normalize_area",
                   "marked_corners", "tolerance"},
             lax, "document");
  if (!doc.contains("polygons") || !doc.contains("gluings"))
    fail(ErrorCode::FormatError, "document needs 'polygons' and 'gluings'");

  SurfaceSpec spec;
  for (const auto& jpoly : doc["polygons"]) {
    Polygon poly;
    bool all_exact = true;
    std::vector<std::pair<Rational, Rational>> exact;
    for (const auto& jv : jpoly) {
      if (!jv.is_array() || jv.size() != 2)
        fail(ErrorCode::FormatError, "vertex must be a [x, y] pair");
      Rational rx, ry;
      double x = parse_coord(jv[0], &rx, &all_exact);
      double y = parse_coord(jv[1], &ry, &all_exact);
      poly.vertices.push_back({x, y});
      exact.push_back({rx, ry});
    }
    if (all_exact) poly.exact = std::move(exact);
    spec.polygons.push_back(std::move(poly));
  }
  for (const auto& jg : doc["gluings"]) {
    check_keys(jg, {"a", "b", "kind"}, lax, "gluing");
    Gluing g;
    auto edge = [](const Json& j) -> EdgeRef {
      if (!j.is_array() || j.size() != 2)
        fail(ErrorCode::FormatError, "edge reference must be [polygon, edge]");
      return {j[0].get<int>(), j[1].get<int>()};
    };
    g.a = edge(jg.at("a"));
    g.b = edge(jg.at("b"));
    std::string kind = jg.at("kind").get<std::string>();
    if (kind == "translation") {
      g.kind = GluingKind::Translation;
    } else if (kind == "half_turn") {
      g.kind = GluingKind::HalfTurn;
    } else {
      fail(ErrorCode::FormatError, "gluing kind must be translation|half_turn");
    }
    spec.gluings.push_back(g);
  }
  if (doc.contains("name")) spec.name = doc["name"].get<std::string>();
  if (doc.contains("normalize_area"))
    spec.normalize_area = doc["normalize_area"].get<bool>();
  if (doc.contains("tolerance")) spec.tolerance = doc["tolerance"].get<double>();
  if (doc.contains("marked_corners")) {
    for (const auto& jm : doc["marked_corners"]) {
      spec.marked_corners.push_back({jm[0].get<int>(), jm[1].get<int>()});
    }
  }
  return spec;
}

SurfaceSpec read_surface_file(const std::string& path, bool lax) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FormatError, "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return read_surface_spec(buffer.str(), lax);
}

std::string write_surface_spec(const SurfaceSpec& spec) {
  Json doc;
  doc["polygons"] = Json::array();
  for (const auto& poly : spec.polygons) {
    Json jpoly = Json::array();
    bool exact = poly.exact.size() == poly.vertices.size();
    for (size_t i = 0; i < poly.vertices.size(); ++i) {
      Json jv = Json::array();
      if (exact) {
        const auto& [rx, ry] = poly.exact[i];
        jv.push_back(std::to_string(rx.num()) + "/" + std::to_string(rx.den()));
        jv.push_back(std::to_string(ry.num()) + "/" + std::to_string(ry.den()));
      } else {
        jv.push_back(format_coord(poly.vertices[i].x));
        jv.push_back(format_coord(poly.vertices[i].y));
      }
      jpoly.push_back(jv);
    }
    doc["polygons"].push_back(jpoly);
  }
  doc["gluings"] = Json::array();
  for (const auto& g : spec.gluings) {
    Json jg;
    jg["a"] = {g.a.polygon, g.a.edge};
    jg["b"] = {g.b.polygon, g.b.edge};
    jg["kind"] = g.kind == GluingKind::Translation ? "translation" : "half_turn";
    doc["gluings"].push_back(jg);
  }
  if (!spec.name.empty()) doc["name"] = spec.name;
  if (spec.normalize_area) doc["normalize_area"] = true;
  if (!spec.marked_corners.empty()) {
    doc["marked_corners"] = Json::array();
    for (const auto& c : spec.marked_corners)
      doc["marked_corners"].push_back({c.polygon, c.vertex});
  }
  return doc.dump(2) + "\n";
}

void write_surface_file(const SurfaceSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::FormatError, "cannot write '" + path + "'");
  out << write_surface_spec(spec);
}

SurfaceSpec spec_of(const FlatSurface& surface) {
  SurfaceSpec spec;
  spec.polygons = surface.polygons;
  spec.gluings = surface.gluings;
  spec.name = surface.name;
  spec.tolerance = surface.tolerance;
  for (const auto& sing : surface.singularities)
    if (sing.marked) spec.marked_corners.push_back(sing.vertex_class.front());
  return spec;
}

}  // namespace hourglass
