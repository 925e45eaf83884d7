#include "hmcert/spec_json.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "hmcert/error.hpp"
#include "json.hpp"

namespace hmcert {

using nlohmann::json;

std::string_view version() noexcept { return HMCERT_VERSION_STRING; }

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::invalid_spec, "field '" + field + "': " + why);
}

json parse_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::invalid_spec, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) bad_field("<root>", "expected an object");
  if (!doc.contains("type")) bad_field("type", "missing");
  if (!doc["type"].is_string()) bad_field("type", "expected a string");
  return doc;
}

// Looks a family parameter up under "params" first, then at the top level.
const json* find_param(const json& doc, const std::string& key) {
  if (doc.contains("params") && doc["params"].is_object() && doc["params"].contains(key)) {
    return &doc["params"][key];
  }
  if (doc.contains(key)) return &doc[key];
  return nullptr;
}

double number(const json& doc, const std::string& key, std::optional<double> fallback = std::nullopt) {
  const json* v = find_param(doc, key);
  if (!v) {
    if (fallback) return *fallback;
    bad_field(key, "missing");
  }
  if (!v->is_number()) bad_field(key, "expected a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) bad_field(key, "not finite");
  return x;
}

std::vector<double> number_array(const json& doc, const std::string& key) {
  const json* v = find_param(doc, key);
  if (!v) bad_field(key, "missing");
  if (!v->is_array()) bad_field(key, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v->size());
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number()) bad_field(key + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back((*v)[i].get<double>());
  }
  return out;
}

json curve_json(const CurveSpec& s) {
  json j;
  switch (s.family) {
    case CurveFamily::circle:
      j = {{"type", "circle"}, {"radius", s.radius}};
      break;
    case CurveFamily::ellipse:
      j = {{"type", "ellipse"}, {"a", s.a}, {"b", s.b}};
      break;
    case CurveFamily::polar_formula: {
      json params = json::object();
      for (const auto& [k, v] : s.params) params[k] = v;
      j = {{"type", "polar"}, {"formula_id", s.formula_id}, {"params", params}};
      break;
    }
    case CurveFamily::polar_samples:
      j = {{"type", "polar"}, {"theta", s.theta}, {"r", s.r}};
      break;
    case CurveFamily::points: {
      json xy = json::array();
      for (const Point& p : s.xy) xy.push_back({p.real(), p.imag()});
      j = {{"type", "points"}, {"xy", xy}};
      break;
    }
  }
  return j;
}

json map_json(const MapSpec& s) {
  switch (s.family) {
    case MapFamily::identity:
      return {{"type", "identity"}};
    case MapFamily::sin_perturbed:
      return {{"type", "sin-perturbed"}, {"params", {{"a", s.a}, {"k", s.k}}}};
    case MapFamily::knots:
      return {{"type", "knots"}, {"params", {{"t", s.t}, {"f", s.f}}}};
  }
  return {};
}

json oracle_json(const OracleReport& r) {
  return {{"grid_r", r.grid_r},
          {"grid_theta", r.grid_theta},
          {"max_radius", r.max_radius},
          {"min_interior_J", r.min_interior_J},
          {"injective_on_grid", r.injective_on_grid},
          {"boundary_winding", r.boundary_winding},
          {"separation", r.separation},
          {"verdict", std::string(to_string(r.verdict))}};
}

}  // namespace

CurveSpec parse_curve_spec(std::string_view text) {
  const json doc = parse_document(text);
  const std::string type = doc["type"].get<std::string>();
  if (type == "circle") return CurveSpec::circle(number(doc, "radius", 1.0));
  if (type == "ellipse") return CurveSpec::ellipse(number(doc, "a"), number(doc, "b"));
  if (type == "polar") {
    if (doc.contains("formula_id")) {
      if (!doc["formula_id"].is_string()) bad_field("formula_id", "expected a string");
      CurveSpec s;
      s.family = CurveFamily::polar_formula;
      s.formula_id = doc["formula_id"].get<std::string>();
      const auto catalog = polar_formula_catalog();
      if (std::find(catalog.begin(), catalog.end(), s.formula_id) == catalog.end()) {
        bad_field("formula_id", "unknown polar formula '" + s.formula_id + "'");
      }
      if (doc.contains("params")) {
        if (!doc["params"].is_object()) bad_field("params", "expected an object");
        for (const auto& [k, v] : doc["params"].items()) {
          if (!v.is_number()) bad_field("params." + k, "expected a number");
          s.params[k] = v.get<double>();
        }
      }
      return s;
    }
    if (!doc.contains("theta")) bad_field("theta", "missing (polar curves need formula_id or theta/r)");
    return CurveSpec::polar_samples(number_array(doc, "theta"), number_array(doc, "r"));
  }
  if (type == "points") {
    const json* v = find_param(doc, "xy");
    if (!v) bad_field("xy", "missing");
    if (!v->is_array()) bad_field("xy", "expected an array of [x, y] pairs");
    std::vector<Point> xy;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& p = (*v)[i];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        bad_field("xy[" + std::to_string(i) + "]", "expected [x, y]");
      }
      xy.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return CurveSpec::points(std::move(xy));
  }
  bad_field("type", "unknown curve type '" + type + "'");
}

MapSpec parse_map_spec(std::string_view text) {
  const json doc = parse_document(text);
  const std::string type = doc["type"].get<std::string>();
  if (type == "identity") return MapSpec::identity();
  if (type == "sin-perturbed") {
    const double k = number(doc, "k");
    if (k != std::round(k) || k < 1.0 || k > 1e6) bad_field("k", "expected a positive integer");
    return MapSpec::sin_perturbed(number(doc, "a"), static_cast<int>(k));
  }
  if (type == "knots") return MapSpec::knots(number_array(doc, "t"), number_array(doc, "f"));
  bad_field("type", "unknown map type '" + type + "'");
}

std::string to_json(const CurveSpec& spec) { return curve_json(spec).dump(2); }
std::string to_json(const MapSpec& spec) { return map_json(spec).dump(2); }
std::string to_json(const OracleReport& report) { return oracle_json(report).dump(2); }

std::string to_json(const Certificate& c) {
  json j;
  j["version"] = std::string(version());
  j["curve_id"] = c.curve_id;
  j["map_id"] = c.map_id;
  j["curve"] = curve_json(c.curve_spec);
  j["map"] = map_json(c.map_spec);
  j["mollification"] = c.mollification;
  j["dini_convergent"] = c.dini_convergent;
  j["dini_value"] = c.dini_value;
  j["convex"] = c.convex;
  j["omega_safety"] = c.omega_safety;
  j["lipschitz"] = c.lipschitz;
  j["min_T"] = c.min_T;
  j["argmin_T"] = c.argmin_T;
  j["grid_n"] = c.grid_n;
  j["tol"] = c.tol;
  j["margin"] = c.margin;
  j["max_err_est"] = c.max_err_est;
  j["max_route_gap"] = c.max_route_gap;
  j["route"] = std::string(to_string(c.profile.route));
  j["verdict"] = std::string(to_string(c.verdict));
  j["oracle"] = c.oracle ? oracle_json(*c.oracle) : json(nullptr);
  j["notes"] = {"essential infimum approximated by the grid minimum; null sets are invisible",
                "oracle is grid evidence on the open disk, not a proof"};
  return j.dump(2);
}

}  // namespace hmcert
