#pragma once

#include <string>
#include <string_view>

#include "hmcert/certifier.hpp"

namespace hmcert {

/// Toolkit version recorded in every serialized result.
std::string_view version() noexcept;

/// Curve spec documents:
///   {"type": "circle", "radius": 1}
///   {"type": "ellipse", "a": 2, "b": 1}
///   {"type": "polar", "formula_id": "cosine", "params": {"eps": 0.3, "k": 3, "r0": 1}}
///   {"type": "polar", "theta": [...], "r": [...]}
///   {"type": "points", "xy": [[x, y], ...]}
/// Throws Error{invalid_spec} naming the offending field.
CurveSpec parse_curve_spec(std::string_view text);

/// Map spec documents:
///   {"type": "identity"}
///   {"type": "sin-perturbed", "params": {"a": 0.5, "k": 1}}
///   {"type": "knots", "params": {"t": [...], "f": [...]}}
/// Family parameters may also sit at the top level.
MapSpec parse_map_spec(std::string_view text);

std::string to_json(const CurveSpec& spec);
std::string to_json(const MapSpec& spec);
std::string to_json(const OracleReport& report);
/// Every certificate field, the input specs and the toolkit version.
std::string to_json(const Certificate& cert);

}  // namespace hmcert
