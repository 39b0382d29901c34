#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "setrisk/duality.hpp"
#include "setrisk/harness.hpp"
#include "setrisk/risk.hpp"
#include "setrisk/scalarization.hpp"

namespace setrisk::io {

using nlohmann::json;

/// Reads a JSON file. Parse errors become InputError with line and column.
json load_json(const std::string& path);
json parse_json_text(const std::string& text, const std::string& source = "<input>");

/// Accepts "p/q" strings and JSON integers.
Rational rational_from(const json& j);
json to_json(const Rational& r);
json to_json(const Vec& v);
Vec vec_from(const json& j);

/// {"d", "T", "nodes": [{"id", "parent", "time", "prob"}]}; parent null or
/// absent for the root.
ScenarioTree tree_from(const json& j);
json to_json(const ScenarioTree& tree);

/// {"cones": {id: {"bidask": [[..]]} | {"no_trade": true} | {"rays", "lines"}},
/// "eligible": {time: {"basis": [[..]]}}}. Missing eligible times default to
/// R^d. Output uses the generator form so that it loads back unchanged.
MarketModel market_from(const json& j, ScenarioTree tree);
json to_json(const MarketModel& m);

/// {"claim": {leaf_id: [..]}}.
AdaptedVector claim_from(const json& j, const ScenarioTree& tree);
json claim_to_json(const AdaptedVector& x, const ScenarioTree& tree);

/// {"measure": {component: {leaf_id: rational}}}, components "1".."d".
VectorMeasure measure_from(const json& j, const ScenarioTree& tree);
json measure_to_json(const VectorMeasure& q, const ScenarioTree& tree);

/// {"measure": "regulator" | "market_sum" | "constructive" | "custom", ...}.
/// Constructive: "components": [{"kind": "worst_case"} | {"kind": "avar",
/// "level": "1/2"}], "exchange": "none" | "solvency". Custom: "set": a
/// polyhedron in leaf-major coordinates.
AcceptanceSpec spec_from(const json& j, const MarketModel& m);
json to_json(const AcceptanceSpec& spec);

/// {"dim", "ineqs": [{"a", "b"}], "eqs": [...], "vertices", "rays", "lines"}.
Polyhedron polyhedron_from(const json& j);
json to_json(const Polyhedron& p);

/// {"t", "measure", "nodes": {id: polyhedron}, "flags"}.
json to_json(const RiskResult& r, const ScenarioTree& tree);

json to_json(const DualSet& duals, const ScenarioTree& tree);
json to_json(const StabilityReport& r);
json to_json(const SuperhedgingPrice& p);

/// Replaces every rational string by its double value. For plotting only.
json approximate(const json& j);

std::string to_csv_row(const std::string& node, const Vec& w, const ExtendedValue& value);

}  // namespace setrisk::io
