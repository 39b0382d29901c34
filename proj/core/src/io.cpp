#include "setrisk/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace setrisk::io {

namespace {

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing field \"" + key + "\"");
  return j.at(key);
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    std::istringstream lines(text);
    std::string context;
    for (std::size_t k = 0; k < line && std::getline(lines, context); ++k) {
    }
    throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON parse error near \"" +
                     context + "\"");
  }
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

Rational rational_from(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw InputError("expected a rational as a \"p/q\" string, got " + j.dump());
}

json to_json(const Rational& r) { return to_string(r); }

json to_json(const Vec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

Vec vec_from(const json& j) {
  if (!j.is_array()) throw InputError("expected an array of rationals, got " + j.dump());
  Vec v;
  for (const auto& e : j) v.push_back(rational_from(e));
  return v;
}

ScenarioTree tree_from(const json& j) {
  const auto d = field(j, "d", "tree").get<long>();
  const auto horizon = field(j, "T", "tree").get<int>();
  if (d < 1) throw InputError("tree: d must be positive");
  std::vector<ScenarioTree::NodeSpec> specs;
  for (const auto& n : field(j, "nodes", "tree")) {
    ScenarioTree::NodeSpec s;
    s.id = field(n, "id", "tree node").get<std::string>();
    if (n.contains("parent") && !n.at("parent").is_null()) s.parent = n.at("parent").get<std::string>();
    s.time = field(n, "time", "tree node " + s.id).get<int>();
    s.prob = n.contains("prob") ? rational_from(n.at("prob")) : Rational(1);
    specs.push_back(std::move(s));
  }
  return ScenarioTree::build(static_cast<std::size_t>(d), horizon, specs);
}

json to_json(const ScenarioTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes()) {
    json o{{"id", n.id}, {"time", n.time}, {"prob", to_string(n.branch_prob)}};
    o["parent"] = n.parent ? json(tree.node(*n.parent).id) : json(nullptr);
    nodes.push_back(std::move(o));
  }
  return json{{"d", tree.dim()}, {"T", tree.horizon()}, {"nodes", std::move(nodes)}};
}

MarketModel market_from(const json& j, ScenarioTree tree) {
  const std::size_t d = tree.dim();
  const json& cones = field(j, "cones", "market");
  std::vector<SolvencyCone> out;
  for (const auto& n : tree.nodes()) {
    if (!cones.contains(n.id)) throw InputError("market: no cone for node " + n.id);
    const json& c = cones.at(n.id);
    if (c.value("no_trade", false)) {
      out.push_back(no_trade_cone(d));
      continue;
    }
    if (c.contains("rays") || c.contains("lines")) {
      auto list = [&](const char* key) {
        std::vector<Vec> out;
        if (c.contains(key)) {
          for (const auto& g : c.at(key)) out.push_back(vec_from(g));
        }
        for (const auto& g : out) {
          if (g.size() != d) throw InputError("market cone " + n.id + ": generator has the wrong dimension");
        }
        return out;
      };
      auto lines = list("lines");
      SolvencyCone k{Cone::from_generators(d, list("rays"), lines), lines.empty()};
      for (std::size_t i = 0; i < d; ++i) {
        if (!k.cone.contains(unit(d, i))) throw InputError("market cone " + n.id + ": must contain the orthant");
      }
      out.push_back(std::move(k));
      continue;
    }
    std::vector<Vec> pi;
    for (const auto& row : field(c, "bidask", "market cone " + n.id)) pi.push_back(vec_from(row));
    try {
      out.push_back(solvency_cone(pi));
    } catch (const InputError& e) {
      throw InputError("market cone " + n.id + ": " + e.what());
    }
  }
  for (const auto& [id, _] : cones.items()) tree.index_of(id);  // unknown ids throw
  std::vector<EligibleSpace> eligible(static_cast<std::size_t>(tree.horizon()) + 1, EligibleSpace::full(d));
  if (j.contains("eligible")) {
    for (const auto& [key, e] : j.at("eligible").items()) {
      int t = 0;
      try {
        t = std::stoi(key);
      } catch (const std::exception&) {
        throw InputError("market: eligible key \"" + key + "\" is not a time");
      }
      if (t < 0 || t > tree.horizon()) throw InputError("market: eligible time " + key + " out of range");
      std::vector<Vec> basis;
      for (const auto& b : field(e, "basis", "market eligible " + key)) basis.push_back(vec_from(b));
      eligible[static_cast<std::size_t>(t)] = EligibleSpace(d, std::move(basis));
    }
  }
  return MarketModel(std::move(tree), std::move(out), std::move(eligible));
}

json to_json(const MarketModel& m) {
  json cones = json::object();
  for (const auto& n : m.tree.nodes()) {
    const auto& cone = m.cones[m.tree.index_of(n.id)];
    json gens = json::array();
    for (const auto& r : cone.cone.rays()) gens.push_back(to_json(r));
    json lines = json::array();
    for (const auto& l : cone.cone.lines()) lines.push_back(to_json(l));
    cones[n.id] = json{{"rays", gens}, {"lines", lines}, {"proper", cone.proper}};
  }
  json eligible = json::object();
  for (int t = 0; t <= m.tree.horizon(); ++t) {
    json basis = json::array();
    for (const auto& b : m.eligible_at(t).basis()) basis.push_back(to_json(b));
    eligible[std::to_string(t)] = json{{"basis", basis}};
  }
  return json{{"cones", cones}, {"eligible", eligible}};
}

AdaptedVector claim_from(const json& j, const ScenarioTree& tree) {
  const json& c = field(j, "claim", "claim");
  std::map<std::string, Vec> by_id;
  for (const auto& [id, v] : c.items()) by_id[id] = vec_from(v);
  return make_adapted(tree, tree.horizon(), by_id);
}

json claim_to_json(const AdaptedVector& x, const ScenarioTree& tree) {
  json c = json::object();
  for (const std::size_t n : tree.nodes_at(x.time)) c[tree.node(n).id] = to_json(x.at(tree, n));
  return json{{"claim", c}};
}

VectorMeasure measure_from(const json& j, const ScenarioTree& tree) {
  const json& mj = field(j, "measure", "measure");
  VectorMeasure q;
  q.weights.assign(tree.dim(), Vec(tree.num_leaves()));
  for (std::size_t i = 0; i < tree.dim(); ++i) {
    const json& comp = field(mj, std::to_string(i + 1).c_str(), "measure");
    for (const std::size_t l : tree.leaves()) {
      q.weights[i][tree.node(l).position] = rational_from(field(comp, tree.node(l).id.c_str(), "measure component"));
    }
  }
  check_measure(tree, q);
  return q;
}

json measure_to_json(const VectorMeasure& q, const ScenarioTree& tree) {
  json mj = json::object();
  for (std::size_t i = 0; i < q.weights.size(); ++i) {
    json comp = json::object();
    for (const std::size_t l : tree.leaves()) comp[tree.node(l).id] = to_string(q.weights[i][tree.node(l).position]);
    mj[std::to_string(i + 1)] = comp;
  }
  return json{{"measure", mj}};
}

AcceptanceSpec spec_from(const json& j, const MarketModel& m) {
  const std::string kind = field(j, "measure", "spec").get<std::string>();
  if (kind == "regulator") return AcceptanceSpec::regulator();
  if (kind == "market_sum") return AcceptanceSpec::market_sum();
  if (kind == "constructive") {
    std::vector<ScalarComponent> comps;
    for (const auto& c : field(j, "components", "constructive spec")) {
      const std::string k = field(c, "kind", "component").get<std::string>();
      if (k == "worst_case") {
        comps.push_back(ScalarComponent::worst_case());
      } else if (k == "avar") {
        comps.push_back(ScalarComponent::avar(rational_from(field(c, "level", "avar component"))));
      } else {
        throw InputError("unknown component kind \"" + k + "\"");
      }
    }
    if (comps.size() != m.dim()) throw InputError("constructive spec needs one component per asset");
    const std::string ex = j.value("exchange", std::string("none"));
    if (ex != "none" && ex != "solvency") throw InputError("exchange must be \"none\" or \"solvency\"");
    return AcceptanceSpec::constructive(std::move(comps), ex == "none" ? Exchange::None : Exchange::Solvency);
  }
  if (kind == "custom") {
    Polyhedron p = polyhedron_from(field(j, "set", "custom spec"));
    if (p.dim() != m.dim() * m.tree.num_leaves()) throw InputError("custom set must live in leaf-major coordinates");
    return AcceptanceSpec::custom_set(std::move(p));
  }
  throw InputError("unknown measure \"" + kind + "\"");
}

json to_json(const AcceptanceSpec& spec) {
  using Kind = AcceptanceSpec::Kind;
  switch (spec.kind) {
    case Kind::Regulator:
      return json{{"measure", "regulator"}};
    case Kind::MarketSum:
      return json{{"measure", "market_sum"}};
    case Kind::Constructive: {
      json comps = json::array();
      for (const auto& c : spec.components) {
        if (c.kind == ScalarComponent::Kind::WorstCase) {
          comps.push_back(json{{"kind", "worst_case"}});
        } else {
          comps.push_back(json{{"kind", "avar"}, {"level", to_string(c.level)}});
        }
      }
      return json{{"measure", "constructive"},
                  {"components", comps},
                  {"exchange", spec.exchange == Exchange::None ? "none" : "solvency"}};
    }
    case Kind::Custom:
      return json{{"measure", "custom"}, {"set", to_json(*spec.custom)}};
  }
  return json{};
}

Polyhedron polyhedron_from(const json& j) {
  const auto dim = field(j, "dim", "polyhedron").get<std::size_t>();
  auto halfspaces = [&](const char* key) {
    std::vector<Halfspace> out;
    if (!j.contains(key)) return out;
    for (const auto& h : j.at(key)) {
      Halfspace hs{vec_from(field(h, "a", "halfspace")), rational_from(field(h, "b", "halfspace"))};
      if (hs.a.size() != dim) throw InputError("halfspace has the wrong dimension");
      out.push_back(std::move(hs));
    }
    return out;
  };
  const bool has_h = j.contains("ineqs") || j.contains("eqs");
  const bool has_v = j.contains("vertices");
  if (j.value("empty", false)) return Polyhedron::empty(dim);
  if (has_h) return Polyhedron::from_inequalities(dim, halfspaces("ineqs"), halfspaces("eqs"));
  if (has_v) {
    auto list = [&](const char* key) {
      std::vector<Vec> out;
      if (!j.contains(key)) return out;
      for (const auto& v : j.at(key)) {
        out.push_back(vec_from(v));
        if (out.back().size() != dim) throw InputError("generator has the wrong dimension");
      }
      return out;
    };
    return Polyhedron::from_generators(dim, list("vertices"), list("rays"), list("lines"));
  }
  return Polyhedron::whole(dim);
}

json to_json(const Polyhedron& p) {
  json o{{"dim", p.dim()}};
  if (p.is_empty()) {
    o["empty"] = true;
    o["ineqs"] = json::array({json{{"a", to_json(zeros(p.dim()))}, {"b", "1"}}});
    return o;
  }
  auto hs = [](const std::vector<Halfspace>& v) {
    json a = json::array();
    for (const auto& h : v) a.push_back(json{{"a", to_json(h.a)}, {"b", to_string(h.b)}});
    return a;
  };
  auto gens = [](const std::vector<Vec>& v) {
    json a = json::array();
    for (const auto& g : v) a.push_back(to_json(g));
    return a;
  };
  o["ineqs"] = hs(p.inequalities());
  o["eqs"] = hs(p.equations());
  o["vertices"] = gens(p.vertices());
  o["rays"] = gens(p.rays());
  o["lines"] = gens(p.lines());
  return o;
}

json to_json(const RiskResult& r, const ScenarioTree& tree) {
  json nodes = json::object();
  const auto& ids = tree.nodes_at(r.t);
  for (std::size_t k = 0; k < ids.size(); ++k) nodes[tree.node(ids[k]).id] = to_json(r.nodes[k]);
  return json{{"t", r.t}, {"measure", r.measure}, {"nodes", nodes}, {"flags", r.flags}};
}

json to_json(const DualSet& duals, const ScenarioTree& tree) {
  json members = json::array();
  for (const auto& v : duals.members) {
    members.push_back(json{{"w", to_json(v.w)},
                           {"Q", measure_to_json(v.q, tree).at("measure")},
                           {"density", to_json(v.z)},
                           {"source_ray", v.source_ray}});
  }
  return json{{"maximal", duals.maximal}, {"rays", duals.rays.size()}, {"dropped", duals.dropped},
              {"members", members}};
}

json to_json(const StabilityReport& r) {
  json nodes = json::array();
  for (const auto& n : r.nodes) {
    json o{{"node", n.node},
           {"lhs_in_rhs", n.lhs_in_rhs},
           {"rhs_in_lhs", n.rhs_in_lhs},
           {"pasting_ok", n.pasting_ok},
           {"lhs_generators", n.lhs_generators},
           {"rhs_generators", n.rhs_generators},
           {"pastings_checked", n.pastings_checked}};
    if (n.witness_z) o["witness_z"] = to_json(*n.witness_z);
    if (n.witness_y) o["witness_y"] = to_json(*n.witness_y);
    if (!n.witness_side.empty()) o["witness_side"] = n.witness_side;
    nodes.push_back(std::move(o));
  }
  return json{{"t", r.t}, {"s", r.s}, {"holds", r.holds}, {"nodes", nodes}};
}

json to_json(const SuperhedgingPrice& p) { return json{{"primal", to_string(p.primal)}, {"dual", to_string(p.dual)}}; }

json approximate(const json& j) {
  static const std::set<std::string> labels{"id",   "node",     "parent",  "measure", "check", "instance",
                                            "side", "details",  "verdict", "flags",   "kind",  "witness_side"};
  if (j.is_object()) {
    json o = json::object();
    for (const auto& [k, v] : j.items()) o[k] = labels.count(k) ? v : approximate(v);
    return o;
  }
  if (j.is_array()) {
    json a = json::array();
    for (const auto& v : j) a.push_back(approximate(v));
    return a;
  }
  if (j.is_string()) {
    try {
      return to_double(parse_rational(j.get<std::string>()));
    } catch (const InputError&) {
      return j;
    }
  }
  return j;
}

std::string to_csv_row(const std::string& node, const Vec& w, const ExtendedValue& value) {
  std::string row = node + ",";
  for (std::size_t i = 0; i < w.size(); ++i) row += (i ? " " : "") + to_string(w[i]);
  return row + "," + to_string(value);
}

}  // namespace setrisk::io
