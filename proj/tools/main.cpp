#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "setrisk/io.hpp"

using namespace setrisk;
using setrisk::io::json;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInfeasible = 2;
constexpr int kCheckFailed = 3;

struct Options {
  std::string tree;
  std::string market;
  std::string claim;
  std::string measure;
  std::string out;
  std::string w;
  std::string suite = "all";
  std::string instance;
  std::string stability;
  int t = 0;
  int grid = -1;
  std::size_t asset = 1;
  std::uint64_t seed = 1;
  std::size_t cases = 100;
  std::size_t claims = 20;
  bool approx = false;
};

class UsageError : public InputError {
 public:
  using InputError::InputError;
};

MarketModel load_market(const Options& o) {
  if (o.tree.empty() || o.market.empty()) throw UsageError("--tree and --market are required");
  return io::market_from(io::load_json(o.market), io::tree_from(io::load_json(o.tree)));
}

AdaptedVector load_claim(const Options& o, const MarketModel& m) {
  if (o.claim.empty()) throw UsageError("--claim is required");
  return io::claim_from(io::load_json(o.claim), m.tree);
}

AcceptanceSpec load_spec(const Options& o, const MarketModel& m) {
  if (o.measure.empty()) throw UsageError("--measure is required");
  return io::spec_from(io::load_json(o.measure), m);
}

void check_time(const Options& o, const MarketModel& m) {
  if (o.t < 0 || o.t > m.tree.horizon()) {
    throw UsageError("--t must lie in [0, " + std::to_string(m.tree.horizon()) + "]");
  }
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw UsageError("cannot write " + o.out);
  f << text;
}

std::string render(const Options& o, const json& j) {
  if (!o.approx) return j.dump(2) + "\n";
  return json{{"non_authoritative_float_projection", io::approximate(j)}}.dump(2) + "\n";
}

std::string instance_name(const Options& o) {
  if (!o.instance.empty()) return o.instance;
  const auto slash = o.tree.find_last_of('/');
  std::string stem = slash == std::string::npos ? o.tree : o.tree.substr(slash + 1);
  const auto dot = stem.find('.');
  return dot == std::string::npos ? stem : stem.substr(0, dot);
}

Vec parse_weight(const std::string& text, std::size_t d) {
  Vec w;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) w.push_back(parse_rational(item));
  if (w.size() != d) throw UsageError("--w needs " + std::to_string(d) + " comma-separated entries");
  return w;
}

int cmd_validate(const Options& o) {
  const MarketModel m = load_market(o);
  std::string line = "valid";
  if (m.frictionless_somewhere()) line += "; frictionless (k3 flag)";
  const bool cps = find_consistent_price_system(m).has_value();
  line += cps ? "; CPS exists" : "; no consistent price system";
  emit(o, line + "\n");
  return cps ? kOk : kInfeasible;
}

int cmd_compute(const Options& o) {
  const MarketModel m = load_market(o);
  check_time(o, m);
  const auto r = risk_measure(load_spec(o, m), load_claim(o, m), m, o.t);
  emit(o, render(o, io::to_json(r, m.tree)));
  return kOk;
}

int cmd_scalarize(const Options& o) {
  const MarketModel m = load_market(o);
  check_time(o, m);
  std::vector<Vec> weights;
  if (o.grid >= 0) {
    if (!o.w.empty()) throw UsageError("--w and --grid are exclusive");
    if (m.dim() != 2) throw UsageError("--grid needs a two-asset market");
    weights = simplex_grid(static_cast<std::size_t>(o.grid));
  } else if (!o.w.empty()) {
    weights.push_back(normalize_weight(parse_weight(o.w, m.dim())));
  } else {
    throw UsageError("one of --w or --grid is required");
  }
  const auto r = risk_measure(load_spec(o, m), load_claim(o, m), m, o.t);
  std::string csv = o.approx ? "# non-authoritative float projection\nnode_id,w,value\n" : "node_id,w,value\n";
  for (const auto& w : weights) {
    for (const std::size_t n : m.tree.nodes_at(o.t)) {
      const ExtendedValue v = scalarize(r, w, m.tree, n);
      if (!o.approx) {
        csv += io::to_csv_row(m.tree.node(n).id, w, v) + "\n";
        continue;
      }
      std::ostringstream row;
      row << m.tree.node(n).id << ",";
      for (std::size_t i = 0; i < w.size(); ++i) row << (i ? " " : "") << to_double(w[i]);
      row << ",";
      if (v.is_finite()) {
        row << to_double(v.value);
      } else {
        row << to_string(v);
      }
      csv += row.str() + "\n";
    }
  }
  emit(o, csv);
  return kOk;
}

int cmd_price(const Options& o) {
  const MarketModel m = load_market(o);
  if (o.asset < 1 || o.asset > m.dim()) throw UsageError("--asset must lie in [1, " + std::to_string(m.dim()) + "]");
  const auto p = superhedging_price(load_claim(o, m), o.asset - 1, m);
  // Ordered and compact: {"primal":"..","dual":".."}.
  nlohmann::ordered_json j;
  if (o.approx) {
    j["non_authoritative_float_projection"] = {{"primal", to_double(p.primal)}, {"dual", to_double(p.dual)}};
  } else {
    j["primal"] = to_string(p.primal);
    j["dual"] = to_string(p.dual);
  }
  emit(o, j.dump() + "\n");
  return kOk;
}

int cmd_dual(const Options& o) {
  const MarketModel m = load_market(o);
  const AcceptanceSpec spec = load_spec(o, m);
  const DualSet duals = max_dual_set(spec, m);
  json report = io::to_json(duals, m.tree);
  if (!o.claim.empty()) report["value"] = io::to_json(evaluate_dual(duals, load_claim(o, m), m), m.tree);
  bool stable = true;
  if (!o.stability.empty()) {
    int t = 0, s = 0;
    char comma = 0;
    std::istringstream in(o.stability);
    if (!(in >> t >> comma >> s) || comma != ',' || !in.eof()) throw UsageError("--stability expects t,s");
    if (t < 0 || s <= t || s > m.tree.horizon()) throw UsageError("--stability needs 0 <= t < s <= T");
    const auto st = check_dual_stability(spec, spec, m, t, s);
    report["stability"] = io::to_json(st);
    stable = st.holds;
  }
  emit(o, render(o, report));
  return stable ? kOk : kCheckFailed;
}

int cmd_check(const Options& o) {
  const MarketModel m = load_market(o);
  SuiteOptions opt;
  opt.seed = o.seed;
  opt.cases = o.cases;
  opt.claims = o.claims;
  if (!o.measure.empty()) opt.specs.push_back(load_spec(o, m));
  const bool counter = o.suite == "counterexamples";
  const auto reports = run_suite(o.suite, m, instance_name(o), opt);
  std::string lines;
  bool ok = true;
  for (const auto& r : reports) {
    json j = r.to_json();
    if (counter) {
      // A counterexample succeeds when the property fails with a verified witness.
      j["expected_failure"] = true;
      ok = ok && !r.pass && r.verdict && r.witness_verified;
    } else {
      ok = ok && r.pass;
    }
    lines += (o.approx ? io::approximate(j) : j).dump() + "\n";
  }
  emit(o, lines);
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact set-valued risk measures on finite scenario trees"};
  app.require_subcommand(1);
  Options o;

  auto market_flags = [&](CLI::App* c) {
    c->add_option("--tree", o.tree, "Scenario tree JSON")->required();
    c->add_option("--market", o.market, "Market JSON (solvency cones, eligible spaces)")->required();
    c->add_option("--out", o.out, "Write output to a file instead of stdout");
    c->add_flag("--approx", o.approx, "Render rationals as floats (non-authoritative)");
  };

  auto* validate = app.add_subcommand("validate", "Validate a tree and market; report flags");
  market_flags(validate);

  auto* compute = app.add_subcommand("compute", "Risk measure value at time t as exact polyhedra");
  market_flags(compute);
  compute->add_option("--measure", o.measure, "Acceptance spec JSON")->required();
  compute->add_option("--claim", o.claim, "Claim JSON")->required();
  compute->add_option("--t", o.t, "Evaluation time");

  auto* scal = app.add_subcommand("scalarize", "Scalarizations as CSV rows node_id,w,value");
  market_flags(scal);
  scal->add_option("--measure", o.measure, "Acceptance spec JSON")->required();
  scal->add_option("--claim", o.claim, "Claim JSON")->required();
  scal->add_option("--t", o.t, "Evaluation time");
  scal->add_option("--w", o.w, "Weight, comma separated; normalized to the simplex");
  scal->add_option("--grid", o.grid, "Simplex grid resolution k (k+1 weights)")->check(CLI::NonNegativeNumber);

  auto* price = app.add_subcommand("price", "Superhedging price of a claim in one asset");
  market_flags(price);
  price->add_option("--claim", o.claim, "Claim JSON")->required();
  price->add_option("--asset", o.asset, "Numeraire asset, 1-based");

  auto* dual = app.add_subcommand("dual", "Maximal dual set; optional dual evaluation and stability");
  market_flags(dual);
  dual->add_option("--measure", o.measure, "Acceptance spec JSON")->required();
  dual->add_option("--claim", o.claim, "Claim JSON; adds the dual evaluation at t = 0");
  dual->add_option("--stability", o.stability, "Check dual stability at t,s");

  auto* check = app.add_subcommand("check", "Run check suites; one JSON report per line");
  market_flags(check);
  check->add_option("--suite", o.suite, "all, properties, mptc, stability, duality or counterexamples")
      ->check(CLI::IsMember({"all", "properties", "mptc", "stability", "duality", "counterexamples"}));
  check->add_option("--measure", o.measure, "Restrict to one acceptance spec");
  check->add_option("--seed", o.seed, "Sampling seed");
  check->add_option("--cases", o.cases, "Randomized cases per property");
  check->add_option("--claims", o.claims, "Random claims per recursion or duality check");
  check->add_option("--instance", o.instance, "Instance label in reports (default: tree file stem)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*compute) return cmd_compute(o);
    if (*scal) return cmd_scalarize(o);
    if (*price) return cmd_price(o);
    if (*dual) return cmd_dual(o);
    if (*check) return cmd_check(o);
  } catch (const InfeasibleModelError& e) {
    std::cerr << "infeasible model: " << e.what() << "\n";
    return kInfeasible;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
