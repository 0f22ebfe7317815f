#include "arbor/cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "arbor/errors.hpp"
#include "arbor/parity.hpp"
#include "arbor/pink.hpp"
#include "arbor/preimage_tree.hpp"
#include "arbor/square_class.hpp"
#include "arbor/verify/acceptance.hpp"
#include "arbor/verify/oracles.hpp"

namespace arbor::cli {

namespace {

using Json = nlohmann::ordered_json;

enum class Format { tty, json, csv };

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// What a command produced: one JSON document, a table for csv/tty and a few
// summary lines shown above the table on a terminal.
struct Outcome {
  Json json;
  Table table;
  std::vector<std::string> summary;
  int exit_code = kExitOk;
};

struct Options {
  std::string r = "1";
  std::string n = "1";
  std::uint64_t p = 0;
  std::optional<std::string> c;
  std::optional<std::string> x0;
  std::uint64_t seed = 1;
  std::uint64_t cap = std::uint64_t{1} << 24;
  std::string format = "tty";
  std::string out;
  std::string profile = "quick";
  std::optional<std::string> sigma;
  std::optional<int> alpha;
  bool mutate = false;
  bool list = false;
  bool timings = false;
  bool seed_given = false;
};

int single_int(const std::string& text, const char* flag) {
  const auto values = parse_int_range(text);
  if (values.size() != 1) throw DomainError(std::string(flag) + " expects a single integer, got '" + text + "'");
  return values.front();
}

std::uint64_t parse_u64(const std::string& text, const char* flag) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw DomainError(std::string(flag) + " expects a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::string yes_no(bool v) { return v ? "true" : "false"; }

Json residue_json(const TruncatedResidue& t) { return Json{{"value", t.value}, {"exp", t.exponent}}; }

Json coeffs_json(const FqElement& v) { return Json(std::vector<std::uint64_t>(v.coeffs().begin(), v.coeffs().end())); }

std::string word_key(NodeAddress x) { return x.level == 0 ? "()" : x.to_string(); }

// Named pass/fail checks, rendered as {"name", "pass", "detail"} in JSON.
class Checklist {
 public:
  void add(std::string name, bool pass, std::string detail = {}) {
    items_.push_back({std::move(name), pass, std::move(detail)});
  }
  // Runs `check`, turning an integrity error into a failed entry.
  void guarded(const std::string& name, const std::function<std::pair<bool, std::string>()>& check) {
    try {
      auto [pass, detail] = check();
      add(name, pass, std::move(detail));
    } catch (const IntegrityError& e) {
      add(name, false, e.what());
    }
  }
  bool all_pass() const {
    return std::all_of(items_.begin(), items_.end(), [](const Item& i) { return i.pass; });
  }
  Json json() const {
    Json out = Json::array();
    for (const auto& i : items_) out.push_back(Json{{"name", i.name}, {"pass", i.pass}, {"detail", i.detail}});
    return out;
  }
  Table table() const {
    Table t{{"check", "pass", "detail"}, {}};
    for (const auto& i : items_) t.rows.push_back({i.name, yes_no(i.pass), i.detail});
    return t;
  }

 private:
  struct Item {
    std::string name;
    bool pass;
    std::string detail;
  };
  std::vector<Item> items_;
};

// ---------------------------------------------------------------------------
// orders

Outcome cmd_orders(const Options& o) {
  const auto rs = parse_int_range(o.r);
  const auto ns = parse_int_range(o.n);
  const auto rows = orders_table(rs, ns, o.cap);
  Outcome out;
  out.json = Json{{"command", "orders"}, {"cap", o.cap}, {"rows", Json::array()}};
  out.table.header = {"r", "n", "log2_formula", "bfs_order", "bprime_count", "match_flag"};
  bool all_match = true;
  for (const auto& row : rows) {
    Json j{{"r", row.r}, {"n", row.n}, {"log2_formula", row.log2_formula}};
    j["bfs_order"] = row.bfs_order ? Json(*row.bfs_order) : Json(nullptr);
    j["bfs_capped"] = row.bfs_capped;
    j["bprime_count"] = row.bprime_count ? Json(*row.bprime_count) : Json(nullptr);
    j["match"] = row.match;
    out.json["rows"].push_back(std::move(j));
    out.table.rows.push_back({std::to_string(row.r), std::to_string(row.n), std::to_string(row.log2_formula),
                              row.bfs_order ? std::to_string(*row.bfs_order) : (row.bfs_capped ? "capped" : ""),
                              row.bprime_count ? std::to_string(*row.bprime_count) : "", yes_no(row.match)});
    all_match = all_match && row.match;
  }
  out.json["pass"] = all_match;
  out.summary.push_back(std::to_string(rows.size()) + " rows, " + (all_match ? "all match" : "MISMATCH"));
  out.exit_code = all_match ? kExitOk : kExitVerificationFailed;
  return out;
}

// ---------------------------------------------------------------------------
// membership

Outcome cmd_membership(const Options& o) {
  const int r = single_int(o.r, "--r");
  if (r < 1) throw DomainError("--r must be at least 1");
  TreeAutomorphism sigma(1);
  std::string source;
  if (o.sigma) {
    sigma = TreeAutomorphism::from_hex(*o.sigma);
    source = "hex";
  } else if (o.alpha) {
    sigma = alpha_generator(*o.alpha, r, single_int(o.n, "--n"));
    source = "alpha_" + std::to_string(*o.alpha);
  } else {
    sigma = random_automorphism(single_int(o.n, "--n"), o.seed);
    source = "random seed " + std::to_string(o.seed);
  }
  const bool b = in_b_prime(sigma, r);
  const bool m = in_m_prime(sigma, r);
  const bool agrees = b == oracle::in_b_prime(sigma, r) && m == oracle::in_m_prime(sigma, r);

  Outcome out;
  out.json = Json{{"command", "membership"}, {"r", r},        {"n", sigma.depth()}, {"source", source},
                  {"sigma", sigma.to_hex()}, {"in_b_prime", b}, {"in_m_prime", m}};
  out.json["p_r_root"] = m ? residue_json(p_r_root(sigma, r)) : Json(nullptr);
  out.json["oracle_agrees"] = agrees;
  out.table = Table{{"sigma", "r", "n", "in_b_prime", "in_m_prime", "p_r_root", "oracle_agrees"}, {}};
  std::string root;
  if (m) {
    const auto t = p_r_root(sigma, r);
    root = std::to_string(t.value) + " mod 2^" + std::to_string(t.exponent);
  }
  out.table.rows.push_back({sigma.to_hex(), std::to_string(r), std::to_string(sigma.depth()), yes_no(b), yes_no(m),
                            root, yes_no(agrees)});
  out.exit_code = agrees ? kExitOk : kExitVerificationFailed;
  return out;
}

// ---------------------------------------------------------------------------
// pink-closure

Outcome cmd_pink_closure(const Options& o) {
  const int r = single_int(o.r, "--r");
  const int n = single_int(o.n, "--n");
  const GeneratorSet gens = verify::acceptance_generators(r, n, o.mutate);
  Checklist checks;
  bool gens_inside = true;
  for (const auto& g : gens.elements) gens_inside = gens_inside && in_b_prime(g, r);
  checks.add("generators_in_b_prime", gens_inside);

  const std::int64_t log2 = log2_order_pink(r, n);
  const FiniteGroup group = closure(gens, o.cap);
  const bool order_ok = log2 < 64 && group.order() == (std::uint64_t{1} << log2);
  checks.add("order_matches_formula", order_ok,
             "|closure| = " + std::to_string(group.order()) + ", formula 2^" + std::to_string(log2));
  std::optional<std::uint64_t> bprime;
  if (n <= kEnumerationMaxDepth) {
    const FiniteGroup b = enumerate_b_prime(r, n);
    bprime = b.order();
    checks.add("closure_equals_b_prime", group == b, "|B'| = " + std::to_string(b.order()));
  }

  Outcome out;
  out.json = Json{{"command", "pink-closure"}, {"r", r}, {"n", n}, {"mutated", o.mutate},
                  {"order", group.order()}, {"log2_formula", log2}};
  out.json["bprime_count"] = bprime ? Json(*bprime) : Json(nullptr);
  out.json["checks"] = checks.json();
  out.json["pass"] = checks.all_pass();
  out.summary.push_back("closure of " + std::to_string(gens.elements.size()) + " generators at (r,n) = (" +
                        std::to_string(r) + "," + std::to_string(n) + "): " + std::to_string(group.order()) +
                        " elements");
  out.table = checks.table();
  out.exit_code = checks.all_pass() ? kExitOk : kExitVerificationFailed;
  return out;
}

// ---------------------------------------------------------------------------
// enumerate-bprime

Outcome cmd_enumerate_bprime(const Options& o) {
  Outcome out;
  out.json = Json{{"command", "enumerate-bprime"}, {"rows", Json::array()}};
  out.table.header = {"r", "n", "bprime_count", "mprime_count", "log2_formula", "index", "expected_index", "match_flag"};
  bool all_match = true;
  for (const int r : parse_int_range(o.r)) {
    for (const int n : parse_int_range(o.n)) {
      const FiniteGroup b = enumerate_b_prime(r, n);
      const FiniteGroup m = enumerate_m_prime(r, n);
      const std::int64_t log2 = log2_order_pink(r, n);
      const std::uint64_t index = m.order() / b.order();
      const std::uint64_t expected = std::uint64_t{1} << (e_bound(0, n, r) - 1);
      const bool match = b.order() == (std::uint64_t{1} << log2) && index * b.order() == m.order() && index == expected;
      all_match = all_match && match;
      Json row{{"r", r}, {"n", n}, {"bprime_count", b.order()}, {"mprime_count", m.order()}, {"log2_formula", log2},
               {"index", index}, {"expected_index", expected}, {"match", match}};
      if (o.list) {
        Json elements = Json::array();
        for (const auto& s : b.elements()) elements.push_back(s.to_hex());
        row["elements"] = std::move(elements);
      }
      out.json["rows"].push_back(std::move(row));
      out.table.rows.push_back({std::to_string(r), std::to_string(n), std::to_string(b.order()),
                                std::to_string(m.order()), std::to_string(log2), std::to_string(index),
                                std::to_string(expected), yes_no(match)});
    }
  }
  out.json["pass"] = all_match;
  out.exit_code = all_match ? kExitOk : kExitVerificationFailed;
  return out;
}

// ---------------------------------------------------------------------------
// frobenius-verify, label-tree

struct TreeRun {
  PcfParameter f;
  std::uint64_t x0 = 0;
  int n = 0;
  std::optional<PreimageTree> tree;
  std::optional<TreeAutomorphism> sigma;
  std::optional<PembedReport> pembed;
  Checklist checks;
  std::string mutation;
};

TreeRun run_tree(const Options& o) {
  if (o.p == 0) throw DomainError("--p is required");
  TreeRun run;
  const int r = single_int(o.r, "--r");
  run.n = single_int(o.n, "--n");
  check_depth(run.n);
  std::uint64_t c = 0;
  if (o.c) {
    c = parse_u64(*o.c, "--c");
  } else {
    const auto found = find_pcf_c(o.p, r);
    if (found.empty()) {
      throw DomainError("no c in F_" + std::to_string(o.p) + " gives 0 exact period " + std::to_string(r));
    }
    c = found.front();
  }
  run.f = make_pcf(o.p, c, r);
  run.x0 = o.x0 ? parse_u64(*o.x0, "--x0") : smallest_x0(run.f);

  const PreimageTree raw = build_preimage_tree(run.f, run.x0, run.n, o.seed);
  auto& checks = run.checks;
  checks.add("structure", oracle::structural_failures(raw) == 0, "sibling negation, f(child) = parent, distinct levels");
  std::size_t count = 0;
  const std::size_t product = oracle::product_identity_failures(raw, &count);
  checks.add("half_product_identity", product == 0,
             std::to_string(count - product) + "/" + std::to_string(count) + " nodes and depths");
  const std::size_t gamma = oracle::gamma_chain_failures(raw, &count);
  checks.add("gamma_chain", gamma == 0, std::to_string(count - gamma) + "/" + std::to_string(count));

  PreimageTree tree = canonical_label(raw);
  if (o.mutate) {
    const NodeAddress y = r + 1 <= run.n ? NodeAddress{r, std::uint32_t{1}} : NodeAddress::root();
    tree.swap_children(y);
    run.mutation = "swapped the children of " + word_key(y);
  }
  const PerprodReport perprod = verify_perprod(tree);
  checks.add("perprod", perprod.ok(),
             std::to_string(perprod.checks - perprod.failures.size()) + "/" + std::to_string(perprod.checks) +
                 " admissible (x, i); target ratio zeta_{2^(i+1)}");
  const std::size_t perprod_oracle = oracle::perprod_failures(tree, &count);
  checks.add("perprod_oracle", perprod_oracle == 0, std::to_string(count - perprod_oracle) + "/" + std::to_string(count));

  checks.guarded("frobenius_well_defined", [&] {
    run.sigma = frobenius_automorphism(tree);
    return std::pair{true, std::string{}};
  });
  if (run.sigma) {
    const auto& sigma = *run.sigma;
    checks.add("frobenius_in_m_prime", in_m_prime(sigma, r) && oracle::in_m_prime(sigma, r));
    run.pembed = pembed_report(tree, sigma);
    checks.add("residues_equal_p", run.pembed->residues_match, "P_r(sigma, x) = p mod 2^e at every node");
    checks.add("residues_consistent", run.pembed->consistent);
    checks.add("tower_action", run.pembed->tower_action, "sigma(zeta) = zeta^p on the root-of-unity tower");
    const int k = tree.field().k();
    const bool order_k =
        power(sigma, static_cast<std::uint64_t>(k)).is_identity() &&
        (k == 1 || !power(sigma, static_cast<std::uint64_t>(k / 2)).is_identity());
    checks.add("frobenius_order_k", order_k, "k = " + std::to_string(k));
  }
  run.tree = std::move(tree);
  return run;
}

Json run_header(const char* command, const TreeRun& run, const Options& o) {
  const auto& field = run.tree->field();
  Json j{{"command", command}, {"p", run.f.p}, {"c", run.f.c}, {"r", run.f.r}, {"x0", run.x0},
         {"n", run.n},         {"seed", o.seed}};
  j["field"] = Json{{"k", field.k()}, {"modulus", field.modulus()}, {"restarts", run.tree->restarts()}};
  j["swaps"] = run.tree->swaps();
  if (o.mutate) j["mutation"] = run.mutation;
  return j;
}

Outcome cmd_frobenius(const Options& o) {
  const TreeRun run = run_tree(o);
  Outcome out;
  out.json = run_header("frobenius-verify", run, o);
  if (run.sigma) {
    out.json["sigma"] = run.sigma->to_hex();
    const auto& root = run.pembed->root;
    out.json["p_r_root"] = residue_json(root);
    // The cyclic subgroup {p^j mod 2^e} that the Frobenius powers realize.
    std::vector<std::uint64_t> image;
    std::uint64_t v = 1 % root.modulus();
    do {
      image.push_back(v);
      v = v * (run.f.p % root.modulus()) % root.modulus();
    } while (v != 1 % root.modulus());
    std::sort(image.begin(), image.end());
    out.json["frobenius_residue_image"] = image;
    out.summary.push_back("sigma = " + run.sigma->to_hex());
    out.summary.push_back("P_r(sigma) = " + std::to_string(root.value) + " mod 2^" + std::to_string(root.exponent));
  }
  out.json["checks"] = run.checks.json();
  out.json["pass"] = run.checks.all_pass();
  out.summary.insert(out.summary.begin(),
                     "p=" + std::to_string(run.f.p) + " c=" + std::to_string(run.f.c) + " r=" +
                         std::to_string(run.f.r) + " x0=" + std::to_string(run.x0) + " n=" + std::to_string(run.n) +
                         " over F_{p^" + std::to_string(run.tree->field().k()) + "}");
  if (o.mutate) out.summary.push_back("mutation: " + run.mutation);
  out.table = run.checks.table();
  out.exit_code = run.checks.all_pass() ? kExitOk : kExitVerificationFailed;
  return out;
}

Outcome cmd_label_tree(const Options& o) {
  const TreeRun run = run_tree(o);
  const PreimageTree& tree = *run.tree;
  Outcome out;
  out.json = run_header("label-tree", run, o);
  Json tower = Json::array();
  for (const auto& z : tree.tower()) tower.push_back(coeffs_json(z));
  out.json["tower"] = std::move(tower);
  Json nodes = Json::object();
  out.table.header = {"word", "value"};
  for (std::size_t id = 0; id < tree.values().size(); ++id) {
    const NodeAddress x = NodeAddress::from_flat(id);
    nodes[word_key(x)] = coeffs_json(tree.values()[id]);
    out.table.rows.push_back({word_key(x), tree.values()[id].to_string()});
  }
  out.json["nodes"] = std::move(nodes);
  if (run.sigma) out.json["sigma"] = run.sigma->to_hex();
  out.json["verification"] = Json{{"checks", run.checks.json()}, {"pass", run.checks.all_pass()}};
  out.summary.push_back(std::to_string(tree.values().size()) + " nodes over F_{" + std::to_string(run.f.p) + "^" +
                        std::to_string(tree.field().k()) + "}, " + std::to_string(tree.swaps()) + " swaps, " +
                        (run.checks.all_pass() ? "all checks pass" : "CHECKS FAILED"));
  out.exit_code = run.checks.all_pass() ? kExitOk : kExitVerificationFailed;
  return out;
}

// ---------------------------------------------------------------------------
// condition-check

Json verdict_json(const ConditionVerdict& v, std::span<const Rational> values) {
  Json entries = Json::array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    entries.push_back(Json{{"label", v.labels[i]}, {"value", to_string(values[i])},
                           {"class", square_class(values[i]).to_string()}});
  }
  Json deps = Json::array();
  for (const auto& d : v.dependencies) deps.push_back(d);
  return Json{{"condition", v.condition}, {"rank", v.rank}, {"dependencies", deps}, {"values", entries}};
}

Outcome cmd_condition_check(const Options& o, bool have_r, bool have_n) {
  if (!o.c || !o.x0) throw DomainError("condition-check needs --c and --x0");
  if (!have_r && !have_n) throw DomainError("condition-check needs --r, --n or both");
  const Rational c = parse_rational(*o.c);
  const Rational x0 = parse_rational(*o.x0);
  Outcome out;
  out.json = Json{{"command", "condition-check"}, {"c", to_string(c)}, {"x0", to_string(x0)}};
  out.table.header = {"test", "condition", "rank", "dependencies", "oracle_agrees"};
  bool agrees = true;
  auto record = [&](const char* key, const ConditionVerdict& v, std::vector<Rational> values) {
    const bool oracle_ok = v.condition == !oracle::subset_dependent(values);
    agrees = agrees && oracle_ok;
    Json j = verdict_json(v, values);
    j["oracle_agrees"] = oracle_ok;
    out.json[key] = std::move(j);
    std::string deps;
    for (const auto& d : v.dependencies) {
      if (!deps.empty()) deps += "; ";
      for (std::size_t i = 0; i < d.size(); ++i) deps += (i ? "*" : "") + v.labels[d[i]];
    }
    out.table.rows.push_back({key, yes_no(v.condition), std::to_string(v.rank), deps, yes_no(oracle_ok)});
  };
  if (have_r) {
    const int r = single_int(o.r, "--r");
    const auto v = check_condition_one(c, x0, r);
    std::vector<Rational> values{Rational(-1), Rational(2)};
    for (const auto& d : disc_sequence(c, x0, r)) values.push_back(d);
    record("condition_one", v, std::move(values));
  }
  if (have_n) {
    const int n = single_int(o.n, "--n");
    record("aut_tn", check_aut_tn(c, x0, n), disc_sequence(c, x0, n));
  }
  out.exit_code = agrees ? kExitOk : kExitVerificationFailed;
  return out;
}

// ---------------------------------------------------------------------------
// verify-all

Outcome cmd_verify_all(const Options& o) {
  verify::AcceptanceOptions options;
  options.profile = verify::parse_profile(o.profile);
  options.tamper_generators = o.mutate;
  if (o.seed_given) options.seed = o.seed;
  const auto results = verify::run_acceptance(options);

  Outcome out;
  out.json = Json{{"command", "verify-all"},
                  {"profile", std::string(verify::profile_name(options.profile))},
                  {"seed", options.seed},
                  {"tampered", o.mutate},
                  {"criteria", Json::array()}};
  out.table.header = {"criterion", "title", "checks", "failures", "seconds", "budget", "pass"};
  bool all = true;
  for (const auto& r : results) {
    Json j{{"id", r.id}, {"title", r.title}, {"checks", r.checks}, {"failures", r.failures},
           {"budget_seconds", r.budget_seconds}};
    // Wall times differ run to run; they stay out of the JSON unless asked for.
    if (o.timings) j["seconds"] = r.seconds;
    j["within_budget"] = r.within_budget();
    j["pass"] = r.pass();
    j["notes"] = r.notes;
    out.json["criteria"].push_back(std::move(j));
    std::ostringstream secs;
    secs << std::fixed << std::setprecision(2) << r.seconds;
    out.table.rows.push_back({std::to_string(r.id), r.title, std::to_string(r.checks), std::to_string(r.failures),
                              secs.str(), r.budget_seconds > 0 ? std::to_string(static_cast<int>(r.budget_seconds)) : "",
                              r.pass() ? "PASS" : "FAIL"});
    all = all && r.pass();
  }
  out.json["pass"] = all;
  out.summary.push_back(std::string("acceptance (") + std::string(verify::profile_name(options.profile)) +
                        "): " + (all ? "ALL PASS" : "FAILED"));
  out.exit_code = all ? kExitOk : kExitVerificationFailed;
  return out;
}

// ---------------------------------------------------------------------------
// rendering

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

void render(const Outcome& outcome, Format format, std::ostream& os) {
  if (format == Format::json) {
    os << outcome.json.dump(2) << '\n';
    return;
  }
  const Table& t = outcome.table;
  if (format == Format::csv) {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_field(cells[i]);
      os << '\n';
    };
    line(t.header);
    for (const auto& row : t.rows) line(row);
    return;
  }
  for (const auto& s : outcome.summary) os << s << '\n';
  if (t.header.empty()) return;
  std::vector<std::size_t> width(t.header.size(), 0);
  for (std::size_t i = 0; i < t.header.size(); ++i) width[i] = t.header[i].size();
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string text;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      text += cells[i];
      if (i + 1 < cells.size()) text += std::string(width[i] - cells[i].size() + 2, ' ');
    }
    os << text << '\n';
  };
  line(t.header);
  for (const auto& row : t.rows) line(row);
}

Format parse_format(const std::string& name) {
  if (name == "tty") return Format::tty;
  if (name == "json") return Format::json;
  if (name == "csv") return Format::csv;
  throw DomainError("unknown format '" + name + "' (expected tty, json or csv)");
}

}  // namespace

std::vector<int> parse_int_range(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw DomainError("not an integer range: '" + text + "'");
    return v;
  };
  std::vector<int> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int lo = to_int(text.substr(0, dots));
    const int hi = to_int(text.substr(dots + 2));
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int(item));
  if (out.empty()) throw DomainError("not an integer range: '" + text + "'");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Arboreal Galois toolkit: tree automorphisms, parity residues, Frobenius trees, square classes",
               "arbor"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--format", o.format, "Output format: tty, json or csv")->capture_default_str();
  app.add_option("--out", o.out, "Write the report to this file instead of stdout");
  auto* seed = app.add_option("--seed", o.seed, "Seed for every random choice (verify-all has its own default)");

  auto* orders = app.add_subcommand("orders", "log2 orders of the Pink groups with BFS cross-checks");
  orders->add_option("--r", o.r, "Period range, e.g. 1..3")->capture_default_str();
  orders->add_option("--n", o.n, "Depth range, e.g. 1..4")->capture_default_str();
  orders->add_option("--cap", o.cap, "Largest group the BFS may build")->capture_default_str();

  auto* membership = app.add_subcommand("membership", "Test an automorphism for membership in B' and M'");
  membership->add_option("--r", o.r, "Period")->capture_default_str();
  membership->add_option("--n", o.n, "Depth for --alpha or a random element")->capture_default_str();
  membership->add_option("--sigma", o.sigma, "Automorphism as hex");
  membership->add_option("--alpha", o.alpha, "Use the generator alpha_i");

  auto* pink = app.add_subcommand("pink-closure", "BFS closure of the Pink generators");
  pink->add_option("--r", o.r, "Period")->capture_default_str();
  pink->add_option("--n", o.n, "Depth")->capture_default_str();
  pink->add_option("--cap", o.cap, "Largest group the BFS may build")->capture_default_str();
  pink->add_flag("--mutate", o.mutate, "Corrupt alpha_1 (negative control)");

  auto* enumerate = app.add_subcommand("enumerate-bprime", "Exhaustive B' and M' counts at small depth");
  enumerate->add_option("--r", o.r, "Period range")->capture_default_str();
  enumerate->add_option("--n", o.n, "Depth range (at most 4)")->capture_default_str();
  enumerate->add_flag("--list", o.list, "List the elements of B' in the JSON report");

  auto add_tree_options = [&](CLI::App* cmd) {
    cmd->add_option("--p", o.p, "Odd prime")->required();
    cmd->add_option("--r", o.r, "Exact period of 0")->capture_default_str();
    cmd->add_option("--n", o.n, "Tree depth")->capture_default_str();
    cmd->add_option("--c", o.c, "Parameter c (default: smallest with period r)");
    cmd->add_option("--x0", o.x0, "Base point (default: smallest outside the orbit of 0)");
    cmd->add_flag("--mutate", o.mutate, "Swap a labeled pair after labeling (negative control)");
  };
  auto* frobenius = app.add_subcommand("frobenius-verify", "Build, label and verify a preimage tree and its Frobenius");
  add_tree_options(frobenius);
  auto* label = app.add_subcommand("label-tree", "Emit a labeled preimage tree");
  add_tree_options(label);

  auto* condition = app.add_subcommand("condition-check", "Square-class conditions over the rationals");
  auto* cond_r = condition->add_option("--r", o.r, "Period of 0 (checks -1, 2, D_1..D_r)");
  auto* cond_n = condition->add_option("--n", o.n, "Depth (checks D_1..D_n)");
  condition->add_option("--c", o.c, "Rational c")->required();
  condition->add_option("--x0", o.x0, "Rational x0")->required();

  auto* verify_all = app.add_subcommand("verify-all", "Run the acceptance suites");
  verify_all->add_option("--profile", o.profile, "quick or full")->capture_default_str();
  verify_all->add_flag("--mutate", o.mutate, "Corrupt alpha_1 throughout (negative control)");
  verify_all->add_flag("--timings", o.timings, "Include wall times in the JSON report");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "arbor: " << e.what() << '\n';
    return kExitUsage;
  }

  o.seed_given = seed->count() > 0;
  try {
    const Format format = parse_format(o.format);
    Outcome outcome;
    if (orders->parsed()) {
      outcome = cmd_orders(o);
    } else if (membership->parsed()) {
      outcome = cmd_membership(o);
    } else if (pink->parsed()) {
      outcome = cmd_pink_closure(o);
    } else if (enumerate->parsed()) {
      outcome = cmd_enumerate_bprime(o);
    } else if (frobenius->parsed()) {
      outcome = cmd_frobenius(o);
    } else if (label->parsed()) {
      outcome = cmd_label_tree(o);
    } else if (condition->parsed()) {
      outcome = cmd_condition_check(o, cond_r->count() > 0, cond_n->count() > 0);
    } else if (verify_all->parsed()) {
      outcome = cmd_verify_all(o);
    }
    if (o.out.empty()) {
      render(outcome, format, out);
    } else {
      std::ofstream file(o.out, std::ios::binary);
      if (!file) throw DomainError("cannot open " + o.out + " for writing");
      render(outcome, format, file);
    }
    return outcome.exit_code;
  } catch (const CapExceeded& e) {
    err << "arbor: " << e.what() << " (reached " << e.partial_count() << ")\n";
    return kExitUsage;
  } catch (const IntegrityError& e) {
    err << "arbor: verification failed: " << e.what() << '\n';
    return kExitVerificationFailed;
  } catch (const Error& e) {
    err << "arbor: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace arbor::cli
