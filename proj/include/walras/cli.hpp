#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "json_io.hpp"
#include "walras.hpp"

namespace walras::cli {

// Usage problems (bad flags, unreadable files) exit with 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write file '" + path + "'");
  out << text;
}

inline Market load_market(const std::string& path) { return parse_market(read_file(path)); }

struct Options {
  std::string market_path;
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 1;
  int threads = default_threads();
  // solve / swap-graph / overdemand
  std::string route = "auto";
  std::string prices = "minimal";
  std::string graph_kind = "auto";
  std::string rule;
  bool warn_only = false;
  // genericity
  int gamma = 0;
  std::string mode = "auto";
  // perturb
  double beta = 0.1;
  long trials = 0;
  double c = 4.0;
  // experiment / gen
  std::string name;
  int n = 0;
  int m = 0;
  int supply = 0;
  long steps = 10000;
  std::string alpha;
  std::string csv_path;
  std::string prices_out;
};

inline PriceRoute parse_route(const std::string& r) {
  if (r == "lp") return PriceRoute::lp;
  if (r == "assignment") return PriceRoute::assignment;
  return PriceRoute::automatic;
}

// Parses a rule spec: adversarial:<good>, uniform:<seed> or encodable.
inline TieBreakRule parse_rule(const std::string& spec) {
  if (spec == "encodable") return TieBreakRule::encodable();
  auto colon = spec.find(':');
  if (colon != std::string::npos) {
    std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
    try {
      std::size_t used = 0;
      if (kind == "adversarial") {
        int g = std::stoi(arg, &used);
        if (used == arg.size()) return TieBreakRule::adversarial(g);
      } else if (kind == "uniform") {
        unsigned long long s = std::stoull(arg, &used);
        if (used == arg.size()) return TieBreakRule::uniform(s);
      }
    } catch (const std::logic_error&) {
    }
  }
  throw UsageError("bad --rule '" + spec + "'; expected adversarial:<good>, uniform:<seed> or encodable");
}

struct Context {
  Options opt;
  Json config;
  std::ostream* out;
  std::ostream* err;
};

inline void emit(Context& cx, const std::string& text) {
  if (cx.opt.out_path.empty()) {
    *cx.out << text;
  } else {
    write_file(cx.opt.out_path, text);
  }
}

inline void emit_json(Context& cx, const std::string& command, Json result) {
  Json doc{{"command", command}, {"config", cx.config}, {"result", std::move(result)}};
  emit(cx, dump(doc));
}

// Prices for analysis: minimal prices, or a file checked for WE (only a
// warning with --warn-only).
struct PricedMarket {
  PriceVector prices;
  Allocation allocation;
  Json check;
};

inline PricedMarket resolve_prices(Context& cx, const Market& mk) {
  PricedMarket pm;
  if (cx.opt.prices == "minimal") {
    auto we = minimal_walrasian(mk, parse_route(cx.opt.route));
    pm.prices = we.prices;
    pm.allocation = we.allocation;
    pm.check = Json{{"source", "minimal"}, {"walrasian", true}};
    return pm;
  }
  pm.prices = prices_from_json(parse_json_text(read_file(cx.opt.prices)));
  require(pm.prices.size() == mk.num_goods(), ErrorKind::precondition, "price file has the wrong number of goods");
  auto mu = supporting_allocation_search(mk, pm.prices);
  if (mu) {
    pm.allocation = *mu;
    pm.check = Json{{"source", "file"}, {"walrasian", true}};
    return pm;
  }
  require(cx.opt.warn_only, ErrorKind::precondition,
          "prices from '" + cx.opt.prices + "' are not Walrasian (use --warn-only to analyze anyway)");
  *cx.err << "warning: prices are not Walrasian; continuing because of --warn-only\n";
  pm.allocation = empty_allocation(mk);
  pm.check = Json{{"source", "file"}, {"walrasian", false}};
  return pm;
}

inline int cmd_solve(Context& cx) {
  Market mk = load_market(cx.opt.market_path);
  auto we = minimal_walrasian(mk, parse_route(cx.opt.route));
  auto check = verify_we(mk, we.prices, we.allocation);
  Json r = equilibrium_json(we);
  r["verified"] = check.pass;
  emit_json(cx, "solve", r);
  return 0;
}

inline int cmd_swap_graph(Context& cx) {
  Market mk = load_market(cx.opt.market_path);
  auto pm = resolve_prices(cx, mk);
  require(pm.check["walrasian"].get<bool>(), ErrorKind::precondition, "swap graphs need Walrasian prices");
  std::string kind = cx.opt.graph_kind;
  if (kind == "auto") kind = mk.unit_demand() ? "unit" : "gs";
  SwapGraph g = kind == "unit" ? build_unit(mk, pm.prices, pm.allocation) : build_gs(mk, pm.prices, pm.allocation);
  if (cx.opt.format == "dot") {
    emit(cx, to_dot(g));
    return 0;
  }
  Json r{{"prices", prices_json(pm.prices)}, {"allocation", allocation_json(pm.allocation)},
         {"graph", swap_graph_json(g)}};
  emit_json(cx, "swap-graph", r);
  return 0;
}

inline int cmd_overdemand(Context& cx) {
  Market mk = load_market(cx.opt.market_path);
  auto pm = resolve_prices(cx, mk);
  std::optional<std::vector<TieBreakRule>> rules;
  if (!cx.opt.rule.empty()) rules.emplace(mk.num_buyers(), parse_rule(cx.opt.rule));
  auto rep = overdemand_report(mk, pm.prices, rules ? &*rules : nullptr);
  Json r{{"prices", prices_json(pm.prices)}, {"price_check", pm.check}, {"overdemand", overdemand_json(rep, mk)}};
  emit_json(cx, "overdemand", r);
  return 0;
}

inline int cmd_genericity(Context& cx) {
  Market mk = load_market(cx.opt.market_path);
  std::optional<GenericityCertificate::Mode> mode;
  if (cx.opt.mode == "exact") mode = GenericityCertificate::Mode::exact;
  if (cx.opt.mode == "structural") mode = GenericityCertificate::Mode::structural;
  Json r = Json::object();
  if (mk.unit_demand() && cx.opt.gamma == 0) {
    r["unit"] = certificate_json(check_generic_unit(mk, mode));
  } else {
    int gamma = cx.opt.gamma > 0 ? cx.opt.gamma : mk.num_buyers() * mk.num_goods();
    r["gmbv"] = certificate_json(check_generic_mbv(mk, gamma, mode));
  }
  emit_json(cx, "genericity", r);
  return 0;
}

inline int cmd_perturb(Context& cx) {
  Market mk = load_market(cx.opt.market_path);
  require(cx.opt.beta > 0 && cx.opt.beta < 1, ErrorKind::precondition, "--beta must be in (0, 1)");
  long trials = cx.opt.trials > 0 ? cx.opt.trials : 1;
  auto we = minimal_walrasian(mk, PriceRoute::lp);
  long req = required_perturbation_size(mk.num_buyers(), mk.num_goods(), cx.opt.beta, cx.opt.c);
  auto set = perturbation_set(welfare_grain(mk), mk.num_goods(), req);
  auto first = perturb_and_reprice(mk, we.prices, we.allocation, set, derive_seed(cx.opt.seed, 2, 0));
  auto ex = perturbation_indegree_experiment([&](std::uint64_t) { return mk; }, cx.opt.beta, trials, cx.opt.seed,
                                             cx.opt.c, cx.opt.threads);
  auto report = perturbation_report(ex, cx.opt.beta, cx.opt.seed);
  if (!cx.opt.csv_path.empty()) write_file(cx.opt.csv_path, report_csv(report));
  if (cx.opt.format == "csv") {
    emit(cx, report_csv(report));
    return 0;
  }
  emit_json(cx, "perturb", Json{{"summary", report_json(report)}, {"first_run", perturbation_run_json(first)}});
  return 0;
}

inline Scalar alpha_or(const Options& o, Scalar fallback) {
  return o.alpha.empty() ? fallback : parse_scalar(o.alpha);
}

inline int cmd_experiment(Context& cx) {
  const Options& o = cx.opt;
  ExperimentReport report;
  auto start = std::chrono::steady_clock::now();
  if (o.name == "bad2") {
    long trials = o.trials > 0 ? o.trials : 10000;
    report = bad2_experiment(o.n > 0 ? o.n : 11, trials, o.seed, o.threads).report();
  } else if (o.name == "shatter") {
    int m = o.m > 0 ? o.m : 5;
    report = shattering_report(m, verify_shattering(shattering_fixture(m), m <= 8));
  } else if (o.name == "demand-gen") {
    DemandGenConfig c;
    int m = o.m > 0 ? o.m : 3;
    c.dist = BuyerDistribution::iid_grid(m, o.steps);
    if (o.n > 0) c.n = o.n;
    c.supplies.assign(m, o.supply > 0 ? o.supply : 200);
    c.alpha = alpha_or(o, c.alpha);
    if (o.trials > 0) c.trials = o.trials;
    c.seed = o.seed;
    c.threads = o.threads;
    report = demand_generalization(c).report();
  } else if (o.name == "welfare-gen") {
    WelfareGenConfig c;
    int m = o.m > 0 ? o.m : 3;
    c.dist = BuyerDistribution::iid_grid(m, o.steps);
    if (o.n > 0) c.n = o.n;
    c.supplies.assign(m, o.supply > 0 ? o.supply : 30);
    c.alpha = alpha_or(o, c.alpha);
    if (o.trials > 0) c.trials = o.trials;
    c.seed = o.seed;
    c.threads = o.threads;
    report = welfare_generalization(c).report();
  } else {
    throw UsageError("unknown experiment '" + o.name + "'");
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // Timing goes to stderr so the artifacts stay byte-identical.
  *cx.err << "experiment " << o.name << " finished in " << format_double(secs) << " s\n";
  if (!o.csv_path.empty()) write_file(o.csv_path, report_csv(report));
  if (o.format == "csv") {
    emit(cx, report_csv(report));
    return 0;
  }
  emit_json(cx, "experiment", report_json(report));
  return 0;
}

inline int cmd_gen(Context& cx) {
  const Options& o = cx.opt;
  std::optional<PriceVector> prices;
  Market mk = fixture_e2();
  if (o.name == "bad1") {
    mk = gen_bad1(o.n > 0 ? o.n : 3);
  } else if (o.name == "bad2") {
    mk = gen_bad2(o.n > 0 ? o.n : 5, o.seed);
  } else if (o.name == "nonmin") {
    auto x = gen_nonmin(o.n > 0 ? o.n : 4);
    mk = x.market;
    prices = x.prices;
  } else if (o.name == "generic") {
    int n = o.n > 0 ? o.n : 4, m = o.m > 0 ? o.m : n;
    mk = generate_generic(n, m, o.seed, std::vector<int>(m, o.supply > 0 ? o.supply : 1));
  } else if (o.name == "shatter") {
    mk = shattering_fixture(o.m > 0 ? o.m : 3).market;
  } else if (o.name == "e1") {
    mk = fixture_e1();
  } else if (o.name == "e2") {
    mk = fixture_e2();
  } else if (o.name == "e3") {
    mk = fixture_e3();
  } else if (o.name == "e4") {
    mk = fixture_e4();
  } else {
    throw UsageError("unknown generator '" + o.name + "'");
  }
  if (!o.prices_out.empty()) {
    if (!prices) throw UsageError("--prices-out is only available for nonmin");
    write_file(o.prices_out, dump(Json{{"prices", prices_json(*prices)}}));
  }
  emit(cx, dump(market_json(mk)));
  return 0;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Context cx{Options{}, Json::object(), &out, &err};
  Options& o = cx.opt;
  CLI::App app{"Walrasian equilibrium analysis: minimal prices, swap graphs, over-demand and experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "walras 0.1.0");

  auto shared = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "random seed")->capture_default_str();
    c->add_option("--out", o.out_path, "write the artifact to a file instead of stdout");
    c->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "dot"}))
        ->capture_default_str();
    c->add_option("--threads", o.threads, "worker threads; never changes results")->check(CLI::PositiveNumber);
  };
  auto market_arg = [&](CLI::App* c) { c->add_option("market", o.market_path, "market JSON file")->required(); };
  auto price_flags = [&](CLI::App* c) {
    c->add_option("--prices", o.prices, "'minimal' or a JSON price file")->capture_default_str();
    c->add_flag("--warn-only", o.warn_only, "analyze non-Walrasian price files with a warning");
    c->add_option("--route", o.route, "minimal price route")
        ->check(CLI::IsMember({"auto", "lp", "assignment"}))
        ->capture_default_str();
  };

  auto* solve = app.add_subcommand("solve", "minimal Walrasian equilibrium");
  market_arg(solve);
  shared(solve);
  solve->add_option("--route", o.route, "minimal price route")
      ->check(CLI::IsMember({"auto", "lp", "assignment"}))
      ->capture_default_str();

  auto* swap = app.add_subcommand("swap-graph", "swap graph at Walrasian prices");
  market_arg(swap);
  shared(swap);
  price_flags(swap);
  swap->add_option("--kind", o.graph_kind, "graph construction")
      ->check(CLI::IsMember({"auto", "unit", "gs"}))
      ->capture_default_str();

  auto* od = app.add_subcommand("overdemand", "over-demand per good");
  market_arg(od);
  shared(od);
  price_flags(od);
  od->add_option("--rule", o.rule, "tie-break rule for every buyer: adversarial:<good>, uniform:<seed>, encodable");

  auto* gen = app.add_subcommand("genericity", "genericity certificate");
  market_arg(gen);
  shared(gen);
  gen->add_option("--gamma", o.gamma, "coefficient bound; selects the bounded-independence check")
      ->check(CLI::PositiveNumber);
  gen->add_option("--mode", o.mode, "certificate mode")
      ->check(CLI::IsMember({"auto", "exact", "structural"}))
      ->capture_default_str();

  auto* pert = app.add_subcommand("perturb", "perturbation and repricing");
  market_arg(pert);
  shared(pert);
  pert->add_option("--beta", o.beta, "failure probability target")->capture_default_str();
  pert->add_option("--trials", o.trials, "number of seeded perturbations")->check(CLI::PositiveNumber);
  pert->add_option("--c", o.c, "constant in the perturbation set size")->capture_default_str();
  pert->add_option("--csv", o.csv_path, "also write per-trial rows as CSV");

  auto* exp = app.add_subcommand("experiment", "Monte Carlo experiments");
  exp->add_option("name", o.name, "bad2 | shatter | demand-gen | welfare-gen")
      ->required()
      ->check(CLI::IsMember({"bad2", "shatter", "demand-gen", "welfare-gen"}));
  shared(exp);
  exp->add_option("--n", o.n, "buyers")->check(CLI::PositiveNumber);
  exp->add_option("--m", o.m, "goods")->check(CLI::PositiveNumber);
  exp->add_option("--trials", o.trials, "trials")->check(CLI::PositiveNumber);
  exp->add_option("--supply", o.supply, "copies of every good")->check(CLI::PositiveNumber);
  exp->add_option("--steps", o.steps, "grid resolution of sampled values")->capture_default_str()->check(
      CLI::PositiveNumber);
  exp->add_option("--alpha", o.alpha, "slack as a rational, e.g. 3/10");
  exp->add_option("--csv", o.csv_path, "also write per-trial rows as CSV");

  auto* g = app.add_subcommand("gen", "generate a market file");
  g->add_option("name", o.name, "bad1 | bad2 | nonmin | generic | shatter | e1 | e2 | e3 | e4")
      ->required()
      ->check(CLI::IsMember({"bad1", "bad2", "nonmin", "generic", "shatter", "e1", "e2", "e3", "e4"}));
  shared(g);
  g->add_option("--n", o.n, "buyers")->check(CLI::PositiveNumber);
  g->add_option("--m", o.m, "goods")->check(CLI::PositiveNumber);
  g->add_option("--supply", o.supply, "copies of every good")->check(CLI::PositiveNumber);
  g->add_option("--prices-out", o.prices_out, "write the generator's price vector (nonmin)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  cx.config["command"] = sub->get_name();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name() == "-h") continue;
    if (opt->get_name() == "--threads") continue;  // never affects results
    std::string key = opt->get_name();
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    auto res = opt->results();
    if (!res.empty()) {
      cx.config[key] = res.size() == 1 ? Json(res.front()) : Json(res);
    } else if (!opt->get_default_str().empty()) {
      cx.config[key] = opt->get_default_str();
    }
  }

  try {
    std::string name = sub->get_name();
    if (name == "solve") return cmd_solve(cx);
    if (name == "swap-graph") return cmd_swap_graph(cx);
    if (name == "overdemand") return cmd_overdemand(cx);
    if (name == "genericity") return cmd_genericity(cx);
    if (name == "perturb") return cmd_perturb(cx);
    if (name == "experiment") return cmd_experiment(cx);
    return cmd_gen(cx);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << error_json(e).dump() << "\n";
    return 1;
  }
}

}  // namespace walras::cli
