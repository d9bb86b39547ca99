#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "demand_analysis.hpp"
#include "equilibrium.hpp"
#include "experiments.hpp"
#include "genericity.hpp"
#include "market.hpp"
#include "swap_graph.hpp"

namespace walras {

using Json = nlohmann::ordered_json;

namespace detail {

inline void expect(bool cond, const std::string& msg) { require(cond, ErrorKind::parse, msg); }

inline void only_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& where) {
  expect(j.is_object(), where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    expect(known, "unknown key '" + it.key() + "' in " + where);
  }
}

inline const Json& field(const Json& j, const char* key, const std::string& where) {
  expect(j.is_object() && j.contains(key), where + " is missing '" + key + "'");
  return j.at(key);
}

inline int as_int(const Json& j, const std::string& where) {
  expect(j.is_number_integer(), where + " must be an integer");
  return j.get<int>();
}

inline std::vector<int> as_ints(const Json& j, const std::string& where) {
  expect(j.is_array(), where + " must be an array");
  std::vector<int> out;
  for (const auto& x : j) out.push_back(as_int(x, where));
  return out;
}

}  // namespace detail

inline Json scalar_json(const Scalar& x) { return to_string(x); }

// Scalars are strings "p/q"; bare integers are accepted on input.
inline Scalar scalar_from_json(const Json& j) {
  if (j.is_number_integer()) return Scalar(j.get<long>());
  detail::expect(j.is_string(), "rational values must be strings \"p/q\" or integers");
  return parse_scalar(j.get<std::string>());
}

inline Json scalars_json(const std::vector<Scalar>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(scalar_json(x));
  return a;
}

inline std::vector<Scalar> scalars_from_json(const Json& j, const std::string& where) {
  detail::expect(j.is_array(), where + " must be an array");
  std::vector<Scalar> out;
  for (const auto& x : j) out.push_back(scalar_from_json(x));
  return out;
}

inline Json bundle_json(Bundle b) {
  Json a = Json::array();
  for (GoodId g : b.goods()) a.push_back(g);
  return a;
}

inline Bundle bundle_from_json(const Json& j, int m) {
  auto goods = detail::as_ints(j, "bundle");
  for (int g : goods) detail::expect(g >= 0 && g < m, "bundle good out of range");
  return Bundle::of(goods);
}

// ---------------------------------------------------------------------------
// Matroids and MBV trees

inline Json matroid_json(const Matroid& mat) {
  const auto& ground = mat.ground();
  auto elements = [&](std::uint64_t local) {
    Json a = Json::array();
    for (int i = 0; i < mat.ground_size(); ++i) {
      if ((local >> i) & 1u) a.push_back(ground[i]);
    }
    return a;
  };
  switch (mat.kind()) {
    case Matroid::Kind::uniform:
      return Json{{"uniform", Json{{"ground", ground}, {"rank", mat.rank_param()}}}};
    case Matroid::Kind::partition: {
      Json blocks = Json::array();
      for (std::uint64_t b : mat.blocks()) blocks.push_back(elements(b));
      return Json{{"partition", Json{{"blocks", blocks}, {"capacities", mat.capacities()}}}};
    }
    case Matroid::Kind::explicit_family: {
      Json sets = Json::array();
      for (std::uint64_t s : mat.family()) sets.push_back(elements(s));
      return Json{{"explicit", Json{{"ground", ground}, {"independent", sets}}}};
    }
  }
  return Json();
}

inline Matroid matroid_from_json(const Json& j) {
  detail::only_keys(j, {"uniform", "partition", "explicit"}, "matroid");
  detail::expect(j.size() == 1, "matroid needs exactly one of uniform, partition, explicit");
  if (j.contains("uniform")) {
    const Json& u = j.at("uniform");
    detail::only_keys(u, {"ground", "rank"}, "uniform matroid");
    return Matroid::uniform(detail::as_ints(detail::field(u, "ground", "uniform matroid"), "ground"),
                            detail::as_int(detail::field(u, "rank", "uniform matroid"), "rank"));
  }
  if (j.contains("partition")) {
    const Json& p = j.at("partition");
    detail::only_keys(p, {"blocks", "capacities"}, "partition matroid");
    const Json& bj = detail::field(p, "blocks", "partition matroid");
    detail::expect(bj.is_array(), "blocks must be an array");
    std::vector<std::vector<ElementId>> blocks;
    for (const auto& b : bj) blocks.push_back(detail::as_ints(b, "block"));
    return Matroid::partition(blocks, detail::as_ints(detail::field(p, "capacities", "partition matroid"), "capacities"));
  }
  const Json& e = j.at("explicit");
  detail::only_keys(e, {"ground", "independent"}, "explicit matroid");
  const Json& sj = detail::field(e, "independent", "explicit matroid");
  detail::expect(sj.is_array(), "independent must be an array");
  std::vector<std::vector<ElementId>> sets;
  for (const auto& s : sj) sets.push_back(detail::as_ints(s, "independent set"));
  return Matroid::explicit_family(detail::as_ints(detail::field(e, "ground", "explicit matroid"), "ground"), sets);
}

inline Json tree_json(const MbvTree& t) {
  switch (t->kind) {
    case MbvNode::Kind::leaf: {
      Json w = Json::object();
      const auto& ground = t->viwm->matroid().ground();
      for (std::size_t i = 0; i < ground.size(); ++i) w[std::to_string(ground[i])] = scalar_json(t->viwm->weights()[i]);
      return Json{{"leaf", Json{{"matroid", matroid_json(t->viwm->matroid())}, {"weights", w}}}};
    }
    case MbvNode::Kind::merge:
      return Json{{"merge", Json::array({tree_json(t->left), tree_json(t->right)})}};
    case MbvNode::Kind::endow:
      return Json{{"endow", Json{{"child", tree_json(t->left)}, {"J", t->endowed}}}};
  }
  return Json();
}

inline MbvTree tree_from_json(const Json& j) {
  detail::only_keys(j, {"leaf", "merge", "endow"}, "tree node");
  detail::expect(j.size() == 1, "tree node needs exactly one of leaf, merge, endow");
  if (j.contains("leaf")) {
    const Json& l = j.at("leaf");
    detail::only_keys(l, {"matroid", "weights"}, "leaf");
    Matroid mat = matroid_from_json(detail::field(l, "matroid", "leaf"));
    const Json& wj = detail::field(l, "weights", "leaf");
    detail::expect(wj.is_object(), "leaf weights must be an object keyed by element id");
    std::map<ElementId, Scalar> w;
    for (auto it = wj.begin(); it != wj.end(); ++it) {
      int id = 0;
      try {
        std::size_t used = 0;
        id = std::stoi(it.key(), &used);
        detail::expect(used == it.key().size(), "bad element id '" + it.key() + "'");
      } catch (const std::logic_error&) {
        fail(ErrorKind::parse, "bad element id '" + it.key() + "'");
      }
      w[id] = scalar_from_json(it.value());
    }
    return mbv_leaf(Viwm::from_map(std::move(mat), w));
  }
  if (j.contains("merge")) {
    const Json& a = j.at("merge");
    detail::expect(a.is_array() && a.size() == 2, "merge needs two children");
    return mbv_merge(tree_from_json(a[0]), tree_from_json(a[1]));
  }
  const Json& e = j.at("endow");
  detail::only_keys(e, {"child", "J"}, "endow");
  return mbv_endow(tree_from_json(detail::field(e, "child", "endow")), detail::as_ints(detail::field(e, "J", "endow"), "J"));
}

// ---------------------------------------------------------------------------
// Markets

inline Json valuation_json(const Valuation& v) {
  switch (v.kind()) {
    case Valuation::Kind::unit_demand: return Json{{"type", "unit_demand"}, {"values", scalars_json(v.unit_values())}};
    case Valuation::Kind::mbv: return Json{{"type", "mbv"}, {"tree", tree_json(v.tree())}};
    case Valuation::Kind::table: return Json{{"type", "table"}, {"values", scalars_json(v.table_values())}};
  }
  return Json();
}

inline Valuation valuation_from_json(const Json& j, int m) {
  const std::string where = "buyer";
  const Json& t = detail::field(j, "type", where);
  detail::expect(t.is_string(), "buyer type must be a string");
  std::string type = t.get<std::string>();
  if (type == "unit_demand") {
    detail::only_keys(j, {"type", "values"}, where);
    auto v = scalars_from_json(detail::field(j, "values", where), "values");
    detail::expect(static_cast<int>(v.size()) == m, "unit-demand buyer needs one value per good");
    return Valuation::unit_demand(v);
  }
  if (type == "mbv") {
    detail::only_keys(j, {"type", "tree"}, where);
    return Valuation::mbv(m, tree_from_json(detail::field(j, "tree", where)));
  }
  if (type == "table") {
    detail::only_keys(j, {"type", "values"}, where);
    return Valuation::table(m, scalars_from_json(detail::field(j, "values", where), "values"));
  }
  fail(ErrorKind::parse, "unknown buyer type '" + type + "'");
}

inline Json market_json(const Market& mk) {
  Json buyers = Json::array();
  for (const auto& v : mk.buyers()) buyers.push_back(valuation_json(v));
  return Json{{"m", mk.num_goods()}, {"supplies", mk.supplies()}, {"H", scalar_json(mk.bound())}, {"buyers", buyers}};
}

inline Market market_from_json(const Json& j) {
  detail::only_keys(j, {"m", "supplies", "H", "buyers"}, "market");
  int m = detail::as_int(detail::field(j, "m", "market"), "m");
  detail::expect(m >= 0, "m must be non-negative");
  auto s = detail::as_ints(detail::field(j, "supplies", "market"), "supplies");
  Scalar h = scalar_from_json(detail::field(j, "H", "market"));
  const Json& bj = detail::field(j, "buyers", "market");
  detail::expect(bj.is_array(), "buyers must be an array");
  std::vector<Valuation> buyers;
  for (const auto& b : bj) buyers.push_back(valuation_from_json(b, m));
  return Market(m, std::move(s), std::move(h), std::move(buyers));
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::parse, std::string("invalid JSON: ") + e.what());
  }
}

inline Market parse_market(const std::string& text) { return market_from_json(parse_json_text(text)); }

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json prices_json(const PriceVector& p) { return scalars_json(p.values()); }

// A bare array or {"prices": [...]}.
inline PriceVector prices_from_json(const Json& j) {
  if (j.is_object()) {
    detail::only_keys(j, {"prices"}, "price file");
    return PriceVector(scalars_from_json(detail::field(j, "prices", "price file"), "prices"));
  }
  return PriceVector(scalars_from_json(j, "prices"));
}

inline Json allocation_json(const Allocation& mu) {
  Json a = Json::array();
  for (Bundle b : mu) a.push_back(bundle_json(b));
  return a;
}

// ---------------------------------------------------------------------------
// Results

inline Json equilibrium_json(const WalrasianEquilibrium& we) {
  return Json{{"prices", prices_json(we.prices)}, {"allocation", allocation_json(we.allocation)},
              {"welfare", scalar_json(we.welfare)}};
}

inline Json swap_graph_json(const SwapGraph& g) {
  Json nodes = Json::array();
  for (int x = 0; x < g.num_nodes(); ++x) nodes.push_back(g.node_name(x));
  Json edges = Json::array();
  for (const auto& e : g.edges) {
    edges.push_back(Json{{"from", g.node_name(e.from)}, {"to", g.node_name(e.to)}, {"buyer", e.buyer},
                         {"from_bundle", bundle_json(e.from_bundle)}, {"to_bundle", bundle_json(e.to_bundle)},
                         {"delta", scalar_json(e.delta)}});
  }
  auto topo = topological_order(g);
  Json order = Json::array(), cycle = Json::array();
  for (int x : topo.order) order.push_back(g.node_name(x));
  for (const auto& e : topo.cycle) cycle.push_back(Json{{"from", g.node_name(e.from)}, {"to", g.node_name(e.to)}, {"buyer", e.buyer}});
  Json deg = Json::array();
  for (const auto& d : degrees(g)) deg.push_back(Json{{"in", d.in_degree}, {"buyer_in", d.buyer_in_degree}});
  Json out{{"kind", g.gs ? "gross_substitutes" : "unit_demand"}, {"nodes", nodes}, {"edges", edges},
           {"acyclic", topo.acyclic}};
  if (topo.acyclic) {
    out["topological_order"] = order;
  } else {
    out["cycle"] = cycle;
  }
  out["degrees"] = deg;
  if (g.gs) {
    Json mins = Json::array();
    for (Bundle b : g.minimum_bundles) mins.push_back(bundle_json(b));
    out["minimum_bundles"] = mins;
  }
  return out;
}

inline Json certificate_json(const GenericityCertificate& c) {
  Json out{{"mode", to_string(c.mode)}, {"gamma", c.gamma}, {"generic", c.generic}, {"decided", c.decided}};
  if (!c.witness.empty()) out["witness"] = c.witness;
  if (c.mode == GenericityCertificate::Mode::structural && c.generic) out["base"] = scalar_json(c.base);
  out["note"] = c.note;
  return out;
}

inline Json overdemand_json(const OverDemandReport& r, const Market& mk) {
  Json goods = Json::array();
  for (GoodId g = 0; g < static_cast<GoodId>(r.goods.size()); ++g) {
    const auto& x = r.goods[g];
    Json o{{"good", g}, {"supply", mk.supply(g)}, {"demanders", x.demanders}, {"od", x.od}};
    if (mk.num_goods() <= kMaxCheckGoods) {
      o["nondegenerate_demanders"] = x.nondeg_demanders;
      o["od_nondegenerate"] = x.od_nondeg;
    }
    if (x.od_tiebreak >= 0) {
      o["takers"] = x.takers;
      o["od_tiebreak"] = x.od_tiebreak;
    }
    goods.push_back(o);
  }
  Json out{{"goods", goods}};
  if (!r.committed.empty()) out["committed"] = allocation_json(r.committed);
  return out;
}

inline Json estimate_json(const ProportionEstimate& e) {
  return Json{{"trials", e.trials}, {"successes", e.successes}, {"fraction", format_double(e.fraction)},
              {"sigma", format_double(e.sigma)}, {"wilson_95", Json::array({format_double(e.wilson_lo),
                                                                             format_double(e.wilson_hi)})}};
}

inline Json report_json(const ExperimentReport& r) {
  Json cfg = Json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  Json summary = Json::object();
  for (const auto& [k, v] : r.summary) summary[k] = v;
  Json est = Json::object();
  for (const auto& [k, v] : r.estimates) est[k] = estimate_json(v);
  return Json{{"experiment", r.name}, {"config", cfg}, {"trials", r.trials}, {"discarded", r.discarded},
              {"summary", summary}, {"estimates", est}, {"csv_columns", r.columns}};
}

inline Json perturbation_run_json(const PerturbationRun& run) {
  Json order = Json::array();
  for (int g : run.order) order.push_back(g);
  Json eps = Json::array(), vals = Json::array();
  for (const auto& row : run.epsilon) eps.push_back(scalars_json(row));
  for (const auto& row : run.perturbed) vals.push_back(scalars_json(row));
  Json paths = Json::array();
  for (const auto& p : run.paths_used) {
    Json a = Json::array();
    for (int x : p) a.push_back(run.g_hat.node_name(x));
    paths.push_back(a);
  }
  return Json{{"delta", scalar_json(run.delta)},
              {"k", run.k},
              {"set_size", run.set.size()},
              {"set_bound", scalar_json(run.set.bound)},
              {"order", order},
              {"epsilon", eps},
              {"perturbed_values", vals},
              {"original_prices", prices_json(run.original_prices)},
              {"prices", prices_json(run.prices)},
              {"graph", swap_graph_json(run.g)},
              {"rebuilt_graph", swap_graph_json(run.g_hat)},
              {"source_paths", paths},
              {"path_choice", "shortest source path"},
              {"checks", Json{{"subgraph", run.subgraph_ok}, {"price_bound", run.price_bound_ok}, {"we", run.we_ok},
                              {"minimal", run.minimal_ok}, {"rebuilt_matches_swap_graph", run.swap_graph_matches},
                              {"indegree_at_most_1", run.indegree_ok}}}};
}

inline Json error_json(const Error& e) { return Json{{"error", to_string(e.kind())}, {"message", e.what()}}; }

}  // namespace walras
