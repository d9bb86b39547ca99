#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "demand.hpp"
#include "equilibrium.hpp"
#include "market.hpp"

namespace walras {

// Edge of a swap graph. The buyer is indifferent between the two witness
// bundles, so p(to) - p(from) = v(to) - v(from) = delta.
struct SwapEdge {
  int from;  // good id, or the null node
  int to;
  BuyerId buyer;
  Bundle from_bundle;
  Bundle to_bundle;
  Scalar delta;
};

// Nodes are the goods 0..m-1 and the null node m.
struct SwapGraph {
  int m = 0;
  std::vector<SwapEdge> edges;
  std::vector<Bundle> minimum_bundles;  // the chosen M_q (GS graphs only)
  bool gs = false;

  int null_node() const { return m; }
  int num_nodes() const { return m + 1; }
  std::string node_name(int x) const { return x == m ? "null" : std::to_string(x); }

  std::vector<std::vector<int>> in_edges() const {
    std::vector<std::vector<int>> in(num_nodes());
    for (std::size_t i = 0; i < edges.size(); ++i) in[edges[i].to].push_back(static_cast<int>(i));
    return in;
  }
  std::vector<std::vector<int>> out_edges() const {
    std::vector<std::vector<int>> out(num_nodes());
    for (std::size_t i = 0; i < edges.size(); ++i) out[edges[i].from].push_back(static_cast<int>(i));
    return out;
  }
};

// Goods-level arc relation (from, to) with null included, ignoring labels.
inline std::set<std::pair<int, int>> arc_relation(const SwapGraph& g) {
  std::set<std::pair<int, int>> rel;
  for (const auto& e : g.edges) rel.emplace(e.from, e.to);
  return rel;
}

namespace detail {

inline void require_we(const Market& market, const PriceVector& p, const Allocation& mu) {
  auto check = verify_we(market, p, mu);
  require(check.pass, ErrorKind::precondition, "swap graph needs a verified WE: " + check.message);
}

}  // namespace detail

// Swap graph of a unit-demand market: buyer q holding {a} (or nothing) gets
// an edge to every other demand good.
inline SwapGraph build_unit(const Market& market, const PriceVector& p, const Allocation& mu) {
  require(market.unit_demand(), ErrorKind::precondition, "build_unit needs unit-demand buyers");
  detail::require_we(market, p, mu);
  SwapGraph graph;
  graph.m = market.num_goods();
  for (BuyerId q = 0; q < market.num_buyers(); ++q) {
    require(mu[q].size() <= 1, ErrorKind::precondition, "unit-demand allocation must hold at most one good");
    const Valuation& v = market.buyer(q);
    int from = mu[q].empty() ? graph.null_node() : mu[q].goods().front();
    Scalar base = mu[q].empty() ? Scalar(0) : v.unit_values()[from];
    for (GoodId b : demand_goods(v, p)) {
      if (b == from) continue;
      graph.edges.push_back({from, b, q, mu[q], Bundle::single(b), v.unit_values()[b] - base});
    }
  }
  return graph;
}

// For each buyer, the minimum demand bundles contained in its allocation.
inline std::vector<std::vector<Bundle>> admissible_minimum_bundles(const Market& market, const PriceVector& p,
                                                                   const Allocation& mu) {
  std::vector<std::vector<Bundle>> out(market.num_buyers());
  for (BuyerId q = 0; q < market.num_buyers(); ++q) {
    for (Bundle b : min_demand(market.buyer(q), p)) {
      if (b.subset_of(mu[q])) out[q].push_back(b);
    }
  }
  return out;
}

// Default choice of M: the lexicographically smallest admissible mask.
inline std::vector<Bundle> default_minimum_bundles(const Market& market, const PriceVector& p,
                                                   const Allocation& mu) {
  auto adm = admissible_minimum_bundles(market, p, mu);
  std::vector<Bundle> out;
  for (BuyerId q = 0; q < market.num_buyers(); ++q) {
    require(!adm[q].empty(), ErrorKind::precondition,
            "buyer " + std::to_string(q) + " holds no minimum demand bundle");
    out.push_back(adm[q].front());
  }
  return out;
}

// GS swap graph for a given choice M of minimum bundles. Buyer q has an edge
// (a, b) when swapping a in M_q for b outside mu_q stays minimum-demanded,
// and an edge from null to a positively priced b outside mu_q when some
// demanded B holds b with B - b minimum-demanded.
inline SwapGraph build_gs(const Market& market, const PriceVector& p, const Allocation& mu,
                          const std::vector<Bundle>& minimum) {
  require(market.gs_class(), ErrorKind::precondition, "build_gs needs unit-demand or MBV buyers");
  detail::require_we(market, p, mu);
  require(static_cast<int>(minimum.size()) == market.num_buyers(), ErrorKind::precondition,
          "one minimum bundle per buyer is required");
  SwapGraph graph;
  graph.m = market.num_goods();
  graph.gs = true;
  graph.minimum_bundles = minimum;
  for (BuyerId q = 0; q < market.num_buyers(); ++q) {
    const Valuation& v = market.buyer(q);
    auto dc = demand_correspondence(v, p);
    auto mins = dc.minimum_bundles();
    auto is_min = [&](Bundle b) { return std::binary_search(mins.begin(), mins.end(), b); };
    Bundle mq = minimum[q];
    require(is_min(mq), ErrorKind::precondition,
            "M_" + std::to_string(q) + " = " + mq.str() + " is not a minimum demand bundle");
    require(mq.subset_of(mu[q]), ErrorKind::precondition,
            "M_" + std::to_string(q) + " is not contained in the allocation");
    Scalar vm = v(mq);
    for (GoodId a : mq.goods()) {
      for (GoodId b = 0; b < graph.m; ++b) {
        if (mu[q].contains(b)) continue;
        Bundle swapped = mq.without(a).with(b);
        if (is_min(swapped)) graph.edges.push_back({a, b, q, mq, swapped, v(swapped) - vm});
      }
    }
    for (GoodId b = 0; b < graph.m; ++b) {
      if (mu[q].contains(b) || !(p[b] > 0)) continue;
      for (Bundle big : dc.bundles) {
        if (big.contains(b) && is_min(big.without(b))) {
          graph.edges.push_back({graph.null_node(), b, q, big.without(b), big, v(big) - v(big.without(b))});
          break;
        }
      }
    }
  }
  return graph;
}

inline SwapGraph build_gs(const Market& market, const PriceVector& p, const Allocation& mu) {
  return build_gs(market, p, mu, default_minimum_bundles(market, p, mu));
}

// Calls f on every admissible choice of M, in lexicographic order, stopping
// after `cap` choices. Returns the number visited and whether it was complete.
template <class F>
std::pair<long, bool> for_each_minimum_choice(const Market& market, const PriceVector& p, const Allocation& mu,
                                              long cap, F&& f) {
  auto adm = admissible_minimum_bundles(market, p, mu);
  const int n = market.num_buyers();
  for (int q = 0; q < n; ++q) {
    require(!adm[q].empty(), ErrorKind::precondition,
            "buyer " + std::to_string(q) + " holds no minimum demand bundle");
  }
  std::vector<std::size_t> idx(n, 0);
  long visited = 0;
  while (true) {
    if (visited == cap) return {visited, false};
    std::vector<Bundle> choice(n);
    for (int q = 0; q < n; ++q) choice[q] = adm[q][idx[q]];
    f(choice);
    ++visited;
    int q = n - 1;
    while (q >= 0 && ++idx[q] == adm[q].size()) idx[q--] = 0;
    if (q < 0) return {visited, true};
  }
}

struct TopoResult {
  bool acyclic = true;
  std::vector<int> order;        // nodes, null first, then stable by id
  std::vector<SwapEdge> cycle;   // when not acyclic
};

inline TopoResult topological_order(const SwapGraph& g) {
  const int k = g.num_nodes();
  std::vector<int> indeg(k, 0);
  for (const auto& e : g.edges) ++indeg[e.to];
  auto out = g.out_edges();
  std::set<int> ready;
  for (int x = 0; x < k; ++x) {
    if (indeg[x] == 0) ready.insert(x);
  }
  TopoResult r;
  while (!ready.empty()) {
    // The null node sorts first, then goods by id.
    int x = ready.count(g.null_node()) ? g.null_node() : *ready.begin();
    ready.erase(x);
    r.order.push_back(x);
    for (int i : out[x]) {
      if (--indeg[g.edges[i].to] == 0) ready.insert(g.edges[i].to);
    }
  }
  if (static_cast<int>(r.order.size()) == k) return r;

  // Every remaining node keeps an incoming edge from another remaining node;
  // walking those backwards must revisit a node.
  r.acyclic = false;
  std::vector<char> done(k, 0);
  for (int x : r.order) done[x] = 1;
  auto in = g.in_edges();
  int start = 0;
  while (done[start]) ++start;
  std::vector<int> pos(k, -1);
  std::vector<int> via;  // edge indices, walking backwards
  int x = start;
  while (pos[x] < 0) {
    pos[x] = static_cast<int>(via.size());
    int e = -1;
    for (int i : in[x]) {
      if (!done[g.edges[i].from]) {
        e = i;
        break;
      }
    }
    via.push_back(e);
    x = g.edges[e].from;
  }
  std::vector<SwapEdge> cyc;
  for (std::size_t i = pos[x]; i < via.size(); ++i) cyc.push_back(g.edges[via[i]]);
  std::reverse(cyc.begin(), cyc.end());
  r.cycle = cyc;
  r.order.clear();
  return r;
}

struct NodeDegree {
  int in_degree = 0;
  int buyer_in_degree = 0;
};

inline std::vector<NodeDegree> degrees(const SwapGraph& g) {
  std::vector<NodeDegree> d(g.num_nodes());
  std::vector<std::set<BuyerId>> buyers(g.num_nodes());
  for (const auto& e : g.edges) {
    ++d[e.to].in_degree;
    buyers[e.to].insert(e.buyer);
  }
  for (int x = 0; x < g.num_nodes(); ++x) d[x].buyer_in_degree = static_cast<int>(buyers[x].size());
  return d;
}

struct SourcePriceReport {
  bool pass = true;
  std::vector<GoodId> zero_violations;      // in-degree 0, positive price
  std::vector<GoodId> positive_violations;  // in-degree > 0, zero price (positive clause only)
};

// In-degree zero forces price zero at minimal prices; with require_positive
// (generic MBV instances) every good with an incoming edge must be priced.
inline SourcePriceReport check_source_prices(const SwapGraph& g, const PriceVector& p,
                                             bool require_positive = false) {
  SourcePriceReport r;
  auto d = degrees(g);
  for (GoodId x = 0; x < g.m; ++x) {
    if (d[x].in_degree == 0 && p[x] != 0) r.zero_violations.push_back(x);
    if (require_positive && d[x].in_degree > 0 && p[x] == 0) r.positive_violations.push_back(x);
  }
  r.pass = r.zero_violations.empty() && r.positive_violations.empty();
  return r;
}

// A path is a list of edge indices, or a bare start node for length 0.
struct SwapPath {
  int start;
  std::vector<int> edges;
  int end(const SwapGraph& g) const { return edges.empty() ? start : g.edges[edges.back()].to; }
};

// Sum of the witness value differences along a simple path that starts at
// null or at a good with no incoming edge. Sources are priced zero at
// minimal prices, so at minimal prices this recovers the price of the end.
inline Scalar reconstruct_price(const SwapGraph& g, const SwapPath& path) {
  auto d = degrees(g);
  require(path.start >= 0 && path.start < g.num_nodes(), ErrorKind::precondition, "path start out of range");
  require(path.start == g.null_node() || d[path.start].in_degree == 0, ErrorKind::precondition,
          "path must start at null or a source");
  std::vector<char> seen(g.num_nodes(), 0);
  seen[path.start] = 1;
  int at = path.start;
  Scalar total = 0;
  for (int i : path.edges) {
    require(i >= 0 && i < static_cast<int>(g.edges.size()), ErrorKind::precondition, "unknown edge in path");
    const SwapEdge& e = g.edges[i];
    require(e.from == at, ErrorKind::precondition, "path edges do not chain");
    require(!seen[e.to], ErrorKind::precondition, "path is not simple");
    seen[e.to] = 1;
    total += e.delta;
    at = e.to;
  }
  return total;
}

// Every simple path from null or a source, including length-0 paths, up to
// `cap` paths.
inline std::vector<SwapPath> simple_source_paths(const SwapGraph& g, std::size_t cap = 200000) {
  auto d = degrees(g);
  auto out = g.out_edges();
  std::vector<SwapPath> paths;
  std::vector<char> on(g.num_nodes(), 0);
  std::function<void(SwapPath&)> grow = [&](SwapPath& cur) {
    if (paths.size() >= cap) return;
    paths.push_back(cur);
    int at = cur.end(g);
    for (int i : out[at]) {
      int nx = g.edges[i].to;
      if (on[nx]) continue;
      on[nx] = 1;
      cur.edges.push_back(i);
      grow(cur);
      cur.edges.pop_back();
      on[nx] = 0;
    }
  };
  for (int s = 0; s < g.num_nodes(); ++s) {
    if (s != g.null_node() && d[s].in_degree > 0) continue;
    SwapPath cur{s, {}};
    on[s] = 1;
    grow(cur);
    on[s] = 0;
  }
  return paths;
}

// Shortest path (fewest edges) from null or any source to `target`; ties
// broken by edge order. Returns nullopt if none exists.
inline std::optional<SwapPath> shortest_source_path(const SwapGraph& g, int target) {
  auto d = degrees(g);
  auto out = g.out_edges();
  const int k = g.num_nodes();
  std::vector<int> via(k, -2), root(k, -1);
  std::vector<int> frontier;
  for (int s : {g.null_node()}) {
    via[s] = -1;
    root[s] = s;
    frontier.push_back(s);
  }
  for (int s = 0; s < g.m; ++s) {
    if (d[s].in_degree == 0) {
      via[s] = -1;
      root[s] = s;
      frontier.push_back(s);
    }
  }
  for (std::size_t h = 0; h < frontier.size(); ++h) {
    int x = frontier[h];
    for (int i : out[x]) {
      int y = g.edges[i].to;
      if (via[y] != -2) continue;
      via[y] = i;
      root[y] = root[x];
      frontier.push_back(y);
    }
  }
  if (via[target] == -2) return std::nullopt;
  SwapPath p{root[target], {}};
  for (int x = target; via[x] >= 0; x = g.edges[via[x]].from) p.edges.push_back(via[x]);
  std::reverse(p.edges.begin(), p.edges.end());
  return p;
}

inline std::string to_dot(const SwapGraph& g) {
  std::string s = "digraph swap {\n";
  for (int x = 0; x < g.num_nodes(); ++x) s += "  \"" + g.node_name(x) + "\";\n";
  for (const auto& e : g.edges) {
    s += "  \"" + g.node_name(e.from) + "\" -> \"" + g.node_name(e.to) + "\" [label=\"" +
         std::to_string(e.buyer) + "\"];\n";
  }
  return s + "}\n";
}

}  // namespace walras
