#include <gtest/gtest.h>

#include "walras/walras.hpp"

using namespace walras;

namespace {

PriceVector P(std::initializer_list<long> v) {
  std::vector<Scalar> out;
  for (long x : v) out.push_back(Scalar(x));
  return PriceVector(out);
}

Scalar node_price(const SwapGraph& g, const PriceVector& p, int x) { return x == g.null_node() ? Scalar(0) : p[x]; }

const Bundle A = Bundle::single(0), B = Bundle::single(1);

}  // namespace

TEST(SwapGraph, SingleEdgeExample) {
  Market e3 = fixture_e3();
  auto g = build_unit(e3, P({1, 0}), {A, B});
  ASSERT_EQ(g.edges.size(), 1u);
  const SwapEdge& e = g.edges[0];
  EXPECT_EQ(e.from, 1);
  EXPECT_EQ(e.to, 0);
  EXPECT_EQ(e.buyer, 1);
  EXPECT_EQ(e.delta, 1);
  auto topo = topological_order(g);
  EXPECT_TRUE(topo.acyclic);
  EXPECT_EQ(topo.order, (std::vector<int>{2, 1, 0}));
  EXPECT_EQ(g.node_name(2), "null");
  EXPECT_EQ(reconstruct_price(g, SwapPath{1, {0}}), 1);
  EXPECT_EQ(reconstruct_price(g, SwapPath{1, {}}), 0);
  EXPECT_THROW(reconstruct_price(g, SwapPath{0, {}}), Error);  // a has an incoming edge
  auto sp = shortest_source_path(g, 0);
  ASSERT_TRUE(sp.has_value());
  EXPECT_EQ(sp->start, 1);
  EXPECT_EQ(sp->edges, (std::vector<int>{0}));
}

TEST(SwapGraph, DistinguishedGoodCollectsEdges) {
  Market e1 = fixture_e1();
  Allocation mu{Bundle::single(0), Bundle::single(1), Bundle::single(2)};
  auto g = build_unit(e1, PriceVector::zero(3), mu);
  EXPECT_EQ(arc_relation(g), (std::set<std::pair<int, int>>{{0, 2}, {1, 2}}));
  auto d = degrees(g);
  EXPECT_EQ(d[2].in_degree, 2);
  EXPECT_EQ(d[2].buyer_in_degree, 2);
  EXPECT_EQ(d[0].in_degree, 0);
  EXPECT_TRUE(check_source_prices(g, PriceVector::zero(3)).pass);
  EXPECT_TRUE(topological_order(g).acyclic);
}

TEST(SwapGraph, TwinBuyersGiveTwoCycle) {
  Market twin(2, {1, 1}, Scalar(2), {Valuation::unit_demand({Scalar(2), Scalar(1)}),
                                     Valuation::unit_demand({Scalar(2), Scalar(1)})});
  auto we = minimal_walrasian(twin);
  EXPECT_EQ(we.prices, P({1, 0}));
  auto g = build_unit(twin, we.prices, {A, B});
  EXPECT_EQ(arc_relation(g), (std::set<std::pair<int, int>>{{0, 1}, {1, 0}}));
  auto topo = topological_order(g);
  EXPECT_FALSE(topo.acyclic);
  ASSERT_EQ(topo.cycle.size(), 2u);
  EXPECT_EQ(topo.cycle[0].to, topo.cycle[1].from);
  EXPECT_EQ(topo.cycle[1].to, topo.cycle[0].from);
  EXPECT_EQ(topo.cycle[0].delta + topo.cycle[1].delta, 0);
  // Neither good is a source, so a is reachable only from null, which has no edges.
  EXPECT_FALSE(shortest_source_path(g, 0).has_value());
  EXPECT_GT(we.prices[0], 0);
}

TEST(SwapGraph, GsGraphExample) {
  Market e4 = fixture_e4();
  Allocation mu{Bundle::of({0, 1}), Bundle()};
  auto g = build_gs(e4, P({2, 1}), mu);
  EXPECT_TRUE(g.gs);
  EXPECT_EQ(g.minimum_bundles, (std::vector<Bundle>{Bundle::of({0, 1}), Bundle()}));
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.edges[0].from, 2);
  EXPECT_EQ(g.edges[0].to, 0);
  EXPECT_EQ(g.edges[0].buyer, 1);
  EXPECT_EQ(g.edges[0].delta, 2);
  EXPECT_EQ(g.edges[1].from, 2);
  EXPECT_EQ(g.edges[1].to, 1);
  EXPECT_EQ(g.edges[1].delta, 1);
  auto topo = topological_order(g);
  EXPECT_EQ(topo.order, (std::vector<int>{2, 0, 1}));
  EXPECT_EQ(reconstruct_price(g, *shortest_source_path(g, 0)), 2);
  EXPECT_EQ(reconstruct_price(g, *shortest_source_path(g, 1)), 1);
  EXPECT_TRUE(check_source_prices(g, P({2, 1}), true).pass);
}

TEST(SwapGraph, RejectsNonEquilibrium) {
  EXPECT_THROW(build_unit(fixture_e3(), P({0, 0}), {A, B}), Error);
  EXPECT_THROW(build_gs(fixture_e4(), P({2, 1}), {Bundle::of({0, 1}), Bundle()}, {A, Bundle()}), Error);
}

TEST(SwapGraph, MinimumChoicesEnumerated) {
  Market e3 = fixture_e3();
  std::vector<std::vector<Bundle>> seen;
  auto [visited, complete] =
      for_each_minimum_choice(e3, P({1, 0}), {A, B}, 10, [&](const std::vector<Bundle>& c) { seen.push_back(c); });
  EXPECT_TRUE(complete);
  EXPECT_EQ(visited, 1);
  EXPECT_EQ(seen[0], (std::vector<Bundle>{A, B}));
}

TEST(SwapGraph, DotOutput) {
  auto g = build_unit(fixture_e3(), P({1, 0}), {A, B});
  EXPECT_EQ(to_dot(g), "digraph swap {\n  \"0\";\n  \"1\";\n  \"null\";\n  \"1\" -> \"0\" [label=\"1\"];\n}\n");
}

// On random markets at minimal prices: every edge telescopes prices, sources
// are free, and every priced good is reached from null or a source with the
// path sums recovering the prices. Only ties can leave a priced good
// unreachable, and then through a cycle.
TEST(SwapGraph, PropertiesOnRandomUnitMarkets) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    Market mk = s % 2 ? random_integer_unit_market(derive_seed(s, 1), 5, 6, 10)
                      : random_generic_unit_market(derive_seed(s, 1), 7, 2);
    auto we = minimal_walrasian(mk);
    auto g = build_unit(mk, we.prices, we.allocation);
    for (const auto& e : g.edges) {
      EXPECT_EQ(node_price(g, we.prices, e.to) - node_price(g, we.prices, e.from), e.delta);
    }
    EXPECT_TRUE(check_source_prices(g, we.prices).pass) << s;
    for (GoodId x = 0; x < mk.num_goods(); ++x) {
      if (we.prices[x] == 0) continue;
      auto path = shortest_source_path(g, x);
      if (!path) {
        // Ties can leave a priced good reachable only around a cycle.
        EXPECT_FALSE(topological_order(g).acyclic) << s;
        continue;
      }
      EXPECT_EQ(reconstruct_price(g, *path), we.prices[x]);
    }
    for (const auto& path : simple_source_paths(g, 5000)) {
      EXPECT_EQ(reconstruct_price(g, path), node_price(g, we.prices, path.end(g)));
    }
    if (s % 2 == 0) { EXPECT_TRUE(topological_order(g).acyclic) << "generic market " << s; }
  }
}

TEST(SwapGraph, PropertiesOnRandomMbvMarkets) {
  for (std::uint64_t s = 0; s < 120; ++s) {
    auto mode = s % 2 ? WeightMode::small_integers : WeightMode::power_generic;
    auto inst = random_mbv_market(derive_seed(s, 2), mode);
    const Market& mk = inst.market;
    auto we = minimal_walrasian(mk);
    for_each_minimum_choice(mk, we.prices, we.allocation, 16, [&](const std::vector<Bundle>& choice) {
      auto g = build_gs(mk, we.prices, we.allocation, choice);
      for (const auto& e : g.edges) {
        EXPECT_EQ(node_price(g, we.prices, e.to) - node_price(g, we.prices, e.from), e.delta);
      }
      EXPECT_TRUE(check_source_prices(g, we.prices, mode == WeightMode::power_generic).pass) << s;
      for (GoodId x = 0; x < mk.num_goods(); ++x) {
        if (we.prices[x] == 0) continue;
        auto path = shortest_source_path(g, x);
        if (!path) {
          EXPECT_FALSE(topological_order(g).acyclic) << s;
          continue;
        }
        EXPECT_EQ(reconstruct_price(g, *path), we.prices[x]);
      }
      if (mode == WeightMode::power_generic) { EXPECT_TRUE(topological_order(g).acyclic) << s; }
    });
  }
}
