#include <gtest/gtest.h>

#include "walras/walras.hpp"

using namespace walras;

namespace {

const Bundle A = Bundle::single(0), B = Bundle::single(1), AB = Bundle::of({0, 1});

Valuation complements() { return Valuation::table(2, {Scalar(0), Scalar(1), Scalar(1), Scalar(3)}); }

}  // namespace

TEST(Viwm, Examples) {
  EXPECT_EQ(fixture_e4().buyer(0)(AB), 12);
  auto rank1 = Valuation::mbv(2, mbv_leaf(Viwm(Matroid::uniform({0, 1}, 1), {Scalar(8), Scalar(4)})));
  EXPECT_EQ(rank1(AB), 8);
  // Endowment: f(S + e) - f(e) with e worth 3.
  auto endowed = Valuation::mbv(
      2, mbv_endow(mbv_leaf(Viwm(Matroid::free({0, 1, -1}), {Scalar(8), Scalar(4), Scalar(3)})), {-1}));
  EXPECT_EQ(endowed(A), 8);
  EXPECT_EQ(endowed(AB), 12);
  EXPECT_EQ(endowed(Bundle()), 0);
}

TEST(Viwm, GreedyExamples) {
  Viwm part(Matroid::partition({{0, 1}}, {1}), {Scalar(8), Scalar(4)});
  auto r = matroid_greedy(part, AB);
  EXPECT_EQ(r.value, 8);
  EXPECT_EQ(r.basis, A);
  Viwm freem(Matroid::free({0, 1}), {Scalar(8), Scalar(4)});
  r = matroid_greedy(freem, B);
  EXPECT_EQ(r.value, 4);
  EXPECT_EQ(r.basis, B);
  r = matroid_greedy(freem, Bundle());
  EXPECT_EQ(r.value, 0);
  EXPECT_TRUE(r.basis.empty());
}

TEST(Viwm, GreedyMatchesExhaustiveMaximum) {
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    auto inst = random_mbv_market(rng.next(), WeightMode::small_integers, 1, 6);
    const MbvTree& tree = inst.market.buyer(0).tree();
    if (tree->kind != MbvNode::Kind::leaf) continue;
    const Viwm& w = *tree->viwm;
    int m = inst.market.num_goods();
    for (std::uint32_t s = 0; s < (1u << m); ++s) {
      auto g = matroid_greedy(w, Bundle(s));
      std::uint64_t local = w.local_mask(Bundle(s).goods());
      EXPECT_TRUE(w.matroid().independent(w.local_mask(g.basis.goods())));
      Scalar best = 0;
      for_each_submask(local, [&](std::uint64_t sub) {
        if (!w.matroid().independent(sub)) return;
        Scalar x = 0;
        for (int i = 0; i < w.matroid().ground_size(); ++i) {
          if ((sub >> i) & 1u) x += w.weights()[i];
        }
        best = std::max(best, x);
      });
      EXPECT_EQ(g.value, best);
    }
  }
}

TEST(Mbv, MergeSplitsSharedGoods) {
  // Two rank-1 leaves over the same goods: a merge can serve both goods.
  auto l1 = mbv_leaf(Viwm(Matroid::uniform({0, 1}, 1), {Scalar(5), Scalar(1)}));
  auto l2 = mbv_leaf(Viwm(Matroid::uniform({0, 1}, 1), {Scalar(4), Scalar(3)}));
  auto v = Valuation::mbv(2, mbv_merge(l1, l2));
  EXPECT_EQ(v(A), 5);
  EXPECT_EQ(v(B), 3);
  EXPECT_EQ(v(AB), 8);
}

TEST(Mbv, RejectsBadTrees) {
  auto leaf_neg = mbv_leaf(Viwm(Matroid::free({0, -1}), {Scalar(1), Scalar(1)}));
  EXPECT_THROW(Valuation::mbv(1, leaf_neg), Error);  // endowment element never endowed
  auto leaf_big = mbv_leaf(Viwm(Matroid::free({0, 3}), {Scalar(1), Scalar(1)}));
  EXPECT_THROW(Valuation::mbv(2, leaf_big), Error);  // good outside the market
}

TEST(Mbv, RandomTreesAreMonotoneAndNormalized) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    for (auto mode : {WeightMode::small_integers, WeightMode::power_generic}) {
      auto inst = random_mbv_market(derive_seed(s, 1), mode);
      for (const auto& v : inst.market.buyers()) {
        int m = v.num_goods();
        EXPECT_EQ(v(Bundle()), 0);
        for (std::uint32_t x = 0; x < (1u << m); ++x) {
          for (GoodId g = 0; g < m; ++g) EXPECT_LE(v(Bundle(x)), v(Bundle(x).with(g)));
        }
      }
    }
  }
}

TEST(Demand, CorrespondenceExamples) {
  Market e3 = fixture_e3();
  PriceVector p({Scalar(1), Scalar(0)});
  auto d2 = demand_correspondence(e3.buyer(1), p);
  EXPECT_EQ(d2.bundles, (std::vector<Bundle>{A, B, AB}));
  EXPECT_EQ(d2.max_utility, 1);
  // Buyer 1 also ties at {a,b}: v({a,b}) = 8 and b is free.
  auto d1 = demand_correspondence(e3.buyer(0), p);
  EXPECT_EQ(d1.max_utility, 7);
  EXPECT_EQ(d1.bundles, (std::vector<Bundle>{A, AB}));
  EXPECT_EQ(d1.minimum_bundles(), (std::vector<Bundle>{A}));
  EXPECT_EQ(d1.nondegenerate_bundles(), (std::vector<Bundle>{A}));

  Market e1 = fixture_e1();
  auto d = demand_correspondence(e1.buyer(0), PriceVector::zero(3));
  // Every bundle holding good 0 or g* = 2 has value 1.
  EXPECT_EQ(d.bundles.size(), 6u);
  EXPECT_EQ(d.minimum_bundles(), (std::vector<Bundle>{Bundle::single(0), Bundle::single(2)}));
  EXPECT_EQ(d.nondegenerate_bundles(), (std::vector<Bundle>{Bundle::single(0), Bundle::single(2)}));
  EXPECT_EQ(demand_goods(e1.buyer(0), PriceVector::zero(3)), (std::vector<GoodId>{0, 2}));
}

TEST(Demand, MinimumAndNondegenerateExamples) {
  Market e3 = fixture_e3();
  PriceVector p({Scalar(1), Scalar(0)});
  EXPECT_EQ(min_demand(e3.buyer(1), p), (std::vector<Bundle>{A, B}));
  EXPECT_EQ(nondegenerate_demand(e3.buyer(1), p), (std::vector<Bundle>{A, B}));
  EXPECT_EQ(max_nondegenerate(e3.buyer(1), p), (std::vector<Bundle>{A, B}));
  Market e4 = fixture_e4();
  EXPECT_EQ(min_demand(e4.buyer(0), p), (std::vector<Bundle>{AB}));
  EXPECT_EQ(nondegenerate_demand(e4.buyer(0), p), (std::vector<Bundle>{AB}));
  EXPECT_EQ(max_nondegenerate(e4.buyer(0), p), (std::vector<Bundle>{AB}));
  EXPECT_EQ(min_demand(e3.buyer(0), PriceVector({Scalar(9), Scalar(9)})), (std::vector<Bundle>{Bundle()}));
}

TEST(Demand, BasisExamples) {
  Market e3 = fixture_e3();
  PriceVector p({Scalar(1), Scalar(0)});
  auto r = verify_demand_basis(e3.buyer(1), p);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.message, "ok");
  EXPECT_TRUE(verify_demand_basis(fixture_e4().buyer(0), p).pass);
  auto c = verify_demand_basis(complements(), PriceVector::zero(2));
  EXPECT_TRUE(c.pass);
  EXPECT_FALSE(c.gs_class);
  EXPECT_NE(c.message.find("not GS-class"), std::string::npos);
}

TEST(Demand, InterpolationExamples) {
  Market e3 = fixture_e3();
  PriceVector p({Scalar(1), Scalar(0)});
  EXPECT_TRUE(verify_interpolation(e3.buyer(1), p).pass);
  EXPECT_EQ(verify_interpolation(e3.buyer(0), PriceVector({Scalar(9), Scalar(9)})).message, "vacuous");
}

// Brute-force search for a non-GS table valuation on two goods whose
// demand skips a bundle between two nested demanded bundles. The first hit
// in search order is pinned.
TEST(Demand, InterpolationFailureWitness) {
  std::optional<std::tuple<Valuation, PriceVector, CheckReport>> hit;
  for (int va = 0; va <= 3 && !hit; ++va) {
    for (int vb = 0; vb <= 3 && !hit; ++vb) {
      for (int vab = std::max(va, vb); vab <= 6 && !hit; ++vab) {
        auto v = Valuation::table(2, {Scalar(0), Scalar(va), Scalar(vb), Scalar(vab)});
        for (int pa = 0; pa <= 6 && !hit; ++pa) {
          for (int pb = 0; pb <= 6 && !hit; ++pb) {
            PriceVector p({make_scalar(pa, 2), make_scalar(pb, 2)});
            auto r = verify_interpolation(v, p);
            if (!r.pass) hit.emplace(v, p, r);
          }
        }
      }
    }
  }
  ASSERT_TRUE(hit.has_value());
  const auto& [v, p, r] = *hit;
  EXPECT_EQ(v.table_values(), (std::vector<Scalar>{Scalar(0), Scalar(0), Scalar(0), Scalar(1)}));
  EXPECT_EQ(p, PriceVector({Scalar(0), Scalar(1)}));
  EXPECT_EQ(r.witness, (std::vector<Bundle>{Bundle(), AB, B}));
  EXPECT_FALSE(demand_correspondence(v, p).contains(r.witness[2]));
  EXPECT_FALSE(is_submodular(v));
  EXPECT_FALSE(r.gs_class);
}

TEST(Demand, SubmodularityExamples) {
  EXPECT_TRUE(is_submodular(fixture_e3().buyer(0)));
  EXPECT_TRUE(is_submodular(Valuation::additive({Scalar(8), Scalar(4)})));
  EXPECT_FALSE(is_submodular(complements()));
  EXPECT_TRUE(unit_demand_as_viwm_agrees(fixture_e3().buyer(0)));
}

TEST(Demand, DegenerateBundles) {
  auto v = fixture_e3().buyer(0);
  EXPECT_TRUE(is_degenerate(v, AB));
  EXPECT_FALSE(is_degenerate(v, A));
  EXPECT_FALSE(is_degenerate(v, Bundle()));
}

// Oracle re-check of every correspondence, the inclusions between the
// flagged families, and the structural lemmas on random GS-class buyers.
TEST(Demand, PropertiesOnRandomMbv) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto inst = random_mbv_market(derive_seed(s, 2), s % 2 ? WeightMode::power_generic : WeightMode::small_integers,
                                  2, 8);
    const Market& mk = inst.market;
    for (const auto& p : probe_prices(mk, derive_seed(s, 3), 3)) {
      for (const auto& v : mk.buyers()) {
        auto d = demand_correspondence(v, p);
        Scalar best = 0;
        for (std::uint32_t x = 0; x < (1u << mk.num_goods()); ++x) best = std::max(best, utility(v, Bundle(x), p));
        EXPECT_EQ(d.max_utility, best);
        for (Bundle b : d.bundles) EXPECT_EQ(utility(v, b, p), best);
        for (std::size_t i = 0; i < d.bundles.size(); ++i) {
          if (d.minimum[i]) { EXPECT_TRUE(d.nondegenerate[i]); }
          if (d.max_nondegenerate[i]) { EXPECT_TRUE(d.nondegenerate[i]); }
        }
        auto basis = verify_demand_basis(v, p);
        EXPECT_TRUE(basis.pass) << basis.message;
        EXPECT_TRUE(verify_interpolation(v, p).pass);
      }
    }
    // Subsets of non-degenerate bundles are non-degenerate.
    for (const auto& v : mk.buyers()) {
      for (std::uint32_t x = 0; x < (1u << mk.num_goods()); ++x) {
        if (is_degenerate(v, Bundle(x))) continue;
        for_each_submask(x, [&](std::uint64_t sub) {
          EXPECT_FALSE(is_degenerate(v, Bundle(static_cast<std::uint32_t>(sub))));
        });
      }
      EXPECT_TRUE(is_submodular(v));
    }
  }
}
