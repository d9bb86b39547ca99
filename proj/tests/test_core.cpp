#include <gtest/gtest.h>

#include "walras/walras.hpp"

using namespace walras;

namespace {

Scalar S(const char* s) { return parse_scalar(s); }

}  // namespace

TEST(Scalar, ParsesAndPrintsCanonically) {
  EXPECT_EQ(to_string(S("6/4")), "3/2");
  EXPECT_EQ(to_string(S("-2/4")), "-1/2");
  EXPECT_EQ(to_string(S("9")), "9/1");
  EXPECT_EQ(to_string(make_scalar(10, -4)), "-5/2");
  EXPECT_EQ(pow2(-3), S("1/8"));
  EXPECT_EQ(pow_scalar(S("2/3"), 3), S("8/27"));
}

TEST(Scalar, RejectsMalformedText) {
  for (const char* bad : {"", "1/", "/2", "a/b", "1/0", "1.5", "--1/2", "1/-2"}) {
    try {
      parse_scalar(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::parse) << bad;
    }
  }
}

TEST(Scalar, ArithmeticIsExact) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    Scalar x = make_scalar(static_cast<long>(rng.below(2001)) - 1000, 1 + static_cast<long>(rng.below(97)));
    Scalar y = make_scalar(static_cast<long>(rng.below(2001)) - 1000, 1 + static_cast<long>(rng.below(89)));
    EXPECT_EQ((x + y) - y, x);
  }
}

TEST(Bundle, SetOperations) {
  Bundle a = Bundle::of({0, 2}), b = Bundle::of({2, 3});
  EXPECT_EQ((a | b).goods(), (std::vector<GoodId>{0, 2, 3}));
  EXPECT_EQ((a & b), Bundle::single(2));
  EXPECT_EQ((a - b), Bundle::single(0));
  EXPECT_TRUE(Bundle::single(2).subset_of(a));
  EXPECT_FALSE(a.subset_of(b));
  EXPECT_EQ(a.str(), "{0,2}");
  EXPECT_EQ(Bundle().str(), "{}");
  EXPECT_EQ(Bundle::full(3).size(), 3);
}

TEST(Bundle, SubmaskEnumerationEndsWithEmpty) {
  std::vector<std::uint64_t> seen;
  for_each_submask(0b101, [&](std::uint64_t s) { seen.push_back(s); });
  EXPECT_EQ(seen, (std::vector<std::uint64_t>{0b101, 0b100, 0b001, 0}));
}

TEST(Market, UtilityExamples) {
  Market e2 = fixture_e2();
  EXPECT_EQ(utility(e2.buyer(0), Bundle::single(0), PriceVector::zero(1)), 5);
  Market e3 = fixture_e3();
  PriceVector p({Scalar(1), Scalar(0)});
  EXPECT_EQ(utility(e3.buyer(1), Bundle::single(0), p), 1);
  EXPECT_EQ(utility(e3.buyer(1), Bundle::single(1), p), 1);
  for (const auto& v : e3.buyers()) EXPECT_EQ(utility(v, Bundle(), p), 0);
}

TEST(Market, WelfareExamples) {
  Market e3 = fixture_e3();
  EXPECT_EQ(welfare(e3, {Bundle::single(0), Bundle::single(1)}), 9);
  EXPECT_EQ(welfare(e3, empty_allocation(e3)), 0);
  Market e1 = fixture_e1();
  EXPECT_EQ(welfare(e1, {Bundle::single(0), Bundle::single(1), Bundle::single(2)}), 3);
}

TEST(Market, FeasibilityExamples) {
  Market e1 = fixture_e1();
  EXPECT_TRUE(check_feasible(e1, {Bundle::single(0), Bundle::single(1), Bundle::single(2)}));
  Bundle star = Bundle::single(bad1_distinguished(3));
  EXPECT_FALSE(check_feasible(e1, {star, star, star}));
  Market e3 = fixture_e3();
  EXPECT_FALSE(check_feasible(e3, {Bundle::single(0), Bundle::single(0)}));
  try {
    welfare(e3, {Bundle::single(0), Bundle::single(0)});
    ADD_FAILURE() << "infeasible welfare accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::feasibility);
  }
}

TEST(Market, WelfareIgnoresPrices) {
  // Welfare is a sum of values; utilities plus payments recover it at any p.
  Market e4 = fixture_e4();
  Allocation mu{Bundle::of({0, 1}), Bundle()};
  for (auto p : {PriceVector::zero(2), PriceVector({Scalar(3), S("1/2")})}) {
    Scalar total = 0;
    for (BuyerId q = 0; q < 2; ++q) total += utility(e4.buyer(q), mu[q], p) + p.cost(mu[q]);
    EXPECT_EQ(total, welfare(e4, mu));
  }
}

TEST(Market, ValidatesInput) {
  auto kind_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::internal;
  };
  EXPECT_EQ(kind_of([] { Market(1, {0}, Scalar(1), {Valuation::unit_demand({Scalar(1)})}); }),
            ErrorKind::precondition);
  EXPECT_EQ(kind_of([] { Market(1, {1}, Scalar(1), {Valuation::unit_demand({Scalar(2)})}); }),
            ErrorKind::precondition);
  EXPECT_EQ(kind_of([] { Market(2, {1, 1}, Scalar(1), {Valuation::unit_demand({Scalar(1)})}); }),
            ErrorKind::precondition);
  // Non-monotone table.
  EXPECT_EQ(kind_of([] {
              Market(2, {1, 1}, Scalar(3), {Valuation::table(2, {Scalar(0), Scalar(2), Scalar(2), Scalar(1)})});
            }),
            ErrorKind::precondition);
  EXPECT_EQ(kind_of([] { PriceVector({Scalar(-1)}); }), ErrorKind::precondition);
}

TEST(Matroid, Kinds) {
  auto u = Matroid::uniform({0, 1, 2}, 2);
  EXPECT_TRUE(u.independent(0b011));
  EXPECT_FALSE(u.independent(0b111));
  auto p = Matroid::partition({{0, 1}, {2}}, {1, 1});
  EXPECT_TRUE(p.independent(0b101));
  EXPECT_FALSE(p.independent(0b011));
  auto e = Matroid::explicit_family({0, 1}, {{}, {0}, {1}});
  EXPECT_TRUE(e.independent(0b01));
  EXPECT_FALSE(e.independent(0b11));
  EXPECT_FALSE(u.axiom_violation().has_value());
  EXPECT_FALSE(p.axiom_violation().has_value());
}

TEST(Matroid, RejectsNonMatroidFamilies) {
  // {a,b} independent but {b} missing: not closed under subsets.
  EXPECT_THROW(Matroid::explicit_family({0, 1}, {{}, {0}, {0, 1}}), Error);
  // {a,b} and {c}: exchange fails for {c} against {a,b}.
  EXPECT_THROW(Matroid::explicit_family({0, 1, 2}, {{}, {0}, {1}, {2}, {0, 1}}), Error);
  EXPECT_THROW(Matroid::uniform({0, 0}, 1), Error);
}
