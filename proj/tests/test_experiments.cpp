#include <gtest/gtest.h>

#include <map>

#include "walras/walras.hpp"

using namespace walras;

TEST(Bad2, InstancesAreRelabeledBad1) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    int n = 2 + static_cast<int>(s % 9);
    auto inst = gen_bad2_instance(n, s);
    auto sorted = inst.sigma;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i) EXPECT_EQ(sorted[i], i);
    auto we = minimal_walrasian(inst.market);
    EXPECT_EQ(we.prices, PriceVector::zero(n));
    EXPECT_EQ(overdemand(inst.market, we.prices, inst.distinguished), n - 1);
    EXPECT_EQ(gen_bad2(n, s), inst.market);
  }
}

TEST(Bad2, SmallExperiment) {
  auto ex = bad2_experiment(5, 400, 7);
  EXPECT_EQ(ex.od.size(), 400u);
  EXPECT_DOUBLE_EQ(ex.target, 2.0);
  EXPECT_TRUE(ex.within(4)) << ex.mean << " " << ex.se;
  for (int od : ex.od) {
    EXPECT_GE(od, 0);
    EXPECT_LE(od, 4);
  }
  auto threaded = bad2_experiment(5, 400, 7, 3);
  EXPECT_EQ(threaded.od, ex.od);
  EXPECT_EQ(threaded.distinguished, ex.distinguished);
  EXPECT_NE(bad2_experiment(5, 400, 8).od, ex.od);
  auto r = ex.report();
  EXPECT_EQ(r.rows.size(), 400u);
  EXPECT_EQ(report_csv(r).substr(0, 23), "trial,distinguished,od\n");
  EXPECT_THROW(bad2_experiment(5, 1, 7), Error);
}

// Each non-owner buyer splits evenly between its own good and g*, so the
// over-demand is Binomial(n - 1, 1/2); with n = 3 the law is {1/4, 1/2, 1/4}.
TEST(Bad2, DistributionShape) {
  auto ex = bad2_experiment(3, 4000, 2);
  std::map<int, int> hist;
  for (int od : ex.od) ++hist[od];
  EXPECT_NEAR(hist[0] / 4000.0, 0.25, 0.03);
  EXPECT_NEAR(hist[1] / 4000.0, 0.50, 0.03);
  EXPECT_NEAR(hist[2] / 4000.0, 0.25, 0.03);
}

TEST(NonMinimal, Structure) {
  for (int n = 2; n <= 8; ++n) {
    auto inst = gen_nonmin(n);
    EXPECT_EQ(inst.special, n - 1);
    EXPECT_TRUE(verify_we(inst.market, inst.prices, inst.allocation).pass);
    EXPECT_TRUE(check_generic_unit(inst.market, GenericityCertificate::Mode::structural).generic);
    EXPECT_EQ(overdemand(inst.market, inst.prices, inst.special), n - 1);
  }
  EXPECT_THROW(gen_nonmin(9), Error);
}

TEST(Shattering, AllLabelingsRealized) {
  for (int m = 2; m <= 5; ++m) {
    auto f = shattering_fixture(m);
    EXPECT_EQ(f.demand_prices.size(), 1u << m);
    EXPECT_EQ(f.epsilon, make_scalar(1, 8));
    auto r = verify_shattering(f, true);
    EXPECT_TRUE(r.all()) << m;
    EXPECT_TRUE(r.failures.empty());
    auto rep = shattering_report(m, r);
    EXPECT_EQ(rep.rows.size(), 1u << m);
  }
}

TEST(Shattering, DetectsBrokenLabeling) {
  auto f = shattering_fixture(3);
  f.demand_prices[5] = f.demand_prices[2];
  auto r = verify_shattering(f);
  EXPECT_FALSE(r.all());
  EXPECT_EQ(r.failures, (std::vector<std::uint32_t>{5}));
  EXPECT_EQ(r.value_realized, 8);
}

TEST(Families, IntegerAndGenericUnitMarkets) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    Market a = random_integer_unit_market(s, 3, 4, 10);
    EXPECT_LE(a.num_goods(), 3);
    EXPECT_LE(a.num_buyers(), 4);
    EXPECT_LE(a.bound(), 10);
    EXPECT_EQ(a, random_integer_unit_market(s, 3, 4, 10));
    Market b = random_generic_unit_market(s, 8, 3);
    EXPECT_LE(b.num_goods(), 8);
    EXPECT_LE(b.num_buyers(), 8);
    for (int x : b.supplies()) EXPECT_LE(x, 3);
    EXPECT_TRUE(check_generic_unit(b, GenericityCertificate::Mode::structural).generic);
  }
}

TEST(Families, MbvMarkets) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto small = random_mbv_market(s, WeightMode::small_integers);
    for (const auto& w : market_weights(small.market)) {
      EXPECT_TRUE(is_integer(w));
      EXPECT_LE(w, 3);
    }
    auto power = random_mbv_market(s, WeightMode::power_generic);
    EXPECT_EQ(power.gamma, power.market.num_buyers() * power.market.num_goods());
    auto c = check_generic_mbv(power.market, power.gamma, GenericityCertificate::Mode::structural);
    EXPECT_TRUE(c.generic);
    if (market_weights(power.market).size() > 1) { EXPECT_EQ(c.base, 2 * power.gamma + 1); }
    EXPECT_EQ(power.market, random_mbv_market(s, WeightMode::power_generic).market);
    EXPECT_LE(small.market.num_buyers(), 4);
    EXPECT_LE(small.market.num_goods(), 5);
  }
}

TEST(Families, ProbePrices) {
  Market e3 = fixture_e3();
  auto ps = probe_prices(e3, 4, 5);
  ASSERT_EQ(ps.size(), 5u);
  EXPECT_EQ(ps[0], PriceVector::zero(2));
  for (const auto& p : ps) {
    for (const auto& x : p.values()) {
      EXPECT_GE(x, 0);
      EXPECT_LE(x, e3.bound());
    }
  }
  EXPECT_EQ(ps, probe_prices(e3, 4, 5));
}

TEST(Distributions, GridAndFiniteSupport) {
  auto grid = BuyerDistribution::iid_grid(3, 4, Scalar(2));
  EXPECT_EQ(grid.str(), "iid_grid(m=3,steps=4,H=2/1)");
  auto sample = grid.sample(50, 9);
  EXPECT_EQ(sample.size(), 50u);
  for (const auto& v : sample) {
    for (const auto& x : v.unit_values()) {
      EXPECT_TRUE(is_integer(x * 2));
      EXPECT_GE(x, 0);
      EXPECT_LE(x, 2);
    }
  }
  EXPECT_EQ(sample, grid.sample(50, 9));

  Valuation lo = Valuation::unit_demand({Scalar(1), Scalar(0)});
  Valuation hi = Valuation::unit_demand({Scalar(0), Scalar(3)});
  auto fs = BuyerDistribution::finite_support({lo, hi}, {make_scalar(1, 4), make_scalar(3, 4)});
  EXPECT_EQ(fs.bound(), 3);
  int his = 0;
  for (const auto& v : fs.sample(4000, 1)) his += v == hi;
  EXPECT_NEAR(his / 4000.0, 0.75, 0.03);
  EXPECT_THROW(BuyerDistribution::finite_support({lo, hi}, {make_scalar(1, 2), make_scalar(1, 3)}), Error);
  for (const auto& v : BuyerDistribution::point_mass(lo).sample(5, 3)) EXPECT_EQ(v, lo);
  auto b2 = BuyerDistribution::bad2(4);
  EXPECT_EQ(b2.sample(4, 1).size(), 4u);
  EXPECT_THROW(b2.sample(5, 1), Error);
}

TEST(Generalization, CanonicalCounts) {
  EXPECT_EQ(canonical_counts(fixture_e1(), PriceVector::zero(3)), (std::vector<int>{0, 0, 3}));
  EXPECT_EQ(canonical_counts(fixture_e4(), PriceVector({Scalar(2), Scalar(1)})), (std::vector<int>{1, 2}));
}

TEST(Generalization, DemandSmallRun) {
  DemandGenConfig cfg;
  cfg.n = 70;
  cfg.supplies = {20, 20, 20};
  cfg.trials = 12;
  cfg.dist = BuyerDistribution::iid_grid(3, 1000);
  auto ex = demand_generalization(cfg);
  EXPECT_EQ(ex.kept + ex.discarded, 12);
  EXPECT_EQ(ex.per_good.size(), 3u);
  EXPECT_EQ(ex.all_goods.trials, ex.kept);
  for (const auto& row : ex.rows) {
    if (row.discarded) continue;
    for (GoodId g = 0; g < 3; ++g) EXPECT_LE(row.ndem_sample[g], 21);
  }
  cfg.threads = 3;
  auto again = demand_generalization(cfg);
  EXPECT_EQ(report_csv(again.report()), report_csv(ex.report()));
  cfg.supplies = {1, 2};
  EXPECT_THROW(demand_generalization(cfg), Error);
}

TEST(Generalization, WelfareSmallRun) {
  WelfareGenConfig cfg;
  cfg.n = 24;
  cfg.supplies = {6, 6, 6};
  cfg.trials = 8;
  cfg.dist = BuyerDistribution::iid_grid(3, 100);
  auto ex = welfare_generalization(cfg);
  EXPECT_EQ(ex.rows.size(), 8u);
  for (const auto& r : ex.rows) {
    EXPECT_LE(r.worst, r.optimum);
    EXPECT_GE(r.ratio, 0);
    EXPECT_LE(r.ratio, 1);
  }
  EXPECT_LE(ex.min_ratio, ex.mean_ratio);
  cfg.threads = 2;
  EXPECT_EQ(report_csv(welfare_generalization(cfg).report()), report_csv(ex.report()));
}

TEST(Reports, CsvAndFormatting) {
  ExperimentReport r;
  r.columns = {"a", "b"};
  r.rows = {{"1", "x"}, {"2", "y"}};
  EXPECT_EQ(report_csv(r), "a,b\n1,x\n2,y\n");
  EXPECT_EQ(format_double(0.5), "0.500000");
  EXPECT_EQ(format_double(1.0 / 3), "0.333333");
}
