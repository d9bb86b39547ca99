#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "assignment.hpp"
#include "demand_analysis.hpp"
#include "demanders.hpp"
#include "equilibrium.hpp"
#include "fixtures.hpp"
#include "genericity.hpp"
#include "market.hpp"
#include "rng.hpp"

namespace walras {

// ---------------------------------------------------------------------------
// Lower-bound generators

struct Bad2Instance {
  Market market;
  std::vector<int> sigma;  // buyer q is matched to good sigma[q]
  GoodId distinguished = 0;
};

// bad1 relabeled: buyer q values sigma(q) and g* at 1, with sigma and g*
// uniform.
inline Bad2Instance gen_bad2_instance(int n, std::uint64_t seed) {
  require(n >= 2, ErrorKind::precondition, "bad2 needs n >= 2");
  Rng rng(seed);
  auto sigma = rng.permutation(n);
  GoodId star = static_cast<GoodId>(rng.below(static_cast<std::uint64_t>(n)));
  std::vector<Valuation> buyers;
  for (int q = 0; q < n; ++q) {
    std::vector<Scalar> v(n, Scalar(0));
    v[sigma[q]] = 1;
    v[star] = 1;
    buyers.push_back(Valuation::unit_demand(v));
  }
  return {Market(n, std::vector<int>(n, 1), Scalar(1), std::move(buyers)), std::move(sigma), star};
}

inline Market gen_bad2(int n, std::uint64_t seed) { return gen_bad2_instance(n, seed).market; }

struct NonMinimalInstance {
  Market market;
  PriceVector prices;     // a WE price vector that is not minimal
  Allocation allocation;  // buyer q gets good q
  GoodId special = 0;
};

// Generic unit-demand values with v_q(h) < v_q(g) < v_q(q) for the special
// good g = n-1, priced at p_q = v_q(q) - v_q(g). Buyer q's values are a block
// of distinct powers of two, so the whole instance is power-of-two generic.
inline NonMinimalInstance gen_nonmin(int n) {
  require(n >= 2, ErrorKind::precondition, "nonmin needs n >= 2");
  require(n * n <= 64, ErrorKind::size, "nonmin needs n <= 8");
  const GoodId g = n - 1;
  const int top = n * n - 1;
  std::vector<Valuation> buyers;
  std::vector<Scalar> p(n);
  Allocation mu(n);
  for (int q = 0; q < n; ++q) {
    std::vector<Scalar> v(n);
    int e = q * n;  // block [q n, q n + n)
    for (GoodId h = 0; h < n; ++h) {
      if (h != q && h != g) v[h] = pow2(e++ - top);
    }
    if (q != g) v[g] = pow2(e++ - top);
    v[q] = pow2(e++ - top);
    p[q] = v[q] - v[g];
    mu[q] = Bundle::single(q);
    buyers.push_back(Valuation::unit_demand(v));
  }
  return {Market(n, std::vector<int>(n, 1), Scalar(1), std::move(buyers)), PriceVector(p), mu, g};
}

// ---------------------------------------------------------------------------
// Shattering construction

struct ShatteringFixture {
  Market market;
  GoodId special = 0;
  Scalar epsilon;
  // Indexed by subset mask of buyers. demand_prices[S] makes exactly the
  // buyers in S demand the special good; value_prices[S] makes exactly the
  // buyers in S reach their value target.
  std::vector<PriceVector> demand_prices;
  std::vector<PriceVector> value_prices;
  std::vector<Scalar> value_targets;
};

// n = m buyers; buyer q != g values q at 2 and g at 1, buyer g values only g
// at 1/2. Special good g = m-1, epsilon = 1/8.
inline ShatteringFixture shattering_fixture(int m) {
  require(m >= 2, ErrorKind::precondition, "shattering needs m >= 2");
  require(m <= 16, ErrorKind::size, "shattering needs m <= 16");
  const GoodId g = m - 1;
  const Scalar eps = make_scalar(1, 8);
  std::vector<Valuation> buyers;
  for (int q = 0; q < m; ++q) {
    std::vector<Scalar> v(m, Scalar(0));
    if (q == g) {
      v[g] = make_scalar(1, 2);
    } else {
      v[q] = 2;
      v[g] = 1;
    }
    buyers.push_back(Valuation::unit_demand(v));
  }
  ShatteringFixture f{Market(m, std::vector<int>(m, 1), Scalar(2), std::move(buyers)), g, eps, {}, {}, {}};
  for (int q = 0; q < m; ++q) f.value_targets.push_back(q == g ? make_scalar(1, 2) : make_scalar(3, 2));
  for (std::uint32_t s = 0; s < (1u << m); ++s) {
    bool with_g = (s >> g) & 1u;
    std::vector<Scalar> pd(m), pv(m);
    for (GoodId h = 0; h < m; ++h) {
      bool in = (s >> h) & 1u;
      if (h == g) {
        pd[h] = pv[h] = with_g ? Scalar(0) : make_scalar(1, 2) + eps;
        continue;
      }
      Scalar high = with_g ? Scalar(1) + 2 * eps : make_scalar(3, 2) + 2 * eps;
      // Demand class: members are pushed onto g by a high own price. Value
      // class: members keep their own good, which is worth more.
      pd[h] = in ? high : eps;
      pv[h] = in ? eps : high;
    }
    f.demand_prices.emplace_back(pd);
    f.value_prices.emplace_back(pv);
  }
  return f;
}

struct ShatteringReport {
  int m = 0;
  long subsets = 0;
  long demand_realized = 0;
  long value_realized = 0;
  std::vector<std::uint32_t> failures;  // masks that failed in either class
  bool all() const { return demand_realized == subsets && value_realized == subsets; }
};

// Each labeling is checked through the canonical bundle: the unit-demand
// shortcut always, and the general encodable rule as well when
// `full_check` is set.
inline ShatteringReport verify_shattering(const ShatteringFixture& f, bool full_check = false) {
  const Market& mk = f.market;
  ShatteringReport r;
  r.m = mk.num_goods();
  r.subsets = static_cast<long>(f.demand_prices.size());
  for (std::uint32_t s = 0; s < f.demand_prices.size(); ++s) {
    bool dem_ok = true, val_ok = true;
    for (BuyerId q = 0; q < mk.num_buyers(); ++q) {
      bool member = (s >> q) & 1u;
      Bundle bd = unit_canonical_bundle(mk.buyer(q), f.demand_prices[s]);
      Bundle bv = unit_canonical_bundle(mk.buyer(q), f.value_prices[s]);
      if (full_check) {
        if (canonical_bundle(mk.buyer(q), f.demand_prices[s]) != bd) dem_ok = false;
        if (canonical_bundle(mk.buyer(q), f.value_prices[s]) != bv) val_ok = false;
      }
      if (bd.contains(f.special) != member) dem_ok = false;
      if ((mk.buyer(q)(bv) >= f.value_targets[q]) != member) val_ok = false;
    }
    r.demand_realized += dem_ok;
    r.value_realized += val_ok;
    if (!dem_ok || !val_ok) r.failures.push_back(s);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Seeded instance families

// Small integer unit-demand market: n in [1,4], m in [1,3], H in [1,10],
// supplies in [1,2].
inline Market random_integer_unit_market(std::uint64_t seed, int max_goods = 3, int max_buyers = 4,
                                         int max_bound = 10) {
  Rng rng(seed);
  int n = 1 + static_cast<int>(rng.below(max_buyers));
  int m = 1 + static_cast<int>(rng.below(max_goods));
  int h = 1 + static_cast<int>(rng.below(max_bound));
  std::vector<int> s(m);
  for (auto& x : s) x = 1 + static_cast<int>(rng.below(2));
  std::vector<Valuation> buyers;
  for (int q = 0; q < n; ++q) {
    std::vector<Scalar> v(m);
    for (auto& x : v) x = Scalar(static_cast<long>(rng.below(h + 1)));
    buyers.push_back(Valuation::unit_demand(v));
  }
  return Market(m, s, Scalar(h), std::move(buyers));
}

// Power-of-two generic unit-demand market with n, m in [1, max] and supplies
// in [1, max_supply].
inline Market random_generic_unit_market(std::uint64_t seed, int max_size = 8, int max_supply = 3) {
  Rng rng(seed);
  int n = 1 + static_cast<int>(rng.below(max_size));
  int m = 1 + static_cast<int>(rng.below(max_size));
  std::vector<int> s(m);
  for (auto& x : s) x = 1 + static_cast<int>(rng.below(max_supply));
  return generate_generic(n, m, rng.next(), s);
}

enum class WeightMode {
  small_integers,  // weights in {0..3}: ties and degenerate goods are common
  power_generic    // distinct powers of a base above the coefficient bound
};

namespace detail {

inline std::vector<ElementId> random_goods(Rng& rng, int m, int lo) {
  std::vector<ElementId> all(m);
  std::iota(all.begin(), all.end(), 0);
  rng.shuffle(all);
  int k = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(m - lo + 1)));
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

// Leaf over `ground` with a random uniform or partition matroid; weights are
// taken from `next_weight`.
template <class W>
MbvTree random_leaf(Rng& rng, std::vector<ElementId> ground, W&& next_weight) {
  std::vector<Scalar> w;
  for (std::size_t i = 0; i < ground.size(); ++i) w.push_back(next_weight());
  int k = static_cast<int>(ground.size());
  if (k >= 2 && rng.below(2) == 0) {
    std::vector<ElementId> shuffled = ground;
    rng.shuffle(shuffled);
    int cut = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k - 1)));
    std::vector<std::vector<ElementId>> blocks{{shuffled.begin(), shuffled.begin() + cut},
                                               {shuffled.begin() + cut, shuffled.end()}};
    std::vector<int> caps{1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cut))),
                          1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k - cut)))};
    Matroid mat = Matroid::partition(blocks, caps);
    // Partition ground order is block order; realign the weights.
    std::map<ElementId, Scalar> byid;
    for (std::size_t i = 0; i < ground.size(); ++i) byid[ground[i]] = w[i];
    return mbv_leaf(Viwm::from_map(mat, byid));
  }
  int rank = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  return mbv_leaf(Viwm(Matroid::uniform(ground, rank), w));
}

}  // namespace detail

// Random MBV tree over m goods in one of five shapes: a leaf, a merge of two
// leaves, an endowed leaf, or an endowed merge (leaves are uniform or
// partition matroids). Weights come from `next_weight`.
template <class W>
MbvTree random_mbv_tree(Rng& rng, int m, W&& next_weight) {
  int shape = static_cast<int>(rng.below(m >= 2 ? 5 : 2));
  switch (shape) {
    case 0:
    case 1:
      return detail::random_leaf(rng, detail::random_goods(rng, m, 1), next_weight);
    case 2: {
      auto a = detail::random_goods(rng, m, 1), b = detail::random_goods(rng, m, 1);
      return mbv_merge(detail::random_leaf(rng, a, next_weight), detail::random_leaf(rng, b, next_weight));
    }
    case 3: {
      auto a = detail::random_goods(rng, m, 1);
      a.insert(a.begin(), -1);
      return mbv_endow(detail::random_leaf(rng, a, next_weight), {-1});
    }
    default: {
      auto a = detail::random_goods(rng, m, 1), b = detail::random_goods(rng, m, 1);
      a.insert(a.begin(), -1);
      b.insert(b.begin(), -1);
      return mbv_endow(mbv_merge(detail::random_leaf(rng, a, next_weight), detail::random_leaf(rng, b, next_weight)),
                       {-1});
    }
  }
}

struct MbvMarketInstance {
  Market market;
  int gamma = 0;  // coefficient bound the weights were generated for (power mode)
};

// Random MBV market with n in [1, max_buyers], m in [1, max_goods] and unit
// supplies up to 2. In power mode the weights are base^e / base^(W-1) with
// base = 2 gamma + 1 and gamma = n m, e a permutation of 0..W-1 across the
// whole market.
inline MbvMarketInstance random_mbv_market(std::uint64_t seed, WeightMode mode, int max_buyers = 4,
                                           int max_goods = 5) {
  Rng rng(seed);
  int n = 1 + static_cast<int>(rng.below(max_buyers));
  int m = 1 + static_cast<int>(rng.below(max_goods));
  std::vector<int> s(m);
  for (auto& x : s) x = 1 + static_cast<int>(rng.below(2));
  int gamma = n * m;
  std::vector<MbvTree> trees;
  // Build with placeholder weights first to count them, then assign.
  std::vector<std::uint64_t> tree_seeds;
  for (int q = 0; q < n; ++q) tree_seeds.push_back(rng.next());
  int total = 0;
  for (int q = 0; q < n; ++q) {
    Rng tr(tree_seeds[q]);
    random_mbv_tree(tr, m, [&] {
      ++total;
      return Scalar(1);
    });
  }
  std::vector<Scalar> pool;
  if (mode == WeightMode::power_generic) {
    Scalar base(2 * gamma + 1);
    auto perm = rng.permutation(total);
    for (int e : perm) pool.push_back(pow_scalar(base, e) / pow_scalar(base, total - 1));
  } else {
    for (int i = 0; i < total; ++i) pool.push_back(Scalar(static_cast<long>(rng.below(4))));
  }
  std::size_t at = 0;
  std::vector<Valuation> buyers;
  Scalar h = 0;
  for (int q = 0; q < n; ++q) {
    Rng tr(tree_seeds[q]);
    auto tree = random_mbv_tree(tr, m, [&] { return pool[at++]; });
    buyers.push_back(Valuation::mbv(m, tree));
    h = std::max(h, buyers.back()(Bundle::full(m)));
  }
  return {Market(m, s, h, std::move(buyers)), gamma};
}

// Price vectors for matroid-structure checks: zero, then seeded points of the
// grid (H/8) {0..8}^m.
inline std::vector<PriceVector> probe_prices(const Market& market, std::uint64_t seed, int count) {
  const int m = market.num_goods();
  std::vector<PriceVector> out{PriceVector::zero(m)};
  Rng rng(seed);
  while (static_cast<int>(out.size()) < count) {
    std::vector<Scalar> p(m);
    for (auto& x : p) x = market.bound() * make_scalar(static_cast<long>(rng.below(9)), 8);
    out.emplace_back(p);
  }
  return out;
}

// Subadditive fixture for random feasibilization: 5 buyers all wanting both
// of 2 goods with 4 copies each (over-demand d = 1, min supply 4).
inline Market random_feasibilization_fixture() {
  std::vector<Valuation> buyers(5, Valuation::table(2, {Scalar(0), Scalar(2), Scalar(2), Scalar(3)}));
  return Market(2, {4, 4}, Scalar(3), buyers);
}

// ---------------------------------------------------------------------------
// Buyer distributions

class BuyerDistribution {
 public:
  enum class Kind { iid_grid, bad2, finite_support };

  // Each value uniform on {0, H/steps, 2H/steps, ..., H}, independently.
  static BuyerDistribution iid_grid(int m, long steps, Scalar bound = Scalar(1)) {
    require(m >= 1 && steps >= 1, ErrorKind::precondition, "grid needs m, steps >= 1");
    BuyerDistribution d(Kind::iid_grid);
    d.m_ = m;
    d.steps_ = steps;
    d.bound_ = bound;
    return d;
  }

  // Whole bad2 instances; samples must have n = m buyers.
  static BuyerDistribution bad2(int n) {
    BuyerDistribution d(Kind::bad2);
    d.m_ = n;
    d.bound_ = 1;
    return d;
  }

  static BuyerDistribution finite_support(std::vector<Valuation> support, std::vector<Scalar> probabilities) {
    require(!support.empty() && support.size() == probabilities.size(), ErrorKind::precondition,
            "finite support needs one probability per valuation");
    Scalar total = 0;
    mpz_class den = 1;
    for (const Scalar& p : probabilities) {
      require(p >= 0, ErrorKind::precondition, "probabilities must be non-negative");
      total += p;
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), p.get_den().get_mpz_t());
    }
    require(total == 1, ErrorKind::precondition, "probabilities must sum to 1");
    require(den.fits_ulong_p(), ErrorKind::size, "probability denominators too large");
    BuyerDistribution d(Kind::finite_support);
    d.m_ = support.front().num_goods();
    for (const auto& v : support) {
      require(v.num_goods() == d.m_, ErrorKind::precondition, "support valuations disagree on m");
      d.bound_ = std::max(d.bound_, v(Bundle::full(d.m_)));
    }
    d.support_ = std::move(support);
    d.denominator_ = den.get_ui();
    unsigned long acc = 0;
    for (const Scalar& p : probabilities) {
      Scalar scaled = p * Scalar(den);
      acc += mpz_class(scaled.get_num()).get_ui();
      d.cumulative_.push_back(acc);
    }
    d.probabilities_ = std::move(probabilities);
    return d;
  }

  static BuyerDistribution point_mass(Valuation v) { return finite_support({std::move(v)}, {Scalar(1)}); }

  Kind kind() const { return kind_; }
  int num_goods() const { return m_; }
  Scalar bound() const { return bound_; }

  std::vector<Valuation> sample(int n, std::uint64_t seed) const {
    Rng rng(seed);
    std::vector<Valuation> out;
    switch (kind_) {
      case Kind::iid_grid:
        for (int q = 0; q < n; ++q) {
          std::vector<Scalar> v(m_);
          for (auto& x : v) x = bound_ * make_scalar(static_cast<long>(rng.below(steps_ + 1)), steps_);
          out.push_back(Valuation::unit_demand(v));
        }
        break;
      case Kind::bad2:
        require(n == m_, ErrorKind::precondition, "bad2 samples have exactly m buyers");
        return gen_bad2(n, rng.next()).buyers();
      case Kind::finite_support:
        for (int q = 0; q < n; ++q) {
          unsigned long u = rng.below(denominator_);
          std::size_t i = static_cast<std::size_t>(
              std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
          out.push_back(support_[i]);
        }
        break;
    }
    return out;
  }

  std::string str() const {
    switch (kind_) {
      case Kind::iid_grid:
        return "iid_grid(m=" + std::to_string(m_) + ",steps=" + std::to_string(steps_) + ",H=" + to_string(bound_) + ")";
      case Kind::bad2: return "bad2(n=" + std::to_string(m_) + ")";
      case Kind::finite_support: return "finite_support(size=" + std::to_string(support_.size()) + ")";
    }
    return "?";
  }

 private:
  explicit BuyerDistribution(Kind k) : kind_(k) {}
  Kind kind_;
  int m_ = 0;
  long steps_ = 0;
  Scalar bound_ = 0;
  std::vector<Valuation> support_;
  std::vector<Scalar> probabilities_;
  std::vector<unsigned long> cumulative_;
  unsigned long denominator_ = 1;
};

// ---------------------------------------------------------------------------
// Reports

struct ExperimentReport {
  std::string name;
  std::vector<std::pair<std::string, std::string>> config;
  long trials = 0;
  long discarded = 0;
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<std::pair<std::string, ProportionEstimate>> estimates;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

inline std::string report_csv(const ExperimentReport& r) {
  std::string s;
  for (std::size_t i = 0; i < r.columns.size(); ++i) s += (i ? "," : "") + r.columns[i];
  s += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
    s += '\n';
  }
  return s;
}

// ---------------------------------------------------------------------------
// bad2 Monte Carlo

struct Bad2Experiment {
  int n = 0;
  long trials = 0;
  std::uint64_t seed = 0;
  Scalar total;       // sum of OD^e(g*) over trials
  double mean = 0;
  double se = 0;      // standard error of the mean
  double target = 0;  // (n - 1) / 2
  std::vector<int> od;            // per trial
  std::vector<GoodId> distinguished;
  bool within(double k) const { return std::abs(mean - target) <= k * se; }
  ExperimentReport report() const;
};

// Every buyer breaks ties with its own seeded uniform rule; OD^e is taken at
// the distinguished good at minimal prices.
inline Bad2Experiment bad2_experiment(int n, long trials, std::uint64_t seed, int threads = 1) {
  require(trials >= 2, ErrorKind::precondition, "need at least two trials");
  Bad2Experiment ex;
  ex.n = n;
  ex.trials = trials;
  ex.seed = seed;
  ex.target = (n - 1) / 2.0;
  auto rows = run_trials<std::pair<int, GoodId>>(trials, threads, [&](long t) {
    auto inst = gen_bad2_instance(n, derive_seed(seed, 10, static_cast<std::uint64_t>(t)));
    auto we = minimal_walrasian(inst.market);
    std::vector<TieBreakRule> rules;
    for (int q = 0; q < n; ++q) {
      rules.push_back(TieBreakRule::uniform(derive_seed(seed, 11 + static_cast<std::uint64_t>(q),
                                                        static_cast<std::uint64_t>(t))));
    }
    auto od = tiebreak_overdemand(inst.market, we.prices, rules);
    return std::make_pair(od[inst.distinguished], inst.distinguished);
  });
  Scalar sum = 0, sq = 0;
  for (const auto& [od, g] : rows) {
    ex.od.push_back(od);
    ex.distinguished.push_back(g);
    sum += od;
    sq += Scalar(od) * od;
  }
  ex.total = sum;
  Scalar mean = sum / Scalar(trials);
  Scalar var = (sq - Scalar(trials) * mean * mean) / Scalar(trials - 1);
  ex.mean = to_double(mean);
  ex.se = std::sqrt(to_double(var) / static_cast<double>(trials));
  return ex;
}

inline ExperimentReport Bad2Experiment::report() const {
  ExperimentReport r;
  r.name = "bad2";
  r.config = {{"n", std::to_string(n)}, {"trials", std::to_string(trials)}, {"seed", std::to_string(seed)},
              {"rule", "uniform"}};
  r.trials = trials;
  r.summary = {{"mean_od", format_double(mean)},
               {"mean_od_exact", to_string(total / Scalar(trials))},
               {"standard_error", format_double(se)},
               {"target", format_double(target)},
               {"within_3se", within(3) ? "true" : "false"}};
  r.columns = {"trial", "distinguished", "od"};
  for (long t = 0; t < trials; ++t) {
    r.rows.push_back({std::to_string(t), std::to_string(distinguished[t]), std::to_string(od[t])});
  }
  return r;
}

inline ExperimentReport shattering_report(int m, const ShatteringReport& s) {
  ExperimentReport r;
  r.name = "shatter";
  r.config = {{"m", std::to_string(m)}, {"epsilon", "1/8"}};
  r.trials = s.subsets;
  r.summary = {{"demand_realized", std::to_string(s.demand_realized)},
               {"value_realized", std::to_string(s.value_realized)},
               {"all_realized", s.all() ? "true" : "false"}};
  r.columns = {"subset_mask", "realized"};
  for (long x = 0; x < s.subsets; ++x) {
    bool bad = std::find(s.failures.begin(), s.failures.end(), static_cast<std::uint32_t>(x)) != s.failures.end();
    r.rows.push_back({std::to_string(x), bad ? "false" : "true"});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Generalization experiments

// Number of buyers whose encodable canonical bundle holds each good.
inline std::vector<int> canonical_counts(const Market& market, const PriceVector& p) {
  std::vector<int> c(market.num_goods(), 0);
  for (const auto& v : market.buyers()) {
    Bundle b = v.kind() == Valuation::Kind::unit_demand ? unit_canonical_bundle(v, p) : canonical_bundle(v, p);
    for (GoodId g : b.goods()) ++c[g];
  }
  return c;
}

struct DemandGenConfig {
  BuyerDistribution dist = BuyerDistribution::iid_grid(3, 10000);
  int n = 700;
  std::vector<int> supplies = {200, 200, 200};
  Scalar alpha = make_scalar(3, 10);
  double delta = 0.05;  // stated confidence target, echoed only
  long trials = 200;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct DemandGenTrial {
  bool discarded = false;
  std::vector<int> ndem_sample;  // on N
  std::vector<int> ndem_fresh;   // on N'
  std::vector<char> ok;          // ndem_fresh <= (1 + alpha) s, per good
};

struct DemandGenExperiment {
  DemandGenConfig config;
  std::vector<DemandGenTrial> rows;
  long kept = 0;
  long discarded = 0;
  std::vector<ProportionEstimate> per_good;
  ProportionEstimate all_goods;  // every good within the bound at once
  ProportionEstimate discard_rate;
  ExperimentReport report() const;
};

// Per trial: minimal prices on a sampled market N; trials where some good's
// canonical demand on N exceeds s_g + 1 are discarded and counted; otherwise
// canonical demand on a fresh N' is compared with (1 + alpha) s_g.
inline DemandGenExperiment demand_generalization(const DemandGenConfig& cfg) {
  const int m = cfg.dist.num_goods();
  require(static_cast<int>(cfg.supplies.size()) == m, ErrorKind::precondition, "one supply per good is required");
  require(cfg.alpha >= 0, ErrorKind::precondition, "alpha must be non-negative");
  DemandGenExperiment ex;
  ex.config = cfg;
  ex.rows = run_trials<DemandGenTrial>(cfg.trials, cfg.threads, [&](long t) {
    DemandGenTrial row;
    auto ts = static_cast<std::uint64_t>(t);
    Market sample(m, cfg.supplies, cfg.dist.bound(), cfg.dist.sample(cfg.n, derive_seed(cfg.seed, 20, ts)));
    auto we = minimal_walrasian(sample);
    row.ndem_sample = canonical_counts(sample, we.prices);
    for (GoodId g = 0; g < m; ++g) {
      if (row.ndem_sample[g] > cfg.supplies[g] + 1) row.discarded = true;
    }
    Market fresh(m, cfg.supplies, cfg.dist.bound(), cfg.dist.sample(cfg.n, derive_seed(cfg.seed, 21, ts)));
    row.ndem_fresh = canonical_counts(fresh, we.prices);
    for (GoodId g = 0; g < m; ++g) {
      row.ok.push_back(Scalar(row.ndem_fresh[g]) <= (1 + cfg.alpha) * Scalar(cfg.supplies[g]));
    }
    return row;
  });
  std::vector<long> good_ok(m, 0);
  long all_ok = 0;
  for (const auto& r : ex.rows) {
    if (r.discarded) {
      ++ex.discarded;
      continue;
    }
    ++ex.kept;
    bool every = true;
    for (GoodId g = 0; g < m; ++g) {
      good_ok[g] += r.ok[g];
      every = every && r.ok[g];
    }
    all_ok += every;
  }
  for (GoodId g = 0; g < m; ++g) ex.per_good.push_back(estimate_proportion(good_ok[g], ex.kept));
  ex.all_goods = estimate_proportion(all_ok, ex.kept);
  ex.discard_rate = estimate_proportion(ex.discarded, cfg.trials);
  return ex;
}

inline std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

inline ExperimentReport DemandGenExperiment::report() const {
  ExperimentReport r;
  r.name = "demand-gen";
  r.config = {{"distribution", config.dist.str()}, {"n", std::to_string(config.n)},
              {"supplies", join_ints(config.supplies)}, {"alpha", to_string(config.alpha)},
              {"delta", format_double(config.delta)}, {"trials", std::to_string(config.trials)},
              {"seed", std::to_string(config.seed)}, {"rule", "encodable"}};
  r.trials = config.trials;
  r.discarded = discarded;
  r.estimates.emplace_back("all_goods", all_goods);
  for (std::size_t g = 0; g < per_good.size(); ++g) r.estimates.emplace_back("good_" + std::to_string(g), per_good[g]);
  r.estimates.emplace_back("discard_rate", discard_rate);
  r.columns = {"trial", "discarded", "ndem_sample", "ndem_fresh", "within"};
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto& x = rows[t];
    bool every = std::all_of(x.ok.begin(), x.ok.end(), [](char c) { return c != 0; });
    r.rows.push_back({std::to_string(t), x.discarded ? "true" : "false", join_ints(x.ndem_sample),
                      join_ints(x.ndem_fresh), every ? "true" : "false"});
  }
  return r;
}

struct WelfareGenConfig {
  BuyerDistribution dist = BuyerDistribution::iid_grid(3, 10000);
  int n = 120;
  std::vector<int> supplies = {30, 30, 30};
  Scalar alpha = make_scalar(1, 5);
  long trials = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  long profile_cap = 1L << 16;
};

struct WelfareGenTrial {
  Scalar worst;    // worst-case resolved welfare of N' at the prices of N
  Scalar optimum;  // OPT(N')
  Scalar ratio;    // worst / optimum, 1 when the optimum is 0
  bool approximate = false;
  bool ok = false;
};

struct WelfareGenExperiment {
  WelfareGenConfig config;
  std::vector<WelfareGenTrial> rows;
  long approximate = 0;
  ProportionEstimate estimate;
  double min_ratio = 1, mean_ratio = 0;
  ExperimentReport report() const;
};

inline Scalar market_optimum(const Market& market) {
  if (market.unit_demand()) return unit_assignment(market).welfare;
  return welfare(market, optimal_allocation(market));
}

inline WelfareGenExperiment welfare_generalization(const WelfareGenConfig& cfg) {
  const int m = cfg.dist.num_goods();
  require(static_cast<int>(cfg.supplies.size()) == m, ErrorKind::precondition, "one supply per good is required");
  WelfareGenExperiment ex;
  ex.config = cfg;
  ex.rows = run_trials<WelfareGenTrial>(cfg.trials, cfg.threads, [&](long t) {
    WelfareGenTrial row;
    auto ts = static_cast<std::uint64_t>(t);
    Market sample(m, cfg.supplies, cfg.dist.bound(), cfg.dist.sample(cfg.n, derive_seed(cfg.seed, 30, ts)));
    auto we = minimal_walrasian(sample);
    Market fresh(m, cfg.supplies, cfg.dist.bound(), cfg.dist.sample(cfg.n, derive_seed(cfg.seed, 31, ts)));
    auto w = worst_case_welfare(fresh, we.prices, cfg.profile_cap);
    row.worst = w.welfare;
    row.approximate = w.approximate;
    row.optimum = market_optimum(fresh);
    row.ratio = row.optimum == 0 ? Scalar(1) : row.worst / row.optimum;
    row.ok = row.ratio >= 1 - cfg.alpha;
    return row;
  });
  long ok = 0;
  double sum = 0;
  for (const auto& r : ex.rows) {
    ok += r.ok;
    ex.approximate += r.approximate;
    double x = to_double(r.ratio);
    sum += x;
    ex.min_ratio = std::min(ex.min_ratio, x);
  }
  ex.estimate = estimate_proportion(ok, cfg.trials);
  ex.mean_ratio = cfg.trials ? sum / static_cast<double>(cfg.trials) : 0;
  return ex;
}

inline ExperimentReport WelfareGenExperiment::report() const {
  ExperimentReport r;
  r.name = "welfare-gen";
  r.config = {{"distribution", config.dist.str()}, {"n", std::to_string(config.n)},
              {"supplies", join_ints(config.supplies)}, {"alpha", to_string(config.alpha)},
              {"trials", std::to_string(config.trials)}, {"seed", std::to_string(config.seed)},
              {"profile_cap", std::to_string(config.profile_cap)}};
  r.trials = config.trials;
  r.discarded = 0;
  r.summary = {{"approximate_trials", std::to_string(approximate)},
               {"min_ratio", format_double(min_ratio)},
               {"mean_ratio", format_double(mean_ratio)}};
  r.estimates.emplace_back("ratio_at_least_1_minus_alpha", estimate);
  r.columns = {"trial", "worst_welfare", "optimum", "ratio", "approximate"};
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto& x = rows[t];
    r.rows.push_back({std::to_string(t), to_string(x.worst), to_string(x.optimum), format_double(to_double(x.ratio)),
                      x.approximate ? "true" : "false"});
  }
  return r;
}

inline ExperimentReport perturbation_report(const PerturbationExperiment& ex, double beta, std::uint64_t seed) {
  ExperimentReport r;
  r.name = "perturb";
  r.config = {{"beta", format_double(beta)}, {"trials", std::to_string(ex.estimate.trials)},
              {"seed", std::to_string(seed)}, {"required_set_size", std::to_string(ex.required_size)},
              {"set_size", std::to_string(ex.set_size)}, {"path_choice", "shortest source path"}};
  r.trials = ex.estimate.trials;
  r.summary = {{"lemma_failures", std::to_string(ex.lemma_failures)}};
  r.estimates.emplace_back("indegree_at_most_1", ex.estimate);
  r.columns = {"trial", "indegree_ok", "lemmas_ok", "failure"};
  for (std::size_t t = 0; t < ex.rows.size(); ++t) {
    const auto& x = ex.rows[t];
    r.rows.push_back({std::to_string(t), x.success ? "true" : "false", x.lemmas_ok ? "true" : "false", x.failure});
  }
  return r;
}

}  // namespace walras
