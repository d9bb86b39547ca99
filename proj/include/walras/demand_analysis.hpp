#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "demand.hpp"
#include "demanders.hpp"
#include "market.hpp"
#include "rng.hpp"

namespace walras {

// Encodable tie-break weights y_g = 1 + 4^(g+1) / (4m 4^m). Bundle size
// dominates, then the highest-indexed good.
inline std::vector<Scalar> encodable_weights(int m) {
  Scalar denom = Scalar(4 * m) * pow_scalar(Scalar(4), static_cast<unsigned>(m));
  std::vector<Scalar> y;
  for (int g = 0; g < m; ++g) y.push_back(1 + pow_scalar(Scalar(4), static_cast<unsigned>(g + 1)) / denom);
  return y;
}

// Selector e(X, v) over a buyer's choice set X.
class TieBreakRule {
 public:
  enum class Kind { adversarial, uniform, encodable, custom };
  using Custom = std::function<Bundle(const std::vector<Bundle>&, const Valuation&, BuyerId)>;

  // Smallest mask containing the target good, else the smallest mask.
  static TieBreakRule adversarial(GoodId target) {
    TieBreakRule r(Kind::adversarial);
    r.target_ = target;
    return r;
  }
  // Uniform over X, a pure function of (seed, buyer, X).
  static TieBreakRule uniform(std::uint64_t seed) {
    TieBreakRule r(Kind::uniform);
    r.seed_ = seed;
    return r;
  }
  // Excludes degenerate bundles (the infeasible set L_v) and maximizes the
  // linear separator y over what remains.
  static TieBreakRule encodable() { return TieBreakRule(Kind::encodable); }
  static TieBreakRule custom(Custom f) {
    TieBreakRule r(Kind::custom);
    r.custom_ = std::move(f);
    return r;
  }

  Kind kind() const { return kind_; }
  GoodId target() const { return target_; }
  std::uint64_t seed() const { return seed_; }

  Bundle select_from(const std::vector<Bundle>& x, const Valuation& v, BuyerId q) const {
    require(!x.empty(), ErrorKind::precondition, "empty choice set");
    switch (kind_) {
      case Kind::adversarial: {
        for (Bundle b : x) {
          if (b.contains(target_)) return b;
        }
        return x.front();
      }
      case Kind::uniform: {
        std::uint64_t h = derive_seed(seed_, static_cast<std::uint64_t>(q));
        for (Bundle b : x) h = splitmix64(h ^ b.mask());
        return x[Rng(h).below(x.size())];
      }
      case Kind::encodable: {
        auto y = encodable_weights(v.num_goods());
        const Bundle* best = nullptr;
        Scalar best_y;
        for (const Bundle& b : x) {
          if (is_degenerate(v, b)) continue;
          Scalar s = 0;
          for (GoodId g : b.goods()) s += y[g];
          if (!best || s > best_y) {
            best = &b;
            best_y = s;
          }
        }
        require(best != nullptr, ErrorKind::internal, "no non-degenerate demanded bundle");
        return *best;
      }
      case Kind::custom:
        return custom_(x, v, q);
    }
    return x.front();
  }

  Bundle select(const Valuation& v, const PriceVector& p, BuyerId q) const {
    return select_from(choice_set(v, p), v, q);
  }

  std::string str() const {
    switch (kind_) {
      case Kind::adversarial: return "adversarial:" + std::to_string(target_);
      case Kind::uniform: return "uniform:" + std::to_string(seed_);
      case Kind::encodable: return "encodable";
      case Kind::custom: return "custom";
    }
    return "?";
  }

 private:
  explicit TieBreakRule(Kind k) : kind_(k) {}
  Kind kind_;
  GoodId target_ = 0;
  std::uint64_t seed_ = 0;
  Custom custom_;
};

inline TieBreakRule encodable_rule() { return TieBreakRule::encodable(); }

// The encodable rule's pick from the full demand correspondence.
inline Bundle canonical_bundle(const Valuation& v, const PriceVector& p) {
  return TieBreakRule::encodable().select_from(demand_correspondence(v, p).bundles, v, 0);
}

// Fast canonical bundle for unit-demand buyers: the highest-indexed demand
// good with positive value, else nothing.
inline Bundle unit_canonical_bundle(const Valuation& v, const PriceVector& p) {
  auto goods = demand_goods(v, p);
  for (auto it = goods.rbegin(); it != goods.rend(); ++it) {
    if (v.unit_values()[*it] > 0) return Bundle::single(*it);
  }
  return Bundle();
}

// Bundles committed to by each buyer under its rule; a rule answer outside
// the buyer's choice set is a contract error.
inline std::vector<Bundle> committed_bundles(const Market& market, const PriceVector& p,
                                             const std::vector<TieBreakRule>& rules) {
  require(static_cast<int>(rules.size()) == market.num_buyers(), ErrorKind::precondition,
          "one tie-break rule per buyer is required");
  std::vector<Bundle> out;
  for (BuyerId q = 0; q < market.num_buyers(); ++q) {
    auto x = choice_set(market.buyer(q), p);
    Bundle b = rules[q].select_from(x, market.buyer(q), q);
    require(std::find(x.begin(), x.end(), b) != x.end(), ErrorKind::contract,
            "rule " + rules[q].str() + " returned " + b.str() + " outside buyer " + std::to_string(q) +
                "'s demand");
    out.push_back(b);
  }
  return out;
}

inline std::vector<int> bundle_counts(int m, const std::vector<Bundle>& bundles) {
  return allocation_counts(m, bundles);
}

// OD^e per good with every buyer committing through its rule.
inline std::vector<int> tiebreak_overdemand(const Market& market, const PriceVector& p,
                                            const std::vector<TieBreakRule>& rules) {
  auto counts = bundle_counts(market.num_goods(), committed_bundles(market, p, rules));
  std::vector<int> od;
  for (GoodId g = 0; g < market.num_goods(); ++g) od.push_back(excess(counts[g], market.supply(g)));
  return od;
}

struct GoodOverDemand {
  std::vector<BuyerId> demanders;
  std::vector<BuyerId> nondeg_demanders;
  int od = 0;
  int od_nondeg = 0;
  int od_tiebreak = -1;  // -1 when no rule profile was given
  std::vector<BuyerId> takers;  // buyers whose committed bundle holds the good
};

struct OverDemandReport {
  std::vector<GoodOverDemand> goods;
  std::vector<Bundle> committed;
};

inline OverDemandReport overdemand_report(const Market& market, const PriceVector& p,
                                          const std::vector<TieBreakRule>* rules = nullptr) {
  OverDemandReport r;
  auto u = all_demanders(market, p);
  std::vector<std::vector<BuyerId>> un;
  bool nondeg_ok = market.num_goods() <= kMaxCheckGoods;
  if (nondeg_ok) un = all_demanders(market, p, true);
  if (rules) r.committed = committed_bundles(market, p, *rules);
  for (GoodId g = 0; g < market.num_goods(); ++g) {
    GoodOverDemand x;
    x.demanders = u[g];
    x.od = excess(static_cast<int>(u[g].size()), market.supply(g));
    if (nondeg_ok) {
      x.nondeg_demanders = un[g];
      x.od_nondeg = excess(static_cast<int>(un[g].size()), market.supply(g));
    }
    if (rules) {
      for (BuyerId q = 0; q < market.num_buyers(); ++q) {
        if (r.committed[q].contains(g)) x.takers.push_back(q);
      }
      x.od_tiebreak = excess(static_cast<int>(x.takers.size()), market.supply(g));
    }
    r.goods.push_back(std::move(x));
  }
  return r;
}

// Sum of values of possibly infeasible bundles.
inline Scalar relaxed_welfare(const Market& market, const std::vector<Bundle>& bundles) {
  Scalar w = 0;
  for (BuyerId q = 0; q < market.num_buyers(); ++q) w += market.buyer(q)(bundles[q]);
  return w;
}

// Largest per-good excess of a bundle profile over supply.
inline int profile_excess(const Market& market, const std::vector<Bundle>& bundles) {
  auto counts = bundle_counts(market.num_goods(), bundles);
  int d = 0;
  for (GoodId g = 0; g < market.num_goods(); ++g) d = std::max(d, excess(counts[g], market.supply(g)));
  return d;
}

// Buyers in `order` keep their bundle unless one of its goods was already
// taken s_g times by earlier buyers; blocked buyers get nothing.
inline Allocation feasibilize_sequential(const Market& market, const std::vector<Bundle>& bundles,
                                         const std::vector<BuyerId>& order) {
  const int n = market.num_buyers();
  require(static_cast<int>(bundles.size()) == n && static_cast<int>(order.size()) == n, ErrorKind::precondition,
          "bundles and order must cover every buyer");
  std::vector<int> taken(market.num_goods(), 0);
  Allocation mu(n);
  for (BuyerId q : order) {
    bool blocked = false;
    for (GoodId g : bundles[q].goods()) {
      if (taken[g] >= market.supply(g)) blocked = true;
    }
    if (blocked) continue;
    mu[q] = bundles[q];
    for (GoodId g : bundles[q].goods()) ++taken[g];
  }
  return mu;
}

// Per good, a uniformly random s_g-subset of its demanders keeps the good.
inline Allocation feasibilize_random(const Market& market, const std::vector<Bundle>& bundles, std::uint64_t seed) {
  const int n = market.num_buyers();
  require(static_cast<int>(bundles.size()) == n, ErrorKind::precondition, "bundles must cover every buyer");
  Allocation mu(n);
  for (GoodId g = 0; g < market.num_goods(); ++g) {
    std::vector<BuyerId> who;
    for (BuyerId q = 0; q < n; ++q) {
      if (bundles[q].contains(g)) who.push_back(q);
    }
    if (static_cast<int>(who.size()) > market.supply(g)) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(g)));
      rng.shuffle(who);
      who.resize(market.supply(g));
    }
    for (BuyerId q : who) mu[q] = mu[q].with(g);
  }
  return mu;
}

struct WorstCaseWelfare {
  Scalar welfare;
  bool approximate = false;
  std::vector<Bundle> profile;  // the worst tie-break profile
  Allocation allocation;        // its worst sequential outcome
  long profiles_checked = 0;
  bool sequential_bound_holds = true;  // rW <= W + d m H on every profile checked
};

namespace detail {

// Options a buyer may commit to in worst-case resolution: nonempty demand
// goods for unit demand (when any), max non-degenerate bundles otherwise.
inline std::vector<Bundle> worst_case_options(const Valuation& v, const PriceVector& p) {
  if (v.kind() == Valuation::Kind::unit_demand) {
    std::vector<Bundle> out;
    for (GoodId g : demand_goods(v, p)) out.push_back(Bundle::single(g));
    if (out.empty()) out.push_back(Bundle());
    return out;
  }
  auto best = max_nondegenerate(v, p);
  if (best.empty()) best.push_back(Bundle());
  return best;
}

// Minimum over buyer orders of the sequential outcome. Sequential outcomes
// are exactly the maximal feasible kept sets (buyers that conflict with
// nobody always keep), so enumerate kept subsets of contested buyers.
struct OrderWorst {
  Scalar welfare;
  Allocation allocation;
  bool exact = true;
};

inline OrderWorst worst_over_orders(const Market& market, const std::vector<Bundle>& bundles) {
  const int n = market.num_buyers(), m = market.num_goods();
  auto counts = bundle_counts(m, bundles);
  std::vector<BuyerId> contested, order;
  for (BuyerId q = 0; q < n; ++q) {
    bool hot = false;
    for (GoodId g : bundles[q].goods()) {
      if (counts[g] > market.supply(g)) hot = true;
    }
    (hot ? contested : order).push_back(q);
  }
  OrderWorst w;
  if (market.unit_demand()) {
    // Each good independently keeps its s_g lowest-valued takers.
    std::vector<BuyerId> sorted = contested;
    std::stable_sort(sorted.begin(), sorted.end(), [&](BuyerId a, BuyerId b) {
      return market.buyer(a)(bundles[a]) < market.buyer(b)(bundles[b]);
    });
    order.insert(order.end(), sorted.begin(), sorted.end());
    w.allocation = feasibilize_sequential(market, bundles, order);
    w.welfare = relaxed_welfare(market, w.allocation);
    return w;
  }
  const int c = static_cast<int>(contested.size());
  if (c > 20) {
    std::vector<BuyerId> sorted = contested;
    std::stable_sort(sorted.begin(), sorted.end(), [&](BuyerId a, BuyerId b) {
      return market.buyer(a)(bundles[a]) < market.buyer(b)(bundles[b]);
    });
    order.insert(order.end(), sorted.begin(), sorted.end());
    w.allocation = feasibilize_sequential(market, bundles, order);
    w.welfare = relaxed_welfare(market, w.allocation);
    w.exact = false;
    return w;
  }
  std::vector<int> base(m, 0);
  for (BuyerId q : order) {
    for (GoodId g : bundles[q].goods()) ++base[g];
  }
  bool have = false;
  for (std::uint32_t keep = 0; keep < (1u << c); ++keep) {
    std::vector<int> used = base;
    for (int i = 0; i < c; ++i) {
      if (keep >> i & 1) {
        for (GoodId g : bundles[contested[i]].goods()) ++used[g];
      }
    }
    bool feasible = true;
    for (GoodId g = 0; g < m; ++g) {
      if (used[g] > market.supply(g)) feasible = false;
    }
    if (!feasible) continue;
    bool maximal = true;
    for (int i = 0; i < c && maximal; ++i) {
      if (keep >> i & 1) continue;
      bool fits = true;
      for (GoodId g : bundles[contested[i]].goods()) {
        if (used[g] + 1 > market.supply(g)) fits = false;
      }
      if (fits) maximal = false;
    }
    if (!maximal) continue;
    std::vector<BuyerId> ord = order;
    for (int i = 0; i < c; ++i) {
      if (keep >> i & 1) ord.push_back(contested[i]);
    }
    for (int i = 0; i < c; ++i) {
      if (!(keep >> i & 1)) ord.push_back(contested[i]);
    }
    Allocation mu = feasibilize_sequential(market, bundles, ord);
    Scalar val = relaxed_welfare(market, mu);
    if (!have || val < w.welfare) {
      have = true;
      w.welfare = val;
      w.allocation = mu;
    }
  }
  return w;
}

}  // namespace detail

// Minimum over restricted tie-break profiles and buyer orders of the
// sequentially feasibilized welfare. Beyond `profile_cap` profiles the
// search falls back to an adversarial profile plus seeded samples and is
// flagged approximate.
inline WorstCaseWelfare worst_case_welfare(const Market& market, const PriceVector& p, long profile_cap = 1L << 16) {
  const int n = market.num_buyers();
  std::vector<std::vector<Bundle>> opts(n);
  double total = 1;
  for (BuyerId q = 0; q < n; ++q) {
    opts[q] = detail::worst_case_options(market.buyer(q), p);
    total *= static_cast<double>(opts[q].size());
  }
  Scalar bound_slack = Scalar(market.num_goods()) * market.bound();
  WorstCaseWelfare out;
  bool have = false;
  auto consider = [&](const std::vector<Bundle>& profile) {
    auto w = detail::worst_over_orders(market, profile);
    if (!w.exact) out.approximate = true;
    ++out.profiles_checked;
    Scalar rw = relaxed_welfare(market, profile);
    int d = profile_excess(market, profile);
    if (rw > w.welfare + Scalar(d) * bound_slack) out.sequential_bound_holds = false;
    if (!have || w.welfare < out.welfare) {
      have = true;
      out.welfare = w.welfare;
      out.profile = profile;
      out.allocation = w.allocation;
    }
  };
  if (total <= static_cast<double>(profile_cap)) {
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      std::vector<Bundle> profile(n);
      for (BuyerId q = 0; q < n; ++q) profile[q] = opts[q][idx[q]];
      consider(profile);
      int q = n - 1;
      while (q >= 0 && ++idx[q] == opts[q].size()) idx[q--] = 0;
      if (q < 0) break;
    }
    return out;
  }
  out.approximate = true;
  // Adversarial profile: everyone picks the option whose goods are most
  // popular among all options.
  std::vector<int> pop(market.num_goods(), 0);
  for (const auto& o : opts) {
    for (Bundle b : o) {
      for (GoodId g : b.goods()) ++pop[g];
    }
  }
  std::vector<Bundle> adv(n);
  for (BuyerId q = 0; q < n; ++q) {
    int best = -1;
    for (Bundle b : opts[q]) {
      int score = 0;
      for (GoodId g : b.goods()) score += pop[g];
      if (score > best) {
        best = score;
        adv[q] = b;
      }
    }
  }
  consider(adv);
  Rng rng(0x5eedULL);
  for (long t = 1; t < profile_cap; ++t) {
    std::vector<Bundle> profile(n);
    for (BuyerId q = 0; q < n; ++q) profile[q] = opts[q][rng.below(opts[q].size())];
    consider(profile);
  }
  return out;
}

}  // namespace walras
