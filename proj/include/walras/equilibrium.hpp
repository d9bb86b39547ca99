#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "assignment.hpp"
#include "demand.hpp"
#include "demanders.hpp"
#include "market.hpp"
#include "simplex.hpp"

namespace walras {

struct WalrasianEquilibrium {
  PriceVector prices;
  Allocation allocation;
  Scalar welfare;
};

inline constexpr int kMaxGeneralBuyers = 6;
inline constexpr int kMaxGeneralGoods = 8;

namespace detail {

// Bundles worth offering buyer q in a welfare or LP search: the empty bundle
// plus every non-degenerate one. Any bundle can be trimmed to one of these
// without losing value or adding demand on a good.
inline std::vector<Bundle> useful_bundles(const Valuation& v) {
  std::vector<Bundle> out{Bundle()};
  int m = v.num_goods();
  if (v.kind() == Valuation::Kind::unit_demand) {
    for (int g = 0; g < m; ++g) {
      if (v.unit_values()[g] > 0) out.push_back(Bundle::single(g));
    }
    return out;
  }
  for (std::uint32_t s = 1; s < (1u << m); ++s) {
    if (!is_degenerate(v, Bundle(s))) out.push_back(Bundle(s));
  }
  return out;
}

inline void check_general_caps(const Market& market) {
  require(market.num_buyers() <= kMaxGeneralBuyers && market.num_goods() <= kMaxGeneralGoods,
          ErrorKind::size, "general markets are capped at n <= 6, m <= 8");
}

// Depth-first search over bundle profiles with supply pruning and an
// optimistic bound; only strict improvements replace the incumbent, so the
// result is the lexicographically first optimal profile.
inline Allocation exhaustive_optimum(const Market& market) {
  const int n = market.num_buyers(), m = market.num_goods();
  std::vector<std::vector<Bundle>> cands(n);
  std::vector<std::vector<Scalar>> vals(n);
  std::vector<Scalar> tail(n + 1, Scalar(0));  // sum of best values of buyers q..n-1
  for (int q = 0; q < n; ++q) {
    cands[q] = useful_bundles(market.buyer(q));
    for (Bundle b : cands[q]) vals[q].push_back(market.buyer(q)(b));
  }
  for (int q = n - 1; q >= 0; --q) {
    tail[q] = tail[q + 1] + *std::max_element(vals[q].begin(), vals[q].end());
  }
  std::vector<int> left = market.supplies();
  Allocation cur(n), best(n);
  Scalar best_w = -1, cur_w = 0;
  std::function<void(int)> dfs = [&](int q) {
    if (q == n) {
      if (cur_w > best_w) {
        best_w = cur_w;
        best = cur;
      }
      return;
    }
    if (cur_w + tail[q] <= best_w) return;
    for (std::size_t i = 0; i < cands[q].size(); ++i) {
      Bundle b = cands[q][i];
      bool fits = true;
      for (GoodId g : b.goods()) {
        if (left[g] == 0) fits = false;
      }
      if (!fits) continue;
      for (GoodId g : b.goods()) --left[g];
      cur[q] = b;
      cur_w += vals[q][i];
      dfs(q + 1);
      cur_w -= vals[q][i];
      for (GoodId g : b.goods()) ++left[g];
    }
    cur[q] = Bundle();
  };
  (void)m;
  dfs(0);
  return best;
}

}  // namespace detail

inline Allocation optimal_allocation(const Market& market) {
  if (market.unit_demand()) return to_allocation(unit_assignment(market));
  detail::check_general_caps(market);
  return detail::exhaustive_optimum(market);
}

struct WeReport {
  bool pass = true;
  std::string message;
  BuyerId buyer = -1;
  GoodId good = -1;
};

// Each buyer gets a utility-maximizing bundle, supplies hold, and every good
// left unsold is free.
inline WeReport verify_we(const Market& market, const PriceVector& p, const Allocation& mu) {
  require(market.num_goods() <= kMaxEnumGoods, ErrorKind::size, "verify_we needs m <= 16");
  WeReport r;
  if (p.size() != market.num_goods()) {
    r.pass = false;
    r.message = "price vector has the wrong length";
    return r;
  }
  if (!check_feasible(market, mu)) {
    r.pass = false;
    r.message = "allocation violates supplies";
    return r;
  }
  for (BuyerId q = 0; q < market.num_buyers(); ++q) {
    const Valuation& v = market.buyer(q);
    Scalar best = v.kind() == Valuation::Kind::unit_demand ? unit_best_utility(v, p)
                                                            : demand_correspondence(v, p).max_utility;
    if (utility(v, mu[q], p) != best) {
      r.pass = false;
      r.buyer = q;
      r.message = "buyer " + std::to_string(q) + " does not demand " + mu[q].str();
      return r;
    }
  }
  auto used = allocation_counts(market.num_goods(), mu);
  for (GoodId g = 0; g < market.num_goods(); ++g) {
    if (used[g] < market.supply(g) && p[g] != 0) {
      r.pass = false;
      r.good = g;
      r.message = "good " + std::to_string(g) + " is undersold at a positive price";
      return r;
    }
  }
  r.message = "ok";
  return r;
}

// Searches demand-respecting feasible profiles for one that is a WE at p.
inline std::optional<Allocation> supporting_allocation_search(const Market& market, const PriceVector& p) {
  const int n = market.num_buyers(), m = market.num_goods();
  std::vector<std::vector<Bundle>> opts(n);
  for (int q = 0; q < n; ++q) opts[q] = demand_correspondence(market.buyer(q), p).bundles;
  std::vector<int> left = market.supplies();
  Allocation cur(n);
  std::optional<Allocation> found;
  std::function<void(int)> dfs = [&](int q) {
    if (found) return;
    if (q == n) {
      for (int g = 0; g < m; ++g) {
        if (left[g] > 0 && p[g] != 0) return;
      }
      found = cur;
      return;
    }
    for (Bundle b : opts[q]) {
      bool fits = true;
      for (GoodId g : b.goods()) {
        if (left[g] == 0) fits = false;
      }
      if (!fits) continue;
      for (GoodId g : b.goods()) --left[g];
      cur[q] = b;
      dfs(q + 1);
      for (GoodId g : b.goods()) ++left[g];
      if (found) return;
    }
  };
  dfs(0);
  return found;
}

// Any welfare-optimal allocation supports every WE price vector; the search
// is a fallback that should never be needed.
inline Allocation supporting_allocation(const Market& market, const PriceVector& p) {
  Allocation mu = optimal_allocation(market);
  if (verify_we(market, p, mu).pass) return mu;
  if (auto alt = supporting_allocation_search(market, p)) return *alt;
  fail(ErrorKind::internal, "no allocation supports prices " + p.str());
}

struct LpPrices {
  PriceVector prices;
  Scalar optimum;              // phase-one objective, equals optimal welfare
  std::vector<Scalar> utilities;  // buyer utilities from phase two
};

// Two-phase exact LP over the bundle constraints u_q + p(S) >= v_q(S).
// Degenerate bundles are dropped: each is implied by a subset of equal value
// because prices are non-negative. Both phases are solved in packing (dual)
// form; prices are the shadow prices of the good rows.
inline LpPrices lp_minimal_prices(const Market& market) {
  const int n = market.num_buyers(), m = market.num_goods();
  if (!market.unit_demand()) detail::check_general_caps(market);
  struct Column {
    int buyer;
    Bundle bundle;
    Scalar value;
  };
  std::vector<Column> cols;
  for (int q = 0; q < n; ++q) {
    for (Bundle b : detail::useful_bundles(market.buyer(q))) {
      if (!b.empty()) cols.push_back({q, b, market.buyer(q)(b)});
    }
  }
  const std::size_t k = cols.size(), rows = n + m;

  // Phase one: max sum v y, per-buyer sum <= 1, per-good sum <= s_g.
  std::vector<std::vector<Scalar>> a(rows, std::vector<Scalar>(k));
  std::vector<Scalar> b(rows), c(k);
  for (std::size_t j = 0; j < k; ++j) {
    a[cols[j].buyer][j] = 1;
    for (GoodId g : cols[j].bundle.goods()) a[n + g][j] = 1;
    c[j] = cols[j].value;
  }
  for (int q = 0; q < n; ++q) b[q] = 1;
  for (int g = 0; g < m; ++g) b[n + g] = market.supply(g);
  auto first = solve_packing_lp(a, b, c);
  require(first.bounded, ErrorKind::internal, "phase-one LP unbounded");

  // Phase two: min sum p over the optimal face, in packing form via an extra
  // column z weighted -OPT.
  for (auto& row : a) row.push_back(0);
  for (int q = 0; q < n; ++q) a[q][k] = -1;
  for (int g = 0; g < m; ++g) a[n + g][k] = -market.supply(g);
  c.push_back(-first.objective);
  for (int q = 0; q < n; ++q) b[q] = 0;
  for (int g = 0; g < m; ++g) b[n + g] = 1;
  auto second = solve_packing_lp(a, b, c);
  require(second.bounded, ErrorKind::internal, "phase-two LP unbounded");

  LpPrices out;
  out.optimum = first.objective;
  std::vector<Scalar> prices(m);
  for (int g = 0; g < m; ++g) prices[g] = second.dual[n + g];
  out.prices = PriceVector(std::move(prices));
  out.utilities.assign(second.dual.begin(), second.dual.begin() + n);
  return out;
}

enum class PriceRoute { automatic, lp, assignment };

inline WalrasianEquilibrium minimal_walrasian(const Market& market, PriceRoute route = PriceRoute::automatic) {
  if (route == PriceRoute::automatic) {
    bool small = static_cast<long long>(market.num_buyers()) * market.num_goods() <= 96;
    route = market.unit_demand() && !small ? PriceRoute::assignment : PriceRoute::lp;
  }
  WalrasianEquilibrium we;
  if (route == PriceRoute::assignment) {
    auto assign = unit_assignment(market);
    we.prices = unit_minimal_prices(market, assign.good_of);
    we.allocation = to_allocation(assign);
    we.welfare = assign.welfare;
  } else {
    auto lp = lp_minimal_prices(market);
    we.prices = lp.prices;
    we.allocation = supporting_allocation(market, we.prices);
    we.welfare = welfare(market, we.allocation);
    require(we.welfare == lp.optimum, ErrorKind::internal,
            "LP optimum " + to_string(lp.optimum) + " differs from optimal welfare " +
                to_string(we.welfare));
  }
  if (market.num_goods() <= kMaxEnumGoods) {
    auto check = verify_we(market, we.prices, we.allocation);
    require(check.pass, ErrorKind::internal, "computed equilibrium fails verification: " + check.message);
  }
  return we;
}

// Oracle: scan the price grid {0, grain, 2 grain, ...}^m up to H, keep price
// vectors admitting a demand-respecting WE allocation (searched directly, not
// via the welfare optimum), and return their coordinatewise minimum, which
// must itself be in the set.
inline PriceVector brute_force_minimal(const Market& market, const Scalar& grain = Scalar(1)) {
  const int m = market.num_goods();
  require(grain > 0, ErrorKind::precondition, "grain must be positive");
  Scalar steps_q = market.bound() / grain;
  require(is_integer(steps_q), ErrorKind::precondition, "H must be a multiple of the grain");
  long steps = steps_q.get_num().get_si();
  long points = 1;
  for (int g = 0; g < m; ++g) {
    points *= steps + 1;
    require(points <= 200000, ErrorKind::size, "oracle grid too large");
  }
  if (grain == 1) {
    for (const auto& v : market.buyers()) {
      for (std::uint32_t s = 0; s < (1u << m); ++s) {
        require(is_integer(v(Bundle(s))), ErrorKind::precondition, "integer oracle needs integer values");
      }
    }
  }
  std::vector<PriceVector> we_prices;
  for (long t = 0; t < points; ++t) {
    long r = t;
    std::vector<Scalar> p(m);
    for (int g = 0; g < m; ++g) {
      p[g] = grain * Scalar(r % (steps + 1));
      r /= steps + 1;
    }
    PriceVector pv(std::move(p));
    if (supporting_allocation_search(market, pv)) we_prices.push_back(pv);
  }
  require(!we_prices.empty(), ErrorKind::internal, "no WE price on the oracle grid");
  std::vector<Scalar> lo = we_prices.front().values();
  for (const auto& pv : we_prices) {
    for (int g = 0; g < m; ++g) lo[g] = std::min(lo[g], pv[g]);
  }
  PriceVector floor(lo);
  bool in_set = std::find(we_prices.begin(), we_prices.end(), floor) != we_prices.end();
  require(in_set, ErrorKind::internal,
          "coordinatewise minimum " + floor.str() + " is not a WE price at this grain; refine the grid");
  return floor;
}

struct PositivePriceReport {
  bool pass = true;
  std::vector<GoodId> violations;  // positive price, OD = 0
  std::vector<int> od;
};

// At minimal prices every positively priced good is over-demanded.
inline PositivePriceReport positive_price_overdemand(const Market& market, const WalrasianEquilibrium& we) {
  PositivePriceReport r;
  auto u = all_demanders(market, we.prices);
  for (GoodId g = 0; g < market.num_goods(); ++g) {
    int od = excess(static_cast<int>(u[g].size()), market.supply(g));
    r.od.push_back(od);
    if (we.prices[g] > 0 && od < 1) {
      r.pass = false;
      r.violations.push_back(g);
    }
  }
  return r;
}

}  // namespace walras
