#pragma once

#include <vector>

#include "demand.hpp"
#include "market.hpp"

namespace walras {

// U(g;p): buyers with some demanded bundle containing g. Unit-demand buyers
// demand g when {g} is utility-maximizing (their demand goods).
inline std::vector<BuyerId> demanders(const Market& market, const PriceVector& p, GoodId g) {
  std::vector<BuyerId> out;
  for (BuyerId q = 0; q < market.num_buyers(); ++q) {
    const Valuation& v = market.buyer(q);
    bool hit = false;
    if (v.kind() == Valuation::Kind::unit_demand) {
      Scalar best = unit_best_utility(v, p);
      hit = v.unit_values()[g] - p[g] == best;
    } else {
      for (Bundle b : demand_correspondence(v, p).bundles) {
        if (b.contains(g)) {
          hit = true;
          break;
        }
      }
    }
    if (hit) out.push_back(q);
  }
  return out;
}

// U(g;p) for every good at once; avoids recomputing correspondences.
inline std::vector<std::vector<BuyerId>> all_demanders(const Market& market, const PriceVector& p,
                                                       bool nondegenerate_only = false) {
  int m = market.num_goods();
  std::vector<std::vector<BuyerId>> out(m);
  for (BuyerId q = 0; q < market.num_buyers(); ++q) {
    const Valuation& v = market.buyer(q);
    Bundle covered;
    if (v.kind() == Valuation::Kind::unit_demand) {
      for (GoodId g : demand_goods(v, p)) {
        if (!nondegenerate_only || v.unit_values()[g] > 0) covered = covered.with(g);
      }
    } else {
      auto dc = demand_correspondence(v, p);
      for (std::size_t i = 0; i < dc.bundles.size(); ++i) {
        if (!nondegenerate_only || dc.nondegenerate[i]) covered = covered | dc.bundles[i];
      }
    }
    for (GoodId g : covered.goods()) out[g].push_back(q);
  }
  return out;
}

inline int excess(int count, int supply) { return count > supply ? count - supply : 0; }

inline int overdemand(const Market& market, const PriceVector& p, GoodId g) {
  return excess(static_cast<int>(demanders(market, p, g).size()), market.supply(g));
}

// OD via U restricted to non-degenerate demanded bundles.
inline int nondeg_overdemand(const Market& market, const PriceVector& p, GoodId g) {
  require(market.num_goods() <= kMaxCheckGoods, ErrorKind::size, "OD. needs m <= 12");
  auto u = all_demanders(market, p, true);
  return excess(static_cast<int>(u[g].size()), market.supply(g));
}

}  // namespace walras
