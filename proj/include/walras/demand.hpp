#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "bundle.hpp"
#include "market.hpp"
#include "valuation.hpp"

namespace walras {

// Utility-maximizing bundles at fixed prices, ascending by mask, with the
// minimum (no demanded strict subset), non-degenerate (every good has
// positive marginal value) and max-cardinality non-degenerate flags.
struct DemandCorrespondence {
  PriceVector prices;
  Scalar max_utility;
  std::vector<Bundle> bundles;
  std::vector<bool> minimum;
  std::vector<bool> nondegenerate;
  std::vector<bool> max_nondegenerate;

  bool contains(Bundle b) const { return std::binary_search(bundles.begin(), bundles.end(), b); }

  std::vector<Bundle> select(const std::vector<bool>& flag) const {
    std::vector<Bundle> out;
    for (std::size_t i = 0; i < bundles.size(); ++i) {
      if (flag[i]) out.push_back(bundles[i]);
    }
    return out;
  }
  std::vector<Bundle> minimum_bundles() const { return select(minimum); }
  std::vector<Bundle> nondegenerate_bundles() const { return select(nondegenerate); }
  std::vector<Bundle> max_nondegenerate_bundles() const { return select(max_nondegenerate); }
};

// True iff some good of S adds nothing: v(S - g) = v(S).
inline bool is_degenerate(const Valuation& v, Bundle s) {
  Scalar vs = v(s);
  for (GoodId g : s.goods()) {
    if (v(s.without(g)) == vs) return true;
  }
  return false;
}

inline DemandCorrespondence demand_correspondence(const Valuation& v, const PriceVector& p) {
  int m = v.num_goods();
  require(m <= kMaxEnumGoods, ErrorKind::size,
          "demand enumeration needs m <= 16, got " + std::to_string(m));
  require(p.size() == m, ErrorKind::precondition, "price vector has the wrong length");
  std::uint32_t n = 1u << m;
  std::vector<Scalar> u(n);
  Scalar best = 0;  // the empty bundle
  for (std::uint32_t s = 0; s < n; ++s) {
    u[s] = utility(v, Bundle(s), p);
    if (u[s] > best) best = u[s];
  }
  std::vector<char> demanded(n), below(n);  // below: some strict subset demanded
  for (std::uint32_t s = 0; s < n; ++s) {
    demanded[s] = (u[s] == best);
    for (std::uint32_t r = s; r; r &= r - 1) {
      std::uint32_t t = s & ~(r & (~r + 1));
      if (demanded[t] || below[t]) {
        below[s] = 1;
        break;
      }
    }
  }
  DemandCorrespondence d;
  d.prices = p;
  d.max_utility = best;
  int max_size = -1;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (!demanded[s]) continue;
    Bundle b(s);
    bool nd = !is_degenerate(v, b);
    d.bundles.push_back(b);
    d.minimum.push_back(!below[s]);
    d.nondegenerate.push_back(nd);
    if (nd) max_size = std::max(max_size, b.size());
  }
  for (std::size_t i = 0; i < d.bundles.size(); ++i) {
    d.max_nondegenerate.push_back(d.nondegenerate[i] && d.bundles[i].size() == max_size);
  }
  return d;
}

inline std::vector<Bundle> min_demand(const Valuation& v, const PriceVector& p) {
  return demand_correspondence(v, p).minimum_bundles();
}
inline std::vector<Bundle> nondegenerate_demand(const Valuation& v, const PriceVector& p) {
  return demand_correspondence(v, p).nondegenerate_bundles();
}
inline std::vector<Bundle> max_nondegenerate(const Valuation& v, const PriceVector& p) {
  return demand_correspondence(v, p).max_nondegenerate_bundles();
}

// Best achievable utility max(0, max_g v(g) - p_g) of a unit-demand buyer.
inline Scalar unit_best_utility(const Valuation& v, const PriceVector& p) {
  Scalar best = 0;
  const auto& val = v.unit_values();
  for (int g = 0; g < static_cast<int>(val.size()); ++g) {
    Scalar u = val[g] - p[g];
    if (u > best) best = u;
  }
  return best;
}

// Demand goods of a unit-demand buyer: goods g with {g} utility-maximizing.
// Larger demanded bundles always contain one of these with equal value.
inline std::vector<GoodId> demand_goods(const Valuation& v, const PriceVector& p) {
  Scalar best = unit_best_utility(v, p);
  std::vector<GoodId> out;
  const auto& val = v.unit_values();
  for (int g = 0; g < static_cast<int>(val.size()); ++g) {
    if (val[g] - p[g] == best) out.push_back(g);
  }
  return out;
}

// The bundles a buyer commits to when breaking ties, ascending by mask.
// Unit-demand correspondences are canonicalized to the empty bundle (when
// demanded) and the demand-good singletons; other kinds use the full D.
inline std::vector<Bundle> choice_set(const Valuation& v, const PriceVector& p) {
  if (v.kind() == Valuation::Kind::unit_demand) {
    std::vector<Bundle> out;
    if (unit_best_utility(v, p) == 0) out.push_back(Bundle());
    for (GoodId g : demand_goods(v, p)) out.push_back(Bundle::single(g));
    return out;
  }
  return demand_correspondence(v, p).bundles;
}

// Pass/fail outcome of a structural check with an optional witness.
struct CheckReport {
  bool pass = true;
  std::string message;
  std::vector<Bundle> witness;
  bool gs_class = true;  // false: the valuation is outside the GS class, so a pass proves nothing
};

// Minimum demand bundles must be the bases of a matroid: equal cardinality
// and pairwise basis exchange.
inline CheckReport verify_demand_basis(const Valuation& v, const PriceVector& p) {
  require(v.num_goods() <= kMaxCheckGoods, ErrorKind::size, "basis check needs m <= 12");
  CheckReport r;
  r.gs_class = v.gs_class();
  auto dc = demand_correspondence(v, p);
  auto mins = dc.minimum_bundles();
  for (Bundle b : mins) {
    if (b.size() != mins.front().size()) {
      r.pass = false;
      r.message = "minimum demand bundles of different sizes";
      r.witness = {mins.front(), b};
      return r;
    }
  }
  auto is_min = [&](Bundle b) { return std::binary_search(mins.begin(), mins.end(), b); };
  for (Bundle b1 : mins) {
    for (Bundle b2 : mins) {
      for (GoodId b : (b1 - b2).goods()) {
        bool found = false;
        for (GoodId b_prime : (b2 - b1).goods()) {
          if (is_min(b1.without(b).with(b_prime))) {
            found = true;
            break;
          }
        }
        if (!found) {
          r.pass = false;
          r.message = "basis exchange fails removing good " + std::to_string(b);
          r.witness = {b1, b2};
          return r;
        }
      }
    }
  }
  r.message = mins.size() <= 1 ? "vacuous" : "ok";
  if (!r.gs_class) r.message += "; valuation is not GS-class, pass does not imply GS";
  return r;
}

// Every bundle between two nested demanded bundles must be demanded.
inline CheckReport verify_interpolation(const Valuation& v, const PriceVector& p) {
  require(v.num_goods() <= kMaxCheckGoods, ErrorKind::size, "interpolation check needs m <= 12");
  CheckReport r;
  r.gs_class = v.gs_class();
  auto dc = demand_correspondence(v, p);
  bool any_pair = false;
  for (Bundle lo : dc.bundles) {
    for (Bundle hi : dc.bundles) {
      if (lo == hi || !lo.subset_of(hi)) continue;
      any_pair = true;
      std::optional<Bundle> hole;
      for_each_submask((hi - lo).mask(), [&](std::uint64_t t) {
        Bundle mid = lo | Bundle(static_cast<std::uint32_t>(t));
        if (!hole && !dc.contains(mid)) hole = mid;
      });
      if (hole) {
        r.pass = false;
        r.message = "bundle between two demanded bundles is not demanded";
        r.witness = {lo, hi, *hole};
        return r;
      }
    }
  }
  r.message = any_pair ? "ok" : "vacuous";
  if (!r.gs_class) r.message += "; valuation is not GS-class, pass does not imply GS";
  return r;
}

}  // namespace walras
