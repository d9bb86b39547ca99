#pragma once

#include <string>
#include <vector>

#include "bundle.hpp"
#include "error.hpp"
#include "scalar.hpp"
#include "valuation.hpp"

namespace walras {

// Non-negative price per good; p(S) is the sum over S.
class PriceVector {
 public:
  PriceVector() = default;
  explicit PriceVector(std::vector<Scalar> values) : p_(std::move(values)) {
    for (const Scalar& x : p_) {
      require(x >= 0, ErrorKind::precondition, "prices must be non-negative");
    }
  }
  static PriceVector zero(int m) { return PriceVector(std::vector<Scalar>(m, Scalar(0))); }

  int size() const { return static_cast<int>(p_.size()); }
  const Scalar& operator[](GoodId g) const { return p_[g]; }
  const std::vector<Scalar>& values() const { return p_; }

  Scalar cost(Bundle s) const {
    Scalar c = 0;
    for (std::uint32_t r = s.mask(); r; r &= r - 1) c += p_[std::countr_zero(r)];
    return c;
  }

  // Coordinatewise order of the price lattice.
  bool leq(const PriceVector& o) const {
    for (int g = 0; g < size(); ++g) {
      if (p_[g] > o.p_[g]) return false;
    }
    return true;
  }

  friend bool operator==(const PriceVector& a, const PriceVector& b) { return a.p_ == b.p_; }

  std::string str() const {
    std::string s = "(";
    for (int g = 0; g < size(); ++g) s += (g ? "," : "") + to_string(p_[g]);
    return s + ")";
  }

 private:
  std::vector<Scalar> p_;
};

// Per-buyer bundle.
using Allocation = std::vector<Bundle>;

class Market {
 public:
  Market(int m, std::vector<int> supplies, Scalar bound, std::vector<Valuation> buyers)
      : m_(m), supplies_(std::move(supplies)), bound_(std::move(bound)), buyers_(std::move(buyers)) {
    require(m_ >= 0 && m_ <= kMaxGoods, ErrorKind::size,
            "market has " + std::to_string(m_) + " goods, cap is 24");
    require(static_cast<int>(supplies_.size()) == m_, ErrorKind::precondition,
            "supplies must list one entry per good");
    for (int s : supplies_) require(s >= 1, ErrorKind::precondition, "supplies must be >= 1");
    require(bound_ >= 0, ErrorKind::precondition, "H must be non-negative");
    for (std::size_t q = 0; q < buyers_.size(); ++q) validate_buyer(static_cast<int>(q));
  }

  int num_goods() const { return m_; }
  int num_buyers() const { return static_cast<int>(buyers_.size()); }
  int supply(GoodId g) const { return supplies_[g]; }
  const std::vector<int>& supplies() const { return supplies_; }
  const Scalar& bound() const { return bound_; }
  const Valuation& buyer(BuyerId q) const { return buyers_[q]; }
  const std::vector<Valuation>& buyers() const { return buyers_; }

  bool unit_demand() const {
    for (const auto& v : buyers_) {
      if (v.kind() != Valuation::Kind::unit_demand) return false;
    }
    return true;
  }
  bool gs_class() const {
    for (const auto& v : buyers_) {
      if (!v.gs_class()) return false;
    }
    return true;
  }
  bool unit_supply() const {
    for (int s : supplies_) {
      if (s != 1) return false;
    }
    return true;
  }

  friend bool operator==(const Market& a, const Market& b) {
    return a.m_ == b.m_ && a.supplies_ == b.supplies_ && a.bound_ == b.bound_ &&
           a.buyers_ == b.buyers_;
  }

 private:
  void validate_buyer(int q) const {
    const Valuation& v = buyers_[q];
    std::string who = "buyer " + std::to_string(q);
    require(v.num_goods() == m_, ErrorKind::precondition, who + " valued over the wrong good count");
    if (v.kind() == Valuation::Kind::unit_demand) {
      for (const Scalar& x : v.unit_values()) {
        require(x <= bound_, ErrorKind::precondition, who + " has a value above H");
      }
      return;
    }
    if (m_ > kMaxCheckGoods) return;  // trusted above the brute-force cap
    require(v(Bundle()) == 0, ErrorKind::precondition, who + " has v(empty) != 0");
    for (std::uint32_t s = 1; s < (1u << m_); ++s) {
      Bundle S(s);
      Scalar vs = v(S);
      require(vs <= bound_, ErrorKind::precondition, who + " has v" + S.str() + " above H");
      for (GoodId g : S.goods()) {
        require(v(S.without(g)) <= vs, ErrorKind::precondition,
                who + " is not monotone at " + S.str());
      }
    }
  }

  int m_;
  std::vector<int> supplies_;
  Scalar bound_;
  std::vector<Valuation> buyers_;
};

inline Scalar utility(const Valuation& v, Bundle s, const PriceVector& p) { return v(s) - p.cost(s); }

inline bool check_feasible(const Market& market, const Allocation& mu) {
  if (static_cast<int>(mu.size()) != market.num_buyers()) return false;
  int m = market.num_goods();
  std::vector<int> used(m, 0);
  for (Bundle b : mu) {
    if (!b.fits(m)) return false;
    for (GoodId g : b.goods()) ++used[g];
  }
  for (int g = 0; g < m; ++g) {
    if (used[g] > market.supply(g)) return false;
  }
  return true;
}

// Number of buyers holding each good.
inline std::vector<int> allocation_counts(int m, const Allocation& mu) {
  std::vector<int> used(m, 0);
  for (Bundle b : mu) {
    for (GoodId g : b.goods()) ++used[g];
  }
  return used;
}

inline Scalar welfare(const Market& market, const Allocation& mu) {
  require(check_feasible(market, mu), ErrorKind::feasibility, "allocation violates supplies");
  Scalar w = 0;
  for (int q = 0; q < market.num_buyers(); ++q) w += market.buyer(q)(mu[q]);
  return w;
}

inline Allocation empty_allocation(const Market& market) {
  return Allocation(market.num_buyers(), Bundle());
}

}  // namespace walras
