#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "error.hpp"

namespace walras {

using GoodId = int;
using BuyerId = int;

inline constexpr int kMaxGoods = 24;       // bit-mask width for bundles
inline constexpr int kMaxEnumGoods = 16;   // full 2^m demand enumeration
inline constexpr int kMaxCheckGoods = 12;  // brute-force validation at construction

// A set of goods as a bit mask. Only ids below the market's m are ever set;
// markets check this when a bundle enters from outside.
class Bundle {
 public:
  constexpr Bundle() = default;
  constexpr explicit Bundle(std::uint32_t mask) : mask_(mask) {}

  static Bundle of(std::initializer_list<GoodId> goods) {
    Bundle b;
    for (GoodId g : goods) b = b.with(g);
    return b;
  }
  static Bundle of(const std::vector<GoodId>& goods) {
    Bundle b;
    for (GoodId g : goods) b = b.with(g);
    return b;
  }
  static constexpr Bundle full(int m) {
    return Bundle(m >= 32 ? ~0u : ((1u << m) - 1u));
  }
  static constexpr Bundle single(GoodId g) { return Bundle(1u << g); }

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr bool contains(GoodId g) const { return (mask_ >> g) & 1u; }
  constexpr Bundle with(GoodId g) const { return Bundle(mask_ | (1u << g)); }
  constexpr Bundle without(GoodId g) const { return Bundle(mask_ & ~(1u << g)); }
  constexpr bool subset_of(Bundle o) const { return (mask_ & ~o.mask_) == 0; }
  constexpr bool fits(int m) const { return subset_of(full(m)); }

  std::vector<GoodId> goods() const {
    std::vector<GoodId> out;
    for (std::uint32_t r = mask_; r; r &= r - 1) out.push_back(std::countr_zero(r));
    return out;
  }

  constexpr Bundle operator|(Bundle o) const { return Bundle(mask_ | o.mask_); }
  constexpr Bundle operator&(Bundle o) const { return Bundle(mask_ & o.mask_); }
  constexpr Bundle operator-(Bundle o) const { return Bundle(mask_ & ~o.mask_); }
  constexpr auto operator<=>(const Bundle&) const = default;

  std::string str() const {
    std::string s = "{";
    bool first = true;
    for (GoodId g : goods()) {
      if (!first) s += ",";
      s += std::to_string(g);
      first = false;
    }
    return s + "}";
  }

 private:
  std::uint32_t mask_ = 0;
};

// Iterates the strict and non-strict submasks of a mask, largest first,
// ending with the empty set.
template <class F>
void for_each_submask(std::uint64_t mask, F&& f) {
  std::uint64_t s = mask;
  while (true) {
    f(s);
    if (s == 0) break;
    s = (s - 1) & mask;
  }
}

}  // namespace walras
