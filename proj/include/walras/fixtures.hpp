#pragma once

#include <vector>

#include "market.hpp"
#include "valuation.hpp"

namespace walras {

// n unit-demand buyers over n goods; the last good is distinguished. Buyer q
// values its own good q and the distinguished good at 1, everything else 0.
inline Market gen_bad1(int n) {
  require(n >= 2, ErrorKind::precondition, "bad1 needs n >= 2");
  std::vector<Valuation> buyers;
  for (int q = 0; q < n; ++q) {
    std::vector<Scalar> v(n, Scalar(0));
    v[q] = 1;
    v[n - 1] = 1;
    buyers.push_back(Valuation::unit_demand(v));
  }
  return Market(n, std::vector<int>(n, 1), Scalar(1), std::move(buyers));
}

inline GoodId bad1_distinguished(int n) { return n - 1; }

// Canonical fixtures shared across the test suites.
inline Market fixture_e1() { return gen_bad1(3); }

inline Market fixture_e2() {
  return Market(1, {1}, Scalar(5), {Valuation::unit_demand({Scalar(5)})});
}

inline Market fixture_e3() {
  return Market(2, {1, 1}, Scalar(8),
                {Valuation::unit_demand({Scalar(8), Scalar(4)}),
                 Valuation::unit_demand({Scalar(2), Scalar(1)})});
}

inline Market fixture_e4() {
  return Market(2, {1, 1}, Scalar(12),
                {Valuation::additive({Scalar(8), Scalar(4)}),
                 Valuation::unit_demand({Scalar(2), Scalar(1)})});
}

}  // namespace walras
