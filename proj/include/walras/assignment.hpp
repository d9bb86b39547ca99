#pragma once

#include <vector>

#include "error.hpp"
#include "market.hpp"

namespace walras {

// Optimal assignment for unit-demand buyers with per-good supplies.
//
// Buyers are inserted one at a time; each insertion applies the best
// augmenting path in the residual graph on goods plus a null node (index m,
// unlimited capacity). An arc a -> h stands for some buyer currently at a
// moving to h, weighted by that buyer's value change. Optimality of the
// previous assignment rules out positive cycles, so Bellman-Ford longest
// paths are exact.
struct UnitAssignment {
  std::vector<int> good_of;  // -1 means unassigned
  Scalar welfare;
};

namespace detail {

struct UnitArcs {
  std::vector<std::vector<Scalar>> weight;  // (m+1) x (m+1)
  std::vector<std::vector<int>> mover;      // buyer realizing the weight, -1 if no arc
};

inline const Scalar& unit_value(const Market& market, int q, int node) {
  static const Scalar zero = 0;
  return node == market.num_goods() ? zero : market.buyer(q).unit_values()[node];
}

// Arcs of the residual graph for the buyers currently placed.
inline UnitArcs unit_arcs(const Market& market, const std::vector<int>& node_of, int upto) {
  int k = market.num_goods() + 1;
  UnitArcs arcs{std::vector<std::vector<Scalar>>(k, std::vector<Scalar>(k)),
                std::vector<std::vector<int>>(k, std::vector<int>(k, -1))};
  for (int r = 0; r < upto; ++r) {
    int a = node_of[r];
    const Scalar& here = unit_value(market, r, a);
    for (int h = 0; h < k; ++h) {
      if (h == a) continue;
      Scalar w = unit_value(market, r, h) - here;
      if (arcs.mover[a][h] < 0 || w > arcs.weight[a][h]) {
        arcs.weight[a][h] = w;
        arcs.mover[a][h] = r;
      }
    }
  }
  return arcs;
}

}  // namespace detail

inline UnitAssignment unit_assignment(const Market& market) {
  require(market.unit_demand(), ErrorKind::precondition, "assignment needs unit-demand buyers");
  const int n = market.num_buyers(), m = market.num_goods(), k = m + 1;
  require(static_cast<long long>(n) * m <= 1000000, ErrorKind::size, "assignment needs n*m <= 10^6");
  std::vector<int> node_of(n, m);
  std::vector<int> count(m, 0);

  for (int q = 0; q < n; ++q) {
    auto arcs = detail::unit_arcs(market, node_of, q);
    std::vector<Scalar> dist(k);
    std::vector<int> pred(k, -1), mover(k, q);
    for (int g = 0; g < m; ++g) dist[g] = detail::unit_value(market, q, g);
    dist[m] = 0;
    for (int round = 0; round < k; ++round) {
      bool changed = false;
      for (int a = 0; a < k; ++a) {
        for (int h = 0; h < k; ++h) {
          int r = arcs.mover[a][h];
          if (r < 0) continue;
          Scalar d = dist[a] + arcs.weight[a][h];
          if (d > dist[h]) {
            // Reject updates that would route h's path through h itself.
            bool loops = false;
            for (int x = a; x >= 0; x = pred[x]) {
              if (x == h) {
                loops = true;
                break;
              }
            }
            if (loops) continue;
            dist[h] = d;
            pred[h] = a;
            mover[h] = r;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    int end = m;
    for (int g = 0; g < m; ++g) {
      if (count[g] < market.supply(g) && dist[g] > dist[end]) end = g;
    }
    // Walk back along the path: mover[x] moves into x from pred[x].
    std::vector<std::pair<int, int>> moves;
    for (int x = end; x >= 0; x = pred[x]) moves.emplace_back(mover[x], x);
    for (auto [r, x] : moves) {
      if (r != q && node_of[r] < m) --count[node_of[r]];
      node_of[r] = x;
      if (x < m) ++count[x];
    }
  }
  UnitAssignment out{std::vector<int>(n, -1), Scalar(0)};
  for (int q = 0; q < n; ++q) {
    if (node_of[q] < m) {
      out.good_of[q] = node_of[q];
      out.welfare += market.buyer(q).unit_values()[node_of[q]];
    }
  }
  return out;
}

inline Allocation to_allocation(const UnitAssignment& a) {
  Allocation mu;
  for (int g : a.good_of) mu.push_back(g < 0 ? Bundle() : Bundle::single(g));
  return mu;
}

// Least prices keeping every buyer's assigned good (or nothing) optimal:
// p_h >= p_a + v_r(h) - v_r(a) for r at a, with p of the null node fixed at 0.
// For an optimal assignment this is the minimal Walrasian price vector.
inline PriceVector unit_minimal_prices(const Market& market, const std::vector<int>& good_of) {
  const int n = market.num_buyers(), m = market.num_goods(), k = m + 1;
  std::vector<int> node_of(n);
  for (int q = 0; q < n; ++q) node_of[q] = good_of[q] < 0 ? m : good_of[q];
  auto arcs = detail::unit_arcs(market, node_of, n);
  std::vector<Scalar> p(k, Scalar(0));
  bool changed = true;
  for (int round = 0; changed; ++round) {
    require(round <= k + 1, ErrorKind::internal, "price relaxation diverged; assignment not optimal");
    changed = false;
    for (int a = 0; a < k; ++a) {
      for (int h = 0; h < m; ++h) {
        if (arcs.mover[a][h] < 0) continue;
        Scalar d = p[a] + arcs.weight[a][h];
        if (d > p[h]) {
          p[h] = d;
          changed = true;
        }
      }
    }
  }
  p.pop_back();
  return PriceVector(std::move(p));
}

}  // namespace walras
