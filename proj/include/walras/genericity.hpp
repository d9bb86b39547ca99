#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "assignment.hpp"
#include "equilibrium.hpp"
#include "market.hpp"
#include "rng.hpp"
#include "swap_graph.hpp"

namespace walras {

struct GenericityCertificate {
  enum class Mode { exact, structural };
  Mode mode = Mode::exact;
  int gamma = 1;          // coefficient bound; 1 for the unit-demand {-1,0,1} condition
  bool generic = false;
  bool decided = true;    // structural mode cannot refute; undecided means "not certified"
  std::vector<int> witness;  // nonzero coefficients with zero combination, if found
  Scalar base;            // structural mode: the common base of the weights
  std::string note;
};

inline const char* to_string(GenericityCertificate::Mode m) {
  return m == GenericityCertificate::Mode::exact ? "exact" : "structural";
}

inline constexpr int kMaxExactUnitTerms = 18;

namespace detail {

// Meet in the middle: nonzero c in [-gamma, gamma]^N with sum c_i x_i = 0.
inline std::optional<std::vector<int>> find_relation(const std::vector<Scalar>& x, int gamma) {
  const int n = static_cast<int>(x.size());
  const int half = n / 2;
  auto sums = [&](int lo, int hi, auto&& each) {
    int len = hi - lo;
    std::vector<int> c(len, -gamma);
    Scalar s = 0;
    for (int i = 0; i < len; ++i) s += Scalar(-gamma) * x[lo + i];
    while (true) {
      each(c, s);
      int i = 0;
      while (i < len && c[i] == gamma) {
        s -= Scalar(2 * gamma) * x[lo + i];
        c[i] = -gamma;
        ++i;
      }
      if (i == len) break;
      ++c[i];
      s += x[lo + i];
    }
  };
  auto nonzero = [](const std::vector<int>& c) {
    return std::any_of(c.begin(), c.end(), [](int v) { return v != 0; });
  };
  std::map<Scalar, std::vector<int>> left;
  std::optional<std::vector<int>> found;
  sums(0, half, [&](const std::vector<int>& c, const Scalar& s) {
    if (!nonzero(c)) return;
    left.emplace(s, c);
  });
  if (auto it = left.find(Scalar(0)); it != left.end()) {
    auto w = it->second;
    w.resize(n, 0);
    return w;
  }
  sums(half, n, [&](const std::vector<int>& c, const Scalar& s) {
    if (found || !nonzero(c)) return;
    std::vector<int> w(half, 0);
    if (s == 0) {
      w.insert(w.end(), c.begin(), c.end());
      found = w;
      return;
    }
    if (auto it = left.find(-s); it != left.end()) {
      w = it->second;
      w.insert(w.end(), c.begin(), c.end());
      found = w;
    }
  });
  return found;
}

// If every ratio x_i / min(x) is an integer power of one integer base b and
// the exponents are distinct, returns the largest such b.
inline std::optional<Scalar> common_power_base(const std::vector<Scalar>& x) {
  if (x.empty()) return Scalar(0);
  Scalar lo = *std::min_element(x.begin(), x.end());
  if (!(lo > 0)) return std::nullopt;
  std::vector<mpz_class> ratios;
  for (const Scalar& v : x) {
    Scalar r = v / lo;
    if (!is_integer(r)) return std::nullopt;
    ratios.push_back(r.get_num());
  }
  std::vector<mpz_class> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return std::nullopt;
  if (sorted.size() == 1) return Scalar(0);  // a single weight needs no base
  // Primitive root of the smallest ratio above one.
  mpz_class r1 = sorted[1], b0 = r1;
  for (unsigned k = 2; mpz_sizeinbase(r1.get_mpz_t(), 2) >= k; ++k) {
    mpz_class root;
    if (mpz_root(root.get_mpz_t(), r1.get_mpz_t(), k) != 0 && root < b0) b0 = root;
  }
  // Every ratio must be a power of b0; the base is b0^gcd(exponents).
  unsigned long g = 0;
  for (const mpz_class& r : sorted) {
    mpz_class t = r;
    unsigned long e = 0;
    while (t > 1) {
      if (mpz_divisible_p(t.get_mpz_t(), b0.get_mpz_t()) == 0) return std::nullopt;
      t /= b0;
      ++e;
    }
    g = std::gcd(g, e);
  }
  mpz_class base;
  mpz_pow_ui(base.get_mpz_t(), b0.get_mpz_t(), g);
  return Scalar(base);
}

inline std::vector<Scalar> unit_values_flat(const Market& market) {
  require(market.unit_demand(), ErrorKind::precondition, "unit-demand genericity needs unit-demand buyers");
  std::vector<Scalar> x;
  for (const auto& v : market.buyers()) x.insert(x.end(), v.unit_values().begin(), v.unit_values().end());
  return x;
}

inline GenericityCertificate structural_certificate(const std::vector<Scalar>& x, int gamma) {
  GenericityCertificate c;
  c.mode = GenericityCertificate::Mode::structural;
  c.gamma = gamma;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) {
      c.generic = false;
      c.witness.assign(x.size(), 0);
      c.witness[i] = 1;
      c.note = "zero parameter";
      return c;
    }
  }
  auto base = common_power_base(x);
  if (base && (*base == 0 || *base > gamma)) {
    c.generic = true;
    c.base = *base;
    c.note = "parameters are distinct powers of base " + to_string(*base) + " > " + std::to_string(gamma);
    return c;
  }
  c.generic = false;
  c.decided = false;
  c.note = base ? "power base " + to_string(*base) + " does not exceed the bound" : "not distinct powers of one base";
  return c;
}

}  // namespace detail

// No nonzero {-1,0,1} combination of all values v_q(g) vanishes. Exact mode
// enumerates (n m <= 18); structural mode certifies distinct powers of two
// (any base above 1 works for coefficient bound 1). Automatic mode prefers
// exact when it fits.
inline GenericityCertificate check_generic_unit(const Market& market,
                                                std::optional<GenericityCertificate::Mode> mode = std::nullopt) {
  auto x = detail::unit_values_flat(market);
  bool exact = mode ? *mode == GenericityCertificate::Mode::exact
                    : static_cast<int>(x.size()) <= kMaxExactUnitTerms;
  if (!exact) {
    auto c = detail::structural_certificate(x, 1);
    if (c.generic && c.base != 0) {
      // Powers of two only, as documented; other bases are left uncertified.
      mpz_class b = c.base.get_num();
      if (mpz_popcount(b.get_mpz_t()) != 1) {
        c.generic = false;
        c.decided = false;
        c.note = "parameters are not powers of two";
      }
    }
    return c;
  }
  require(static_cast<int>(x.size()) <= kMaxExactUnitTerms, ErrorKind::size,
          "exact unit genericity needs n*m <= 18");
  GenericityCertificate c;
  c.mode = GenericityCertificate::Mode::exact;
  c.gamma = 1;
  if (auto w = detail::find_relation(x, 1)) {
    c.generic = false;
    c.witness = *w;
    c.note = "vanishing combination found";
  } else {
    c.generic = true;
    c.note = "no vanishing {-1,0,1} combination";
  }
  return c;
}

// All valuation parameters entering the GMBV condition: leaf weights of MBV
// buyers and values of unit-demand buyers.
inline std::vector<Scalar> market_weights(const Market& market) {
  std::vector<Scalar> w;
  for (const auto& v : market.buyers()) {
    require(v.gs_class(), ErrorKind::precondition, "GMBV check needs MBV or unit-demand buyers");
    auto p = v.parameters();
    w.insert(w.end(), p.begin(), p.end());
  }
  return w;
}

inline constexpr int kMaxExactMbvWeights = 12;
inline constexpr int kMaxExactMbvGamma = 3;

// Gamma-bounded integer independence of all weights. Exact mode needs
// W <= 12 and gamma <= 3; structural mode certifies distinct powers of a
// base above gamma.
inline GenericityCertificate check_generic_mbv(const Market& market, int gamma,
                                               std::optional<GenericityCertificate::Mode> mode = std::nullopt) {
  require(gamma >= 1, ErrorKind::precondition, "gamma must be >= 1");
  auto w = market_weights(market);
  bool fits = static_cast<int>(w.size()) <= kMaxExactMbvWeights && gamma <= kMaxExactMbvGamma;
  bool exact = mode ? *mode == GenericityCertificate::Mode::exact : fits;
  if (!exact) {
    auto c = detail::structural_certificate(w, gamma);
    c.note += "; only gamma-bounded independence is certified";
    return c;
  }
  require(fits, ErrorKind::size, "exact GMBV check needs W <= 12 and gamma <= 3");
  GenericityCertificate c;
  c.mode = GenericityCertificate::Mode::exact;
  c.gamma = gamma;
  if (auto rel = detail::find_relation(w, gamma)) {
    c.generic = false;
    c.witness = *rel;
    c.note = "vanishing bounded combination found";
  } else {
    c.generic = true;
    c.note = "no vanishing combination with |coefficients| <= " + std::to_string(gamma) +
             "; only gamma-bounded independence is certified";
  }
  return c;
}

// Unit-demand market with values 2^e / 2^(n m - 1), e a seeded permutation of
// 0..n m - 1, so every value lies in (0, 1] = (0, H].
inline Market generate_generic(int n, int m, std::uint64_t seed, std::vector<int> supplies = {}) {
  require(n >= 1 && m >= 1, ErrorKind::precondition, "need n, m >= 1");
  require(n * m <= 64, ErrorKind::size, "generate_generic needs n*m <= 64");
  if (supplies.empty()) supplies.assign(m, 1);
  Rng rng(seed);
  auto perm = rng.permutation(n * m);
  std::vector<Valuation> buyers;
  for (int q = 0; q < n; ++q) {
    std::vector<Scalar> v;
    for (int g = 0; g < m; ++g) v.push_back(pow2(perm[q * m + g] - (n * m - 1)));
    buyers.push_back(Valuation::unit_demand(v));
  }
  return Market(m, std::move(supplies), Scalar(1), std::move(buyers));
}

// Smallest positive welfare difference over all (possibly infeasible)
// assignments of at most one good per buyer.
inline Scalar welfare_grain(const Market& market) {
  require(market.unit_demand(), ErrorKind::precondition, "welfare grain needs unit-demand buyers");
  require(market.num_buyers() <= 6 && market.num_goods() <= 6, ErrorKind::size, "welfare grain needs n, m <= 6");
  std::set<Scalar> sums{Scalar(0)};
  for (const auto& v : market.buyers()) {
    std::set<Scalar> next;
    for (const Scalar& s : sums) {
      next.insert(s);
      for (const Scalar& x : v.unit_values()) next.insert(s + x);
    }
    sums = std::move(next);
  }
  require(sums.size() >= 2, ErrorKind::precondition, "all assignments have equal welfare; grain undefined");
  Scalar best = -1;
  for (auto it = std::next(sums.begin()); it != sums.end(); ++it) {
    Scalar gap = *it - *std::prev(it);
    if (best < 0 || gap < best) best = gap;
  }
  return best;
}

// The optimal assignment is unique iff forcing any buyer into any other
// option (another good or nothing) strictly lowers the optimum.
inline bool unique_optimal_matching(const Market& market, const std::vector<int>& good_of) {
  require(market.unit_demand() && market.unit_supply(), ErrorKind::precondition,
          "matching uniqueness needs unit demand and unit supply");
  const int n = market.num_buyers(), m = market.num_goods();
  Scalar opt = 0;
  for (int q = 0; q < n; ++q) {
    if (good_of[q] >= 0) opt += market.buyer(q).unit_values()[good_of[q]];
  }
  for (int q = 0; q < n; ++q) {
    for (int o = -1; o < m; ++o) {
      if (o == good_of[q]) continue;
      std::vector<Valuation> rest;
      for (int r = 0; r < n; ++r) {
        if (r == q) continue;
        auto v = market.buyer(r).unit_values();
        if (o >= 0) v[o] = 0;
        rest.push_back(Valuation::unit_demand(v));
      }
      Scalar forced = o >= 0 ? market.buyer(q).unit_values()[o] : Scalar(0);
      Market sub(m, market.supplies(), market.bound(), rest);
      if (forced + unit_assignment(sub).welfare == opt) return false;
    }
  }
  return true;
}

// Symmetric perturbation grid {i * scale : -L <= i <= L}, scale = bound / L.
struct PerturbationSet {
  Scalar bound;  // largest magnitude, Delta / 2k
  long half = 0; // L
  long size() const { return 2 * half + 1; }
  Scalar element(long i) const { return half == 0 ? Scalar(0) : bound * Scalar(i - half) / Scalar(half); }
};

inline PerturbationSet perturbation_set(const Scalar& delta, int k, long required_size) {
  require(required_size >= 1, ErrorKind::precondition, "perturbation set needs at least one element");
  PerturbationSet p;
  p.bound = delta / Scalar(2 * k);
  p.half = required_size / 2;  // 2L + 1 >= required_size
  return p;
}

struct PerturbationRun {
  Scalar delta;
  int k = 0;
  PerturbationSet set;
  std::vector<std::vector<Scalar>> epsilon;  // [buyer][good]
  std::vector<std::vector<Scalar>> perturbed;  // clamped at zero
  std::vector<int> order;                    // goods in topological order of G
  PriceVector original_prices;
  PriceVector prices;                        // p'
  SwapGraph g;                               // original swap graph
  SwapGraph g_hat;                           // edges where the price maximum binds
  std::vector<std::vector<int>> paths_used;  // per good, the source path (good ids) in g_hat
  bool subgraph_ok = true;                   // every g_hat path is a g path
  bool price_bound_ok = true;                // |p'_j - p_j| < Delta j / k
  bool we_ok = true;                         // p' with mu is a WE of the perturbed market
  bool minimal_ok = true;                    // p' equals the LP minimal prices of the perturbed market
  bool swap_graph_matches = true;            // g_hat equals the swap graph of the perturbed market at p'
  bool indegree_ok = true;                   // every node of g_hat has in-degree <= 1
};

// Deferred-decision perturbation and repricing for a unit-demand, unit-supply
// market with a unique optimal matching mu and minimal prices p. Goods are
// visited in topological order of the swap graph; good j's price is the
// largest candidate r_l over earlier-matched buyers (and unmatched buyers,
// whose candidate is their perturbed value), floored at zero. Binding
// candidates become the edges into j.
inline PerturbationRun perturb_and_reprice(const Market& market, const PriceVector& p, const Allocation& mu,
                                           const PerturbationSet& set, std::uint64_t seed,
                                           bool check_minimality = true) {
  require(market.unit_demand() && market.unit_supply(), ErrorKind::precondition,
          "perturbation needs unit demand and unit supply");
  const int n = market.num_buyers(), m = market.num_goods();
  std::vector<int> good_of(n, -1), bidder_of(m, -1);
  for (int q = 0; q < n; ++q) {
    require(mu[q].size() <= 1, ErrorKind::precondition, "allocation must be a matching");
    if (!mu[q].empty()) {
      good_of[q] = mu[q].goods().front();
      bidder_of[good_of[q]] = q;
    }
  }
  require(unique_optimal_matching(market, good_of), ErrorKind::precondition,
          "the optimal matching is not unique");
  auto check = verify_we(market, p, mu);
  require(check.pass, ErrorKind::precondition, "prices and matching are not a WE: " + check.message);

  PerturbationRun run;
  run.delta = welfare_grain(market);
  run.k = m;
  run.set = set;
  require(set.bound <= run.delta / Scalar(2 * m), ErrorKind::precondition,
          "perturbations exceed Delta / 2k");
  run.original_prices = p;
  run.g = build_unit(market, p, mu);
  auto topo = topological_order(run.g);
  require(topo.acyclic, ErrorKind::precondition, "swap graph has a cycle");
  for (int x : topo.order) {
    if (x != run.g.null_node()) run.order.push_back(x);
  }

  Rng rng(seed);
  run.epsilon.assign(n, std::vector<Scalar>(m));
  run.perturbed.assign(n, std::vector<Scalar>(m));
  std::vector<std::vector<char>> sampled(n, std::vector<char>(m, 0));
  auto sample = [&](int q, int g) {
    if (sampled[q][g]) return;
    sampled[q][g] = 1;
    run.epsilon[q][g] = set.element(static_cast<long>(rng.below(static_cast<std::uint64_t>(set.size()))));
    Scalar x = market.buyer(q).unit_values()[g] + run.epsilon[q][g];
    run.perturbed[q][g] = x > 0 ? x : Scalar(0);
  };

  std::vector<Scalar> price(m, Scalar(0));
  run.g_hat.m = m;
  run.paths_used.assign(m, {});
  std::vector<int> position(m, -1);
  for (int j = 0; j < m; ++j) position[run.order[j]] = j;

  for (int step = 0; step < m; ++step) {
    int j = run.order[step];
    // The bidder matched to j samples its values for goods up to j.
    if (bidder_of[j] >= 0) {
      for (int t = 0; t <= step; ++t) sample(bidder_of[j], run.order[t]);
    }
    // Candidates: earlier-matched bidders and unmatched bidders.
    struct Candidate {
      int from;
      int buyer;
      Scalar r;
    };
    std::vector<Candidate> cands;
    for (int t = 0; t < step; ++t) {
      int l = run.order[t];
      int b = bidder_of[l];
      if (b < 0) continue;
      sample(b, j);
      auto path = shortest_source_path(run.g_hat, l);
      require(path.has_value(), ErrorKind::internal, "no source path in the rebuilt graph");
      Scalar along = reconstruct_price(run.g_hat, *path);
      require(along == price[l], ErrorKind::internal, "path telescoping disagrees with the rebuilt price");
      cands.push_back({l, b, run.perturbed[b][j] - run.perturbed[b][l] + along});
    }
    for (int q = 0; q < n; ++q) {
      if (good_of[q] >= 0) continue;
      sample(q, j);
      cands.push_back({run.g_hat.null_node(), q, run.perturbed[q][j]});
    }
    Scalar best = 0;
    for (const auto& c : cands) {
      if (c.r > best) best = c.r;
    }
    price[j] = best;
    for (const auto& c : cands) {
      if (c.r == best) {
        Scalar base = c.from == run.g_hat.null_node() ? Scalar(0) : run.perturbed[c.buyer][c.from];
        Bundle from = c.from == run.g_hat.null_node() ? Bundle() : Bundle::single(c.from);
        run.g_hat.edges.push_back({c.from, j, c.buyer, from, Bundle::single(j), run.perturbed[c.buyer][j] - base});
      }
    }
  }
  // Any pair still unsampled (goods with no matched bidder) is drawn last.
  for (int q = 0; q < n; ++q) {
    for (int g = 0; g < m; ++g) sample(q, g);
  }
  run.prices = PriceVector(price);

  auto rel = arc_relation(run.g);
  for (const auto& e : run.g_hat.edges) {
    if (!rel.count({e.from, e.to})) run.subgraph_ok = false;
  }
  for (int j = 0; j < m; ++j) {
    auto path = shortest_source_path(run.g_hat, run.order[j]);
    if (path) {
      std::vector<int> nodes{path->start};
      for (int e : path->edges) nodes.push_back(run.g_hat.edges[e].to);
      run.paths_used[run.order[j]] = nodes;
    }
    Scalar diff = price[run.order[j]] - p[run.order[j]];
    if (diff < 0) diff = -diff;
    // Goods are numbered from 1 in the order.
    if (!(diff < run.delta * Scalar(j + 1) / Scalar(m))) run.price_bound_ok = false;
  }
  for (const auto& d : degrees(run.g_hat)) {
    if (d.in_degree > 1) run.indegree_ok = false;
  }

  std::vector<Valuation> buyers;
  Scalar h = market.bound();
  for (int q = 0; q < n; ++q) {
    for (const Scalar& x : run.perturbed[q]) h = std::max(h, x);
  }
  for (int q = 0; q < n; ++q) buyers.push_back(Valuation::unit_demand(run.perturbed[q]));
  Market hat(m, market.supplies(), h, buyers);
  auto we_check = verify_we(hat, run.prices, mu);
  run.we_ok = we_check.pass;
  if (run.we_ok) {
    auto actual = build_unit(hat, run.prices, mu);
    auto key = [](const SwapGraph& g) {
      std::set<std::tuple<int, int, int>> s;
      for (const auto& e : g.edges) s.emplace(e.from, e.to, e.buyer);
      return s;
    };
    run.swap_graph_matches = key(actual) == key(run.g_hat);
  } else {
    run.swap_graph_matches = false;
  }
  if (check_minimality) run.minimal_ok = minimal_walrasian(hat, PriceRoute::lp).prices == run.prices;
  return run;
}

// The perturbed market of a run, for oracle checks.
inline Market perturbed_market(const Market& market, const PerturbationRun& run) {
  std::vector<Valuation> buyers;
  Scalar h = market.bound();
  for (const auto& row : run.perturbed) {
    for (const Scalar& x : row) h = std::max(h, x);
    buyers.push_back(Valuation::unit_demand(row));
  }
  return Market(market.num_goods(), market.supplies(), h, buyers);
}

struct ProportionEstimate {
  long trials = 0;
  long successes = 0;
  double fraction = 0;
  double sigma = 0;      // standard error sqrt(f (1 - f) / T)
  double wilson_lo = 0;  // 95% Wilson score interval
  double wilson_hi = 0;
};

inline ProportionEstimate estimate_proportion(long successes, long trials) {
  ProportionEstimate e;
  e.trials = trials;
  e.successes = successes;
  if (trials == 0) return e;
  double n = static_cast<double>(trials), f = static_cast<double>(successes) / n;
  const double z = 1.96;
  e.fraction = f;
  e.sigma = std::sqrt(f * (1 - f) / n);
  double denom = 1 + z * z / n;
  double centre = (f + z * z / (2 * n)) / denom;
  double half = z * std::sqrt(f * (1 - f) / n + z * z / (4 * n * n)) / denom;
  e.wilson_lo = std::max(0.0, centre - half);
  e.wilson_hi = std::min(1.0, centre + half);
  return e;
}

// Runs f(t) for t in [0, trials) across threads; results are stored by index
// so the outcome never depends on the thread count.
template <class R, class F>
std::vector<R> run_trials(long trials, int threads, F&& f) {
  std::vector<R> out(static_cast<std::size_t>(trials));
  if (threads <= 1 || trials <= 1) {
    for (long t = 0; t < trials; ++t) out[t] = f(t);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (long t = w; t < trials; t += threads) out[t] = f(t);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

inline int default_threads() {
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}

struct PerturbationTrial {
  bool success = false;  // every node of g_hat has in-degree <= 1
  bool lemmas_ok = false;
  long set_size = 0;
  long required = 0;
  std::string failure;
};

struct PerturbationExperiment {
  ProportionEstimate estimate;
  long required_size = 0;  // ceil(C n^2 k / beta)
  long set_size = 0;       // 2L + 1 actually used (from the first trial)
  long lemma_failures = 0;
  std::vector<PerturbationTrial> rows;
};

inline long required_perturbation_size(int n, int k, double beta, double c = 4.0) {
  return static_cast<long>(std::ceil(c * n * n * k / beta));
}

// Fraction of trials whose rebuilt graph has in-degree at most one
// everywhere. `family(seed)` draws a market; each trial perturbs its minimal
// equilibrium with a perturbation set of size at least `required`.
template <class Family>
PerturbationExperiment perturbation_indegree_experiment(Family&& family, double beta, long trials, std::uint64_t seed,
                                                        double c = 4.0, int threads = 1,
                                                        std::optional<long> set_size_override = std::nullopt) {
  PerturbationExperiment ex;
  ex.rows = run_trials<PerturbationTrial>(trials, threads, [&](long t) {
    PerturbationTrial row;
    Market market = family(derive_seed(seed, 1, static_cast<std::uint64_t>(t)));
    auto we = minimal_walrasian(market, PriceRoute::lp);
    long req = set_size_override ? *set_size_override
                                 : required_perturbation_size(market.num_buyers(), market.num_goods(), beta, c);
    auto set = perturbation_set(welfare_grain(market), market.num_goods(), req);
    auto run = perturb_and_reprice(market, we.prices, we.allocation, set,
                                   derive_seed(seed, 2, static_cast<std::uint64_t>(t)));
    row.success = run.indegree_ok;
    row.set_size = set.size();
    row.required = req;
    row.lemmas_ok = run.subgraph_ok && run.price_bound_ok && run.we_ok && run.minimal_ok;
    if (!row.lemmas_ok) {
      row.failure = std::string(run.subgraph_ok ? "" : "subgraph ") + (run.price_bound_ok ? "" : "price-bound ") +
                    (run.we_ok ? "" : "we ") + (run.minimal_ok ? "" : "minimality");
    }
    return row;
  });
  long ok = 0;
  for (const auto& r : ex.rows) {
    ok += r.success;
    ex.lemma_failures += !r.lemmas_ok;
  }
  ex.estimate = estimate_proportion(ok, trials);
  if (!ex.rows.empty()) ex.set_size = ex.rows.front().set_size;
  if (!ex.rows.empty()) ex.required_size = ex.rows.front().required;
  return ex;
}

}  // namespace walras
