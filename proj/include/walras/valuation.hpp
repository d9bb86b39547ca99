#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bundle.hpp"
#include "error.hpp"
#include "matroid.hpp"
#include "scalar.hpp"

namespace walras {

// Valuation induced by a weighted matroid: v(S) is the heaviest independent
// subset of S. Weights are aligned with matroid().ground().
class Viwm {
 public:
  Viwm(Matroid matroid, std::vector<Scalar> weights)
      : matroid_(std::move(matroid)), weights_(std::move(weights)) {
    require(weights_.size() == matroid_.ground().size(), ErrorKind::precondition,
            "VIWM needs one weight per ground element");
    for (const Scalar& w : weights_) {
      require(w >= 0, ErrorKind::precondition, "VIWM weights must be non-negative");
    }
    order_.resize(weights_.size());
    std::iota(order_.begin(), order_.end(), 0);
    const auto& ground = matroid_.ground();
    std::sort(order_.begin(), order_.end(), [&](int a, int b) {
      if (weights_[a] != weights_[b]) return weights_[a] > weights_[b];
      return ground[a] < ground[b];
    });
  }

  static Viwm from_map(Matroid matroid, const std::map<ElementId, Scalar>& weights) {
    std::vector<Scalar> w;
    for (ElementId e : matroid.ground()) {
      auto it = weights.find(e);
      w.push_back(it == weights.end() ? Scalar(0) : it->second);
    }
    for (const auto& [e, _] : weights) {
      require(matroid.index_of(e) >= 0, ErrorKind::precondition,
              "weight given for element " + std::to_string(e) + " outside the ground set");
    }
    return Viwm(std::move(matroid), std::move(w));
  }

  const Matroid& matroid() const { return matroid_; }
  const std::vector<Scalar>& weights() const { return weights_; }
  const std::vector<int>& greedy_order() const { return order_; }

  Scalar weight_of(ElementId e) const {
    int i = matroid_.index_of(e);
    return i < 0 ? Scalar(0) : weights_[i];
  }

  // Greedy over a local mask: descending weight, then ascending element id.
  std::pair<Scalar, std::uint64_t> greedy_local(std::uint64_t local) const {
    Scalar value = 0;
    std::uint64_t basis = 0;
    for (int i : order_) {
      std::uint64_t bit = std::uint64_t{1} << i;
      if (!(local & bit)) continue;
      if (matroid_.independent(basis | bit)) {
        basis |= bit;
        value += weights_[i];
      }
    }
    return {value, basis};
  }

  std::uint64_t local_mask(const std::vector<ElementId>& elements) const {
    std::uint64_t local = 0;
    for (ElementId e : elements) {
      int i = matroid_.index_of(e);
      if (i >= 0) local |= std::uint64_t{1} << i;
    }
    return local;
  }

  friend bool operator==(const Viwm& a, const Viwm& b) {
    return a.matroid_ == b.matroid_ && a.weights_ == b.weights_;
  }

 private:
  Matroid matroid_;
  std::vector<Scalar> weights_;
  std::vector<int> order_;
};

struct GreedyResult {
  Scalar value;
  Bundle basis;
};

// Greedy on a set of goods. Endowment elements of the leaf are not in S.
inline GreedyResult matroid_greedy(const Viwm& viwm, Bundle s) {
  auto [value, local] = viwm.greedy_local(viwm.local_mask(s.goods()));
  Bundle basis;
  const auto& ground = viwm.matroid().ground();
  for (int i = 0; i < static_cast<int>(ground.size()); ++i) {
    if (local >> i & 1) basis = basis.with(ground[i]);
  }
  return {value, basis};
}

struct MbvNode;
using MbvTree = std::shared_ptr<const MbvNode>;

// MBV tree node. Merge takes the best split of a bundle between its two
// children; Endow(child, J) is the marginal value of S on top of J.
struct MbvNode {
  enum class Kind { leaf, merge, endow };
  Kind kind = Kind::leaf;
  std::shared_ptr<const Viwm> viwm;
  MbvTree left, right;  // endow uses left as its child
  std::vector<ElementId> endowed;
};

inline MbvTree mbv_leaf(Viwm viwm) {
  auto n = std::make_shared<MbvNode>();
  n->kind = MbvNode::Kind::leaf;
  n->viwm = std::make_shared<const Viwm>(std::move(viwm));
  return n;
}

inline MbvTree mbv_merge(MbvTree a, MbvTree b) {
  require(a && b, ErrorKind::precondition, "merge needs two children");
  auto n = std::make_shared<MbvNode>();
  n->kind = MbvNode::Kind::merge;
  n->left = std::move(a);
  n->right = std::move(b);
  return n;
}

inline MbvTree mbv_endow(MbvTree child, std::vector<ElementId> endowed) {
  require(child != nullptr, ErrorKind::precondition, "endow needs a child");
  auto n = std::make_shared<MbvNode>();
  n->kind = MbvNode::Kind::endow;
  n->left = std::move(child);
  std::sort(endowed.begin(), endowed.end());
  n->endowed = std::move(endowed);
  return n;
}

inline bool tree_equal(const MbvTree& a, const MbvTree& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case MbvNode::Kind::leaf: return *a->viwm == *b->viwm;
    case MbvNode::Kind::merge: return tree_equal(a->left, b->left) && tree_equal(a->right, b->right);
    case MbvNode::Kind::endow: return a->endowed == b->endowed && tree_equal(a->left, b->left);
  }
  return false;
}

// Leaf weights in depth-first order; the weight multiset W(A) used by the
// genericity checks.
inline void collect_weights(const MbvTree& t, std::vector<Scalar>& out) {
  if (t->kind == MbvNode::Kind::leaf) {
    out.insert(out.end(), t->viwm->weights().begin(), t->viwm->weights().end());
    return;
  }
  collect_weights(t->left, out);
  if (t->right) collect_weights(t->right, out);
}

namespace detail {

// Maps an element id into the extended bit space: goods keep their index,
// endowment element -k lands at bit m + k - 1.
inline int ext_bit(ElementId e, int m) { return e >= 0 ? e : m + (-e - 1); }

// Flattened MBV tree with per-call memoization.
class MbvEvaluator {
 public:
  MbvEvaluator(const MbvTree& tree, int m) : m_(m) {
    std::set<ElementId> seen;
    root_ = build(tree, {}, seen);
  }

  // Evaluates extended masks; memo is owned by the caller.
  using Memo = std::vector<std::unordered_map<std::uint64_t, Scalar>>;
  Memo make_memo() const { return Memo(nodes_.size()); }

  Scalar eval(std::uint64_t s, Memo& memo) const { return eval_node(root_, s, memo); }

 private:
  struct Node {
    MbvNode::Kind kind;
    int left = -1, right = -1;
    std::uint64_t endowed = 0;
    std::uint64_t domain = 0;
    const Viwm* viwm = nullptr;
    std::vector<int> ext_of_local;
  };

  int build(const MbvTree& t, const std::set<ElementId>& available, std::set<ElementId>& seen) {
    require(t != nullptr, ErrorKind::precondition, "null MBV node");
    Node node;
    node.kind = t->kind;
    int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    switch (t->kind) {
      case MbvNode::Kind::leaf: {
        node.viwm = t->viwm.get();
        for (ElementId e : t->viwm->matroid().ground()) {
          if (e >= 0) {
            require(e < m_, ErrorKind::precondition,
                    "leaf element " + std::to_string(e) + " is not a good of the market");
          } else {
            require(available.count(e) > 0, ErrorKind::precondition,
                    "endowment element " + std::to_string(e) + " used outside its endow node");
          }
          int b = ext_bit(e, m_);
          require(b < 64, ErrorKind::size, "too many endowment elements");
          node.ext_of_local.push_back(b);
          node.domain |= std::uint64_t{1} << b;
        }
        break;
      }
      case MbvNode::Kind::merge: {
        node.left = build(t->left, available, seen);
        node.right = build(t->right, available, seen);
        node.domain = nodes_[node.left].domain | nodes_[node.right].domain;
        break;
      }
      case MbvNode::Kind::endow: {
        auto inner = available;
        for (ElementId e : t->endowed) {
          require(e < 0, ErrorKind::precondition,
                  "endowed element " + std::to_string(e) + " must be negative");
          require(seen.insert(e).second, ErrorKind::precondition,
                  "endowment element " + std::to_string(e) + " endowed twice");
          int b = ext_bit(e, m_);
          require(b < 64, ErrorKind::size, "too many endowment elements");
          node.endowed |= std::uint64_t{1} << b;
          inner.insert(e);
        }
        node.left = build(t->left, inner, seen);
        node.domain = nodes_[node.left].domain & ~node.endowed;
        break;
      }
    }
    nodes_[id] = std::move(node);
    return id;
  }

  Scalar eval_node(int id, std::uint64_t s, Memo& memo) const {
    const Node& n = nodes_[id];
    s &= n.domain;
    if (s == 0) return 0;
    auto& cache = memo[id];
    if (auto it = cache.find(s); it != cache.end()) return it->second;
    Scalar result;
    switch (n.kind) {
      case MbvNode::Kind::leaf: {
        std::uint64_t local = 0;
        for (std::size_t i = 0; i < n.ext_of_local.size(); ++i) {
          if (s >> n.ext_of_local[i] & 1) local |= std::uint64_t{1} << i;
        }
        result = n.viwm->greedy_local(local).first;
        break;
      }
      case MbvNode::Kind::merge: {
        // Elements only one child can use go to that child (monotone leaves).
        std::uint64_t dl = nodes_[n.left].domain, dr = nodes_[n.right].domain;
        std::uint64_t shared = s & dl & dr, only_l = s & dl & ~dr, only_r = s & dr & ~dl;
        bool first = true;
        for_each_submask(shared, [&](std::uint64_t t) {
          Scalar v = eval_node(n.left, only_l | t, memo) +
                     eval_node(n.right, only_r | (shared & ~t), memo);
          if (first || v > result) result = v;
          first = false;
        });
        break;
      }
      case MbvNode::Kind::endow: {
        result = eval_node(n.left, s | n.endowed, memo) - eval_node(n.left, n.endowed, memo);
        break;
      }
    }
    cache.emplace(s, result);
    return result;
  }

  int m_;
  int root_ = 0;
  std::vector<Node> nodes_;
};

}  // namespace detail

// A buyer's valuation over bundles of the market's m goods. Immutable and
// cheap to copy. Three kinds: unit demand, an MBV tree, and an explicit
// table over all 2^m bundles (used for non-GS test valuations).
class Valuation {
 public:
  enum class Kind { unit_demand, mbv, table };

  static Valuation unit_demand(std::vector<Scalar> values) {
    require(values.size() <= static_cast<std::size_t>(kMaxGoods), ErrorKind::size,
            "too many goods");
    for (const Scalar& x : values) {
      require(x >= 0, ErrorKind::precondition, "unit-demand values must be non-negative");
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::unit_demand;
    impl->m = static_cast<int>(values.size());
    impl->unit = std::move(values);
    return Valuation(std::move(impl));
  }

  static Valuation table(int m, std::vector<Scalar> values) {
    require(m >= 0 && m <= kMaxEnumGoods, ErrorKind::size, "table valuations need m <= 16");
    require(values.size() == (std::size_t{1} << m), ErrorKind::precondition,
            "table valuation needs 2^m values");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::table;
    impl->m = m;
    impl->table = std::move(values);
    return Valuation(std::move(impl));
  }

  static Valuation mbv(int m, MbvTree tree) {
    require(m >= 0 && m <= kMaxGoods, ErrorKind::size, "too many goods");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::mbv;
    impl->m = m;
    impl->tree = std::move(tree);
    impl->evaluator = std::make_shared<const detail::MbvEvaluator>(impl->tree, m);
    if (m <= kMaxCheckGoods) {
      auto memo = impl->evaluator->make_memo();
      impl->table.resize(std::size_t{1} << m);
      for (std::uint64_t s = 0; s < (std::uint64_t{1} << m); ++s) {
        impl->table[s] = impl->evaluator->eval(s, memo);
      }
    }
    return Valuation(std::move(impl));
  }

  // Additive valuation as an MBV leaf over the free matroid.
  static Valuation additive(const std::vector<Scalar>& weights) {
    int m = static_cast<int>(weights.size());
    std::vector<ElementId> ground(m);
    std::iota(ground.begin(), ground.end(), 0);
    return mbv(m, mbv_leaf(Viwm(Matroid::free(ground), weights)));
  }

  Kind kind() const { return impl_->kind; }
  int num_goods() const { return impl_->m; }
  bool gs_class() const { return impl_->kind != Kind::table; }

  Scalar operator()(Bundle s) const {
    switch (impl_->kind) {
      case Kind::unit_demand: {
        Scalar best = 0;
        for (std::uint32_t r = s.mask(); r; r &= r - 1) {
          const Scalar& x = impl_->unit[std::countr_zero(r)];
          if (x > best) best = x;
        }
        return best;
      }
      case Kind::table:
        return impl_->table[s.mask()];
      case Kind::mbv: {
        if (!impl_->table.empty()) return impl_->table[s.mask()];
        auto memo = impl_->evaluator->make_memo();
        return impl_->evaluator->eval(s.mask(), memo);
      }
    }
    return 0;
  }

  // Value of a single good; for unit demand this is a table read.
  Scalar value_of(GoodId g) const {
    if (impl_->kind == Kind::unit_demand) return impl_->unit[g];
    return (*this)(Bundle::single(g));
  }

  const std::vector<Scalar>& unit_values() const {
    require(impl_->kind == Kind::unit_demand, ErrorKind::precondition, "not a unit-demand valuation");
    return impl_->unit;
  }
  const std::vector<Scalar>& table_values() const {
    require(impl_->kind == Kind::table, ErrorKind::precondition, "not a table valuation");
    return impl_->table;
  }
  const MbvTree& tree() const {
    require(impl_->kind == Kind::mbv, ErrorKind::precondition, "not an MBV valuation");
    return impl_->tree;
  }

  // Valuation parameters entering genericity conditions: unit-demand values
  // or MBV leaf weights.
  std::vector<Scalar> parameters() const {
    if (impl_->kind == Kind::unit_demand) return impl_->unit;
    if (impl_->kind == Kind::mbv) {
      std::vector<Scalar> out;
      collect_weights(impl_->tree, out);
      return out;
    }
    return impl_->table;
  }

  friend bool operator==(const Valuation& a, const Valuation& b) {
    if (a.impl_->kind != b.impl_->kind || a.impl_->m != b.impl_->m) return false;
    switch (a.impl_->kind) {
      case Kind::unit_demand: return a.impl_->unit == b.impl_->unit;
      case Kind::table: return a.impl_->table == b.impl_->table;
      case Kind::mbv: return tree_equal(a.impl_->tree, b.impl_->tree);
    }
    return false;
  }

 private:
  struct Impl {
    Kind kind = Kind::unit_demand;
    int m = 0;
    std::vector<Scalar> unit;
    std::vector<Scalar> table;
    MbvTree tree;
    std::shared_ptr<const detail::MbvEvaluator> evaluator;
  };

  explicit Valuation(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

inline Scalar eval(const Valuation& v, Bundle s) { return v(s); }

// Brute-force submodularity: v(S+g) + v(S+h) >= v(S+g+h) + v(S).
inline bool is_submodular(const Valuation& v) {
  int m = v.num_goods();
  require(m <= kMaxCheckGoods, ErrorKind::size, "is_submodular needs m <= 12");
  for (std::uint32_t s = 0; s < (1u << m); ++s) {
    Bundle S(s);
    Scalar vs = v(S);
    for (int g = 0; g < m; ++g) {
      if (S.contains(g)) continue;
      for (int h = g + 1; h < m; ++h) {
        if (S.contains(h)) continue;
        if (v(S.with(g)) + v(S.with(h)) < v(S.with(g).with(h)) + vs) return false;
      }
    }
  }
  return true;
}

// Rank-1 uniform VIWM over the goods with the unit-demand values as weights
// must agree with the unit-demand evaluation on every bundle.
inline bool unit_demand_as_viwm_agrees(const Valuation& v) {
  int m = v.num_goods();
  require(m <= kMaxCheckGoods, ErrorKind::size, "agreement check needs m <= 12");
  std::vector<ElementId> ground(m);
  std::iota(ground.begin(), ground.end(), 0);
  Valuation rank1 = Valuation::mbv(m, mbv_leaf(Viwm(Matroid::uniform(ground, 1), v.unit_values())));
  for (std::uint32_t s = 0; s < (1u << m); ++s) {
    if (v(Bundle(s)) != rank1(Bundle(s))) return false;
  }
  return true;
}

}  // namespace walras
