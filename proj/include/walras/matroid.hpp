#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace walras {

// Element ids: goods are non-negative, endowment elements negative.
using ElementId = int;

inline constexpr int kMaxGround = 20;  // explicit families and brute-force checks

// A matroid over a ground set of element ids. Independence is evaluated on
// "local" masks, where bit i stands for ground()[i].
class Matroid {
 public:
  enum class Kind { explicit_family, uniform, partition };

  static Matroid uniform(std::vector<ElementId> ground, int rank) {
    Matroid m(Kind::uniform, std::move(ground));
    require(rank >= 0, ErrorKind::precondition, "uniform matroid rank must be >= 0");
    m.rank_ = rank;
    return m;
  }

  static Matroid free(std::vector<ElementId> ground) {
    int r = static_cast<int>(ground.size());
    return uniform(std::move(ground), r);
  }

  // Blocks are disjoint; the ground set is their union.
  static Matroid partition(const std::vector<std::vector<ElementId>>& blocks,
                           const std::vector<int>& capacities) {
    require(blocks.size() == capacities.size(), ErrorKind::precondition,
            "partition matroid needs one capacity per block");
    std::vector<ElementId> ground;
    for (const auto& b : blocks) ground.insert(ground.end(), b.begin(), b.end());
    Matroid m(Kind::partition, ground);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      require(capacities[i] >= 0, ErrorKind::precondition, "negative block capacity");
      std::uint64_t mask = 0;
      for (ElementId e : blocks[i]) mask |= std::uint64_t{1} << m.index_of(e);
      m.blocks_.push_back(mask);
      m.caps_.push_back(capacities[i]);
    }
    return m;
  }

  // The family is checked against the matroid axioms.
  static Matroid explicit_family(std::vector<ElementId> ground,
                                 const std::vector<std::vector<ElementId>>& independent) {
    Matroid m(Kind::explicit_family, std::move(ground));
    require(m.ground_.size() <= static_cast<std::size_t>(kMaxGround), ErrorKind::size,
            "explicit matroid ground set too large");
    for (const auto& set : independent) {
      std::uint64_t mask = 0;
      for (ElementId e : set) {
        int i = m.index_of(e);
        require(i >= 0, ErrorKind::precondition,
                "independent set element " + std::to_string(e) + " not in ground set");
        mask |= std::uint64_t{1} << i;
      }
      m.family_.push_back(mask);
    }
    std::sort(m.family_.begin(), m.family_.end());
    m.family_.erase(std::unique(m.family_.begin(), m.family_.end()), m.family_.end());
    if (auto why = m.axiom_violation()) fail(ErrorKind::precondition, "not a matroid: " + *why);
    return m;
  }

  Kind kind() const { return kind_; }
  const std::vector<ElementId>& ground() const { return ground_; }
  int ground_size() const { return static_cast<int>(ground_.size()); }
  int rank_param() const { return rank_; }
  const std::vector<std::uint64_t>& blocks() const { return blocks_; }
  const std::vector<int>& capacities() const { return caps_; }
  const std::vector<std::uint64_t>& family() const { return family_; }

  int index_of(ElementId e) const {
    auto it = std::find(ground_.begin(), ground_.end(), e);
    return it == ground_.end() ? -1 : static_cast<int>(it - ground_.begin());
  }

  bool independent(std::uint64_t local) const {
    switch (kind_) {
      case Kind::uniform:
        return std::popcount(local) <= rank_;
      case Kind::partition:
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
          if (std::popcount(local & blocks_[i]) > caps_[i]) return false;
        }
        return true;
      case Kind::explicit_family:
        return std::binary_search(family_.begin(), family_.end(), local);
    }
    return false;
  }

  // Brute-force check of the independence axioms; returns a description of
  // the first violation, if any. Explicit families are checked pairwise over
  // the family; the other kinds are enumerated for ground sets up to 12.
  std::optional<std::string> axiom_violation() const {
    std::vector<std::uint64_t> sets;
    if (kind_ == Kind::explicit_family) {
      sets = family_;
    } else {
      if (ground_size() > 12) return std::nullopt;
      for (std::uint64_t s = 0; s < (std::uint64_t{1} << ground_size()); ++s) {
        if (independent(s)) sets.push_back(s);
      }
    }
    if (!independent(0)) return "empty set is dependent";
    for (std::uint64_t s : sets) {
      for (std::uint64_t r = s; r; r &= r - 1) {
        if (!independent(s & ~(r & (~r + 1)))) return "family not closed under subsets";
      }
    }
    for (std::uint64_t a : sets) {
      for (std::uint64_t b : sets) {
        if (std::popcount(b) != std::popcount(a) + 1) continue;
        bool extended = false;
        for (std::uint64_t r = b & ~a; r && !extended; r &= r - 1) {
          if (independent(a | (r & (~r + 1)))) extended = true;
        }
        if (!extended) return "exchange axiom fails";
      }
    }
    return std::nullopt;
  }

  friend bool operator==(const Matroid& x, const Matroid& y) {
    return x.kind_ == y.kind_ && x.ground_ == y.ground_ && x.rank_ == y.rank_ &&
           x.blocks_ == y.blocks_ && x.caps_ == y.caps_ && x.family_ == y.family_;
  }

 private:
  Matroid(Kind kind, std::vector<ElementId> ground) : kind_(kind), ground_(std::move(ground)) {
    require(ground_.size() <= 63, ErrorKind::size, "matroid ground set too large");
    auto sorted = ground_;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            ErrorKind::precondition, "duplicate element in matroid ground set");
  }

  Kind kind_;
  std::vector<ElementId> ground_;
  int rank_ = 0;
  std::vector<std::uint64_t> blocks_;
  std::vector<int> caps_;
  std::vector<std::uint64_t> family_;
};

}  // namespace walras
