#pragma once

#include <cstddef>
#include <vector>

#include "error.hpp"

namespace walras {

template <class Field>
struct LpResult {
  bool bounded = true;
  Field objective{};
  std::vector<Field> primal;  // y
  std::vector<Field> dual;    // shadow price of each row
};

// Exact dense tableau simplex for packing programs
//
//   maximize c.y  subject to  A y <= b,  y >= 0,  with b >= 0,
//
// so the slack basis is feasible and no phase-one is needed. Bland's rule
// (smallest improving column, smallest basic index on ratio ties) prevents
// cycling. Field must be an exact ordered field.
template <class Field>
LpResult<Field> solve_packing_lp(const std::vector<std::vector<Field>>& a,
                                 const std::vector<Field>& b, const std::vector<Field>& c) {
  const std::size_t rows = a.size();
  const std::size_t cols = c.size();
  const std::size_t width = cols + rows;
  require(b.size() == rows, ErrorKind::precondition, "LP rhs has the wrong length");
  for (const Field& x : b) require(x >= 0, ErrorKind::precondition, "packing LP needs b >= 0");

  std::vector<std::vector<Field>> t(rows, std::vector<Field>(width));
  std::vector<Field> rhs = b;
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    require(a[i].size() == cols, ErrorKind::precondition, "LP row has the wrong length");
    for (std::size_t j = 0; j < cols; ++j) t[i][j] = a[i][j];
    t[i][cols + i] = 1;
    basis[i] = cols + i;
  }
  std::vector<Field> reduced(width);
  for (std::size_t j = 0; j < cols; ++j) reduced[j] = c[j];
  Field value = 0;

  LpResult<Field> out;
  while (true) {
    std::size_t enter = width;
    for (std::size_t j = 0; j < width; ++j) {
      if (reduced[j] > 0) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;

    std::size_t leave = rows;
    Field best_ratio;
    for (std::size_t i = 0; i < rows; ++i) {
      if (!(t[i][enter] > 0)) continue;
      Field ratio = rhs[i] / t[i][enter];
      if (leave == rows || ratio < best_ratio ||
          (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == rows) {
      out.bounded = false;
      return out;
    }

    Field pivot = t[leave][enter];
    for (std::size_t j = 0; j < width; ++j) {
      if (t[leave][j] != 0) t[leave][j] /= pivot;
    }
    rhs[leave] /= pivot;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      Field f = t[i][enter];
      for (std::size_t j = 0; j < width; ++j) {
        if (t[leave][j] != 0) t[i][j] -= f * t[leave][j];
      }
      rhs[i] -= f * rhs[leave];
    }
    Field f = reduced[enter];
    for (std::size_t j = 0; j < width; ++j) {
      if (t[leave][j] != 0) reduced[j] -= f * t[leave][j];
    }
    value += f * rhs[leave];
    basis[leave] = enter;
  }

  out.objective = value;
  out.primal.assign(cols, Field(0));
  for (std::size_t i = 0; i < rows; ++i) {
    if (basis[i] < cols) out.primal[basis[i]] = rhs[i];
  }
  out.dual.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) out.dual[i] = -reduced[cols + i];
  return out;
}

}  // namespace walras
