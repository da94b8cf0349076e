#ifndef FLOERLIB_LP_HPP
#define FLOERLIB_LP_HPP

#include "floerlib/linalg.hpp"

#include <optional>
#include <vector>

namespace floerlib {

/// Exact phase-1 simplex with Bland's rule: decides whether
/// { x >= 0 : A x = b } is nonempty and returns a feasible point.
/// Small dense problems only.
inline std::optional<std::vector<Rat>> lp_feasible_point(const QMat& a,
                                                         std::vector<Rat> b) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  // tableau over original variables plus m artificials
  QMat t(m, n + m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    int s = b[i] < 0 ? -1 : 1;
    for (std::size_t j = 0; j < n; ++j) t(i, j) = a(i, j) * s;
    t(i, n + i) = 1;
    t(i, n + m) = b[i] * s;
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  // reduced cost row for minimizing the sum of artificials
  std::vector<Rat> cost(n + m, Rat(0));
  Rat obj(0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n + m; ++j) cost[j] -= t(i, j);
    obj -= t(i, n + m);
  }
  for (std::size_t i = 0; i < m; ++i) cost[n + i] = 0;

  while (true) {
    // Bland: smallest index with negative reduced cost
    std::size_t enter = n + m;
    for (std::size_t j = 0; j < n + m; ++j)
      if (cost[j] < 0) {
        enter = j;
        break;
      }
    if (enter == n + m) break;
    // ratio test, Bland tie-break on basis index
    std::size_t leave = m;
    Rat best(0);
    for (std::size_t i = 0; i < m; ++i) {
      if (t(i, enter) <= 0) continue;
      Rat ratio = t(i, n + m) / t(i, enter);
      if (leave == m || ratio < best ||
          (ratio == best && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == m) break;  // unbounded phase-1 direction cannot happen
    Rat piv = t(leave, enter);
    for (std::size_t j = 0; j <= n + m; ++j) t(leave, j) /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || t(i, enter) == 0) continue;
      Rat f = t(i, enter);
      for (std::size_t j = 0; j <= n + m; ++j) t(i, j) -= f * t(leave, j);
    }
    Rat cf = cost[enter];
    for (std::size_t j = 0; j < n + m; ++j) cost[j] -= cf * t(leave, j);
    obj -= cf * t(leave, n + m);
    basis[leave] = enter;
  }

  Rat art_sum(0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= n) art_sum += t(i, n + m);
  if (art_sum != 0) return std::nullopt;

  std::vector<Rat> x(n, Rat(0));
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) x[basis[i]] = t(i, n + m);
  return x;
}

/// Does v lie in the cone spanned by the given vectors (nonnegative
/// combinations)? Exact.
inline bool in_cone_span(const std::vector<std::vector<Rat>>& gens,
                         const std::vector<Rat>& v) {
  bool vzero = true;
  for (const auto& c : v)
    if (c != 0) vzero = false;
  if (vzero) return true;
  if (gens.empty()) return false;
  const std::size_t dim = v.size();
  QMat a(dim, gens.size());
  for (std::size_t j = 0; j < gens.size(); ++j)
    for (std::size_t i = 0; i < dim; ++i) a(i, j) = gens[j][i];
  return lp_feasible_point(a, v).has_value();
}

}  // namespace floerlib

#endif
