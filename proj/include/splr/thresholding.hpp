#pragma once

#include <algorithm>
#include <cstdlib>
#include <tuple>
#include <utility>
#include <vector>

#include "splr/types.hpp"

namespace splr {

// Upper-triangle support: (row, col) with row <= col, each entry standing
// for itself and its mirror. Ordered, no duplicates.
using IndexPair = std::pair<Index, Index>;
using SupportSet = std::vector<IndexPair>;

// All (i, j) with i <= j and |m_ij| strictly above tol.
inline SupportSet support(const Matrix& m, double tol) {
  if (tol < 0) throw InputError("support: tol must be >= 0");
  SupportSet out;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = i; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > tol) out.emplace_back(i, j);
  return out;
}

namespace detail {

struct Candidate {
  double magnitude;
  Index row, col;  // row <= col
};

// Descending magnitude, ties by (row, col) ascending: a total order, so the
// operator is deterministic.
inline bool candidate_before(const Candidate& a, const Candidate& b) {
  if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
  return std::tie(a.row, a.col) < std::tie(b.row, b.col);
}

}  // namespace detail

// Keep the `budget` largest-magnitude entries of a symmetric matrix, zero the
// rest. Selection is pair-atomic: a diagonal cell costs 1, an off-diagonal
// unordered pair costs 2 and is kept or dropped as a unit, so the output is
// exactly symmetric. Candidates are admitted greedily in sorted order; a pair
// that does not fit the remaining budget is skipped, not a stopping point.
// With keep_diagonal all d diagonal cells are admitted first and charged
// against the budget.
inline Matrix hard_threshold_sym(const Matrix& m, Index budget,
                                 bool keep_diagonal = false) {
  const Index d = m.rows();
  if (m.cols() != d) throw InputError("hard_threshold_sym: matrix must be square");
  if (budget < 0 || budget > d * d)
    throw InputError("hard_threshold_sym: budget must lie in [0, d^2]");
  if (keep_diagonal && budget < d)
    throw BudgetTooSmall("hard_threshold_sym: keep_diagonal needs budget >= d");

  std::vector<detail::Candidate> cand;
  cand.reserve(static_cast<std::size_t>(d) * (d + 1) / 2);
  for (Index i = 0; i < d; ++i)
    for (Index j = i; j < d; ++j)
      cand.push_back({std::abs(m(i, j)), i, j});
  std::sort(cand.begin(), cand.end(), detail::candidate_before);

  Matrix out = Matrix::Zero(d, d);
  Index remaining = budget;
  if (keep_diagonal) {
    out.diagonal() = m.diagonal();
    remaining -= d;
  }
  for (const auto& c : cand) {
    if (remaining <= 0) break;
    if (c.row == c.col) {
      if (keep_diagonal) continue;  // already admitted
      out(c.row, c.col) = m(c.row, c.col);
      remaining -= 1;
    } else if (remaining >= 2) {
      out(c.row, c.col) = m(c.row, c.col);
      out(c.col, c.row) = m(c.row, c.col);
      remaining -= 2;
    }
    // an off-diagonal pair that does not fit is skipped; a cheaper
    // candidate further down may still fit
  }
  return out;
}

// Pair-atomicity disabled: every cell competes individually, exactly the
// keep-top-s rule the estimator theory is stated for. Used on vectors (as
// d x 1 matrices) and in oracle tests; breaks symmetry on odd budgets.
inline Matrix hard_threshold_flat(const Matrix& m, Index budget) {
  const Index total = m.size();
  if (budget < 0 || budget > total)
    throw InputError("hard_threshold_flat: budget must lie in [0, size]");
  std::vector<detail::Candidate> cand;
  cand.reserve(static_cast<std::size_t>(total));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      cand.push_back({std::abs(m(i, j)), i, j});
  std::sort(cand.begin(), cand.end(), detail::candidate_before);
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Index k = 0; k < budget; ++k)
    out(cand[k].row, cand[k].col) = m(cand[k].row, cand[k].col);
  return out;
}

inline Vector hard_threshold_flat(const Vector& v, Index budget) {
  return hard_threshold_flat(Matrix(v), budget).col(0);
}

}  // namespace splr
