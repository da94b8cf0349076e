#ifndef FLOERLIB_LINALG_HPP
#define FLOERLIB_LINALG_HPP

#include "floerlib/rational.hpp"

#include <algorithm>
#include <cassert>
#include <utility>
#include <vector>

namespace floerlib {

/// Dense matrix over exact rationals. Row-major, desk-scale sizes.
class QMat {
 public:
  QMat() = default;
  QMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Rat(0)) {}

  static QMat identity(std::size_t n) {
    QMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rat& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rat& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  bool operator==(const QMat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }
  bool operator!=(const QMat& o) const { return !(*this == o); }

  bool is_zero() const {
    for (const auto& x : data_)
      if (x != 0) return false;
    return true;
  }

  QMat operator*(const QMat& o) const {
    assert(cols_ == o.rows_);
    QMat r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const Rat& a = (*this)(i, k);
        if (a == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) {
          if (o(k, j) != 0) r(i, j) += a * o(k, j);
        }
      }
    return r;
  }

  QMat operator+(const QMat& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    QMat r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
    return r;
  }

  QMat operator-(const QMat& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    QMat r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
    return r;
  }

  QMat operator*(const Rat& c) const {
    QMat r = *this;
    for (auto& x : r.data_) x *= c;
    return r;
  }

  QMat transpose() const {
    QMat r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  std::vector<Rat> apply(const std::vector<Rat>& v) const {
    assert(v.size() == cols_);
    std::vector<Rat> r(rows_, Rat(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if ((*this)(i, j) != 0) r[i] += (*this)(i, j) * v[j];
    return r;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rat> data_;
};

/// Row echelon reduction in place; returns pivot columns.
inline std::vector<std::size_t> rref_in_place(QMat& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t sel = row;
    while (sel < m.rows() && m(sel, col) == 0) ++sel;
    if (sel == m.rows()) continue;
    if (sel != row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(sel, j), m(row, j));
    Rat inv = Rat(1) / m(row, col);
    for (std::size_t j = 0; j < m.cols(); ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == 0) continue;
      Rat f = m(i, col);
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

inline std::size_t rank(QMat m) { return rref_in_place(m).size(); }

/// Basis of the right kernel, one column vector per basis element.
inline std::vector<std::vector<Rat>> kernel_basis(QMat m) {
  std::size_t n = m.cols();
  auto pivots = rref_in_place(m);
  std::vector<bool> is_pivot(n, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Rat>> basis;
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rat> v(n, Rat(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Solve m x = b; returns nullopt when inconsistent.
inline std::optional<std::vector<Rat>> solve(const QMat& m,
                                             const std::vector<Rat>& b) {
  assert(b.size() == m.rows());
  QMat aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  auto pivots = rref_in_place(aug);
  if (!pivots.empty() && pivots.back() == m.cols()) return std::nullopt;
  std::vector<Rat> x(m.cols(), Rat(0));
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, m.cols());
  return x;
}

inline std::optional<QMat> inverse(const QMat& m) {
  if (m.rows() != m.cols()) return std::nullopt;
  std::size_t n = m.rows();
  if (n == 0) return QMat(0, 0);
  QMat aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  auto pivots = rref_in_place(aug);
  if (pivots.size() != n || pivots.back() != n - 1) return std::nullopt;
  QMat inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

inline Rat determinant(QMat m) {
  assert(m.rows() == m.cols());
  Rat det(1);
  std::size_t n = m.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t sel = col;
    while (sel < n && m(sel, col) == 0) ++sel;
    if (sel == n) return Rat(0);
    if (sel != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(sel, j), m(col, j));
      det = -det;
    }
    det *= m(col, col);
    Rat inv = Rat(1) / m(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      if (m(i, col) == 0) continue;
      Rat f = m(i, col) * inv;
      for (std::size_t j = col; j < n; ++j) m(i, j) -= f * m(col, j);
    }
  }
  return det;
}

/// Signature (n+ minus n-) of a symmetric matrix via symmetric Gaussian
/// congruence steps; exact.
inline long long signature(QMat a) {
  assert(a.rows() == a.cols());
  std::size_t n = a.rows();
  long long sig = 0;
  std::vector<bool> done(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t p = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && a(i, i) != 0) {
        p = i;
        break;
      }
    if (p == n) {
      // all remaining diagonal entries vanish; create one from an off-diagonal
      std::size_t bi = n, bj = n;
      for (std::size_t i = 0; i < n && bi == n; ++i) {
        if (done[i]) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
          if (!done[j] && a(i, j) != 0) {
            bi = i;
            bj = j;
            break;
          }
        }
      }
      if (bi == n) break;  // remaining block is zero
      for (std::size_t k = 0; k < n; ++k) a(bi, k) += a(bj, k);
      for (std::size_t k = 0; k < n; ++k) a(k, bi) += a(k, bj);
      p = bi;
    }
    Rat piv = a(p, p);
    sig += piv > 0 ? 1 : -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == p || done[i] || a(i, p) == 0) continue;
      Rat f = a(i, p) / piv;
      for (std::size_t k = 0; k < n; ++k) a(i, k) -= f * a(p, k);
      for (std::size_t k = 0; k < n; ++k) a(k, i) -= f * a(k, p);
    }
    done[p] = true;
  }
  return sig;
}

/// Dense integer matrix used for Smith/Hermite normal forms.
class ZMat {
 public:
  ZMat() = default;
  ZMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Int(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Int& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Int& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  QMat to_rational() const {
    QMat m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = Rat((*this)(i, j));
    return m;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Int> data_;
};

/// Clear denominators of a rational matrix; returns the integer matrix that
/// equals m times the lcm of all denominators.
inline ZMat clear_denominators(const QMat& m) {
  Int l = 1;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      l = boost::multiprecision::lcm(l, Int(boost::multiprecision::denominator(m(i, j))));
  ZMat z(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      Rat v = m(i, j) * Rat(l);
      z(i, j) = Int(boost::multiprecision::numerator(v));
    }
  return z;
}

/// Nonzero diagonal entries d1 | d2 | ... of the Smith normal form.
inline std::vector<Int> smith_diagonal(ZMat a) {
  std::size_t m = a.rows(), n = a.cols();
  std::vector<Int> divs;
  std::size_t s = 0;
  while (s < m && s < n) {
    // locate the minimal nonzero entry in the lower-right block
    std::size_t pi = m, pj = n;
    Int best = 0;
    for (std::size_t i = s; i < m; ++i)
      for (std::size_t j = s; j < n; ++j) {
        if (a(i, j) == 0) continue;
        Int v = boost::multiprecision::abs(a(i, j));
        if (pi == m || v < best) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (pi == m) break;
    for (std::size_t j = 0; j < n; ++j) std::swap(a(pi, j), a(s, j));
    for (std::size_t i = 0; i < m; ++i) std::swap(a(i, pj), a(i, s));

    bool again = false;
    for (std::size_t i = s + 1; i < m; ++i) {
      if (a(i, s) == 0) continue;
      Int q = a(i, s) / a(s, s);
      for (std::size_t j = s; j < n; ++j) a(i, j) -= q * a(s, j);
      if (a(i, s) != 0) again = true;
    }
    for (std::size_t j = s + 1; j < n; ++j) {
      if (a(s, j) == 0) continue;
      Int q = a(s, j) / a(s, s);
      for (std::size_t i = s; i < m; ++i) a(i, j) -= q * a(i, s);
      if (a(s, j) != 0) again = true;
    }
    if (again) continue;

    // divisibility sweep: pivot must divide every remaining entry
    bool clean = true;
    for (std::size_t i = s + 1; i < m && clean; ++i)
      for (std::size_t j = s + 1; j < n && clean; ++j) {
        if (a(i, j) % a(s, s) != 0) {
          for (std::size_t k = s; k < n; ++k) a(s, k) += a(i, k);
          clean = false;
        }
      }
    if (!clean) continue;

    divs.push_back(boost::multiprecision::abs(a(s, s)));
    ++s;
  }
  return divs;
}

inline std::size_t rank_via_smith(const QMat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  return smith_diagonal(clear_denominators(m)).size();
}

/// Hermite normal form of the lattice spanned by the given rows: canonical,
/// so two spanning sets of the same lattice produce identical output.
inline std::vector<std::vector<Int>> lattice_row_basis(
    std::vector<std::vector<Int>> rows) {
  if (rows.empty()) return rows;
  std::size_t n = rows[0].size();
  std::vector<std::vector<Int>> out;
  std::size_t col = 0;
  while (col < n && !rows.empty()) {
    bool any = true;
    while (any) {
      any = false;
      std::size_t best = rows.size();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][col] == 0) continue;
        if (best == rows.size() ||
            boost::multiprecision::abs(rows[i][col]) <
                boost::multiprecision::abs(rows[best][col]))
          best = i;
      }
      if (best == rows.size()) break;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == best || rows[i][col] == 0) continue;
        Int q = rows[i][col] / rows[best][col];
        for (std::size_t j = 0; j < n; ++j) rows[i][j] -= q * rows[best][j];
        if (rows[i][col] != 0) any = true;
      }
      if (!any) {
        if (rows[best][col] < 0)
          for (std::size_t j = 0; j < n; ++j) rows[best][j] = -rows[best][j];
        out.push_back(rows[best]);
        rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(best));
      }
    }
    ++col;
  }
  // canonical form: entries above each pivot reduced into [0, pivot)
  for (std::size_t r = 0; r < out.size(); ++r) {
    std::size_t c = 0;
    while (c < n && out[r][c] == 0) ++c;
    if (c == n) continue;
    const Int& p = out[r][c];
    for (std::size_t r2 = 0; r2 < r; ++r2) {
      Int q = out[r2][c] / p;
      if (out[r2][c] - q * p < 0) q -= 1;  // floor division
      if (q == 0) continue;
      for (std::size_t j = 0; j < n; ++j) out[r2][j] -= q * out[r][j];
    }
  }
  return out;
}

}  // namespace floerlib

#endif
