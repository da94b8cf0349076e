#ifndef FLOERLIB_CZ_HPP
#define FLOERLIB_CZ_HPP

#include "floerlib/linalg.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <variant>
#include <vector>

namespace floerlib {

inline QMat standard_j(std::size_t n) {
  QMat j(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    j(i, n + i) = -1;
    j(n + i, i) = 1;
  }
  return j;
}

/// omega(u, v) = <J0 u, v> for the standard symplectic form on R^{2n}.
inline Rat symplectic_pairing(std::size_t n, const std::vector<Rat>& u,
                              const std::vector<Rat>& v) {
  Rat s(0);
  for (std::size_t i = 0; i < n; ++i) {
    s -= u[n + i] * v[i];
    s += u[i] * v[n + i];
  }
  return s;
}

inline bool is_symplectic(const QMat& m, const Rat& tol = Rat(0)) {
  std::size_t d = m.rows();
  if (d != m.cols() || d % 2 != 0) return false;
  QMat j = standard_j(d / 2);
  QMat err = m.transpose() * j * m - j;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k)
      if (rat_abs(err(i, k)) > tol) return false;
  return true;
}

inline Int rat_floor(const Rat& x) {
  Int n(boost::multiprecision::numerator(x));
  Int d(boost::multiprecision::denominator(x));
  Int q = n / d;
  if (n % d != 0 && n < 0) q -= 1;
  return q;
}

// --- symbolic paths ----------------------------------------------------------

struct PathNode;
using PathPtr = std::shared_ptr<const PathNode>;

/// Rotation in Sp(2): R(pi * s), s running linearly from `from` to `to`.
struct RotationSeg {
  Rat from_over_pi, to_over_pi;
};

/// Off-diagonal shear block running linearly from s0 to s1 (n x n symmetric).
/// upper: [[I, S(t)], [0, I]]; lower: [[I, 0], [S(t), I]].
struct ShearSeg {
  bool upper = true;
  QMat s0, s1;
};

/// exp(J0 S tT), t in [0,1], S symmetric on R^{2n}. Restricted to short
/// durations so that no interior eigenvalue-1 instant can occur.
struct HamExp {
  QMat s;
  Rat duration;
};

struct ConstantPath {
  QMat m;
};

struct DirectSumNode {
  PathPtr a, b;
};

struct CatenationNode {
  PathPtr a, b;
};

struct PathNode {
  std::variant<RotationSeg, ShearSeg, HamExp, ConstantPath, DirectSumNode,
               CatenationNode>
      node;
  std::size_t half_dim = 0;
};

inline PathPtr make_rotation_segment(const Rat& from_over_pi,
                                     const Rat& to_over_pi) {
  auto p = std::make_shared<PathNode>();
  p->node = RotationSeg{from_over_pi, to_over_pi};
  p->half_dim = 1;
  return p;
}

/// Rotation by total angle `angle_over_pi * pi`, starting at the identity.
inline PathPtr make_rotation(const Rat& angle_over_pi) {
  return make_rotation_segment(Rat(0), angle_over_pi);
}

inline void require_symmetric(const QMat& b) {
  if (b.rows() != b.cols()) throw std::invalid_argument("matrix is not square");
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (b(i, j) != b(j, i))
        throw std::invalid_argument("matrix is not symmetric");
}

inline PathPtr make_shear_segment(bool upper, QMat s0, QMat s1) {
  require_symmetric(s0);
  require_symmetric(s1);
  if (s0.rows() != s1.rows())
    throw std::invalid_argument("shear endpoints differ in size");
  auto p = std::make_shared<PathNode>();
  p->half_dim = s0.rows();
  p->node = ShearSeg{upper, std::move(s0), std::move(s1)};
  return p;
}

/// The normalized shear path [[I, -tB], [0, I]] (direction +) or its
/// lower-triangular mirror [[I, 0], [-tB, I]] (direction -).
inline PathPtr make_shear(const QMat& b, int direction = +1) {
  QMat zero(b.rows(), b.cols());
  return make_shear_segment(direction > 0, zero, b * Rat(-1));
}

inline PathPtr make_constant(QMat m) {
  if (!is_symplectic(m))
    throw std::invalid_argument("constant path matrix is not symplectic");
  auto p = std::make_shared<PathNode>();
  p->half_dim = m.rows() / 2;
  p->node = ConstantPath{std::move(m)};
  return p;
}

inline PathPtr make_ham_exp(QMat s, Rat duration) {
  require_symmetric(s);
  if (s.rows() % 2 != 0)
    throw std::invalid_argument("generator must act on R^{2n}");
  auto p = std::make_shared<PathNode>();
  p->half_dim = s.rows() / 2;
  p->node = HamExp{std::move(s), std::move(duration)};
  return p;
}

inline PathPtr make_direct_sum(PathPtr a, PathPtr b) {
  auto p = std::make_shared<PathNode>();
  p->half_dim = a->half_dim + b->half_dim;
  p->node = DirectSumNode{std::move(a), std::move(b)};
  return p;
}

// --- endpoint evaluation ------------------------------------------------------

namespace detail {

/// cos/sin of pi*x when x is a half integer; nullopt otherwise.
inline std::optional<std::pair<Rat, Rat>> exact_cos_sin_pi(const Rat& x) {
  Rat twice = x * 2;
  if (boost::multiprecision::denominator(twice) != 1) return std::nullopt;
  long long k = static_cast<long long>(Int(boost::multiprecision::numerator(twice)) % 4);
  if (k < 0) k += 4;
  switch (k) {
    case 0: return std::make_pair(Rat(1), Rat(0));
    case 1: return std::make_pair(Rat(0), Rat(1));
    case 2: return std::make_pair(Rat(-1), Rat(0));
    default: return std::make_pair(Rat(0), Rat(-1));
  }
}

inline QMat shear_matrix(const ShearSeg& s, const Rat& t) {
  std::size_t n = s.s0.rows();
  QMat m = QMat::identity(2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Rat v = s.s0(i, j) + t * (s.s1(i, j) - s.s0(i, j));
      if (s.upper)
        m(i, n + j) = v;
      else
        m(n + i, j) = v;
    }
  return m;
}

inline bool nilpotent(const QMat& a) {
  QMat p = a;
  for (std::size_t k = 1; k < a.rows(); ++k) {
    if (p.is_zero()) return true;
    p = p * a;
  }
  return p.is_zero();
}

inline QMat exp_nilpotent(const QMat& a) {
  std::size_t d = a.rows();
  QMat out = QMat::identity(d);
  QMat pw = QMat::identity(d);
  Rat f(1);
  for (std::size_t k = 1; k <= d + 1; ++k) {
    pw = pw * a;
    if (pw.is_zero()) break;
    f *= Rat(static_cast<long long>(k));
    out = out + pw * (Rat(1) / f);
  }
  return out;
}

inline QMat direct_sum_mat(const QMat& a, const QMat& b) {
  std::size_t na = a.rows() / 2, nb = b.rows() / 2, n = na + nb;
  QMat m(2 * n, 2 * n);
  auto amap = [&](std::size_t i) { return i < na ? i : n + (i - na); };
  auto bmap = [&](std::size_t i) { return i < nb ? na + i : n + na + (i - nb); };
  for (std::size_t i = 0; i < 2 * na; ++i)
    for (std::size_t j = 0; j < 2 * na; ++j) m(amap(i), amap(j)) = a(i, j);
  for (std::size_t i = 0; i < 2 * nb; ++i)
    for (std::size_t j = 0; j < 2 * nb; ++j) m(bmap(i), bmap(j)) = b(i, j);
  return m;
}

inline std::optional<QMat> exact_rotation(const Rat& over_pi) {
  auto cs = exact_cos_sin_pi(over_pi);
  if (!cs) return std::nullopt;
  QMat m(2, 2);
  m(0, 0) = cs->first;
  m(0, 1) = -cs->second;
  m(1, 0) = cs->second;
  m(1, 1) = cs->first;
  return m;
}

/// Exact endpoint matrix when representable over the rationals.
inline std::optional<QMat> exact_point(const PathNode& p, bool at_end) {
  if (const auto* r = std::get_if<RotationSeg>(&p.node))
    return exact_rotation(at_end ? r->to_over_pi : r->from_over_pi);
  if (const auto* s = std::get_if<ShearSeg>(&p.node))
    return shear_matrix(*s, at_end ? Rat(1) : Rat(0));
  if (const auto* c = std::get_if<ConstantPath>(&p.node)) return c->m;
  if (const auto* h = std::get_if<HamExp>(&p.node)) {
    if (!at_end) return QMat::identity(h->s.rows());
    QMat x = standard_j(p.half_dim) * h->s * h->duration;
    if (nilpotent(x)) return exp_nilpotent(x);
    return std::nullopt;
  }
  if (const auto* d = std::get_if<DirectSumNode>(&p.node)) {
    auto a = exact_point(*d->a, at_end), b = exact_point(*d->b, at_end);
    if (a && b) return direct_sum_mat(*a, *b);
    return std::nullopt;
  }
  const auto& c = std::get<CatenationNode>(p.node);
  return exact_point(at_end ? *c.b : *c.a, at_end);
}

inline std::vector<double> to_doubles(const QMat& m) {
  std::vector<double> v;
  v.reserve(m.rows() * m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      v.push_back(static_cast<double>(m(i, j)));
  return v;
}

/// Double-precision endpoint used when exact evaluation is unavailable.
inline std::vector<double> approx_point(const PathNode& p, bool at_end) {
  if (auto e = exact_point(p, at_end)) return to_doubles(*e);
  if (const auto* r = std::get_if<RotationSeg>(&p.node)) {
    double th =
        M_PI * static_cast<double>(at_end ? r->to_over_pi : r->from_over_pi);
    return {std::cos(th), -std::sin(th), std::sin(th), std::cos(th)};
  }
  if (const auto* h = std::get_if<HamExp>(&p.node)) {
    std::size_t d = h->s.rows();
    std::vector<double> x = to_doubles(standard_j(p.half_dim) * h->s * h->duration);
    auto mul = [d](const std::vector<double>& a, const std::vector<double>& b) {
      std::vector<double> c(d * d, 0.0);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k)
          for (std::size_t j = 0; j < d; ++j)
            c[i * d + j] += a[i * d + k] * b[k * d + j];
      return c;
    };
    int sq = 0;
    double norm = 0;
    for (double v : x) norm = std::max(norm, std::abs(v));
    while (norm > 0.25) {
      for (auto& v : x) v /= 2;
      norm /= 2;
      ++sq;
    }
    std::vector<double> acc(d * d, 0.0), pw(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) acc[i * d + i] = pw[i * d + i] = 1.0;
    double f = 1;
    for (int k = 1; k <= 18; ++k) {
      pw = mul(pw, x);
      f *= k;
      for (std::size_t i = 0; i < d * d; ++i) acc[i] += pw[i] / f;
    }
    for (int k = 0; k < sq; ++k) acc = mul(acc, acc);
    return acc;
  }
  if (const auto* ds = std::get_if<DirectSumNode>(&p.node)) {
    auto a = approx_point(*ds->a, at_end);
    auto b = approx_point(*ds->b, at_end);
    std::size_t na = ds->a->half_dim, nb = ds->b->half_dim, n = na + nb;
    std::vector<double> m(4 * n * n, 0.0);
    auto amap = [&](std::size_t i) { return i < na ? i : n + (i - na); };
    auto bmap = [&](std::size_t i) { return i < nb ? na + i : n + na + (i - nb); };
    for (std::size_t i = 0; i < 2 * na; ++i)
      for (std::size_t j = 0; j < 2 * na; ++j)
        m[amap(i) * 2 * n + amap(j)] = a[i * 2 * na + j];
    for (std::size_t i = 0; i < 2 * nb; ++i)
      for (std::size_t j = 0; j < 2 * nb; ++j)
        m[bmap(i) * 2 * n + bmap(j)] = b[i * 2 * nb + j];
    return m;
  }
  const auto& c = std::get<CatenationNode>(p.node);
  return approx_point(at_end ? *c.b : *c.a, at_end);
}

}  // namespace detail

inline PathPtr make_catenation(PathPtr a, PathPtr b,
                               const Rat& tol = Rat(1, 1000000000)) {
  if (a->half_dim != b->half_dim)
    throw std::invalid_argument("catenation of paths in different dimensions");
  auto ea = detail::exact_point(*a, true);
  auto sb = detail::exact_point(*b, false);
  if (ea && sb) {
    if (!(*ea == *sb))
      throw std::invalid_argument("catenation endpoints do not match");
  } else {
    auto da = detail::approx_point(*a, true);
    auto db = detail::approx_point(*b, false);
    double t = static_cast<double>(tol);
    for (std::size_t i = 0; i < da.size(); ++i)
      if (std::abs(da[i] - db[i]) > t)
        throw std::invalid_argument("catenation endpoints do not match (numeric)");
  }
  auto p = std::make_shared<PathNode>();
  p->half_dim = a->half_dim;
  p->node = CatenationNode{std::move(a), std::move(b)};
  return p;
}

// --- sampled paths ------------------------------------------------------------

struct SampledPath {
  std::size_t half_dim = 0;
  std::vector<std::pair<Rat, QMat>> samples;  // strictly increasing parameters
};

/// A path of symplectic matrices: symbolic constructor tree or sample list.
struct SymplecticPath {
  std::variant<PathPtr, SampledPath> rep;

  std::size_t half_dim() const {
    if (const auto* p = std::get_if<PathPtr>(&rep)) return (*p)->half_dim;
    return std::get<SampledPath>(rep).half_dim;
  }
};

inline SymplecticPath symbolic(PathPtr p) { return SymplecticPath{std::move(p)}; }
inline SymplecticPath sampled(SampledPath s) { return SymplecticPath{std::move(s)}; }

// --- index computation ---------------------------------------------------------

struct IndexResult {
  Half value;
  // (parameter, contribution): contributions are endpoint-weighted and sum to
  // the index value
  std::vector<std::pair<Rat, Half>> crossings;
  std::string method;
};

struct DegenerateCrossingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void add_crossing(IndexResult& r, const Rat& t, Half c) {
  if (c.twice == 0) return;
  r.value += c;
  r.crossings.emplace_back(t, c);
}

/// Crossings of a rotation segment sit at even integer values of s (angle a
/// multiple of 2 pi); each contributes signature 2 sign(ds), halved at the
/// endpoints.
inline IndexResult rotation_segment_index(const RotationSeg& seg) {
  IndexResult r;
  r.method = "symbolic";
  const Rat &a = seg.from_over_pi, &b = seg.to_over_pi;
  if (a == b) return r;  // constant path
  int dir = a < b ? 1 : -1;
  Rat lo = a < b ? a : b, hi = a < b ? b : a;
  Int k = rat_floor(lo);
  if (k % 2 != 0) k += 1;  // smallest even integer >= floor(lo)
  if (Rat(k) < lo) k += 2;
  for (; Rat(k) <= hi; k += 2) {
    bool endpoint = (Rat(k) == lo) || (Rat(k) == hi);
    Half c(endpoint ? 2 * dir : 4 * dir);
    Rat param = (Rat(k) - a) / (b - a);
    add_crossing(r, param, c);
  }
  return r;
}

inline IndexResult shear_segment_index(const ShearSeg& seg) {
  // Lagrangian-fixing path: index is half the signature jump of the
  // off-diagonal block, with the sign fixed by the block position.
  IndexResult r;
  r.method = "symbolic";
  long long sig0 = signature(seg.s0), sig1 = signature(seg.s1);
  add_crossing(r, Rat(0), Half(seg.upper ? sig0 : -sig0));
  add_crossing(r, Rat(1), Half(seg.upper ? -sig1 : sig1));
  return r;
}

inline IndexResult ham_exp_index(const HamExp& h, std::size_t n) {
  // short-time guard: max row sum of |J0 S T| must stay below 2 pi
  QMat x = standard_j(n) * h.s * h.duration;
  Rat worst(0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    Rat row(0);
    for (std::size_t j = 0; j < x.cols(); ++j) row += rat_abs(x(i, j));
    if (row > worst) worst = row;
  }
  if (worst > 6)
    throw std::invalid_argument(
        "hamexp duration too long to certify absence of interior crossings");
  IndexResult r;
  r.method = "symbolic";
  add_crossing(r, Rat(0), Half(signature(h.s)));
  return r;
}

IndexResult symbolic_index(const PathNode& p);

inline IndexResult symbolic_index(const PathNode& p) {
  if (const auto* rot = std::get_if<RotationSeg>(&p.node))
    return rotation_segment_index(*rot);
  if (const auto* sh = std::get_if<ShearSeg>(&p.node))
    return shear_segment_index(*sh);
  if (const auto* h = std::get_if<HamExp>(&p.node))
    return ham_exp_index(*h, p.half_dim);
  if (std::get_if<ConstantPath>(&p.node)) {
    IndexResult r;
    r.method = "symbolic";
    return r;
  }
  if (const auto* d = std::get_if<DirectSumNode>(&p.node)) {
    IndexResult ra = symbolic_index(*d->a), rb = symbolic_index(*d->b);
    IndexResult r;
    r.method = "symbolic";
    r.value = ra.value + rb.value;
    r.crossings = ra.crossings;
    r.crossings.insert(r.crossings.end(), rb.crossings.begin(),
                       rb.crossings.end());
    return r;
  }
  const auto& c = std::get<CatenationNode>(p.node);
  IndexResult ra = symbolic_index(*c.a), rb = symbolic_index(*c.b);
  IndexResult r;
  r.method = "symbolic";
  r.value = ra.value + rb.value;
  for (auto& [t, v] : ra.crossings) r.crossings.emplace_back(t / 2, v);
  for (auto& [t, v] : rb.crossings)
    r.crossings.emplace_back((t + 1) / 2, v);
  return r;
}

/// Kernel basis with entries below tol treated as zero (pivot thresholding).
inline std::vector<std::vector<Rat>> kernel_basis_tol(QMat m, const Rat& tol) {
  std::size_t nrows = m.rows(), ncols = m.cols();
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < ncols && row < nrows; ++col) {
    std::size_t sel = nrows;
    Rat best = tol;
    for (std::size_t i = row; i < nrows; ++i)
      if (rat_abs(m(i, col)) > best) {
        best = rat_abs(m(i, col));
        sel = i;
      }
    if (sel == nrows) {
      for (std::size_t i = row; i < nrows; ++i) m(i, col) = 0;
      continue;
    }
    if (sel != row)
      for (std::size_t j = 0; j < ncols; ++j) std::swap(m(sel, j), m(row, j));
    Rat inv = Rat(1) / m(row, col);
    for (std::size_t j = 0; j < ncols; ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < nrows; ++i) {
      if (i == row || m(i, col) == 0) continue;
      Rat f = m(i, col);
      for (std::size_t j = 0; j < ncols; ++j) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  std::vector<bool> is_pivot(ncols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Rat>> basis;
  for (std::size_t free = 0; free < ncols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rat> v(ncols, Rat(0));
    v[free] = 1;
    for (std::size_t r2 = 0; r2 < pivots.size(); ++r2)
      v[pivots[r2]] = -m(r2, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Signature of the crossing form omega(v, Adot w) restricted to the kernel.
inline long long crossing_signature(std::size_t n,
                                    const std::vector<std::vector<Rat>>& kernel,
                                    const QMat& adot) {
  std::size_t k = kernel.size();
  QMat form(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      auto aw = adot.apply(kernel[j]);
      auto av = adot.apply(kernel[i]);
      form(i, j) = (symplectic_pairing(n, kernel[i], aw) +
                    symplectic_pairing(n, kernel[j], av)) /
                   2;
    }
  return signature(form);
}

inline IndexResult sampled_index(const SampledPath& path, const Rat& tol) {
  IndexResult r;
  r.method = "sampled";
  const auto& ss = path.samples;
  if (ss.size() < 2) throw std::invalid_argument("need at least two samples");
  std::size_t n = path.half_dim;
  QMat id = QMat::identity(2 * n);

  for (std::size_t i = 0; i + 1 < ss.size(); ++i)
    if (!(ss[i].first < ss[i + 1].first))
      throw std::invalid_argument("sample parameters must strictly increase");
  for (const auto& [t, m] : ss)
    if (!is_symplectic(m, tol))
      throw std::invalid_argument("sample at t=" + to_string(t) +
                                  " is not symplectic within tolerance");

  std::vector<bool> crossing_at(ss.size(), false);
  for (std::size_t i = 0; i < ss.size(); ++i) {
    auto ker = kernel_basis_tol(ss[i].second - id, tol);
    if (ker.empty()) continue;
    crossing_at[i] = true;
    if (i > 0 && crossing_at[i - 1])
      throw DegenerateCrossingError(
          "kernel persists across adjacent samples near t=" +
          to_string(ss[i].first) + "; refine the sampling");
    QMat adot = i == 0 ? (ss[1].second - ss[0].second) *
                             (Rat(1) / (ss[1].first - ss[0].first))
                : i + 1 == ss.size()
                    ? (ss[i].second - ss[i - 1].second) *
                          (Rat(1) / (ss[i].first - ss[i - 1].first))
                    : (ss[i + 1].second - ss[i - 1].second) *
                          (Rat(1) / (ss[i + 1].first - ss[i - 1].first));
    long long sig = crossing_signature(n, ker, adot);
    bool endpoint = i == 0 || i + 1 == ss.size();
    add_crossing(r, ss[i].first, Half(endpoint ? sig : 2 * sig));
  }

  // sign changes of det(A_t - id) between kernel-free nodes indicate a missed
  // crossing: isolate by bisection on the linear interpolant, then evaluate
  // the crossing form at the isolated parameter
  for (std::size_t i = 0; i + 1 < ss.size(); ++i) {
    if (crossing_at[i] || crossing_at[i + 1]) continue;
    Rat d0 = determinant(ss[i].second - id);
    Rat d1 = determinant(ss[i + 1].second - id);
    if (sign_of(d0) == sign_of(d1)) continue;
    Rat a = ss[i].first, b = ss[i + 1].first;
    QMat ma = ss[i].second, mb = ss[i + 1].second;
    QMat adot = (mb - ma) * (Rat(1) / (b - a));
    Rat lo = a, hi = b;
    for (int step = 0; step < 60; ++step) {
      Rat mid = (lo + hi) / 2;
      Rat lam = (mid - a) / (b - a);
      QMat mm = ma * (Rat(1) - lam) + mb * lam;
      Rat dm = determinant(mm - id);
      if (dm == 0) {
        lo = hi = mid;
        break;
      }
      if (sign_of(dm) == sign_of(d0))
        lo = mid;
      else
        hi = mid;
    }
    Rat tstar = (lo + hi) / 2;
    Rat lam = (tstar - a) / (b - a);
    QMat mm = ma * (Rat(1) - lam) + mb * lam;
    auto ker = kernel_basis_tol(mm - id, tol);
    if (ker.empty())
      throw DegenerateCrossingError(
          "crossing between samples could not be isolated near t=" +
          to_string(tstar) + "; refine the sampling");
    long long sig = crossing_signature(n, ker, adot);
    add_crossing(r, tstar, Half(2 * sig));
  }
  return r;
}

}  // namespace detail

/// Conley-Zehnder index via crossing forms; exact for symbolic paths.
inline IndexResult cz_index(const SymplecticPath& path,
                            const Rat& tol = Rat(1, 1000000000)) {
  if (const auto* p = std::get_if<PathPtr>(&path.rep))
    return detail::symbolic_index(**p);
  return detail::sampled_index(std::get<SampledPath>(path.rep), tol);
}

/// Orbit grading |gamma| = n - CZ(gamma).
inline Half orbit_index(const SymplecticPath& path, long long n,
                        const Rat& tol = Rat(1, 1000000000)) {
  if (static_cast<long long>(path.half_dim()) != n)
    throw std::invalid_argument("half-dimension mismatch");
  return Half::whole(n) - cz_index(path, tol).value;
}

/// Index of a path fixing a Lagrangian: half the signature difference.
inline Half lagrangian_pair_index(const QMat& b0, const QMat& b1) {
  require_symmetric(b0);
  require_symmetric(b1);
  if (b0.rows() != b1.rows())
    throw std::invalid_argument("endpoint blocks differ in size");
  return Half(signature(b1) - signature(b0));
}

/// Total index of the toric Reeb-orbit model: twice the weighted multiplicity
/// sum plus the index of the Lagrangian-fixing remainder path.
inline Half reeb_model_index(const std::vector<long long>& a,
                             const std::vector<long long>& d,
                             const SymplecticPath& w) {
  if (a.size() != d.size())
    throw std::invalid_argument("discrepancy and multiplicity lists differ");
  long long twice = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0) throw std::invalid_argument("discrepancies must be >= 0");
    if (d[i] >= 0) throw std::invalid_argument("multiplicities must be negative");
    twice += 4 * (a[i] + 1) * d[i];
  }
  return Half(twice) + cz_index(w).value;
}

/// Gap between the index of an orbit in the cylinder and its Reeb projection:
/// the radial factor contributes the 2x2 shear with slope f''.
inline Half fiber_vs_reeb_gap(const Rat& f_second_derivative,
                              const SymplecticPath& base) {
  QMat s1(1, 1);
  s1(0, 0) = f_second_derivative;
  auto shear = make_shear_segment(false, QMat(1, 1), s1);
  const auto* bp = std::get_if<PathPtr>(&base.rep);
  if (!bp) throw std::invalid_argument("base path must be symbolic");
  Half with = cz_index(symbolic(make_direct_sum(*bp, shear))).value;
  Half without = cz_index(base).value;
  Half gap = with - without;
  if (gap.twice < -1 || gap.twice > 1)
    throw std::logic_error("fiber gap outside {-1/2, 0, 1/2}");
  return gap;
}

// --- index-bounded families -----------------------------------------------------

/// Combinatorial model of a Reeb orbit family near a normal-crossing divisor:
/// orbits are indexed by negative multiplicity vectors d, with
/// length(d) = sum c_i (-d_i) and index(d) = n - (2 sum (a_i+1) d_i + w(d)).
struct OrbitFamilySpec {
  std::size_t l = 0;
  std::vector<long long> a;           // discrepancies, >= 0
  std::vector<Rat> c;                 // positive length coefficients
  long long n = 0;                    // ambient half-dimension
  std::function<Half(const std::vector<long long>&)> w;  // bounded remainder
};

struct IndexBoundedResult {
  bool bounded = false;
  std::optional<Rat> mu;  // length bound witness
};

inline IndexBoundedResult index_bounded_check(const OrbitFamilySpec& spec,
                                              long long m,
                                              long long search_bound) {
  for (auto ai : spec.a)
    if (ai + 1 <= 0) throw std::invalid_argument("discrepancy a_i + 1 <= 0");
  for (const auto& ci : spec.c)
    if (ci <= 0) throw std::invalid_argument("length coefficients must be > 0");
  if (spec.a.size() != spec.l || spec.c.size() != spec.l)
    throw std::invalid_argument("family shape mismatch");
  if (spec.l == 0) return {true, Rat(1)};

  long long min_a1 = spec.a[0] + 1;
  for (auto ai : spec.a) min_a1 = std::min(min_a1, ai + 1);
  // honest families satisfy index(d) >= n + 2 min(a+1) T - (2n-2); beyond
  // t_analytic the window [-m, m] must be empty
  long long t_analytic =
      std::max<long long>(0, (m + spec.n - 2) / (2 * min_a1) + 1);
  long long t_max = t_analytic + search_bound;

  std::optional<Rat> min_length, max_in_window;
  bool dishonest = false;

  std::vector<long long> d(spec.l, -1);
  std::function<void(std::size_t, long long)> rec = [&](std::size_t pos,
                                                        long long rest) {
    if (pos + 1 == spec.l) {
      d[pos] = -(rest);
      Half idx = Half::whole(spec.n);
      long long twice = 0;
      Rat len(0);
      for (std::size_t i = 0; i < spec.l; ++i) {
        twice += 4 * (spec.a[i] + 1) * d[i];
        len += spec.c[i] * Rat(-d[i]);
      }
      idx = idx - (Half(twice) + spec.w(d));
      if (!min_length || len < *min_length) min_length = len;
      if (Half(-2 * m) <= idx && idx <= Half(2 * m)) {
        long long total = 0;
        for (auto di : d) total += -di;
        if (total > t_analytic) dishonest = true;
        if (!max_in_window || *max_in_window < len) max_in_window = len;
      }
      return;
    }
    for (long long take = 1; take <= rest - static_cast<long long>(spec.l - pos - 1);
         ++take) {
      d[pos] = -take;
      rec(pos + 1, rest - take);
    }
  };
  for (long long total = static_cast<long long>(spec.l); total <= t_max; ++total)
    rec(0, total);

  if (dishonest) return {false, std::nullopt};
  if (!max_in_window) return {true, min_length ? *min_length : Rat(1)};
  return {true, *max_in_window + 1};
}

}  // namespace floerlib

#endif
