#ifndef FLOERLIB_SYSTEMS_HPP
#define FLOERLIB_SYSTEMS_HPP

#include "floerlib/check.hpp"
#include "floerlib/linalg.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace floerlib {

enum class CoefKind { Q, Z };

/// Graded module presented by per-degree free ranks; over Z an additional
/// Smith-reduced torsion list per degree.
struct GradedModule {
  CoefKind coef = CoefKind::Q;
  std::map<int, long long> ranks;
  std::map<int, std::vector<Int>> torsion;

  long long rank_at(int d) const {
    auto it = ranks.find(d);
    return it == ranks.end() ? 0 : it->second;
  }

  bool operator==(const GradedModule& o) const {
    return coef == o.coef && ranks == o.ranks && torsion == o.torsion;
  }
};

using DegreeRanks = std::map<int, long long>;
using DegreeMats = std::map<int, QMat>;

inline long long rank_at(const DegreeRanks& r, int d) {
  auto it = r.find(d);
  return it == r.end() ? 0 : it->second;
}

inline QMat mat_at(const DegreeMats& m, int d, long long rows, long long cols) {
  auto it = m.find(d);
  if (it != m.end()) {
    if (it->second.rows() != static_cast<std::size_t>(rows) ||
        it->second.cols() != static_cast<std::size_t>(cols))
      throw std::invalid_argument("arrow matrix has wrong shape");
    return it->second;
  }
  return QMat(rows, cols);
}

// --- finite posets -------------------------------------------------------------

/// Finite poset given by its full relation; directedness certificates are
/// checked on construction.
class FinitePoset {
 public:
  FinitePoset() = default;
  FinitePoset(std::size_t n, std::vector<std::pair<int, int>> relations)
      : n_(n), leq_(n, std::vector<bool>(n, false)) {
    for (std::size_t i = 0; i < n; ++i) leq_[i][i] = true;
    for (auto [a, b] : relations) leq_[a][b] = true;
    // transitive closure
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (leq_[i][k] && leq_[k][j]) leq_[i][j] = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (leq_[i][j] && leq_[j][i])
          throw std::invalid_argument("relation has a nontrivial cycle");
  }

  static FinitePoset chain(std::size_t n) {
    std::vector<std::pair<int, int>> rel;
    for (std::size_t i = 0; i + 1 < n; ++i) rel.emplace_back(i, i + 1);
    return FinitePoset(n, rel);
  }

  std::size_t size() const { return n_; }
  bool leq(int a, int b) const { return leq_[a][b]; }

  bool is_directed() const {
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b)
        if (!upper_bound(a, b)) return false;
    return true;
  }

  bool is_inverse_directed() const {
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b)
        if (!lower_bound(a, b)) return false;
    return true;
  }

  std::optional<int> upper_bound(int a, int b) const {
    for (std::size_t c = 0; c < n_; ++c)
      if (leq_[a][c] && leq_[b][c]) return static_cast<int>(c);
    return std::nullopt;
  }

  std::optional<int> lower_bound(int a, int b) const {
    for (std::size_t c = 0; c < n_; ++c)
      if (leq_[c][a] && leq_[c][b]) return static_cast<int>(c);
    return std::nullopt;
  }

  /// Covering relations a < b with nothing strictly between.
  std::vector<std::pair<int, int>> covers() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b) {
        if (a == b || !leq_[a][b]) continue;
        bool direct = true;
        for (std::size_t c = 0; c < n_ && direct; ++c)
          if (c != a && c != b && leq_[a][c] && leq_[c][b]) direct = false;
        if (direct) out.emplace_back(a, b);
      }
    return out;
  }

  /// Is sub (by index set) cofinal: every element bounded above by a member?
  bool cofinal_above(const std::set<int>& sub) const {
    for (std::size_t a = 0; a < n_; ++a) {
      bool ok = false;
      for (int s : sub)
        if (leq_[a][s]) ok = true;
      if (!ok) return false;
    }
    return true;
  }

  /// Dual cofinality: every element bounded below by a member.
  bool cofinal_below(const std::set<int>& sub) const {
    for (std::size_t a = 0; a < n_; ++a) {
      bool ok = false;
      for (int s : sub)
        if (leq_[s][a]) ok = true;
      if (!ok) return false;
    }
    return true;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<bool>> leq_;
};

// --- double systems over finite index posets -------------------------------------

struct StageKey {
  int i = 0, k = 0;
  bool operator<(const StageKey& o) const {
    return i != o.i ? i < o.i : k < o.k;
  }
  bool operator==(const StageKey& o) const { return i == o.i && k == o.k; }
};

struct FunctorialityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Functor from I x K (I directed, K inverse directed, both finite) to free
/// graded modules, with arrows given on covering relations of the product
/// order and validated to commute.
class DoubleSystem {
 public:
  CoefKind coef = CoefKind::Q;
  FinitePoset I, K;
  std::map<StageKey, DegreeRanks> stages;
  // arrows on product covers: ((i,k),(i',k')) with exactly one coordinate a
  // cover and the other fixed
  std::map<std::pair<StageKey, StageKey>, DegreeMats> cover_arrows;

  const DegreeRanks& stage(StageKey s) const {
    auto it = stages.find(s);
    if (it == stages.end()) throw std::invalid_argument("missing stage");
    return it->second;
  }

  std::set<int> degrees() const {
    std::set<int> ds;
    for (const auto& [s, r] : stages)
      for (const auto& [d, rk] : r) ds.insert(d);
    return ds;
  }

  /// Composite arrow along any covering chain (path independence is validated
  /// at construction).
  QMat arrow(StageKey from, StageKey to, int degree) const {
    if (!(I.leq(from.i, to.i) && K.leq(from.k, to.k)))
      throw std::invalid_argument("no arrow between unrelated stages");
    if (from == to)
      return QMat::identity(rank_at(stage(from), degree));
    // walk: raise i along covers, then k
    auto step = [&](StageKey cur, StageKey goal) -> std::optional<StageKey> {
      for (const auto& [pr, m] : cover_arrows) {
        if (!(pr.first == cur)) continue;
        StageKey nxt = pr.second;
        if (I.leq(nxt.i, goal.i) && K.leq(nxt.k, goal.k)) return nxt;
      }
      return std::nullopt;
    };
    QMat acc = QMat::identity(rank_at(stage(from), degree));
    StageKey cur = from;
    while (!(cur == to)) {
      auto nxt = step(cur, to);
      if (!nxt)
        throw std::invalid_argument("no covering path between stages");
      auto it = cover_arrows.find({cur, *nxt});
      QMat m = mat_at(it->second, degree, rank_at(stage(*nxt), degree),
                      rank_at(stage(cur), degree));
      acc = m * acc;
      cur = *nxt;
    }
    return acc;
  }
};

/// Build and validate a double system: shapes consistent, and all
/// cover-square composites commute. Reports the offending square.
inline DoubleSystem make_double_system(
    CoefKind coef, FinitePoset i_poset, FinitePoset k_poset,
    std::map<StageKey, DegreeRanks> stages,
    std::map<std::pair<StageKey, StageKey>, DegreeMats> cover_arrows) {
  if (!i_poset.is_directed())
    throw std::invalid_argument("I-direction is not directed");
  if (!k_poset.is_inverse_directed())
    throw std::invalid_argument("K-direction is not inverse directed");
  DoubleSystem w;
  w.coef = coef;
  w.I = i_poset;
  w.K = k_poset;
  w.stages = std::move(stages);
  w.cover_arrows = std::move(cover_arrows);
  for (std::size_t i = 0; i < w.I.size(); ++i)
    for (std::size_t k = 0; k < w.K.size(); ++k)
      if (!w.stages.count({static_cast<int>(i), static_cast<int>(k)}))
        throw std::invalid_argument("missing stage (" + std::to_string(i) +
                                    "," + std::to_string(k) + ")");
  // shape check on declared arrows
  for (const auto& [pr, mats] : w.cover_arrows) {
    const auto& src = w.stage(pr.first);
    const auto& dst = w.stage(pr.second);
    for (const auto& [d, m] : mats)
      if (m.rows() != static_cast<std::size_t>(rank_at(dst, d)) ||
          m.cols() != static_cast<std::size_t>(rank_at(src, d)))
        throw std::invalid_argument("arrow matrix shape mismatch");
  }
  // missing cover arrows mean zero maps; materialize them so composition can
  // walk any covering path
  for (auto [i0, i1] : w.I.covers())
    for (std::size_t k = 0; k < w.K.size(); ++k) {
      std::pair<StageKey, StageKey> key{{i0, static_cast<int>(k)},
                                        {i1, static_cast<int>(k)}};
      if (!w.cover_arrows.count(key)) w.cover_arrows[key] = {};
    }
  for (auto [k0, k1] : w.K.covers())
    for (std::size_t i = 0; i < w.I.size(); ++i) {
      std::pair<StageKey, StageKey> key{{static_cast<int>(i), k0},
                                        {static_cast<int>(i), k1}};
      if (!w.cover_arrows.count(key)) w.cover_arrows[key] = {};
    }
  // commuting squares: for each pair of product covers (i-step then k-step)
  auto icovs = w.I.covers();
  auto kcovs = w.K.covers();
  auto degs = w.degrees();
  for (auto [i0, i1] : icovs)
    for (auto [k0, k1] : kcovs) {
      StageKey a{i0, k0}, b{i1, k0}, c{i0, k1}, d{i1, k1};
      for (int deg : degs) {
        auto ab = w.cover_arrows.count({a, b})
                      ? mat_at(w.cover_arrows.at({a, b}), deg,
                               rank_at(w.stage(b), deg), rank_at(w.stage(a), deg))
                      : QMat(rank_at(w.stage(b), deg), rank_at(w.stage(a), deg));
        auto bd = w.cover_arrows.count({b, d})
                      ? mat_at(w.cover_arrows.at({b, d}), deg,
                               rank_at(w.stage(d), deg), rank_at(w.stage(b), deg))
                      : QMat(rank_at(w.stage(d), deg), rank_at(w.stage(b), deg));
        auto ac = w.cover_arrows.count({a, c})
                      ? mat_at(w.cover_arrows.at({a, c}), deg,
                               rank_at(w.stage(c), deg), rank_at(w.stage(a), deg))
                      : QMat(rank_at(w.stage(c), deg), rank_at(w.stage(a), deg));
        auto cd = w.cover_arrows.count({c, d})
                      ? mat_at(w.cover_arrows.at({c, d}), deg,
                               rank_at(w.stage(d), deg), rank_at(w.stage(c), deg))
                      : QMat(rank_at(w.stage(d), deg), rank_at(w.stage(c), deg));
        if (!(bd * ab == cd * ac))
          throw FunctorialityError(
              "square ((" + std::to_string(i0) + "," + std::to_string(k0) +
              ")->(" + std::to_string(i1) + "," + std::to_string(k1) +
              ")) fails to commute in degree " + std::to_string(deg));
      }
    }
  return w;
}

/// The trivial one-point system with stage R in degree 0.
inline DoubleSystem trivial_double_system(CoefKind coef) {
  std::map<StageKey, DegreeRanks> st;
  st[{0, 0}] = DegreeRanks{{0, 1}};
  return make_double_system(coef, FinitePoset::chain(1), FinitePoset::chain(1),
                            std::move(st), {});
}

// --- limits over finite diagrams ---------------------------------------------------

namespace detail_sys {

/// Quotient map q : Q^dim -> Q^(dim - rank U) with kernel exactly span(U).
inline QMat quotient_map(const std::vector<std::vector<Rat>>& u_vectors,
                         std::size_t dim) {
  std::vector<std::vector<Rat>> cols;  // U basis, then completing unit vectors
  auto try_add = [&](const std::vector<Rat>& v) {
    QMat test(dim, cols.size() + 1);
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (std::size_t i = 0; i < dim; ++i) test(i, j) = cols[j][i];
    for (std::size_t i = 0; i < dim; ++i) test(i, cols.size()) = v[i];
    if (rank(test) == cols.size() + 1) {
      cols.push_back(v);
      return true;
    }
    return false;
  };
  for (const auto& v : u_vectors) try_add(v);
  std::size_t ucount = cols.size();
  std::vector<std::size_t> added;
  for (std::size_t j = 0; j < dim && cols.size() < dim; ++j) {
    std::vector<Rat> e(dim, Rat(0));
    e[j] = 1;
    if (try_add(e)) added.push_back(j);
  }
  QMat basis(dim, dim);
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t i = 0; i < dim; ++i) basis(i, j) = cols[j][i];
  QMat inv = *inverse(basis);
  QMat q(added.size(), dim);
  for (std::size_t r = 0; r < added.size(); ++r)
    for (std::size_t c = 0; c < dim; ++c) q(r, c) = inv(ucount + r, c);
  return q;
}

}  // namespace detail_sys

/// Direct limit of a directed finite diagram: cokernel of the difference map
/// over covering relations. Returns the module and (over Q) the canonical
/// maps from each stage.
struct FiniteColimit {
  GradedModule module;
  // over Q: per degree, per stage index, the map stage -> colimit
  std::map<int, std::vector<QMat>> stage_maps;
};

inline FiniteColimit direct_limit(CoefKind coef, const FinitePoset& poset,
                                  const std::vector<DegreeRanks>& stages,
                                  const std::map<std::pair<int, int>, DegreeMats>& cover_arrows) {
  if (!poset.is_directed())
    throw std::invalid_argument("diagram is not directed");
  FiniteColimit out;
  out.module.coef = coef;
  std::set<int> degs;
  for (const auto& s : stages)
    for (const auto& [d, r] : s) degs.insert(d);
  auto covers = poset.covers();
  for (int d : degs) {
    std::vector<long long> offs(stages.size() + 1, 0);
    for (std::size_t i = 0; i < stages.size(); ++i)
      offs[i + 1] = offs[i] + rank_at(stages[i], d);
    long long total = offs.back();
    // relation columns: inc_j(f(e)) - inc_i(e) for each cover (i,j)
    std::vector<std::vector<Rat>> rel;
    for (auto [i, j] : covers) {
      auto it = cover_arrows.find({i, j});
      QMat f = it != cover_arrows.end()
                   ? mat_at(it->second, d, rank_at(stages[j], d),
                            rank_at(stages[i], d))
                   : QMat(rank_at(stages[j], d), rank_at(stages[i], d));
      for (long long c = 0; c < rank_at(stages[i], d); ++c) {
        std::vector<Rat> v(total, Rat(0));
        v[offs[i] + c] -= 1;
        for (std::size_t r = 0; r < f.rows(); ++r)
          v[offs[j] + r] += f(r, c);
        rel.push_back(std::move(v));
      }
    }
    if (coef == CoefKind::Q) {
      QMat q = detail_sys::quotient_map(rel, total);
      out.module.ranks[d] = q.rows();
      std::vector<QMat> maps;
      for (std::size_t i = 0; i < stages.size(); ++i) {
        QMat m(q.rows(), rank_at(stages[i], d));
        for (std::size_t r = 0; r < q.rows(); ++r)
          for (long long c = 0; c < rank_at(stages[i], d); ++c)
            m(r, c) = q(r, offs[i] + c);
        maps.push_back(std::move(m));
      }
      out.stage_maps[d] = std::move(maps);
      if (out.module.ranks[d] == 0) out.module.ranks.erase(d);
    } else {
      QMat relm(total, rel.size());
      for (std::size_t c = 0; c < rel.size(); ++c)
        for (long long r = 0; r < total; ++r) relm(r, c) = rel[c][r];
      auto divs = smith_diagonal(clear_denominators(relm));
      long long rk = total - static_cast<long long>(divs.size());
      if (rk) out.module.ranks[d] = rk;
      std::vector<Int> tor;
      for (const auto& v : divs)
        if (v != 1) tor.push_back(v);
      if (!tor.empty()) out.module.torsion[d] = tor;
    }
  }
  return out;
}

// --- banded towers -------------------------------------------------------------

/// Inverse tower of free graded modules over N, banded: an explicit prefix
/// followed by one repeating stage and map. maps[j] sends stage(j+1) to
/// stage(j); stage(j) = prefix[j] for j < prefix.size(), else the band stage.
struct BandedTower {
  CoefKind coef = CoefKind::Q;
  std::vector<DegreeRanks> prefix;
  DegreeRanks band;
  std::vector<DegreeMats> maps;  // size = prefix.size()
  DegreeMats band_map;

  const DegreeRanks& stage(std::size_t j) const {
    return j < prefix.size() ? prefix[j] : band;
  }

  std::set<int> degrees() const {
    std::set<int> ds;
    for (const auto& s : prefix)
      for (const auto& [d, r] : s) ds.insert(d);
    for (const auto& [d, r] : band) ds.insert(d);
    return ds;
  }

  void validate() const {
    if (maps.size() != prefix.size())
      throw std::invalid_argument("banded tower needs one map per prefix stage");
    for (int d : degrees()) {
      for (std::size_t j = 0; j < maps.size(); ++j)
        mat_at(maps[j], d, rank_at(stage(j), d), rank_at(stage(j + 1), d));
      mat_at(band_map, d, rank_at(band, d), rank_at(band, d));
    }
  }
};

namespace detail_sys {

/// Column-space lattice basis of an integer matrix.
inline std::vector<std::vector<Int>> image_lattice(const ZMat& m) {
  std::vector<std::vector<Int>> cols;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    std::vector<Int> v(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) v[r] = m(r, c);
    cols.push_back(std::move(v));
  }
  return lattice_row_basis(std::move(cols));
}

inline ZMat zmat_mul(const ZMat& a, const ZMat& b) {
  ZMat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

/// Number of unit invariant factors of pi^k, stabilized. For an integer
/// matrix this equals the rank of the largest sublattice on which pi acts
/// bijectively, which is the rank of the inverse limit of the repeating
/// tower.
inline long long stable_unimodular_rank(const QMat& pi_q) {
  if (pi_q.rows() == 0) return 0;
  ZMat pi = clear_denominators(pi_q);  // integral by assumption
  std::size_t n = pi.rows();
  ZMat pw = pi;
  long long count = static_cast<long long>(n), stable_for = 0;
  for (std::size_t k = 1; k <= 8 * n + 16 && stable_for < static_cast<long long>(n) + 2; ++k) {
    auto divs = smith_diagonal(pw);
    long long units = 0;
    for (const auto& v : divs)
      if (v == 1) ++units;
    if (units == count)
      ++stable_for;
    else {
      count = units;
      stable_for = 0;
    }
    pw = zmat_mul(pw, pi);
  }
  return count;
}

inline long long stable_image_rank(const QMat& pi) {
  if (pi.rows() == 0) return 0;
  QMat pw = pi;
  std::size_t n = pi.rows();
  for (std::size_t k = 1; k < n; ++k) pw = pw * pi;
  return static_cast<long long>(rank(pw));
}

}  // namespace detail_sys

/// Inverse limit of a banded tower: the prefix is cofinally irrelevant; over
/// a field the limit is the stable image of the repeating map, over Z the
/// largest sublattice on which the repeating map is bijective.
inline GradedModule inverse_limit_tower(const BandedTower& t) {
  t.validate();
  GradedModule out;
  out.coef = t.coef;
  for (int d : t.degrees()) {
    long long n = rank_at(t.band, d);
    QMat pi = mat_at(t.band_map, d, n, n);
    long long r = t.coef == CoefKind::Q
                      ? detail_sys::stable_image_rank(pi)
                      : detail_sys::stable_unimodular_rank(pi);
    if (r) out.ranks[d] = r;
  }
  return out;
}

/// Direct limit of a banded directed tower (maps point up). Over a field the
/// stable image; over Z only defined when the repeating map eventually maps
/// its image isomorphically (otherwise the colimit is not finitely
/// generated).
inline GradedModule direct_limit_banded(const BandedTower& t) {
  t.validate();
  GradedModule out;
  out.coef = t.coef;
  for (int d : t.degrees()) {
    long long n = rank_at(t.band, d);
    QMat pi = mat_at(t.band_map, d, n, n);
    if (t.coef == CoefKind::Q) {
      long long r = detail_sys::stable_image_rank(pi);
      if (r) out.ranks[d] = r;
    } else {
      ZMat pz = clear_denominators(pi);
      std::size_t nn = pz.rows();
      ZMat pw = pz;
      for (std::size_t k = 1; k < std::max<std::size_t>(nn, 1); ++k)
        pw = detail_sys::zmat_mul(pw, pz);
      auto l0 = detail_sys::image_lattice(pw);
      auto l1 = detail_sys::image_lattice(detail_sys::zmat_mul(pw, pz));
      if (!(l0 == l1))
        throw std::invalid_argument(
            "banded direct limit is not finitely generated over Z");
      long long r = static_cast<long long>(l0.size());
      if (r) out.ranks[d] = r;
    }
  }
  return out;
}

struct Lim1Result {
  bool is_zero = true;
  std::string witness;  // set when nonzero
};

/// First derived inverse limit of a banded tower over a PID, via image
/// stabilization: for towers of finitely generated modules lim^1 vanishes
/// exactly when the images eventually stabilize (Mittag-Leffler).
inline Lim1Result lim1_tower(const BandedTower& t) {
  t.validate();
  if (t.coef == CoefKind::Q) return {true, ""};  // f.d. images always stabilize
  Lim1Result res;
  for (int d : t.degrees()) {
    long long n = rank_at(t.band, d);
    QMat piq = mat_at(t.band_map, d, n, n);
    ZMat pi = clear_denominators(piq);
    ZMat pw = pi;
    bool stabilized = false;
    auto prev = detail_sys::image_lattice(pw);
    for (long long k = 1; k <= 4 * n + 8; ++k) {
      pw = detail_sys::zmat_mul(pw, pi);
      auto cur = detail_sys::image_lattice(pw);
      if (cur == prev) {
        stabilized = true;
        break;
      }
      prev = std::move(cur);
    }
    if (stabilized) continue;
    res.is_zero = false;
    std::ostringstream w;
    w << "degree " << d << ": images of the repeating map strictly descend";
    if (n == 1) {
      // explicit non-image target for the scalar tower x -> a x: the periodic
      // sequence (1,0,1,0,...) forces x_0 = 1/(1-a^2), not an integer
      Rat a = piq(0, 0);
      Rat forced = Rat(1) / (Rat(1) - a * a);
      w << "; witness target (1,0,1,0,...): any preimage forces x_0 = "
        << to_string(forced) << ", not an integer";
    }
    res.witness = w.str();
  }
  return res;
}

// --- double systems with a tower direction ----------------------------------------

/// K-direction arrows at slice i of a finite-I, banded-K system.
struct TowerSliceSystem {
  CoefKind coef = CoefKind::Q;
  FinitePoset I;
  std::vector<BandedTower> slices;                    // one tower per i
  std::map<std::pair<int, int>, DegreeMats> i_arrows; // at the band stage
};

/// Mittag-Leffler style test: true iff for a cofinal set of i the
/// K-direction arrows at i are surjective along a cofinal tail of the tower.
/// For a banded tower the tail arrows are powers of the repeating map, so
/// only the band matters; true forces lim lim^1 = 0.
inline bool mittag_leffler_check(const TowerSliceSystem& w) {
  std::set<int> good;
  for (std::size_t i = 0; i < w.slices.size(); ++i) {
    const auto& t = w.slices[i];
    bool band_surj = true;
    for (int d : t.degrees()) {
      long long n = rank_at(t.band, d);
      QMat bm = mat_at(t.band_map, d, n, n);
      if (rank(bm) != bm.rows()) {
        band_surj = false;
        break;
      }
    }
    if (band_surj) good.insert(static_cast<int>(i));
  }
  return w.I.cofinal_above(good);
}

// --- lim invlim over finite diagrams ------------------------------------------------

/// lim invlim of a finite double system, with enough bookkeeping to induce
/// maps from morphisms (over Q).
struct LimInvLim {
  GradedModule module;
  std::set<int> degs;
  // per degree: thread basis per i (columns, in sum-over-k coordinates) and
  // the projection from i-thread coordinates to colimit coordinates
  std::map<int, std::vector<QMat>> threads;
  std::map<int, std::vector<QMat>> proj;
};

inline LimInvLim lim_invlim(const DoubleSystem& w) {
  LimInvLim out;
  out.module.coef = w.coef;
  out.degs = w.degrees();
  auto kcovs = w.K.covers();
  for (int d : out.degs) {
    std::size_t nk = w.K.size(), ni = w.I.size();
    // thread space per i: kernel of the difference map over K-covers
    std::vector<QMat> thr(ni);
    for (std::size_t i = 0; i < ni; ++i) {
      std::vector<long long> offs(nk + 1, 0);
      for (std::size_t k = 0; k < nk; ++k)
        offs[k + 1] =
            offs[k] + rank_at(w.stage({static_cast<int>(i), static_cast<int>(k)}), d);
      long long total = offs.back();
      std::vector<std::vector<Rat>> rows;
      for (auto [k0, k1] : kcovs) {
        QMat f = w.arrow({static_cast<int>(i), k0}, {static_cast<int>(i), k1}, d);
        long long r1 = rank_at(w.stage({static_cast<int>(i), k1}), d);
        for (long long r = 0; r < r1; ++r) {
          std::vector<Rat> row(total, Rat(0));
          for (std::size_t c = 0; c < f.cols(); ++c) row[offs[k0] + c] += f(r, c);
          row[offs[k1] + r] -= 1;
          rows.push_back(std::move(row));
        }
      }
      QMat relm(rows.size(), total);
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (long long c = 0; c < total; ++c) relm(r, c) = rows[r][c];
      auto ker = kernel_basis(relm);
      QMat basis(total, ker.size());
      for (std::size_t c = 0; c < ker.size(); ++c)
        for (long long r = 0; r < total; ++r) basis(r, c) = ker[c][r];
      thr[i] = basis;
    }

    // colimit of thread spaces along I
    std::vector<DegreeRanks> tstages(ni);
    std::map<std::pair<int, int>, DegreeMats> tarrows;
    for (std::size_t i = 0; i < ni; ++i) tstages[i][0] = thr[i].cols();
    for (auto [i0, i1] : w.I.covers()) {
      // map a thread at i0 by applying the componentwise arrows, then solve
      // for its coordinates in the i1 thread basis
      std::vector<long long> offs0(nk + 1, 0), offs1(nk + 1, 0);
      for (std::size_t k = 0; k < nk; ++k) {
        offs0[k + 1] = offs0[k] + rank_at(w.stage({i0, static_cast<int>(k)}), d);
        offs1[k + 1] = offs1[k] + rank_at(w.stage({i1, static_cast<int>(k)}), d);
      }
      QMat f(thr[i1].cols(), thr[i0].cols());
      for (std::size_t c = 0; c < thr[i0].cols(); ++c) {
        std::vector<Rat> img(offs1.back(), Rat(0));
        for (std::size_t k = 0; k < nk; ++k) {
          QMat a = w.arrow({i0, static_cast<int>(k)}, {i1, static_cast<int>(k)}, d);
          for (std::size_t r = 0; r < a.rows(); ++r) {
            Rat acc(0);
            for (std::size_t cc = 0; cc < a.cols(); ++cc)
              acc += a(r, cc) * thr[i0](offs0[k] + cc, c);
            img[offs1[k] + r] = acc;
          }
        }
        auto sol = solve(thr[i1], img);
        if (!sol)
          throw std::logic_error("thread image missed the target thread space");
        for (std::size_t r = 0; r < thr[i1].cols(); ++r) f(r, c) = (*sol)[r];
      }
      tarrows[{i0, i1}][0] = f;
    }
    auto colim = direct_limit(w.coef, w.I, tstages, tarrows);
    long long rk = colim.module.rank_at(0);
    if (rk) out.module.ranks[d] = rk;
    if (colim.module.torsion.count(0))
      out.module.torsion[d] = colim.module.torsion.at(0);
    out.threads[d] = thr;
    if (w.coef == CoefKind::Q) out.proj[d] = colim.stage_maps.at(0);
  }
  return out;
}

// --- morphisms -----------------------------------------------------------------------

/// Natural-transformation presentation of a morphism of double systems:
/// index functors F : K1 -> K0, G : I0 -> I1 and per-object matrices
/// phi[(i,k)] : W0(i, F(k)) -> W1(G(i), k).
struct SystemMorphism {
  const DoubleSystem* src = nullptr;
  const DoubleSystem* dst = nullptr;
  std::vector<int> f;  // K1 -> K0
  std::vector<int> g;  // I0 -> I1
  std::map<StageKey, DegreeMats> mats;

  QMat mat(StageKey ik, int d) const {
    auto it = mats.find(ik);
    long long rows = rank_at(dst->stage({g[ik.i], ik.k}), d);
    long long cols = rank_at(src->stage({ik.i, f[ik.k]}), d);
    if (it == mats.end()) return QMat(rows, cols);
    return mat_at(it->second, d, rows, cols);
  }
};

inline void validate_morphism(const SystemMorphism& m) {
  const auto& w0 = *m.src;
  const auto& w1 = *m.dst;
  if (m.f.size() != w1.K.size() || m.g.size() != w0.I.size())
    throw std::invalid_argument("index functor size mismatch");
  for (std::size_t k = 0; k < w1.K.size(); ++k)
    for (std::size_t k2 = 0; k2 < w1.K.size(); ++k2)
      if (w1.K.leq(k, k2) && !w0.K.leq(m.f[k], m.f[k2]))
        throw std::invalid_argument("F is not order preserving");
  for (std::size_t i = 0; i < w0.I.size(); ++i)
    for (std::size_t i2 = 0; i2 < w0.I.size(); ++i2)
      if (w0.I.leq(i, i2) && !w1.I.leq(m.g[i], m.g[i2]))
        throw std::invalid_argument("G is not order preserving");
  auto degs = w0.degrees();
  for (int dd : w1.degrees()) degs.insert(dd);
  for (std::size_t i = 0; i < w0.I.size(); ++i)
    for (std::size_t i2 = 0; i2 < w0.I.size(); ++i2) {
      if (!w0.I.leq(i, i2)) continue;
      for (std::size_t k = 0; k < w1.K.size(); ++k)
        for (std::size_t k2 = 0; k2 < w1.K.size(); ++k2) {
          if (!w1.K.leq(k, k2)) continue;
          StageKey a{static_cast<int>(i), static_cast<int>(k)};
          StageKey b{static_cast<int>(i2), static_cast<int>(k2)};
          for (int d : degs) {
            QMat left = m.mat(b, d) *
                        w0.arrow({a.i, m.f[a.k]}, {b.i, m.f[b.k]}, d);
            QMat right = w1.arrow({m.g[a.i], a.k}, {m.g[b.i], b.k}, d) *
                         m.mat(a, d);
            if (!(left == right))
              throw std::invalid_argument("naturality square fails");
          }
        }
    }
}

/// Composition per the natural-transformation recipe: functors compose and
/// the matrices are phi2 at (G1(i), k) after phi1 at (i, F2(k)).
inline SystemMorphism compose(const SystemMorphism& m2,
                              const SystemMorphism& m1) {
  if (m1.dst != m2.src)
    throw std::invalid_argument("morphisms are not composable");
  SystemMorphism r;
  r.src = m1.src;
  r.dst = m2.dst;
  r.f.resize(m2.dst->K.size());
  for (std::size_t k = 0; k < r.f.size(); ++k) r.f[k] = m1.f[m2.f[k]];
  r.g.resize(m1.src->I.size());
  for (std::size_t i = 0; i < r.g.size(); ++i) r.g[i] = m2.g[m1.g[i]];
  auto degs = m1.src->degrees();
  for (std::size_t i = 0; i < r.g.size(); ++i)
    for (std::size_t k = 0; k < r.f.size(); ++k) {
      StageKey ik{static_cast<int>(i), static_cast<int>(k)};
      for (int d : degs) {
        QMat a = m1.mat({ik.i, m2.f[ik.k]}, d);
        QMat b = m2.mat({m1.g[ik.i], ik.k}, d);
        QMat c = b * a;
        if (!c.is_zero() || c.rows() * c.cols() > 0) r.mats[ik][d] = c;
      }
    }
  return r;
}

/// Morphism equality in the double-system category: compare after pushing
/// into common stages along double-system arrows.
inline bool morphisms_equal(const SystemMorphism& a, const SystemMorphism& b) {
  if (a.src != b.src || a.dst != b.dst) return false;
  const auto& w0 = *a.src;
  const auto& w1 = *a.dst;
  auto degs = w0.degrees();
  for (std::size_t i = 0; i < w0.I.size(); ++i)
    for (std::size_t k = 0; k < w1.K.size(); ++k) {
      auto klow = w0.K.lower_bound(a.f[k], b.f[k]);
      auto iup = w1.I.upper_bound(a.g[i], b.g[i]);
      if (!klow || !iup) return false;
      StageKey ik{static_cast<int>(i), static_cast<int>(k)};
      for (int d : degs) {
        QMat pa = w1.arrow({a.g[i], static_cast<int>(k)}, {*iup, static_cast<int>(k)}, d) *
                  a.mat(ik, d) *
                  w0.arrow({static_cast<int>(i), *klow}, {static_cast<int>(i), a.f[k]}, d);
        QMat pb = w1.arrow({b.g[i], static_cast<int>(k)}, {*iup, static_cast<int>(k)}, d) *
                  b.mat(ik, d) *
                  w0.arrow({static_cast<int>(i), *klow}, {static_cast<int>(i), b.f[k]}, d);
        if (!(pa == pb)) return false;
      }
    }
  return true;
}

/// Map induced on lim invlim by a morphism (Q coefficients).
inline std::map<int, QMat> induced_on_lim_invlim(const SystemMorphism& m,
                                                 const LimInvLim& l0,
                                                 const LimInvLim& l1) {
  const auto& w0 = *m.src;
  const auto& w1 = *m.dst;
  std::map<int, QMat> out;
  std::set<int> degs = l0.degs;
  for (int dd : l1.degs) degs.insert(dd);
  for (int d : degs) {
    long long dim0 = l0.module.rank_at(d), dim1 = l1.module.rank_at(d);
    QMat total(dim1, dim0);
    std::size_t nk1 = w1.K.size();
    // each i and thread basis vector yields one equation
    // total * (source colim class) = (target colim class)
    std::vector<std::vector<Rat>> lhs_cols, rhs_cols;
    for (std::size_t i = 0; i < w0.I.size(); ++i) {
      const QMat& t0 = l0.threads.at(d)[i];
      const QMat& p0 = l0.proj.at(d)[i];
      const QMat& t1 = l1.threads.at(d)[m.g[i]];
      const QMat& p1 = l1.proj.at(d)[m.g[i]];
      std::vector<long long> offs0(w0.K.size() + 1, 0), offs1(nk1 + 1, 0);
      for (std::size_t k = 0; k < w0.K.size(); ++k)
        offs0[k + 1] =
            offs0[k] + rank_at(w0.stage({static_cast<int>(i), static_cast<int>(k)}), d);
      for (std::size_t k = 0; k < nk1; ++k)
        offs1[k + 1] =
            offs1[k] + rank_at(w1.stage({m.g[i], static_cast<int>(k)}), d);
      for (std::size_t c = 0; c < t0.cols(); ++c) {
        std::vector<Rat> img(offs1.back(), Rat(0));
        for (std::size_t k = 0; k < nk1; ++k) {
          QMat phi = m.mat({static_cast<int>(i), static_cast<int>(k)}, d);
          for (std::size_t r = 0; r < phi.rows(); ++r) {
            Rat acc(0);
            for (std::size_t cc = 0; cc < phi.cols(); ++cc)
              acc += phi(r, cc) * t0(offs0[m.f[k]] + cc, c);
            img[offs1[k] + r] = acc;
          }
        }
        auto sol = solve(t1, img);
        if (!sol)
          throw std::logic_error("morphism image misses the thread space");
        std::vector<Rat> cls(dim1, Rat(0));
        for (std::size_t r = 0; r < p1.rows(); ++r)
          for (std::size_t cc = 0; cc < p1.cols(); ++cc)
            cls[r] += p1(r, cc) * (*sol)[cc];
        std::vector<Rat> scls(dim0, Rat(0));
        for (std::size_t r = 0; r < p0.rows(); ++r) scls[r] = p0(r, c);
        lhs_cols.push_back(scls);
        rhs_cols.push_back(cls);
      }
    }
    // solve T * L = Rhs for T (dim1 x dim0): transpose to L^T T^T = Rhs^T
    QMat lt(lhs_cols.size(), dim0), rt(rhs_cols.size(), dim1);
    for (std::size_t r = 0; r < lhs_cols.size(); ++r) {
      for (long long c = 0; c < dim0; ++c) lt(r, c) = lhs_cols[r][c];
      for (long long c = 0; c < dim1; ++c) rt(r, c) = rhs_cols[r][c];
    }
    for (long long col = 0; col < dim1; ++col) {
      std::vector<Rat> b(lhs_cols.size());
      for (std::size_t r = 0; r < lhs_cols.size(); ++r) b[r] = rt(r, col);
      auto sol = solve(lt, b);
      if (!sol)
        throw std::logic_error("induced map is not well defined on the colimit");
      for (long long c = 0; c < dim0; ++c) total(col, c) = (*sol)[c];
    }
    out[d] = total;
  }
  return out;
}

/// Restrict to a cofinal subsystem and return it with the inclusion morphism
/// (choice functor F with F(k) <= k).
struct CofinalRestriction {
  DoubleSystem sub;
  SystemMorphism inclusion;  // from sub into the original
  std::vector<int> i_embed, k_embed;
};

inline CofinalRestriction cofinal_restrict(const DoubleSystem& w,
                                           const std::set<int>& isub,
                                           const std::set<int>& ksub) {
  if (!w.I.cofinal_above(isub))
    throw std::invalid_argument("I-subset is not cofinal");
  if (!w.K.cofinal_below(ksub))
    throw std::invalid_argument("K-subset is not cofinal");
  CofinalRestriction out;
  out.i_embed.assign(isub.begin(), isub.end());
  out.k_embed.assign(ksub.begin(), ksub.end());
  std::vector<std::pair<int, int>> irel, krel;
  for (std::size_t a = 0; a < out.i_embed.size(); ++a)
    for (std::size_t b = 0; b < out.i_embed.size(); ++b)
      if (w.I.leq(out.i_embed[a], out.i_embed[b]))
        irel.emplace_back(a, b);
  for (std::size_t a = 0; a < out.k_embed.size(); ++a)
    for (std::size_t b = 0; b < out.k_embed.size(); ++b)
      if (w.K.leq(out.k_embed[a], out.k_embed[b]))
        krel.emplace_back(a, b);
  FinitePoset isml(out.i_embed.size(), irel), ksml(out.k_embed.size(), krel);
  std::map<StageKey, DegreeRanks> stages;
  for (std::size_t a = 0; a < out.i_embed.size(); ++a)
    for (std::size_t b = 0; b < out.k_embed.size(); ++b)
      stages[{static_cast<int>(a), static_cast<int>(b)}] =
          w.stage({out.i_embed[a], out.k_embed[b]});
  std::map<std::pair<StageKey, StageKey>, DegreeMats> arrows;
  auto degs = w.degrees();
  for (auto [a, b] : isml.covers())
    for (std::size_t k = 0; k < ksml.size(); ++k) {
      DegreeMats dm;
      for (int d : degs)
        dm[d] = w.arrow({out.i_embed[a], out.k_embed[k]},
                        {out.i_embed[b], out.k_embed[k]}, d);
      arrows[{{a, static_cast<int>(k)}, {b, static_cast<int>(k)}}] = dm;
    }
  for (auto [a, b] : ksml.covers())
    for (std::size_t i = 0; i < isml.size(); ++i) {
      DegreeMats dm;
      for (int d : degs)
        dm[d] = w.arrow({out.i_embed[i], out.k_embed[a]},
                        {out.i_embed[i], out.k_embed[b]}, d);
      arrows[{{static_cast<int>(i), a}, {static_cast<int>(i), b}}] = dm;
    }
  out.sub = make_double_system(w.coef, isml, ksml, std::move(stages),
                               std::move(arrows));

  // inclusion morphism: G embeds, F(k) picks a subsystem index below k
  SystemMorphism inc;
  inc.src = nullptr;  // caller wires pointers; matrices computed here
  inc.f.resize(w.K.size());
  for (std::size_t k = 0; k < w.K.size(); ++k) {
    int pick = -1;
    for (std::size_t b = 0; b < out.k_embed.size(); ++b)
      if (w.K.leq(out.k_embed[b], static_cast<int>(k))) pick = static_cast<int>(b);
    inc.f[k] = pick;
  }
  inc.g = std::vector<int>(out.i_embed.begin(), out.i_embed.end());
  for (std::size_t i = 0; i < out.i_embed.size(); ++i)
    for (std::size_t k = 0; k < w.K.size(); ++k) {
      DegreeMats dm;
      for (int d : degs)
        dm[d] = w.arrow({out.i_embed[i], out.k_embed[inc.f[k]]},
                        {out.i_embed[i], static_cast<int>(k)}, d);
      inc.mats[{static_cast<int>(i), static_cast<int>(k)}] = dm;
    }
  out.inclusion = std::move(inc);
  return out;
}

/// The standard endomorphism built from a choice functor F with F(k) <= k and
/// double-system arrows; represents the identity in the category.
inline SystemMorphism standard_endomorphism(const DoubleSystem& w,
                                            const std::vector<int>& f_choice) {
  SystemMorphism m;
  m.src = &w;
  m.dst = &w;
  m.f = f_choice;
  m.g.resize(w.I.size());
  for (std::size_t i = 0; i < w.I.size(); ++i) m.g[i] = static_cast<int>(i);
  for (std::size_t k = 0; k < w.K.size(); ++k)
    if (!w.K.leq(f_choice[k], static_cast<int>(k)))
      throw std::invalid_argument("choice functor must satisfy F(k) <= k");
  auto degs = w.degrees();
  for (std::size_t i = 0; i < w.I.size(); ++i)
    for (std::size_t k = 0; k < w.K.size(); ++k) {
      DegreeMats dm;
      for (int d : degs)
        dm[d] = w.arrow({static_cast<int>(i), m.f[k]},
                        {static_cast<int>(i), static_cast<int>(k)}, d);
      m.mats[{static_cast<int>(i), static_cast<int>(k)}] = dm;
    }
  return m;
}

// --- tensor products -----------------------------------------------------------------

/// Basis of (V tensor W)_d: tuples (p, b0, d-p, b1) ordered by p, then b0,
/// then b1.
inline std::vector<std::array<long long, 4>> tensor_basis(const DegreeRanks& v,
                                                          const DegreeRanks& w,
                                                          int d) {
  std::vector<std::array<long long, 4>> out;
  for (const auto& [p, rv] : v) {
    long long rw = rank_at(w, d - p);
    for (long long b0 = 0; b0 < rv; ++b0)
      for (long long b1 = 0; b1 < rw; ++b1)
        out.push_back({p, b0, static_cast<long long>(d - p), b1});
  }
  return out;
}

inline DegreeRanks tensor_ranks(const DegreeRanks& v, const DegreeRanks& w) {
  DegreeRanks out;
  for (const auto& [p, rv] : v)
    for (const auto& [q, rw] : w)
      if (rv && rw) out[p + q] += rv * rw;
  return out;
}

/// Graded Kronecker product of degree-0 maps f : V -> V', g : W -> W'.
inline QMat tensor_map(const DegreeRanks& v, const DegreeRanks& vp,
                       const DegreeRanks& w, const DegreeRanks& wp,
                       const DegreeMats& f, const DegreeMats& g, int d) {
  auto src = tensor_basis(v, w, d);
  auto dst = tensor_basis(vp, wp, d);
  std::map<std::array<long long, 4>, std::size_t> dindex;
  for (std::size_t j = 0; j < dst.size(); ++j) dindex[dst[j]] = j;
  QMat m(dst.size(), src.size());
  for (std::size_t c = 0; c < src.size(); ++c) {
    auto [p, b0, q, b1] = src[c];
    QMat fp = mat_at(f, static_cast<int>(p), rank_at(vp, p), rank_at(v, p));
    QMat gq = mat_at(g, static_cast<int>(q), rank_at(wp, q), rank_at(w, q));
    for (std::size_t r0 = 0; r0 < fp.rows(); ++r0)
      for (std::size_t r1 = 0; r1 < gq.rows(); ++r1) {
        Rat coef = fp(r0, b0) * gq(r1, b1);
        if (coef == 0) continue;
        auto it = dindex.find({p, static_cast<long long>(r0), q,
                               static_cast<long long>(r1)});
        if (it == dindex.end()) continue;
        m(it->second, c) += coef;
      }
  }
  return m;
}

/// Product of two finite posets, componentwise order, flat index a*|B|+b.
inline FinitePoset product_poset(const FinitePoset& a, const FinitePoset& b) {
  std::size_t n = a.size() * b.size();
  std::vector<std::pair<int, int>> rel;
  for (std::size_t a0 = 0; a0 < a.size(); ++a0)
    for (std::size_t b0 = 0; b0 < b.size(); ++b0)
      for (std::size_t a1 = 0; a1 < a.size(); ++a1)
        for (std::size_t b1 = 0; b1 < b.size(); ++b1)
          if (a.leq(a0, a1) && b.leq(b0, b1))
            rel.emplace_back(a0 * b.size() + b0, a1 * b.size() + b1);
  return FinitePoset(n, rel);
}

struct TensorSystem {
  DoubleSystem sys;
  std::size_t i1 = 0, k1 = 0;  // factor sizes for flat indexing
  int i_index(int ia, int ib) const { return ia * static_cast<int>(i1) + ib; }
  int k_index(int ka, int kb) const { return ka * static_cast<int>(k1) + kb; }
};

/// Stagewise tensor with the product index diagram.
inline TensorSystem tensor_systems(const DoubleSystem& a, const DoubleSystem& b) {
  if (a.coef != b.coef)
    throw std::invalid_argument("tensor factors over different rings");
  TensorSystem t;
  t.i1 = b.I.size();
  t.k1 = b.K.size();
  FinitePoset ip = product_poset(a.I, b.I), kp = product_poset(a.K, b.K);
  std::map<StageKey, DegreeRanks> stages;
  for (std::size_t ia = 0; ia < a.I.size(); ++ia)
    for (std::size_t ib = 0; ib < b.I.size(); ++ib)
      for (std::size_t ka = 0; ka < a.K.size(); ++ka)
        for (std::size_t kb = 0; kb < b.K.size(); ++kb)
          stages[{t.i_index(ia, ib), t.k_index(ka, kb)}] = tensor_ranks(
              a.stage({static_cast<int>(ia), static_cast<int>(ka)}),
              b.stage({static_cast<int>(ib), static_cast<int>(kb)}));
  std::map<std::pair<StageKey, StageKey>, DegreeMats> arrows;
  std::set<int> degs;
  for (const auto& [s, r] : stages)
    for (const auto& [d, rk] : r) degs.insert(d);
  auto id_mats = [&](const DoubleSystem& w, StageKey s) {
    DegreeMats dm;
    for (const auto& [d, r] : w.stage(s)) dm[d] = QMat::identity(r);
    return dm;
  };
  auto arrow_mats = [&](const DoubleSystem& w, StageKey s0, StageKey s1) {
    DegreeMats dm;
    std::set<int> ds;
    for (const auto& [d, r] : w.stage(s0)) ds.insert(d);
    for (const auto& [d, r] : w.stage(s1)) ds.insert(d);
    for (int d : ds) dm[d] = w.arrow(s0, s1, d);
    return dm;
  };
  // covers of the flat product posets: exactly one factor moves
  for (auto [x, y] : ip.covers())
    for (std::size_t ka = 0; ka < a.K.size(); ++ka)
      for (std::size_t kb = 0; kb < b.K.size(); ++kb) {
        int ia0 = x / static_cast<int>(t.i1), ib0 = x % static_cast<int>(t.i1);
        int ia1 = y / static_cast<int>(t.i1), ib1 = y % static_cast<int>(t.i1);
        StageKey s0{x, t.k_index(ka, kb)}, s1{y, t.k_index(ka, kb)};
        DegreeMats fa = ia0 == ia1
                            ? id_mats(a, {ia0, static_cast<int>(ka)})
                            : arrow_mats(a, {ia0, static_cast<int>(ka)},
                                         {ia1, static_cast<int>(ka)});
        DegreeMats gb = ib0 == ib1
                            ? id_mats(b, {ib0, static_cast<int>(kb)})
                            : arrow_mats(b, {ib0, static_cast<int>(kb)},
                                         {ib1, static_cast<int>(kb)});
        DegreeMats dm;
        for (int d : degs)
          dm[d] = tensor_map(a.stage({ia0, static_cast<int>(ka)}),
                             a.stage({ia1, static_cast<int>(ka)}),
                             b.stage({ib0, static_cast<int>(kb)}),
                             b.stage({ib1, static_cast<int>(kb)}), fa, gb, d);
        arrows[{s0, s1}] = dm;
      }
  for (auto [x, y] : kp.covers())
    for (std::size_t ia = 0; ia < a.I.size(); ++ia)
      for (std::size_t ib = 0; ib < b.I.size(); ++ib) {
        int ka0 = x / static_cast<int>(t.k1), kb0 = x % static_cast<int>(t.k1);
        int ka1 = y / static_cast<int>(t.k1), kb1 = y % static_cast<int>(t.k1);
        StageKey s0{t.i_index(ia, ib), x}, s1{t.i_index(ia, ib), y};
        DegreeMats fa = ka0 == ka1
                            ? id_mats(a, {static_cast<int>(ia), ka0})
                            : arrow_mats(a, {static_cast<int>(ia), ka0},
                                         {static_cast<int>(ia), ka1});
        DegreeMats gb = kb0 == kb1
                            ? id_mats(b, {static_cast<int>(ib), kb0})
                            : arrow_mats(b, {static_cast<int>(ib), kb0},
                                         {static_cast<int>(ib), kb1});
        DegreeMats dm;
        for (int d : degs)
          dm[d] = tensor_map(a.stage({static_cast<int>(ia), ka0}),
                             a.stage({static_cast<int>(ia), ka1}),
                             b.stage({static_cast<int>(ib), kb0}),
                             b.stage({static_cast<int>(ib), kb1}), fa, gb, d);
        arrows[{s0, s1}] = dm;
      }
  t.sys = make_double_system(a.coef, ip, kp, std::move(stages), std::move(arrows));
  return t;
}

/// The symmetry tau on W tensor W sending x tensor y to (-1)^{pq} y tensor x.
inline SystemMorphism tensor_swap(const TensorSystem& t, const DoubleSystem& w) {
  SystemMorphism m;
  m.src = &t.sys;
  m.dst = &t.sys;
  std::size_t nw_i = w.I.size(), nw_k = w.K.size();
  m.f.resize(nw_k * nw_k);
  for (std::size_t ka = 0; ka < nw_k; ++ka)
    for (std::size_t kb = 0; kb < nw_k; ++kb)
      m.f[t.k_index(ka, kb)] = t.k_index(kb, ka);
  m.g.resize(nw_i * nw_i);
  for (std::size_t ia = 0; ia < nw_i; ++ia)
    for (std::size_t ib = 0; ib < nw_i; ++ib)
      m.g[t.i_index(ia, ib)] = t.i_index(ib, ia);
  std::set<int> degs = t.sys.degrees();
  for (std::size_t ia = 0; ia < nw_i; ++ia)
    for (std::size_t ib = 0; ib < nw_i; ++ib)
      for (std::size_t ka = 0; ka < nw_k; ++ka)
        for (std::size_t kb = 0; kb < nw_k; ++kb) {
          StageKey ik{t.i_index(ia, ib), t.k_index(ka, kb)};
          // source stage: W(ia, kb) tensor W(ib, ka); target: W(ib, ka) (x) W(ia, kb)
          const auto& va = w.stage({static_cast<int>(ia), static_cast<int>(kb)});
          const auto& vb = w.stage({static_cast<int>(ib), static_cast<int>(ka)});
          DegreeMats dm;
          for (int d : degs) {
            auto src = tensor_basis(va, vb, d);
            auto dst = tensor_basis(vb, va, d);
            std::map<std::array<long long, 4>, std::size_t> didx;
            for (std::size_t j = 0; j < dst.size(); ++j) didx[dst[j]] = j;
            QMat mat(dst.size(), src.size());
            for (std::size_t c = 0; c < src.size(); ++c) {
              auto [p, b0, q, b1] = src[c];
              long long sgn = ((p % 2) && (q % 2)) ? -1 : 1;
              mat(didx.at({q, b1, p, b0}), c) = sgn;
            }
            dm[d] = mat;
          }
          m.mats[ik] = dm;
        }
  return m;
}

// --- products on systems ----------------------------------------------------------

/// An element of one stage of a system: value vector at (stage, degree).
struct StageElement {
  StageKey at;
  int degree = 0;
  std::vector<Rat> value;
};

/// Apply a product morphism mu : W (x) W -> W to a pair of stage elements,
/// evaluated at target K-index k (inputs are pushed along arrows when
/// needed). Returns nothing when no push exists.
inline std::optional<StageElement> mu_apply(const DoubleSystem& w,
                                            const TensorSystem& t,
                                            const SystemMorphism& mu,
                                            const StageElement& x,
                                            const StageElement& y, int k) {
  int ik = t.i_index(x.at.i, y.at.i);
  int fk = mu.f[k];
  int ka = fk / static_cast<int>(t.k1), kb = fk % static_cast<int>(t.k1);
  if (!w.K.leq(x.at.k, ka) || !w.K.leq(y.at.k, kb)) return std::nullopt;
  auto push = [&](const StageElement& e, int kto) {
    QMat a = w.arrow({e.at.i, e.at.k}, {e.at.i, kto}, e.degree);
    return a.apply(e.value);
  };
  auto xv = push(x, ka);
  auto yv = push(y, kb);
  const auto& va = w.stage({x.at.i, ka});
  const auto& vb = w.stage({y.at.i, kb});
  int d = x.degree + y.degree;
  auto basis = tensor_basis(va, vb, d);
  std::vector<Rat> tensor_vec(basis.size(), Rat(0));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    auto [p, b0, q, b1] = basis[j];
    if (p != x.degree || q != y.degree) continue;
    tensor_vec[j] = xv[b0] * yv[b1];
  }
  QMat mm = mu.mat({ik, k}, d);
  StageElement out;
  out.at = {mu.g[ik], k};
  out.degree = d;
  out.value = mm.apply(tensor_vec);
  return out;
}

/// Push two elements of W into a common stage and compare.
inline bool elements_agree(const DoubleSystem& w, const StageElement& a,
                           const StageElement& b) {
  if (a.degree != b.degree) return false;
  auto iu = w.I.upper_bound(a.at.i, b.at.i);
  auto kl = a.at.k == b.at.k ? std::optional<int>(a.at.k) : std::nullopt;
  if (!iu || !kl) return false;
  auto pa = w.arrow(a.at, {*iu, *kl}, a.degree).apply(a.value);
  auto pb = w.arrow(b.at, {*iu, *kl}, b.degree).apply(b.value);
  return pa == pb;
}

/// Verify associativity, graded commutativity (via the swap) and unit laws of
/// a product morphism mu : W (x) W -> W on all basis tensors at each stage.
/// The unit is a morphism from the trivial system.
inline Report product_check(const DoubleSystem& w, const TensorSystem& t,
                            const SystemMorphism& mu,
                            const SystemMorphism& unit) {
  Report rep;
  validate_morphism(mu);
  std::vector<StageElement> basis;
  for (const auto& [s, ranks] : w.stages)
    for (const auto& [d, r] : ranks)
      for (long long b = 0; b < r; ++b) {
        StageElement e;
        e.at = s;
        e.degree = d;
        e.value.assign(r, Rat(0));
        e.value[b] = 1;
        basis.push_back(e);
      }

  bool comm_ok = true, assoc_ok = true, unit_ok = true;
  std::string comm_w, assoc_w, unit_w;

  for (const auto& x : basis)
    for (const auto& y : basis)
      for (std::size_t k = 0; k < w.K.size(); ++k) {
        auto xy = mu_apply(w, t, mu, x, y, static_cast<int>(k));
        auto yx = mu_apply(w, t, mu, y, x, static_cast<int>(k));
        if (!xy || !yx) continue;
        StageElement yx_signed = *yx;
        if ((x.degree % 2) && (y.degree % 2))
          for (auto& v : yx_signed.value) v = -v;
        if (!elements_agree(w, *xy, yx_signed)) {
          comm_ok = false;
          comm_w = "stage (" + std::to_string(x.at.i) + "," +
                   std::to_string(x.at.k) + ") deg " +
                   std::to_string(x.degree) + "," + std::to_string(y.degree);
        }
      }

  for (const auto& x : basis)
    for (const auto& y : basis)
      for (const auto& z : basis)
        for (std::size_t k1 = 0; k1 < w.K.size(); ++k1)
          for (std::size_t k = 0; k < w.K.size(); ++k) {
            auto xy = mu_apply(w, t, mu, x, y, static_cast<int>(k1));
            auto yz = mu_apply(w, t, mu, y, z, static_cast<int>(k1));
            if (!xy || !yz) continue;
            auto left = mu_apply(w, t, mu, *xy, z, static_cast<int>(k));
            auto right = mu_apply(w, t, mu, x, *yz, static_cast<int>(k));
            if (!left || !right) continue;
            if (!elements_agree(w, *left, *right)) {
              assoc_ok = false;
              assoc_w = "triple at stages (" + std::to_string(x.at.i) + "," +
                        std::to_string(y.at.i) + "," + std::to_string(z.at.i) +
                        ")";
            }
          }

  for (const auto& x : basis)
    for (std::size_t k = 0; k < w.K.size(); ++k) {
      int fk = mu.f[k];
      int ka = fk / static_cast<int>(t.k1);
      StageElement u;
      u.at = {unit.g[0], ka};
      u.degree = 0;
      QMat ucol = unit.mat({0, ka}, 0);
      u.value.resize(ucol.rows());
      for (std::size_t r = 0; r < ucol.rows(); ++r) u.value[r] = ucol(r, 0);
      auto ux = mu_apply(w, t, mu, u, x, static_cast<int>(k));
      if (!ux) continue;
      if (!elements_agree(w, *ux, x)) {
        unit_ok = false;
        unit_w = "stage (" + std::to_string(x.at.i) + "," +
                 std::to_string(x.at.k) + ") deg " + std::to_string(x.degree);
      }
    }
  rep.add("product.graded_commutative", comm_ok, comm_w);
  rep.add("product.associative", assoc_ok, assoc_w);
  rep.add("product.unital", unit_ok, unit_w);
  return rep;
}

// --- text formats ------------------------------------------------------------------

/// Tower file grammar:
///   coef Q|Z
///   tower prefix <N0>
///   stage <j>: degree <d> rank <r> [; degree <d> rank <r> ...]
///   band stage: ...
///   map <j>: degree <d> [[a,b],[c,d]] [; ...]
///   band map: ...
inline QMat parse_matrix_literal(const std::string& text) {
  std::vector<std::vector<Rat>> rows;
  std::size_t pos = 0;
  auto expect = [&](char c) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size() || text[pos] != c)
      throw std::invalid_argument("bad matrix literal '" + text + "'");
    ++pos;
  };
  expect('[');
  while (true) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos < text.size() && text[pos] == ']') {
      ++pos;
      break;
    }
    expect('[');
    std::vector<Rat> row;
    std::string tok;
    while (pos < text.size() && text[pos] != ']') {
      if (text[pos] == ',') {
        if (!tok.empty()) row.push_back(parse_rat(tok));
        tok.clear();
      } else if (!std::isspace(static_cast<unsigned char>(text[pos]))) {
        tok += text[pos];
      }
      ++pos;
    }
    if (!tok.empty()) row.push_back(parse_rat(tok));
    expect(']');
    rows.push_back(std::move(row));
    while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ','))
      ++pos;
    if (pos < text.size() && text[pos] == ']') {
      ++pos;
      break;
    }
  }
  std::size_t cols = rows.empty() ? 0 : rows[0].size();
  QMat m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols)
      throw std::invalid_argument("ragged matrix literal");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

inline BandedTower parse_tower_text(const std::string& text) {
  BandedTower t;
  std::istringstream in(text);
  std::string line;
  long long n0 = -1;
  auto parse_ranks = [](const std::string& body) {
    DegreeRanks r;
    std::istringstream ls(body);
    std::string w;
    int cur_deg = 0;
    while (ls >> w) {
      if (w == "degree")
        ls >> cur_deg;
      else if (w == "rank") {
        long long rr;
        ls >> rr;
        r[cur_deg] = rr;
      } else if (w != ";")
        throw std::invalid_argument("bad stage line: " + body);
    }
    return r;
  };
  auto parse_mats = [](const std::string& body) {
    DegreeMats m;
    std::istringstream ls(body);
    std::string w;
    while (ls >> w) {
      if (w != "degree") throw std::invalid_argument("bad map line: " + body);
      int d;
      ls >> d;
      std::string rest;
      std::getline(ls, rest);
      auto semi = rest.find(';');
      std::string lit = semi == std::string::npos ? rest : rest.substr(0, semi);
      m[d] = parse_matrix_literal(lit);
      if (semi != std::string::npos) {
        ls = std::istringstream(rest.substr(semi + 1));
      } else
        break;
    }
    return m;
  };
  std::map<long long, DegreeRanks> stage_lines;
  std::map<long long, DegreeMats> map_lines;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string w;
    ls >> w;
    if (w == "coef") {
      std::string c;
      ls >> c;
      t.coef = c == "Z" ? CoefKind::Z : CoefKind::Q;
    } else if (w == "tower") {
      std::string p;
      ls >> p >> n0;
    } else if (w == "stage") {
      std::string which;
      ls >> which;
      std::string rest;
      std::getline(ls, rest);
      if (which == "band" || which == "band:") {
        auto colon = rest.find(':');
        t.band = parse_ranks(colon == std::string::npos ? rest : rest.substr(colon + 1));
      } else {
        long long j = std::stoll(which);
        auto colon = rest.find(':');
        stage_lines[j] = parse_ranks(colon == std::string::npos ? rest : rest.substr(colon + 1));
      }
    } else if (w == "band") {
      // "band stage:" or "band map:"
      std::string kind;
      ls >> kind;
      std::string rest;
      std::getline(ls, rest);
      auto colon = kind.find(':');
      std::string body = rest;
      if (kind.rfind("stage", 0) == 0)
        t.band = parse_ranks(body);
      else if (kind.rfind("map", 0) == 0)
        t.band_map = parse_mats(body);
      else
        throw std::invalid_argument("bad band line: " + line);
      (void)colon;
    } else if (w == "map") {
      std::string which;
      ls >> which;
      if (!which.empty() && which.back() == ':') which.pop_back();
      long long j = std::stoll(which);
      std::string rest;
      std::getline(ls, rest);
      map_lines[j] = parse_mats(rest);
    } else {
      throw std::invalid_argument("unknown tower line: " + line);
    }
  }
  if (n0 < 0) n0 = static_cast<long long>(stage_lines.size());
  t.prefix.resize(n0);
  t.maps.resize(n0);
  for (auto& [j, r] : stage_lines) {
    if (j >= n0) throw std::invalid_argument("stage index beyond prefix");
    t.prefix[j] = r;
  }
  for (auto& [j, m] : map_lines) {
    if (j >= n0) throw std::invalid_argument("map index beyond prefix");
    t.maps[j] = m;
  }
  t.validate();
  return t;
}

}  // namespace floerlib

#endif


