#ifndef FLOERLIB_FLOER_HPP
#define FLOERLIB_FLOER_HPP

#include "floerlib/check.hpp"
#include "floerlib/novikov.hpp"
#include "floerlib/systems.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace floerlib {

/// Ambient data: rank of the capping lattice, the pairing of the difference
/// of the two ambient forms with capping classes, and the half-dimension.
struct GeometryConfig {
  std::size_t rank = 0;
  std::vector<Rat> w;  // covector on the capping lattice
  long long n = 0;
};

enum class OrbitLocation { Inside, Outside };

struct CappedOrbitRecord {
  std::string id;
  long long index = 0;     // |gamma| = n - CZ
  GroupElement capping;    // class in Z^rank
  Rat i1{0}, i2{0};        // Hamiltonian integral and height integral
  OrbitLocation location = OrbitLocation::Inside;
};

/// A point of the extended cone: (q, lambda-, lambda+) with q of length rank.
/// Stored as a flat vector of length rank + 2.
inline const std::vector<Rat>& check_point_shape(const std::vector<Rat>& pt,
                                                 std::size_t rank) {
  if (pt.size() != rank + 2)
    throw std::invalid_argument("cone point must have length rank + 2");
  return pt;
}

/// Action of a capped orbit at a cone point. Both branches are linear in the
/// point; the branch is selected by the orbit's location flag.
inline Rat action_value(const CappedOrbitRecord& orbit,
                        const GeometryConfig& geom,
                        const std::vector<Rat>& point) {
  check_point_shape(point, geom.rank);
  const Rat& lm = point[geom.rank];
  const Rat& lp = point[geom.rank + 1];
  if (lm > lp) throw std::invalid_argument("lambda- exceeds lambda+");
  Rat qa(0);
  for (std::size_t i = 0; i < geom.rank; ++i)
    if (orbit.capping[i] != 0) qa += point[i] * Rat(orbit.capping[i]);
  Rat wa = pair_covector(geom.w, orbit.capping);
  if (orbit.location == OrbitLocation::Inside)
    return -qa - lm * wa + lm * orbit.i1;
  return -qa - lm * wa + lp * (orbit.i1 - orbit.i2) + lm * orbit.i2;
}

/// Action shift under the module action t^v . gamma = gamma # (-v):
/// adds q(v) + lambda- w(v) at each point.
inline Rat action_shift(const GeometryConfig& geom, const GroupElement& v,
                        const std::vector<Rat>& point) {
  Rat qv(0);
  for (std::size_t i = 0; i < geom.rank; ++i)
    if (v[i] != 0) qv += point[i] * Rat(v[i]);
  return qv + point[geom.rank] * pair_covector(geom.w, v);
}

// --- interval domain pairs -----------------------------------------------------

/// Pair of cones in rank+2 coordinates with linear window functionals.
struct IntervalDomainPair {
  RationalCone q_minus, q_plus;
  std::vector<Rat> a_minus, a_plus;  // covectors of length rank + 2
};

struct PairReport {
  bool thin = false;
  bool small = false;
  bool wide = false;
  bool subset = false;
  bool plus_nontrivial = false;
  bool salient = false;
  bool valid = false;
  std::optional<Rat> height;       // empty: no candidate or unbounded
  bool height_unbounded = false;
  std::string height_witness;
};

/// Dot product of a covector with a rational point.
inline Rat pair_cov(const std::vector<Rat>& cov, const std::vector<Rat>& pt) {
  Rat s(0);
  for (std::size_t i = 0; i < cov.size(); ++i)
    if (cov[i] != 0) s += cov[i] * pt[i];
  return s;
}

namespace detail_floer {

inline std::vector<Rat> q_part(const std::vector<Rat>& g, std::size_t rank) {
  return std::vector<Rat>(g.begin(), g.begin() + rank);
}

/// Is the projection dropping the two lambda coordinates injective on the
/// span of the cone?
inline bool projection_injective(const RationalCone& q, std::size_t rank) {
  QMat full(q.generators.size(), rank + 2), proj(q.generators.size(), rank);
  for (std::size_t i = 0; i < q.generators.size(); ++i) {
    for (std::size_t j = 0; j < rank + 2; ++j) full(i, j) = q.generators[i][j];
    for (std::size_t j = 0; j < rank; ++j) proj(i, j) = q.generators[i][j];
  }
  return floerlib::rank(full) == floerlib::rank(proj);
}

/// All q-parts proportional to one direction, and (q, lambda-) injective on
/// the span.
inline bool cone_small(const RationalCone& q, std::size_t rank) {
  std::vector<Rat> dir;
  for (const auto& g : q.generators) {
    auto qp = q_part(g, rank);
    bool zero = true;
    for (const auto& c : qp)
      if (c != 0) zero = false;
    if (zero) continue;
    if (dir.empty()) {
      dir = qp;
      continue;
    }
    QMat m(2, rank);
    for (std::size_t j = 0; j < rank; ++j) {
      m(0, j) = dir[j];
      m(1, j) = qp[j];
    }
    if (floerlib::rank(m) > 1) return false;
  }
  // injectivity of (q, lambda-) on the span
  QMat full(q.generators.size(), rank + 2), proj(q.generators.size(), rank + 1);
  for (std::size_t i = 0; i < q.generators.size(); ++i) {
    for (std::size_t j = 0; j < rank + 2; ++j) full(i, j) = q.generators[i][j];
    for (std::size_t j = 0; j < rank + 1; ++j) proj(i, j) = q.generators[i][j];
  }
  return floerlib::rank(full) == floerlib::rank(proj);
}

/// Wide test for one projected direction: a feasible pair of cone points with
/// equal q-part (up to the common scale), equal lambda+, and lambda-
/// strictly increasing from the minus cone to the plus cone.
inline bool wide_for_direction(const IntervalDomainPair& p, std::size_t rank,
                               const std::vector<Rat>& qdir) {
  const auto& gm = p.q_minus.generators;
  const auto& gp = p.q_plus.generators;
  std::size_t nm = gm.size(), np = gp.size();
  // variables: mu (nm), nu (np); constraints:
  //   q(p-) = qdir, q(p+) = qdir, lambda+(p-) = lambda+(p+),
  //   lambda-(p+) - lambda-(p-) = 1
  std::size_t rows = 2 * rank + 2;
  QMat a(rows, nm + np);
  std::vector<Rat> b(rows, Rat(0));
  for (std::size_t r = 0; r < rank; ++r) {
    for (std::size_t j = 0; j < nm; ++j) a(r, j) = gm[j][r];
    b[r] = qdir[r];
  }
  for (std::size_t r = 0; r < rank; ++r) {
    for (std::size_t j = 0; j < np; ++j) a(rank + r, nm + j) = gp[j][r];
    b[rank + r] = qdir[r];
  }
  for (std::size_t j = 0; j < nm; ++j) a(2 * rank, j) = gm[j][rank + 1];
  for (std::size_t j = 0; j < np; ++j) a(2 * rank, nm + j) = -gp[j][rank + 1];
  for (std::size_t j = 0; j < np; ++j) a(2 * rank + 1, nm + j) = gp[j][rank];
  for (std::size_t j = 0; j < nm; ++j) a(2 * rank + 1, j) = -gm[j][rank];
  b[2 * rank + 1] = 1;
  return lp_feasible_point(a, b).has_value();
}

}  // namespace detail_floer

/// Evaluate the thin/small/wide predicates and the height of a pair.
inline PairReport validate_interval_pair(const IntervalDomainPair& p,
                                         std::size_t rank) {
  PairReport rep;
  rep.subset = cone_subset(p.q_plus, p.q_minus);
  rep.plus_nontrivial = !p.q_plus.is_trivial();
  rep.salient = is_salient(p.q_minus) && is_salient(p.q_plus);
  rep.thin = detail_floer::projection_injective(p.q_plus, rank);
  rep.small = detail_floer::cone_small(p.q_minus, rank) &&
              detail_floer::cone_small(p.q_plus, rank);

  // wide: check every projected generator direction of both cones
  rep.wide = true;
  std::vector<std::vector<Rat>> dirs;
  for (const auto& g : p.q_minus.generators)
    dirs.push_back(detail_floer::q_part(g, rank));
  for (const auto& g : p.q_plus.generators)
    dirs.push_back(detail_floer::q_part(g, rank));
  for (const auto& d : dirs)
    if (!detail_floer::wide_for_direction(p, rank, d)) {
      rep.wide = false;
      break;
    }

  // height: generator pairs with matching lambda+ coordinates, exact 1-d
  // sup over the admissible scalings
  std::optional<Rat> best;
  for (const auto& g_m : p.q_minus.generators)
    for (const auto& g_p : p.q_plus.generators) {
      Rat am = pair_cov(p.a_minus, g_m), ap = pair_cov(p.a_plus, g_p);
      Rat lm_m = g_m[rank], lm_p = g_p[rank];
      Rat lpm = g_m[rank + 1], lpp = g_p[rank + 1];
      auto consider = [&](const Rat& val) {
        if (!best || val > *best) best = val;
      };
      if (lpp != 0 && lpm != 0) {
        if (sign_of(lpp) != sign_of(lpm)) continue;
        Rat tau = rat_abs(lpm), sigma = rat_abs(lpp);
        Rat den = tau * lm_p - sigma * lm_m;
        if (den > 0) consider((tau * ap - sigma * am) / den);
      } else if (lpp == 0 && lpm == 0) {
        // both boundary rays and the interior pencil
        if (lm_m < 0) consider(am / lm_m);
        if (lm_p > 0) consider(ap / lm_p);
        // pole of (ap - rho am) / (lm_p - rho lm_m) at rho = lm_p/lm_m > 0
        if (lm_m != 0 && lm_p != 0 && sign_of(lm_m) == sign_of(lm_p)) {
          Rat rho = lm_p / lm_m;
          Rat num_at_pole = ap - rho * am;
          if (num_at_pole > 0) {
            rep.height_unbounded = true;
            rep.height_witness = "generator pair with vanishing lambda+ and "
                                 "positive numerator at the pole";
          }
        }
      } else if (lpp == 0) {
        // sigma forced to 0: only the plus ray remains
        if (lm_p > 0) consider(ap / lm_p);
      } else {
        // tau forced to 0: only the minus ray remains
        if (lm_m < 0) consider(am / lm_m);
      }
    }
  if (!rep.height_unbounded) rep.height = best;

  rep.valid = rep.subset && rep.plus_nontrivial && rep.thin && rep.salient &&
              (rep.small || rep.wide);
  return rep;
}

/// a- <= action on all generators of Q- and a+ > action at some generator of
/// Q+ (linearity makes generator checks complete).
inline bool window_membership(const CappedOrbitRecord& orbit,
                              const GeometryConfig& geom,
                              const IntervalDomainPair& pair) {
  for (const auto& g : pair.q_minus.generators) {
    if (pair_cov(pair.a_minus, g) > action_value(orbit, geom, g)) return false;
  }
  for (const auto& g : pair.q_plus.generators) {
    bool zero = true;
    for (const auto& c : g)
      if (c != 0) zero = false;
    if (zero) continue;
    if (pair_cov(pair.a_plus, g) > action_value(orbit, geom, g)) return true;
  }
  return false;
}

/// Shifted-orbit window membership for the class t^v . orbit.
inline bool window_membership_shifted(const CappedOrbitRecord& orbit,
                                      const GroupElement& v,
                                      const GeometryConfig& geom,
                                      const IntervalDomainPair& pair,
                                      bool* below_floor = nullptr) {
  if (below_floor) *below_floor = false;
  for (const auto& g : pair.q_minus.generators) {
    Rat act = action_value(orbit, geom, g) + action_shift(geom, v, g);
    if (pair_cov(pair.a_minus, g) > act) {
      if (below_floor) *below_floor = true;
      return false;
    }
  }
  for (const auto& g : pair.q_plus.generators) {
    bool zero = true;
    for (const auto& c : g)
      if (c != 0) zero = false;
    if (zero) continue;
    Rat act = action_value(orbit, geom, g) + action_shift(geom, v, g);
    if (pair_cov(pair.a_plus, g) > act) return true;
  }
  return false;
}

// --- datasets -------------------------------------------------------------------

struct DifferentialEntry {
  std::string src, dst;
  GroupElement weight;  // 0 <= weight in the dataset cone order
  Rat count;
};

struct FloerDataset {
  GeometryConfig geometry;
  std::shared_ptr<const ConeOrderContext> cone_ctx;  // rank-r order for weights
  long long trunc_level = 6;
  std::vector<CappedOrbitRecord> orbits;
  std::vector<DifferentialEntry> differential;

  const CappedOrbitRecord* find(const std::string& id) const {
    for (const auto& o : orbits)
      if (o.id == id) return &o;
    return nullptr;
  }
};

/// Dataset validity: unique ids, degree raised by one, nonnegative weights,
/// the action inequality on the window floor when a window is given, and
/// d^2 = 0 over the truncated positive Novikov ring.
inline Report validate_dataset(const FloerDataset& ds,
                               const IntervalDomainPair* pair = nullptr) {
  Report rep;
  const auto& ctx = *ds.cone_ctx;
  bool ids_ok = true;
  std::set<std::string> seen;
  for (const auto& o : ds.orbits)
    if (!seen.insert(o.id).second) ids_ok = false;
  rep.add("dataset.unique_ids", ids_ok);

  bool refs_ok = true, degree_ok = true, weight_ok = true;
  std::string degree_witness, weight_witness;
  for (const auto& e : ds.differential) {
    const auto* s = ds.find(e.src);
    const auto* d = ds.find(e.dst);
    if (!s || !d) {
      refs_ok = false;
      continue;
    }
    if (d->index != s->index + 1) {
      degree_ok = false;
      degree_witness = e.src + "->" + e.dst;
    }
    if (!cone_leq(ctx, g_zero(ctx.rank), e.weight)) {
      weight_ok = false;
      weight_witness = e.src + "->" + e.dst;
    }
  }
  rep.add("dataset.entry_refs", refs_ok);
  rep.add("dataset.entry_degree", degree_ok, degree_witness);
  rep.add("dataset.weight_positive", weight_ok, weight_witness);

  if (pair) {
    bool filt_ok = true;
    std::string w;
    for (const auto& e : ds.differential) {
      const auto* s = ds.find(e.src);
      const auto* d = ds.find(e.dst);
      if (!s || !d) continue;
      for (const auto& g : pair->q_minus.generators) {
        Rat out_act = action_value(*d, ds.geometry, g) +
                      action_shift(ds.geometry, e.weight, g);
        Rat in_act = action_value(*s, ds.geometry, g);
        if (out_act < in_act) {
          filt_ok = false;
          w = e.src + "->" + e.dst + " at generator";
        }
      }
    }
    rep.add("dataset.filtration_inequality", filt_ok, w);
  }

  // d^2 = 0 over the truncated ring, assembled degreewise
  bool dd_ok = true;
  std::string dd_w;
  if (ctx.y && ids_ok && refs_ok && degree_ok) {
    std::map<long long, std::vector<const CappedOrbitRecord*>> by_deg;
    for (const auto& o : ds.orbits) by_deg[o.index].push_back(&o);
    Truncation tr{*ctx.y, ds.trunc_level};
    RingQ qq;
    auto entry_series = [&](const CappedOrbitRecord* s,
                            const CappedOrbitRecord* d) {
      auto series = series_zero(qq, ds.cone_ctx, tr);
      for (const auto& e : ds.differential)
        if (e.src == s->id && e.dst == d->id)
          series = series_add(series, series_monomial(qq, ds.cone_ctx, e.count,
                                                      e.weight, tr));
      return series;
    };
    for (auto& [p, src_orbits] : by_deg) {
      auto mid_it = by_deg.find(p + 1);
      auto top_it = by_deg.find(p + 2);
      if (mid_it == by_deg.end() || top_it == by_deg.end()) continue;
      for (const auto* s : src_orbits)
        for (const auto* t : top_it->second) {
          auto acc = series_zero(qq, ds.cone_ctx, tr);
          for (const auto* m : mid_it->second)
            acc = series_add(acc, series_mul(entry_series(s, m),
                                             entry_series(m, t)));
          if (!acc.is_zero()) {
            dd_ok = false;
            dd_w = s->id + "->" + t->id + " = " + series_to_text(acc);
          }
        }
    }
  }
  rep.add("dataset.d_squared_zero", dd_ok, dd_w);
  return rep;
}

// --- filtered complexes -----------------------------------------------------------

/// Free module over the truncated positive Novikov ring with the window
/// orbits as basis, together with the restricted differential.
struct FilteredComplex {
  GeometryConfig geometry;
  std::shared_ptr<const ConeOrderContext> ctx;
  IntervalDomainPair pair;
  Truncation trunc{GroupElement{}, 0};
  std::vector<long long> degrees;                      // sorted window P
  std::map<long long, std::vector<std::string>> basis; // degree -> orbit ids
  // differential per degree p (matrix from degree p to p+1), Novikov entries
  std::map<long long, std::vector<std::vector<QSeries>>> diff;

  long long rank_at(long long p) const {
    auto it = basis.find(p);
    return it == basis.end() ? 0 : static_cast<long long>(it->second.size());
  }
};

struct DatasetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline FilteredComplex build_complex(const FloerDataset& ds,
                                     const IntervalDomainPair& pair,
                                     const std::vector<long long>& degrees,
                                     const Truncation& trunc) {
  auto prep = validate_interval_pair(pair, ds.geometry.rank);
  if (!prep.valid)
    throw DatasetError("interval domain pair is not valid");
  FilteredComplex c;
  c.geometry = ds.geometry;
  c.ctx = ds.cone_ctx;
  c.pair = pair;
  c.trunc = trunc;
  c.degrees = degrees;
  std::sort(c.degrees.begin(), c.degrees.end());
  std::set<long long> degset(c.degrees.begin(), c.degrees.end());

  std::map<std::string, const CappedOrbitRecord*> by_id;
  for (const auto& o : ds.orbits) {
    if (by_id.count(o.id)) throw DatasetError("duplicate orbit id " + o.id);
    by_id[o.id] = &o;
  }
  for (const auto& o : ds.orbits)
    if (degset.count(o.index) && window_membership(o, ds.geometry, pair))
      c.basis[o.index].push_back(o.id);

  RingQ qq;
  for (long long p : c.degrees) {
    if (!degset.count(p + 1)) continue;
    const auto& src = c.basis[p];
    const auto& dst = c.basis[p + 1];
    std::vector<std::vector<QSeries>> m(
        dst.size(), std::vector<QSeries>(
                        src.size(), series_zero(qq, ds.cone_ctx, trunc)));
    for (const auto& e : ds.differential) {
      auto s = by_id.find(e.src), d = by_id.find(e.dst);
      if (s == by_id.end() || d == by_id.end())
        throw DatasetError("differential entry references unknown orbit " +
                           e.src + "->" + e.dst);
      if (d->second->index != s->second->index + 1)
        throw DatasetError("differential entry " + e.src + "->" + e.dst +
                           " does not raise the index by one");
      if (s->second->index != p) continue;
      auto srow = std::find(src.begin(), src.end(), e.src);
      if (srow == src.end()) continue;  // source outside the window
      bool below = false;
      bool in_window = window_membership_shifted(*d->second, e.weight,
                                                 ds.geometry, pair, &below);
      if (below)
        throw DatasetError("entry " + e.src + "->" + e.dst +
                           " drops below the window floor (filtration breach)");
      if (!in_window) continue;  // lands in the quotiented part above
      auto drow = std::find(dst.begin(), dst.end(), e.dst);
      if (drow == dst.end())
        throw DatasetError("entry " + e.src + "->" + e.dst +
                           " has an unrepresentable target in this window");
      std::size_t r = drow - dst.begin(), s_i = srow - src.begin();
      m[r][s_i] = series_add(
          m[r][s_i], series_monomial(qq, ds.cone_ctx, e.count, e.weight, trunc));
    }
    c.diff[p] = std::move(m);
  }

  // d^2 = 0 at the working truncation, within the degree window
  for (long long p : c.degrees) {
    if (!degset.count(p + 1) || !degset.count(p + 2)) continue;
    const auto& m0 = c.diff.at(p);
    const auto& m1 = c.diff.at(p + 1);
    for (std::size_t i = 0; i < m1.size(); ++i)
      for (std::size_t j = 0; j < (m0.empty() ? 0 : m0[0].size()); ++j) {
        auto acc = series_zero(qq, ds.cone_ctx, trunc);
        for (std::size_t k = 0; k < m0.size(); ++k)
          acc = series_add(acc, series_mul(m1[i][k], m0[k][j]));
        if (!acc.is_zero())
          throw DatasetError("restricted differential does not square to zero");
      }
  }
  return c;
}

/// Constant-term reduction of a Novikov matrix (the augmentation to the
/// coefficient field).
inline QMat constant_term_matrix(const std::vector<std::vector<QSeries>>& m) {
  std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  QMat q(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      auto it = m[i][j].terms.find(g_zero(m[i][j].ctx ? m[i][j].ctx->rank : 0));
      if (it != m[i][j].terms.end()) q(i, j) = it->second;
    }
  return q;
}

struct HomologyResult {
  std::map<long long, long long> ranks;
  // representatives: per degree, columns spanning ker modulo im
  std::map<long long, QMat> representatives;
};

/// Homology of the field reduction: exact ranks ker/im per degree, with
/// cycle representatives spanning the quotient.
inline HomologyResult homology(const FilteredComplex& c) {
  HomologyResult h;
  auto shaped = [&](const FilteredComplex& cx, long long p) {
    // matrix of the reduced differential from degree p, with its true shape
    // even when a side of the window is empty
    long long rows = cx.rank_at(p + 1), cols = cx.rank_at(p);
    auto it = cx.diff.find(p);
    if (it == cx.diff.end()) return QMat(rows, cols);
    QMat m = constant_term_matrix(it->second);
    if (m.rows() != static_cast<std::size_t>(rows) ||
        m.cols() != static_cast<std::size_t>(cols))
      return QMat(rows, cols);  // degenerate empty block
    return m;
  };
  for (long long p : c.degrees) {
    long long n = c.rank_at(p);
    QMat dout = shaped(c, p);
    QMat din = shaped(c, p - 1);
    // reduced d must also square to zero
    if (!(dout * din).is_zero())
      throw DatasetError("reduced differential does not square to zero");
    auto ker = kernel_basis(dout);
    std::vector<std::vector<Rat>> img;
    for (std::size_t cidx = 0; cidx < din.cols(); ++cidx) {
      std::vector<Rat> v(n);
      for (long long r = 0; r < n; ++r) v[r] = din(r, cidx);
      img.push_back(std::move(v));
    }
    long long rk = static_cast<long long>(ker.size()) -
                   static_cast<long long>(rank(din));
    if (rk) h.ranks[p] = rk;
    // representatives: kernel vectors whose classes stay independent in the
    // quotient by the image
    QMat q = detail_sys::quotient_map(img, n);
    QMat reps(n, std::max<long long>(rk, 0));
    QMat probe(q.rows(), 0);
    long long placed = 0;
    for (const auto& kv : ker) {
      if (placed >= rk) break;
      auto cls = q.apply(kv);
      QMat test(q.rows(), placed + 1);
      for (long long cc = 0; cc < placed; ++cc)
        for (std::size_t r = 0; r < q.rows(); ++r) test(r, cc) = probe(r, cc);
      for (std::size_t r = 0; r < q.rows(); ++r) test(r, placed) = cls[r];
      if (rank(test) == static_cast<std::size_t>(placed + 1)) {
        for (long long r = 0; r < n; ++r) reps(r, placed) = kv[r];
        probe = test;
        ++placed;
      }
    }
    h.representatives[p] = reps;
  }
  return h;
}

/// Chain-level action map between complexes of the same dataset: quotient
/// then include, realized as basis tracking. Reports per-degree isomorphism
/// when the window orbit sets coincide.
struct ActionMap {
  std::map<long long, std::vector<std::vector<QSeries>>> mats;
  std::map<long long, bool> iso;
};

inline ActionMap action_map(const FilteredComplex& c0,
                            const FilteredComplex& c1) {
  // target pair must be smaller
  if (!cone_subset(c1.pair.q_minus, c0.pair.q_minus) ||
      !cone_subset(c1.pair.q_plus, c0.pair.q_plus))
    throw DatasetError("action map target cones are not smaller");
  for (const auto& g : c1.pair.q_minus.generators)
    if (pair_cov(c1.pair.a_minus, g) > pair_cov(c0.pair.a_minus, g))
      throw DatasetError("a- is not smaller on the target cone");
  for (const auto& g : c1.pair.q_plus.generators)
    if (pair_cov(c1.pair.a_plus, g) > pair_cov(c0.pair.a_plus, g))
      throw DatasetError("a+ is not smaller on the target cone");
  ActionMap am;
  RingQ qq;
  for (long long p : c0.degrees) {
    auto it0 = c0.basis.find(p);
    auto it1 = c1.basis.find(p);
    std::size_t n0 = it0 == c0.basis.end() ? 0 : it0->second.size();
    std::size_t n1 = it1 == c1.basis.end() ? 0 : it1->second.size();
    std::vector<std::vector<QSeries>> m(
        n1, std::vector<QSeries>(n0, series_zero(qq, c0.ctx, c0.trunc)));
    bool same = n0 == n1;
    for (std::size_t j = 0; j < n0; ++j) {
      const auto& id = it0->second[j];
      if (it1 == c1.basis.end()) continue;
      auto pos = std::find(it1->second.begin(), it1->second.end(), id);
      if (pos == it1->second.end()) {
        same = false;
        continue;  // quotiented away
      }
      m[pos - it1->second.begin()][j] =
          series_one(qq, c0.ctx, c0.trunc);
    }
    am.mats[p] = std::move(m);
    am.iso[p] = same;
  }
  return am;
}

/// Validator for pair-of-pants window data: the output window must satisfy
/// a2- <= a0- + a1- on the minus cone and a2+ <= min(a0- + a1+, a1- + a0+)
/// on the plus cone, checked on generators.
inline Report pants_window_check(const IntervalDomainPair& p0,
                                 const IntervalDomainPair& p1,
                                 const IntervalDomainPair& p2) {
  Report rep;
  bool floor_ok = true, ceil_ok = true;
  for (const auto& g : p2.q_minus.generators) {
    if (pair_cov(p2.a_minus, g) >
        pair_cov(p0.a_minus, g) + pair_cov(p1.a_minus, g))
      floor_ok = false;
  }
  for (const auto& g : p2.q_plus.generators) {
    Rat lhs = pair_cov(p2.a_plus, g);
    Rat m0 = pair_cov(p0.a_minus, g) + pair_cov(p1.a_plus, g);
    Rat m1 = pair_cov(p1.a_minus, g) + pair_cov(p0.a_plus, g);
    if (lhs > (m0 < m1 ? m0 : m1)) ceil_ok = false;
  }
  rep.add("pants.floor_subadditive", floor_ok);
  rep.add("pants.ceiling_min_condition", ceil_ok);
  return rep;
}

/// Spectrum of action values over the dataset orbits with capping shifts in
/// a box; finite and sorted.
inline std::vector<Rat> action_spectrum(const FloerDataset& ds,
                                        const std::vector<Rat>& point,
                                        long long box = 2) {
  std::set<Rat> vals;
  std::size_t r = ds.geometry.rank;
  check_point_shape(point, r);
  GroupElement u(r, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == r) {
      for (const auto& o : ds.orbits)
        vals.insert(action_value(o, ds.geometry, point) -
                    action_shift(ds.geometry, u, point));
      return;
    }
    for (long long v = -box; v <= box; ++v) {
      u[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return std::vector<Rat>(vals.begin(), vals.end());
}

}  // namespace floerlib

#endif

