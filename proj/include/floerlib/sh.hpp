#ifndef FLOERLIB_SH_HPP
#define FLOERLIB_SH_HPP

#include "floerlib/floer.hpp"

namespace floerlib {

/// One rung of a Hamiltonian ladder: the dataset at this level and the
/// continuation entries from the previous rung (degree preserving).
struct LadderStage {
  Rat level{0};
  FloerDataset data;
  std::vector<DifferentialEntry> continuation;
};

/// Banded window family: fixed cones, a- levels marching down, a+ levels
/// marching up; both lists end in their stabilized values.
struct WindowFamily {
  RationalCone q_minus, q_plus;
  std::vector<std::vector<Rat>> a_minus_levels;
  std::vector<std::vector<Rat>> a_plus_levels;

  IntervalDomainPair pair(std::size_t j, std::size_t jp) const {
    return IntervalDomainPair{q_minus, q_plus, a_minus_levels[j],
                              a_plus_levels[jp]};
  }
};

struct FloerLadder {
  std::vector<LadderStage> stages;
  WindowFamily windows;
};

/// Homology-level matrix induced by a chain map in one degree.
inline QMat homology_map(const QMat& chain, const QMat& src_reps,
                         const QMat& dst_reps, const QMat& dst_din) {
  // coordinates in the target homology: quotient by im(dst_din), then solve
  // against the images of the target representatives
  std::vector<std::vector<Rat>> img;
  for (std::size_t c = 0; c < dst_din.cols(); ++c) {
    std::vector<Rat> v(dst_din.rows());
    for (std::size_t r = 0; r < dst_din.rows(); ++r) v[r] = dst_din(r, c);
    img.push_back(std::move(v));
  }
  QMat q = detail_sys::quotient_map(img, dst_din.rows());
  QMat qreps = q * dst_reps;
  QMat out(dst_reps.cols(), src_reps.cols());
  for (std::size_t c = 0; c < src_reps.cols(); ++c) {
    std::vector<Rat> v(src_reps.rows());
    for (std::size_t r = 0; r < src_reps.rows(); ++r) v[r] = src_reps(r, c);
    auto w = chain.apply(v);
    auto cls = q.apply(w);
    auto sol = solve(qreps, cls);
    if (!sol)
      throw DatasetError("chain map does not descend to homology");
    for (std::size_t r = 0; r < dst_reps.cols(); ++r) out(r, c) = (*sol)[r];
  }
  return out;
}

struct ShResult {
  DoubleSystem system;   // HF over the window grid, field coefficients
  LimInvLim lim;
  bool mittag_leffler = false;
  Report report;
  // stable-corner complex of the top ladder rung (largest window)
  FilteredComplex corner;
  HomologyResult corner_homology;
};

namespace detail_floer {

/// Build the chain-level continuation matrix between two complexes over the
/// same window from degree-preserving weighted entries.
inline std::map<long long, std::vector<std::vector<QSeries>>>
continuation_matrices(const FloerDataset& lo, const FloerDataset& hi,
                      const std::vector<DifferentialEntry>& entries,
                      const FilteredComplex& clo, const FilteredComplex& chi) {
  RingQ qq;
  std::map<long long, std::vector<std::vector<QSeries>>> out;
  for (long long p : clo.degrees) {
    auto s_it = clo.basis.find(p);
    auto d_it = chi.basis.find(p);
    std::size_t ns = s_it == clo.basis.end() ? 0 : s_it->second.size();
    std::size_t nd = d_it == chi.basis.end() ? 0 : d_it->second.size();
    out[p] = std::vector<std::vector<QSeries>>(
        nd, std::vector<QSeries>(ns, series_zero(qq, lo.cone_ctx, clo.trunc)));
  }
  for (const auto& e : entries) {
    const auto* s = lo.find(e.src);
    const auto* d = hi.find(e.dst);
    if (!s || !d)
      throw DatasetError("continuation entry references unknown orbit " +
                         e.src + "->" + e.dst);
    if (s->index != d->index)
      throw DatasetError("continuation entry " + e.src + "->" + e.dst +
                         " does not preserve the degree");
    auto s_it = clo.basis.find(s->index);
    if (s_it == clo.basis.end()) continue;
    auto srow = std::find(s_it->second.begin(), s_it->second.end(), e.src);
    if (srow == s_it->second.end()) continue;
    bool below = false;
    bool in_window = window_membership_shifted(*d, e.weight, hi.geometry,
                                               chi.pair, &below);
    if (below)
      throw DatasetError("continuation entry " + e.src + "->" + e.dst +
                         " drops below the window floor");
    if (!in_window) continue;
    auto d_it = chi.basis.find(d->index);
    if (d_it == chi.basis.end())
      throw DatasetError("continuation entry " + e.src + "->" + e.dst +
                         " has an unrepresentable target");
    auto drow = std::find(d_it->second.begin(), d_it->second.end(), e.dst);
    if (drow == d_it->second.end())
      throw DatasetError("continuation entry " + e.src + "->" + e.dst +
                         " has an unrepresentable target");
    auto& m = out[s->index];
    m[drow - d_it->second.begin()][srow - s_it->second.begin()] = series_add(
        m[drow - d_it->second.begin()][srow - s_it->second.begin()],
        series_monomial(RingQ{}, lo.cone_ctx, e.count, e.weight, clo.trunc));
  }
  return out;
}

inline bool novikov_mats_equal(
    const std::map<long long, std::vector<std::vector<QSeries>>>& a,
    const std::map<long long, std::vector<std::vector<QSeries>>>& b) {
  for (const auto& [p, mat] : a) {
    auto itb = b.find(p);
    std::size_t rows = mat.size(), cols = rows ? mat[0].size() : 0;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        QSeries other = itb != b.end() && i < itb->second.size() &&
                                j < itb->second[i].size()
                            ? itb->second[i][j]
                            : series_zero(RingQ{}, mat[i][j].ctx, mat[i][j].trunc);
        if (!series_eq(mat[i][j], other)) return false;
      }
  }
  return true;
}

/// Compose two Novikov matrices (b after a).
inline std::vector<std::vector<QSeries>> novikov_mul(
    const std::vector<std::vector<QSeries>>& b,
    const std::vector<std::vector<QSeries>>& a,
    std::shared_ptr<const ConeOrderContext> ctx, const Truncation& tr) {
  RingQ qq;
  std::size_t rows = b.size();
  std::size_t mid = a.size();
  std::size_t cols = mid ? a[0].size() : 0;
  std::vector<std::vector<QSeries>> out(
      rows, std::vector<QSeries>(cols, series_zero(qq, ctx, tr)));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < mid; ++k) {
      if (b[i].size() != mid) throw std::invalid_argument("shape mismatch");
      for (std::size_t j = 0; j < cols; ++j)
        out[i][j] = series_add(out[i][j], series_mul(b[i][k], a[k][j]));
    }
  return out;
}

}  // namespace detail_floer

/// Assemble the SH double system from a ladder and a banded window family,
/// verify the ladder hypotheses, and compute lim invlim with the
/// Mittag-Leffler flag.
inline ShResult sh_compute(const FloerLadder& ladder,
                           const std::vector<long long>& degrees,
                           const Truncation& trunc) {
  if (ladder.stages.empty()) throw DatasetError("empty ladder");
  const auto& wf = ladder.windows;
  std::size_t nj = wf.a_minus_levels.size(), nk = wf.a_plus_levels.size();
  if (nj == 0 || nk == 0) throw DatasetError("empty window family");
  ShResult res;

  // complexes per stage per window
  std::vector<std::vector<std::vector<FilteredComplex>>> cx(ladder.stages.size());
  for (std::size_t s = 0; s < ladder.stages.size(); ++s) {
    cx[s].resize(nj);
    for (std::size_t j = 0; j < nj; ++j)
      for (std::size_t k = 0; k < nk; ++k)
        cx[s][j].push_back(build_complex(ladder.stages[s].data, wf.pair(j, k),
                                         degrees, trunc));
  }

  // ladder hypotheses: continuation maps are filtration-respecting chain
  // isomorphisms commuting with the action maps
  bool cont_chain = true, cont_iso = true, cont_commute = true;
  for (std::size_t s = 0; s + 1 < ladder.stages.size(); ++s) {
    const auto& lo = ladder.stages[s].data;
    const auto& hi = ladder.stages[s + 1].data;
    for (std::size_t j = 0; j < nj; ++j)
      for (std::size_t k = 0; k < nk; ++k) {
        auto t = detail_floer::continuation_matrices(
            lo, hi, ladder.stages[s + 1].continuation, cx[s][j][k],
            cx[s + 1][j][k]);
        // chain map: d T = T d
        for (long long p : degrees) {
          auto dlo = cx[s][j][k].diff.count(p) ? cx[s][j][k].diff.at(p)
                                               : std::vector<std::vector<QSeries>>();
          auto dhi = cx[s + 1][j][k].diff.count(p)
                         ? cx[s + 1][j][k].diff.at(p)
                         : std::vector<std::vector<QSeries>>();
          if (!t.count(p) || !t.count(p + 1)) continue;
          auto lhs = detail_floer::novikov_mul(dhi, t.at(p), lo.cone_ctx, trunc);
          auto rhs = detail_floer::novikov_mul(t.at(p + 1), dlo, lo.cone_ctx, trunc);
          std::map<long long, std::vector<std::vector<QSeries>>> l{{p, lhs}},
              r{{p, rhs}};
          if (!detail_floer::novikov_mats_equal(l, r)) cont_chain = false;
        }
        // isomorphism on this window
        for (long long p : degrees) {
          if (!t.count(p)) continue;
          QMat m = constant_term_matrix(t.at(p));
          if (m.rows() != m.cols() || !inverse(m)) cont_iso = false;
        }
        // commutes with the action maps in the j-direction
        if (j + 1 < nj) {
          auto a_lo = action_map(cx[s][j][k], cx[s][j + 1][k]);
          auto a_hi = action_map(cx[s + 1][j][k], cx[s + 1][j + 1][k]);
          auto t2 = detail_floer::continuation_matrices(
              lo, hi, ladder.stages[s + 1].continuation, cx[s][j + 1][k],
              cx[s + 1][j + 1][k]);
          for (long long p : degrees) {
            if (!t.count(p) || !t2.count(p)) continue;
            auto lhs = detail_floer::novikov_mul(t2.at(p), a_lo.mats.at(p),
                                                 lo.cone_ctx, trunc);
            auto rhs = detail_floer::novikov_mul(a_hi.mats.at(p), t.at(p),
                                                 lo.cone_ctx, trunc);
            std::map<long long, std::vector<std::vector<QSeries>>> l{{p, lhs}},
                r{{p, rhs}};
            if (!detail_floer::novikov_mats_equal(l, r)) cont_commute = false;
          }
        }
      }
  }
  res.report.add("ladder.continuation_chain_maps", cont_chain);
  res.report.add("ladder.continuation_isomorphisms", cont_iso);
  res.report.add("ladder.squares_commute", cont_commute);
  if (!cont_chain || !cont_commute)
    throw DatasetError("ladder squares do not commute");

  // banded tails: window orbit sets stabilize at the last two levels
  bool stable = true;
  if (nj >= 2)
    for (std::size_t k = 0; k < nk && stable; ++k)
      if (cx.back()[nj - 1][k].basis != cx.back()[nj - 2][k].basis) stable = false;
  if (nk >= 2)
    for (std::size_t j = 0; j < nj && stable; ++j)
      if (cx.back()[j][nk - 1].basis != cx.back()[j][nk - 2].basis) stable = false;
  res.report.add("windows.banded_stabilization", stable);

  // HF double system over the grid from the stable (last) rung; K index 0
  // corresponds to the highest a+ level
  const auto& top = cx.back();
  std::vector<std::vector<HomologyResult>> hom(nj);
  for (std::size_t j = 0; j < nj; ++j)
    for (std::size_t k = 0; k < nk; ++k) hom[j].push_back(homology(top[j][k]));

  auto kk = [&](std::size_t k) { return nk - 1 - k; };  // grid K -> a+ level
  std::map<StageKey, DegreeRanks> stages;
  for (std::size_t j = 0; j < nj; ++j)
    for (std::size_t k = 0; k < nk; ++k) {
      DegreeRanks dr;
      for (const auto& [p, r] : hom[j][kk(k)].ranks)
        dr[static_cast<int>(p)] = r;
      stages[{static_cast<int>(j), static_cast<int>(k)}] = dr;
    }
  std::map<std::pair<StageKey, StageKey>, DegreeMats> arrows;
  auto hom_arrow = [&](std::size_t j0, std::size_t l0, std::size_t j1,
                       std::size_t l1) {
    auto am = action_map(top[j0][l0], top[j1][l1]);
    DegreeMats dm;
    for (long long p : degrees) {
      const auto& src_h = hom[j0][l0];
      const auto& dst_h = hom[j1][l1];
      auto sreps = src_h.representatives.count(p) ? src_h.representatives.at(p)
                                                  : QMat(0, 0);
      auto dreps = dst_h.representatives.count(p) ? dst_h.representatives.at(p)
                                                  : QMat(0, 0);
      QMat chain = am.mats.count(p) ? constant_term_matrix(am.mats.at(p))
                                    : QMat(top[j1][l1].rank_at(p),
                                           top[j0][l0].rank_at(p));
      auto din_it = top[j1][l1].diff.find(p - 1);
      QMat din = din_it != top[j1][l1].diff.end()
                     ? constant_term_matrix(din_it->second)
                     : QMat(top[j1][l1].rank_at(p), 0);
      dm[static_cast<int>(p)] = homology_map(chain, sreps, dreps, din);
    }
    return dm;
  };
  for (std::size_t j = 0; j + 1 < nj; ++j)
    for (std::size_t k = 0; k < nk; ++k)
      arrows[{{static_cast<int>(j), static_cast<int>(k)},
              {static_cast<int>(j + 1), static_cast<int>(k)}}] =
          hom_arrow(j, kk(k), j + 1, kk(k));
  for (std::size_t k = 0; k + 1 < nk; ++k)
    for (std::size_t j = 0; j < nj; ++j)
      arrows[{{static_cast<int>(j), static_cast<int>(k)},
              {static_cast<int>(j), static_cast<int>(k + 1)}}] =
          hom_arrow(j, kk(k), j, kk(k + 1));

  res.system = make_double_system(CoefKind::Q, FinitePoset::chain(nj),
                                  FinitePoset::chain(nk), std::move(stages),
                                  std::move(arrows));
  res.lim = lim_invlim(res.system);

  // Mittag-Leffler: the banded tail repeats the final a+ step, so the flag
  // asks that the last K-arrow be surjective for a cofinal set of j
  std::set<int> good;
  for (std::size_t j = 0; j < nj; ++j) {
    bool last_surj = true;
    if (nk >= 2)
      for (long long p : degrees) {
        QMat m = res.system.arrow(
            {static_cast<int>(j), static_cast<int>(nk - 2)},
            {static_cast<int>(j), static_cast<int>(nk - 1)}, static_cast<int>(p));
        if (rank(m) != m.rows()) {
          last_surj = false;
          break;
        }
      }
    if (last_surj) good.insert(static_cast<int>(j));
  }
  res.mittag_leffler = res.system.I.cofinal_above(good);
  res.report.add("system.mittag_leffler", res.mittag_leffler);

  res.corner = top[nj - 1][nk - 1];
  res.corner_homology = hom[nj - 1][nk - 1];
  return res;
}

struct BaseChangeResult {
  bool hypotheses_met = false;
  bool isomorphism = false;
  Report report;
  std::map<long long, long long> ranks_source, ranks_target;
};

/// Desk-scale version of the change-of-Novikov-ring comparison: with the
/// Mittag-Leffler gate and free finitely generated stages, the action-map
/// induced map SH^{Q0} (x) R1 -> SH^{Q1} must be an isomorphism, witnessed by
/// an explicit inverse over the truncated target ring.
inline BaseChangeResult base_change_check(const FloerLadder& ladder,
                                          const RationalCone& q1_minus,
                                          const RationalCone& q1_plus,
                                          const std::vector<long long>& degrees,
                                          const Truncation& trunc) {
  BaseChangeResult out;
  const auto& wf0 = ladder.windows;
  if (!cone_subset(q1_minus, wf0.q_minus) || !cone_subset(q1_plus, wf0.q_plus)) {
    out.report.add("basechange.smaller_pair", false);
    return out;
  }
  out.report.add("basechange.smaller_pair", true);

  // restricted ring: q-projections of the smaller plus-cone, same cofinal
  // element as the dataset context
  std::size_t r = ladder.stages[0].data.geometry.rank;
  std::vector<std::vector<Rat>> qgens;
  for (const auto& g : q1_plus.generators)
    qgens.push_back(detail_floer::q_part(g, r));
  auto restricted = cone_from_generators(r, qgens);
  for (const auto& g : restricted.generators)
    if (!cone_contains_by_facets(ladder.stages[0].data.cone_ctx->cone, g)) {
      out.report.add("basechange.ring_restriction", false,
                     "projected cone leaves the dataset order");
      return out;
    }

  FloerLadder ladder1 = ladder;
  for (auto& st : ladder1.stages) {
    auto ctx1 = std::make_shared<ConeOrderContext>(make_context(restricted));
    ctx1->y = st.data.cone_ctx->y;
    ctx1->cofinal_certificate = st.data.cone_ctx->cofinal_certificate;
    st.data.cone_ctx = ctx1;
  }
  ladder1.windows.q_minus = q1_minus;
  ladder1.windows.q_plus = q1_plus;

  auto sh0 = sh_compute(ladder, degrees, trunc);
  auto sh1 = sh_compute(ladder1, degrees, trunc);
  out.report.merge(sh1.report);

  bool free_stages = true;
  for (const auto& [p, m] : sh1.corner.diff)
    for (const auto& row : m)
      for (const auto& e : row)
        for (const auto& [exp, c] : e.terms)
          if (!g_is_zero(exp)) free_stages = false;
  out.report.add("basechange.free_stages", free_stages);
  out.report.add("basechange.lim1_gate", sh1.mittag_leffler);
  out.hypotheses_met = free_stages && sh1.mittag_leffler;
  if (!out.hypotheses_met) return out;

  // comparison at the stable corner: basis-tracking action map on homology
  out.ranks_source = sh0.corner_homology.ranks;
  out.ranks_target = sh1.corner_homology.ranks;
  bool iso = true;
  auto am = action_map(sh0.corner, sh1.corner);
  for (long long p : degrees) {
    auto sreps = sh0.corner_homology.representatives.count(p)
                     ? sh0.corner_homology.representatives.at(p)
                     : QMat(0, 0);
    auto dreps = sh1.corner_homology.representatives.count(p)
                     ? sh1.corner_homology.representatives.at(p)
                     : QMat(0, 0);
    QMat chain = am.mats.count(p) ? constant_term_matrix(am.mats.at(p))
                                  : QMat(sh1.corner.rank_at(p),
                                         sh0.corner.rank_at(p));
    auto din_it = sh1.corner.diff.find(p - 1);
    QMat din = din_it != sh1.corner.diff.end()
                   ? constant_term_matrix(din_it->second)
                   : QMat(sh1.corner.rank_at(p), 0);
    QMat hm = homology_map(chain, sreps, dreps, din);
    if (hm.rows() != hm.cols() || !inverse(hm)) iso = false;
  }
  out.isomorphism = iso;
  out.report.add("basechange.comparison_isomorphism", iso);
  return out;
}

}  // namespace floerlib

#endif
