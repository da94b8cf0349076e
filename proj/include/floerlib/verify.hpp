#ifndef FLOERLIB_VERIFY_HPP
#define FLOERLIB_VERIFY_HPP

#include "floerlib/cz.hpp"
#include "floerlib/flop.hpp"
#include "floerlib/rng.hpp"
#include "floerlib/sh.hpp"

namespace floerlib {
namespace verify {

// --- random generators ------------------------------------------------------------

/// Random salient cone of the given rank: a subcone of a unimodular image of
/// the positive orthant (salience inherited). full_dim forces spanning
/// generators so the order is antisymmetric.
inline RationalCone random_salient_cone(Rng& rng, std::size_t rank,
                                        bool full_dim) {
  // unimodular change of coordinates: random elementary row operations
  QMat u = QMat::identity(rank);
  for (int step = 0; step < 4; ++step) {
    std::size_t i = rng.range(0, rank - 1), j = rng.range(0, rank - 1);
    if (i == j) continue;
    Rat c(rng.range(-2, 2));
    for (std::size_t k = 0; k < rank; ++k) u(i, k) += c * u(j, k);
  }
  std::vector<std::vector<Rat>> gens;
  std::size_t count = full_dim ? rank : rng.range(1, rank);
  for (std::size_t g = 0; g < count; ++g) {
    std::vector<Rat> v(rank, Rat(0));
    if (full_dim) {
      v[g] = Rat(rng.range(1, 3));
      for (std::size_t k = 0; k < rank; ++k)
        if (k != g && rng.coin()) v[k] = Rat(rng.range(0, 2));
    } else {
      bool nonzero = false;
      for (std::size_t k = 0; k < rank; ++k) {
        v[k] = Rat(rng.range(0, 2));
        if (v[k] != 0) nonzero = true;
      }
      if (!nonzero) v[rng.range(0, rank - 1)] = 1;
    }
    gens.push_back(u.apply(v));
  }
  // an extra generator inside the cone keeps things interesting
  if (rng.coin() && gens.size() > 1) {
    std::vector<Rat> mix(rank, Rat(0));
    for (const auto& g : gens) {
      Rat coef(rng.range(0, 2));
      for (std::size_t k = 0; k < rank; ++k) mix[k] += g[k] * coef;
    }
    gens.push_back(mix);
  }
  return cone_from_generators(rank, gens);
}

inline std::vector<GroupElement> standard_group_gens(std::size_t rank) {
  std::vector<GroupElement> gens;
  for (std::size_t i = 0; i < rank; ++i) {
    GroupElement e(rank, 0);
    e[i] = 1;
    gens.push_back(e);
    e[i] = -1;
    gens.push_back(e);
  }
  return gens;
}

inline GroupElement random_box_element(Rng& rng, std::size_t rank,
                                       long long bound) {
  GroupElement g(rank);
  for (std::size_t i = 0; i < rank; ++i) g[i] = rng.range(-bound, bound);
  return g;
}

inline GroupElement random_nonneg_element(Rng& rng,
                                          const ConeOrderContext& ctx,
                                          long long bound) {
  for (int tries = 0; tries < 200; ++tries) {
    auto g = random_box_element(rng, ctx.rank, bound);
    if (cone_leq(ctx, g_zero(ctx.rank), g)) return g;
  }
  return g_zero(ctx.rank);
}

template <class R>
NovikovSeries<R> random_series(Rng& rng, R ring,
                               std::shared_ptr<const ConeOrderContext> ctx,
                               const Truncation& tr, int terms,
                               long long box = 4) {
  auto s = series_zero(ring, ctx, tr);
  for (int t = 0; t < terms; ++t) {
    auto e = random_nonneg_element(rng, *ctx, box);
    auto c = ring.parse(std::to_string(rng.range(-5, 5)));
    s = series_add(s, series_monomial(ring, ctx, c, e, tr));
  }
  return s;
}

// --- cones ---------------------------------------------------------------------------

inline Report cones_suite(std::uint64_t seed, int cases) {
  Rng rng(seed);
  Report rep;
  bool refl = true, trans = true, antisym = true, transl = true, sal = true,
       cof = true, ideal = true, dd = true;
  int cof_successes = 0;
  for (int c = 0; c < cases; ++c) {
    std::size_t rank = rng.range(1, 4);
    auto cone = random_salient_cone(rng, rank, true);
    auto ctx = make_context(cone);
    auto x = random_box_element(rng, rank, 6);
    auto y = random_box_element(rng, rank, 6);
    auto z = random_box_element(rng, rank, 6);
    if (!cone_leq(ctx, x, x)) refl = false;
    if (cone_leq(ctx, x, y) && cone_leq(ctx, y, z) && !cone_leq(ctx, x, z))
      trans = false;
    if (cone_leq(ctx, x, y) && cone_leq(ctx, y, x) && x != y) antisym = false;
    if (cone_leq(ctx, x, y) !=
        cone_leq(ctx, g_zero(rank), g_sub(y, x)))
      transl = false;
    if (cone_leq(ctx, g_add(x, z), g_add(y, z)) != cone_leq(ctx, x, y))
      transl = false;
    if (is_salient(cone) && !g_is_zero(x) && cone_leq(ctx, x, g_zero(rank)) &&
        cone_leq(ctx, g_zero(rank), x))
      sal = false;

    // cofinal certificate: random box elements dominated by a power of y.
    // A bound-exceeded error is the documented outcome for very thin cones:
    // retried with a raised bound, then skipped.
    try {
      GroupElement yy;
      try {
        yy = cofinal_element(ctx, standard_group_gens(rank));
      } catch (const CofinalSearchError&) {
        yy = cofinal_element(ctx, standard_group_gens(rank), 64);
      }
      ++cof_successes;
      bool found = false;
      for (long long n = 0; n <= 512; ++n)
        if (cone_leq(ctx, x, g_scale(n, yy))) {
          found = true;
          break;
        }
      if (!found) cof = false;
    } catch (const CofinalSearchError&) {
      // skipped; the search bound certificate story is exercised elsewhere
    }

    // ideal-power containments
    {
      auto xe = random_nonneg_element(rng, ctx, 4);
      auto a = g_add(xe, random_nonneg_element(rng, ctx, 4));
      auto b = g_add(xe, random_nonneg_element(rng, ctx, 4));
      if (!cone_leq(ctx, g_scale(2, xe), g_add(a, b))) ideal = false;
      long long m = rng.range(0, 4);
      auto cc = g_add(g_scale(m, xe), random_nonneg_element(rng, ctx, 8));
      if (!cone_leq(ctx, g_scale(m, xe), cc)) ideal = false;
      if (!cone_leq(ctx, g_zero(rank), g_sub(cc, g_scale(m, xe)))) ideal = false;
    }

    // double description: facet membership matches LP membership
    for (int probe = 0; probe < 4; ++probe) {
      std::vector<Rat> v(rank);
      for (auto& vi : v) vi = Rat(rng.range(-4, 4));
      if (cone_contains(cone, v) != cone_contains_by_facets(cone, v)) dd = false;
    }
  }
  rep.add("cones.reflexive", refl);
  rep.add("cones.transitive", trans);
  rep.add("cones.antisymmetric_full_dim", antisym);
  rep.add("cones.translation_invariant", transl);
  rep.add("cones.salient_no_inverse_pair", sal);
  rep.add("cones.cofinal_certificates", cof && cof_successes > cases / 2);
  rep.add("cones.ideal_power_law", ideal);
  rep.add("cones.double_description_agrees", dd);
  return rep;
}

// --- novikov -------------------------------------------------------------------------

inline Report novikov_suite(std::uint64_t seed, int cases) {
  Rng rng(seed);
  Report rep;
  RingQ qq;
  bool assoc = true, comm = true, dist = true, unit = true, trunc_hom = true,
       restrict_hom = true, val_ok = true, tower_ok = true, localize_ok = true,
       square_ok = true;
  for (int c = 0; c < cases; ++c) {
    std::size_t rank = rng.range(1, 4);
    auto cone = random_salient_cone(rng, rank, true);
    auto ctx = std::make_shared<ConeOrderContext>(make_context(cone));
    GroupElement y;
    try {
      y = cofinal_element(*ctx, standard_group_gens(rank));
    } catch (const CofinalSearchError&) {
      continue;
    }
    std::shared_ptr<const ConeOrderContext> cctx = ctx;
    long long m = rng.range(2, 6);
    Truncation tr{y, m};
    auto a = random_series(rng, qq, cctx, tr, 3);
    auto b = random_series(rng, qq, cctx, tr, 3);
    auto d = random_series(rng, qq, cctx, tr, 3);
    auto one = series_one(qq, cctx, tr);
    if (!series_eq(series_mul(series_mul(a, b), d),
                   series_mul(a, series_mul(b, d))))
      assoc = false;
    if (!series_eq(series_mul(a, b), series_mul(b, a))) comm = false;
    if (!series_eq(series_mul(a, series_add(b, d)),
                   series_add(series_mul(a, b), series_mul(a, d))))
      dist = false;
    if (!series_eq(series_mul(a, one), a)) unit = false;

    // truncation is a ring map and the completion tower is consistent
    long long lower = rng.range(1, m - 1);
    auto t1 = series_truncate(series_mul(a, b), y, lower);
    auto t2 = series_truncate(
        series_mul(series_truncate(a, y, lower), series_truncate(b, y, lower)),
        y, lower);
    if (!series_eq(t1, t2)) trunc_hom = false;
    auto s1 = series_truncate(series_add(a, b), y, lower);
    auto s2 = series_add(series_truncate(a, y, lower),
                         series_truncate(b, y, lower));
    if (!series_eq(s1, s2)) tower_ok = false;

    // valuation is non-archimedean, with equality over the rational field:
    // tested on untruncated copies so the leading terms are never dropped
    if (!cone.generators.empty()) {
      const auto& f = cone.generators[rng.range(0, cone.generators.size() - 1)];
      auto ua = series_from_text(qq, cctx, series_to_text(a));
      auto ub = series_from_text(qq, cctx, series_to_text(b));
      auto va = valuation(ua, f), vb = valuation(ub, f);
      auto vab = valuation(series_mul(ua, ub), f);
      if (va && vb) {
        if (!vab || *vab != *va + *vb) val_ok = false;
      }
      // truncated products can only move the valuation up
      auto vt = valuation(series_mul(a, b), f);
      auto ta = valuation(a, f), tb = valuation(b, f);
      if (ta && tb && vt && *vt < *ta + *tb) val_ok = false;
    }

    // restriction to a subcone is a ring map into the positive part
    std::vector<std::vector<Rat>> subgens;
    for (const auto& g : cone.generators)
      if (rng.coin() || subgens.empty()) subgens.push_back(g);
    auto sub = cone_from_generators(rank, subgens);
    auto ra = restrict_cone(a, sub);
    auto rb = restrict_cone(b, sub);
    if (!series_eq(restrict_cone(series_mul(a, b), sub), series_mul(ra, rb)))
      restrict_hom = false;
    if (!series_eq(restrict_cone(series_add(a, b), sub), series_add(ra, rb)))
      restrict_hom = false;

    // localization inverts the cofinal element
    auto ty = series_monomial(qq, cctx, Rat(1), y, tr);
    if (!localized_eq(localized_mul(localize(one, 1), localize(ty, 0)),
                      localize(one, 0)))
      localize_ok = false;

    // base-change square: restrict then localize = localize then restrict
    auto pos = random_series(rng, qq, cctx, tr, 3);
    long long pw = rng.range(0, 2);
    auto route1 = localize(restrict_cone(pos, sub), pw);
    auto loc0 = localize(pos, pw);
    LocalizedElement<RingQ> route2{restrict_cone(loc0.numerator, sub),
                                   loc0.power};
    if (!localized_eq(route1, route2)) square_ok = false;
  }
  rep.add("novikov.mul_associative", assoc);
  rep.add("novikov.mul_commutative", comm);
  rep.add("novikov.distributive", dist);
  rep.add("novikov.unital", unit);
  rep.add("novikov.truncation_ring_map", trunc_hom);
  rep.add("novikov.completion_tower_consistent", tower_ok);
  rep.add("novikov.valuation_nonarchimedean", val_ok);
  rep.add("novikov.restriction_ring_map", restrict_hom);
  rep.add("novikov.localization_inverts_y", localize_ok);
  rep.add("novikov.base_change_square", square_ok);
  return rep;
}

// --- cz ------------------------------------------------------------------------------

inline QMat random_symmetric(Rng& rng, std::size_t n, long long bound = 3) {
  QMat b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      Rat v(rng.range(-bound, bound));
      b(i, j) = v;
      b(j, i) = v;
    }
  return b;
}

/// Random symbolic path starting at the identity.
inline PathPtr random_identity_based_path(Rng& rng, int depth = 2) {
  long long kind = rng.range(0, depth > 0 ? 4 : 2);
  switch (kind) {
    case 0:
      return make_rotation(Rat(rng.range(-6, 6), rng.range(1, 3)));
    case 1:
      return make_shear(random_symmetric(rng, rng.range(1, 2)),
                        rng.coin() ? +1 : -1);
    case 2: {
      auto s = random_symmetric(rng, 2 * rng.range(1, 2), 1);
      return make_ham_exp(s, Rat(1, 4));
    }
    case 3:
      return make_direct_sum(random_identity_based_path(rng, depth - 1),
                             random_identity_based_path(rng, depth - 1));
    default: {
      // catenation of a rotation with its continuation
      Rat a(rng.range(-4, 4), rng.range(1, 2));
      Rat b = a + Rat(rng.range(-4, 4), rng.range(1, 2));
      return make_catenation(make_rotation_segment(Rat(0), a),
                             make_rotation_segment(a, b));
    }
  }
}

inline Report cz_suite(std::uint64_t seed, int cases) {
  Rng rng(seed);
  Report rep;
  bool cz1 = cz_index(symbolic(make_rotation(Rat(2)))).value == Half(4);
  rep.add("cz.normalization", cz1);

  bool additive = true, catenation = true;
  for (int c = 0; c < cases; ++c) {
    auto p = random_identity_based_path(rng);
    auto q = random_identity_based_path(rng);
    Half vp = cz_index(symbolic(p)).value, vq = cz_index(symbolic(q)).value;
    if (cz_index(symbolic(make_direct_sum(p, q))).value != vp + vq)
      additive = false;
    // catenation with matching endpoints built from rotation segments
    Rat a(rng.range(-5, 5), rng.range(1, 3));
    Rat b = a + Rat(rng.range(-5, 5), rng.range(1, 3));
    Rat d = b + Rat(rng.range(-5, 5), rng.range(1, 3));
    auto seg1 = make_rotation_segment(a, b);
    auto seg2 = make_rotation_segment(b, d);
    Half whole = cz_index(symbolic(make_rotation_segment(a, d))).value;
    Half split = cz_index(symbolic(make_catenation(seg1, seg2))).value;
    if (whole != split) catenation = false;
  }
  rep.add("cz.direct_sum_additive", additive);
  rep.add("cz.catenation_additive", catenation);

  bool shear_ok = true;
  for (int c = 0; c < cases; ++c) {
    std::size_t n = rng.range(1, 4);
    QMat b = random_symmetric(rng, n);
    Half expect(signature(b));
    if (cz_index(symbolic(make_shear(b, +1))).value != expect) shear_ok = false;
  }
  rep.add("cz.shear_half_signature", shear_ok);

  bool const_ok =
      cz_index(symbolic(make_constant(QMat::identity(4)))).value == Half(0);
  {
    QMat hyp(2, 2);
    hyp(0, 0) = 2;
    hyp(1, 1) = Rat(1, 2);
    const_ok = const_ok &&
               cz_index(symbolic(make_constant(hyp))).value == Half(0);
  }
  rep.add("cz.constant_rank_zero", const_ok);

  bool short_ok = true;
  for (int c = 0; c < cases; ++c) {
    std::size_t n = rng.range(1, 2);
    QMat s = random_symmetric(rng, 2 * n, 1);
    Half v = cz_index(symbolic(make_ham_exp(s, Rat(1, 8)))).value;
    long long k = 2 * static_cast<long long>(n);  // kernel of A_0 - id is everything
    if (half_abs(v).twice > k) short_ok = false;  // |v| <= k/2
  }
  rep.add("cz.short_path_bound", short_ok);

  bool lag_ok = true;
  for (int c = 0; c < cases; ++c) {
    std::size_t n = rng.range(1, 5);
    QMat b0 = random_symmetric(rng, n), b1 = random_symmetric(rng, n);
    Half v = lagrangian_pair_index(b0, b1);
    if (v != Half(signature(b1) - signature(b0))) lag_ok = false;
    if (half_abs(v).twice > 4 * static_cast<long long>(n)) lag_ok = false;
    // agreement with the concatenated shear path
    Half via_path =
        cz_index(symbolic(make_shear_segment(true, b0 * Rat(-1), b1 * Rat(-1))))
            .value;
    if (via_path != v) lag_ok = false;
  }
  rep.add("cz.lagrangian_pair_bound", lag_ok);

  bool gap_ok = true;
  for (int c = 0; c < cases; ++c) {
    Rat f2(rng.range(-4, 4), rng.range(1, 3));
    auto base = symbolic(random_identity_based_path(rng, 1));
    Half gap = fiber_vs_reeb_gap(f2, base);
    if (gap.twice < -1 || gap.twice > 1) gap_ok = false;
    int s = sign_of(f2);
    if (gap.twice != s) gap_ok = false;
  }
  rep.add("cz.fiber_reeb_gap", gap_ok);

  // reparameterization invariance on sampled rotations
  bool reparam_ok = true;
  for (int c = 0; c < std::max(1, cases / 10); ++c) {
    SampledPath sp;
    sp.half_dim = 1;
    auto rot = [](long long quarters) {
      static const long long cs[4] = {1, 0, -1, 0};
      QMat m(2, 2);
      long long qq = ((quarters % 4) + 4) % 4;
      m(0, 0) = cs[qq];
      m(0, 1) = -cs[(qq + 3) % 4];
      m(1, 0) = cs[(qq + 3) % 4];
      m(1, 1) = cs[qq];
      return m;
    };
    long long steps = rng.range(2, 5);
    for (long long s = 0; s <= steps; ++s)
      sp.samples.emplace_back(Rat(s, steps), rot(s));
    Half v0 = cz_index(sampled(sp)).value;
    SampledPath sp2 = sp;
    for (auto& [t, m] : sp2.samples) t = t * t / 2 + t / 2;  // monotone on [0,1]
    if (cz_index(sampled(sp2)).value != v0) reparam_ok = false;
  }
  rep.add("cz.reparameterization_invariant", reparam_ok);
  return rep;
}

// --- double systems --------------------------------------------------------------

/// Random finite double system over chains: stages are coordinate subspaces
/// of a common universe (I-direction grows, K-direction quotients), then
/// conjugated by random invertible matrices so the arrows look generic.
struct RandomSystem {
  DoubleSystem sys;
  std::size_t ni = 0, nk = 0;
};

inline RandomSystem random_double_system(Rng& rng, std::size_t universe = 4) {
  std::size_t ni = rng.range(2, 3), nk = rng.range(2, 3);
  // monotone subsets: I(i) increasing, K(k) decreasing; stage = I(i) cap K(k)
  std::vector<std::vector<bool>> iset(ni, std::vector<bool>(universe, false));
  std::vector<std::vector<bool>> kset(nk, std::vector<bool>(universe, false));
  for (std::size_t u = 0; u < universe; ++u) {
    std::size_t from = rng.range(0, ni - 1);
    for (std::size_t i = from; i < ni; ++i) iset[i][u] = true;
    std::size_t until = rng.range(0, nk - 1);
    for (std::size_t k = 0; k <= until; ++k) kset[k][u] = true;
  }
  auto members = [&](std::size_t i, std::size_t k) {
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < universe; ++u)
      if (iset[i][u] && kset[k][u]) out.push_back(u);
    return out;
  };
  // random invertible change of basis per stage
  auto random_invertible = [&](std::size_t n) {
    QMat m = QMat::identity(n);
    for (int step = 0; step < 3; ++step) {
      if (n < 2) break;
      std::size_t a = rng.range(0, n - 1), b = rng.range(0, n - 1);
      if (a == b) continue;
      Rat c(rng.range(-2, 2));
      for (std::size_t j = 0; j < n; ++j) m(a, j) += c * m(b, j);
    }
    return m;
  };
  std::map<StageKey, QMat> change, change_inv;
  std::map<StageKey, DegreeRanks> stages;
  for (std::size_t i = 0; i < ni; ++i)
    for (std::size_t k = 0; k < nk; ++k) {
      auto mem = members(i, k);
      StageKey s{static_cast<int>(i), static_cast<int>(k)};
      stages[s] = DegreeRanks{{0, static_cast<long long>(mem.size())}};
      QMat m = random_invertible(mem.size());
      change[s] = m;
      change_inv[s] = *inverse(m);
    }
  auto proj = [&](std::size_t i0, std::size_t k0, std::size_t i1,
                  std::size_t k1) {
    auto src = members(i0, k0), dst = members(i1, k1);
    QMat p(dst.size(), src.size());
    for (std::size_t c = 0; c < src.size(); ++c) {
      auto it = std::find(dst.begin(), dst.end(), src[c]);
      if (it != dst.end()) p(it - dst.begin(), c) = 1;
    }
    StageKey s0{static_cast<int>(i0), static_cast<int>(k0)};
    StageKey s1{static_cast<int>(i1), static_cast<int>(k1)};
    return change[s1] * p * change_inv[s0];
  };
  std::map<std::pair<StageKey, StageKey>, DegreeMats> arrows;
  for (std::size_t i = 0; i + 1 < ni; ++i)
    for (std::size_t k = 0; k < nk; ++k)
      arrows[{{static_cast<int>(i), static_cast<int>(k)},
              {static_cast<int>(i + 1), static_cast<int>(k)}}][0] =
          proj(i, k, i + 1, k);
  for (std::size_t k = 0; k + 1 < nk; ++k)
    for (std::size_t i = 0; i < ni; ++i)
      arrows[{{static_cast<int>(i), static_cast<int>(k)},
              {static_cast<int>(i), static_cast<int>(k + 1)}}][0] =
          proj(i, k, i, k + 1);
  RandomSystem out;
  out.ni = ni;
  out.nk = nk;
  out.sys = make_double_system(CoefKind::Q, FinitePoset::chain(ni),
                               FinitePoset::chain(nk), std::move(stages),
                               std::move(arrows));
  return out;
}

inline Report systems_suite(std::uint64_t seed, int cases) {
  Rng rng(seed);
  Report rep;

  bool cofinal_ok = true, endo_ok = true, ml_ok = true, compose_ok = true;
  for (int c = 0; c < cases; ++c) {
    auto rs = random_double_system(rng);
    auto full = lim_invlim(rs.sys);

    // random cofinal restriction: suffix of I, prefix of K (plus random extras)
    std::set<int> isub, ksub;
    for (std::size_t i = rng.range(0, rs.ni - 1); i < rs.ni; ++i)
      isub.insert(static_cast<int>(i));
    for (std::size_t k = 0; k <= static_cast<std::size_t>(rng.range(0, rs.nk - 1)); ++k)
      ksub.insert(static_cast<int>(k));
    auto cr = cofinal_restrict(rs.sys, isub, ksub);
    cr.inclusion.src = &cr.sub;
    cr.inclusion.dst = &rs.sys;
    validate_morphism(cr.inclusion);
    auto small = lim_invlim(cr.sub);
    auto cmp = induced_on_lim_invlim(cr.inclusion, small, full);
    for (const auto& [d, m] : cmp) {
      if (m.rows() != m.cols() || !inverse(m)) cofinal_ok = false;
    }
    if (small.module.ranks != full.module.ranks) cofinal_ok = false;

    // standard endomorphisms act as the identity on lim invlim
    std::vector<int> choice(rs.sys.K.size());
    for (std::size_t k = 0; k < rs.sys.K.size(); ++k)
      choice[k] = static_cast<int>(rng.range(0, static_cast<long long>(k)));
    auto endo = standard_endomorphism(rs.sys, choice);
    auto ind = induced_on_lim_invlim(endo, full, full);
    for (const auto& [d, m] : ind)
      if (!(m == QMat::identity(m.rows()))) endo_ok = false;

    // Mittag-Leffler soundness on slice towers built from the K-direction
    TowerSliceSystem tss;
    tss.coef = CoefKind::Q;
    tss.I = rs.sys.I;
    for (std::size_t i = 0; i < rs.ni; ++i) {
      // tower stage j corresponds to K index nk-1-j; the stabilized tail
      // beyond K index 0 is the identity band
      BandedTower t;
      t.coef = CoefKind::Q;
      for (std::size_t j = 0; j + 1 < rs.nk; ++j)
        t.prefix.push_back(rs.sys.stage({static_cast<int>(i),
                                          static_cast<int>(rs.nk - 1 - j)}));
      t.band = rs.sys.stage({static_cast<int>(i), 0});
      t.maps.resize(t.prefix.size());
      for (std::size_t j = 0; j < t.prefix.size(); ++j) {
        int khi = static_cast<int>(rs.nk - 1 - j);
        DegreeMats dm;
        dm[0] = rs.sys.arrow({static_cast<int>(i), khi - 1},
                             {static_cast<int>(i), khi}, 0);
        t.maps[j] = dm;
      }
      t.band_map[0] = QMat::identity(rank_at(t.band, 0));
      tss.slices.push_back(std::move(t));
    }
    if (mittag_leffler_check(tss)) {
      for (const auto& t : tss.slices)
        if (!lim1_tower(t).is_zero) ml_ok = false;
    }

    // composition of morphisms is associative
    auto e1 = standard_endomorphism(rs.sys, choice);
    std::vector<int> id_choice(rs.sys.K.size());
    for (std::size_t k = 0; k < rs.sys.K.size(); ++k)
      id_choice[k] = static_cast<int>(k);
    auto e2 = standard_endomorphism(rs.sys, id_choice);
    auto lhs = compose(compose(e1, e2), e1);
    auto rhs = compose(e1, compose(e2, e1));
    if (!morphisms_equal(lhs, rhs)) compose_ok = false;
  }
  rep.add("systems.cofinal_invariance", cofinal_ok);
  rep.add("systems.standard_endomorphism_identity", endo_ok);
  rep.add("systems.mittag_leffler_sound", ml_ok);
  rep.add("systems.composition_associative", compose_ok);

  // lim1: towers of surjections vanish; the x2 integer tower does not
  {
    BandedTower surj;
    surj.coef = CoefKind::Z;
    surj.band = DegreeRanks{{0, 2}};
    QMat m(2, 2);
    m(0, 0) = 1;
    m(1, 1) = -1;
    surj.band_map[0] = m;
    bool ok = lim1_tower(surj).is_zero;
    BandedTower doubling;
    doubling.coef = CoefKind::Z;
    doubling.band = DegreeRanks{{0, 1}};
    QMat two(1, 1);
    two(0, 0) = 2;
    doubling.band_map[0] = two;
    auto r = lim1_tower(doubling);
    ok = ok && !r.is_zero && !r.witness.empty();
    // field towers always vanish
    BandedTower f;
    f.coef = CoefKind::Q;
    f.band = DegreeRanks{{0, 3}};
    QMat fm(3, 3);
    fm(0, 1) = 1;
    f.band_map[0] = fm;
    ok = ok && lim1_tower(f).is_zero;
    rep.add("systems.lim1_classification", ok);
  }
  return rep;
}

// --- floer ---------------------------------------------------------------------------

/// Standard rank-1 window cones: Q+ spanned by (q0,1,1), Q- by (q0,1,1) and
/// (q0,0,1).
inline IntervalDomainPair standard_pair(std::size_t rank,
                                        const std::vector<Rat>& q0,
                                        const Rat& floor_level,
                                        const Rat& ceil_level) {
  IntervalDomainPair p;
  std::vector<Rat> g1(q0), g2(q0);
  g1.push_back(Rat(1));
  g1.push_back(Rat(1));
  g2.push_back(Rat(0));
  g2.push_back(Rat(1));
  p.q_plus = cone_from_generators(rank + 2, {g1});
  p.q_minus = cone_from_generators(rank + 2, {g1, g2});
  p.a_minus.assign(rank + 2, Rat(0));
  p.a_plus.assign(rank + 2, Rat(0));
  // a(q, lm, lp) = level * lp evaluates to `level` on both generators
  p.a_minus[rank + 1] = floor_level;
  p.a_plus[rank + 1] = ceil_level;
  return p;
}

/// Random dataset over the orthant order with inside orbits, staircase
/// differential (even degrees to odd only, so d^2 = 0 syntactically), and
/// actions arranged to respect the filtration.
inline FloerDataset random_dataset(Rng& rng, std::size_t rank = 1) {
  FloerDataset ds;
  ds.geometry.rank = rank;
  ds.geometry.w.assign(rank, Rat(0));
  ds.geometry.n = 3;
  std::vector<std::vector<Rat>> gens;
  for (std::size_t i = 0; i < rank; ++i) {
    std::vector<Rat> e(rank, Rat(0));
    e[i] = 1;
    gens.push_back(e);
  }
  auto ctx = std::make_shared<ConeOrderContext>(
      make_context(cone_from_generators(rank, gens)));
  cofinal_element(*ctx, standard_group_gens(rank));
  ds.cone_ctx = ctx;
  ds.trunc_level = 4;
  long long count = rng.range(3, 7);
  for (long long i = 0; i < count; ++i) {
    CappedOrbitRecord o;
    o.id = "g" + std::to_string(i);
    o.index = rng.range(-1, 2);
    o.capping = GroupElement(rank, 0);
    o.i1 = Rat(rng.range(0, 6));
    o.i2 = Rat(0);
    o.location = OrbitLocation::Inside;
    ds.orbits.push_back(std::move(o));
  }
  // raise actions of higher-index orbits so every candidate entry respects
  // the filtration (lambda- coordinates of the standard cones are >= 0)
  for (auto& o : ds.orbits) o.i1 += Rat(4 * (o.index + 2));
  for (const auto& s : ds.orbits) {
    if (s.index % 2 != 0) continue;  // entries leave even degrees only
    for (const auto& d : ds.orbits) {
      if (d.index != s.index + 1 || !rng.coin()) continue;
      DifferentialEntry e;
      e.src = s.id;
      e.dst = d.id;
      e.weight = random_nonneg_element(rng, *ctx, 1);
      e.count = Rat(rng.range(-2, 2));
      if (e.count == 0) e.count = 1;
      ds.differential.push_back(std::move(e));
    }
  }
  return ds;
}

inline Report floer_suite(std::uint64_t seed, int cases) {
  Rng rng(seed);
  Report rep;
  bool valid_ok = true, mut_action = true, mut_degree = true, mut_dd = true,
       linear_ok = true, window_iso_ok = true, compose_ok = true;
  std::string valid_witness;
  for (int c = 0; c < cases; ++c) {
    auto ds = random_dataset(rng);
    auto pair = standard_pair(ds.geometry.rank, {Rat(1)}, Rat(0), Rat(1000));
    auto rep0 = validate_dataset(ds, &pair);
    if (!rep0.all_pass()) {
      valid_ok = false;
      for (const auto& ck : rep0.checks)
        if (!ck.pass && valid_witness.empty())
          valid_witness = ck.name + " " + ck.witness;
    }

    // mutation: action violation (an entry whose target sits below the floor)
    {
      auto bad = ds;
      CappedOrbitRecord low;
      low.id = "low";
      low.index = 2;
      low.capping = GroupElement(ds.geometry.rank, 0);
      low.i1 = Rat(-50);
      low.location = OrbitLocation::Inside;
      CappedOrbitRecord src;
      src.id = "src1";
      src.index = 1;
      src.capping = GroupElement(ds.geometry.rank, 0);
      src.i1 = Rat(20);
      src.location = OrbitLocation::Inside;
      bad.orbits.push_back(low);
      bad.orbits.push_back(src);
      bad.differential.push_back({"src1", "low", GroupElement(ds.geometry.rank, 0), Rat(1)});
      auto r = validate_dataset(bad, &pair);
      bool flagged = false;
      for (const auto& ck : r.checks)
        if (ck.name == "dataset.filtration_inequality" && !ck.pass) flagged = true;
      if (!flagged) mut_action = false;
    }
    // mutation: degree violation
    {
      auto bad = ds;
      if (bad.orbits.size() >= 2) {
        bad.differential.push_back(
            {bad.orbits[0].id, bad.orbits[0].id, GroupElement(ds.geometry.rank, 0), Rat(1)});
        auto r = validate_dataset(bad, &pair);
        bool flagged = false;
        for (const auto& ck : r.checks)
          if (ck.name == "dataset.entry_degree" && !ck.pass) flagged = true;
        if (!flagged) mut_degree = false;
      }
    }
    // mutation: d^2 != 0 via a three-step chain
    {
      auto bad = ds;
      GroupElement z(ds.geometry.rank, 0);
      for (const auto& id : {"x0", "x1", "x2"}) {
        CappedOrbitRecord o;
        o.id = id;
        o.capping = z;
        o.location = OrbitLocation::Inside;
        bad.orbits.push_back(o);
      }
      bad.orbits[bad.orbits.size() - 3].index = 10;
      bad.orbits[bad.orbits.size() - 3].i1 = Rat(100);
      bad.orbits[bad.orbits.size() - 2].index = 11;
      bad.orbits[bad.orbits.size() - 2].i1 = Rat(101);
      bad.orbits[bad.orbits.size() - 1].index = 12;
      bad.orbits[bad.orbits.size() - 1].i1 = Rat(102);
      bad.differential.push_back({"x0", "x1", z, Rat(1)});
      bad.differential.push_back({"x1", "x2", z, Rat(1)});
      auto r = validate_dataset(bad, &pair);
      bool flagged = false;
      for (const auto& ck : r.checks)
        if (ck.name == "dataset.d_squared_zero" && !ck.pass) flagged = true;
      if (!flagged) mut_dd = false;
    }

    // action linearity on convex combinations of cone points
    for (const auto& o : ds.orbits) {
      const auto& g1 = pair.q_minus.generators[0];
      const auto& g2 = pair.q_minus.generators[1];
      Rat l1(rng.range(0, 4)), l2(rng.range(0, 4));
      std::vector<Rat> mix(g1.size());
      for (std::size_t i = 0; i < g1.size(); ++i)
        mix[i] = l1 * g1[i] + l2 * g2[i];
      Rat lhs = action_value(o, ds.geometry, mix);
      Rat rhs = l1 * action_value(o, ds.geometry, g1) +
                l2 * action_value(o, ds.geometry, g2);
      if (lhs != rhs) linear_ok = false;
    }

    // window-equality isomorphism & action map composition
    auto cx0 = build_complex(ds, pair, {-1, 0, 1, 2}, Truncation{*ds.cone_ctx->y, 4});
    auto pair1 = standard_pair(ds.geometry.rank, {Rat(1)}, Rat(-5), Rat(999));
    auto pair2 = standard_pair(ds.geometry.rank, {Rat(1)}, Rat(-9), Rat(998));
    auto cx1 = build_complex(ds, pair1, {-1, 0, 1, 2}, Truncation{*ds.cone_ctx->y, 4});
    auto cx2 = build_complex(ds, pair2, {-1, 0, 1, 2}, Truncation{*ds.cone_ctx->y, 4});
    auto a01 = action_map(cx0, cx1);
    auto a12 = action_map(cx1, cx2);
    auto a02 = action_map(cx0, cx2);
    for (long long p : cx0.degrees) {
      auto direct = a02.mats.at(p);
      auto via = detail_floer::novikov_mul(a12.mats.at(p), a01.mats.at(p),
                                           ds.cone_ctx, cx0.trunc);
      std::map<long long, std::vector<std::vector<QSeries>>> l{{p, direct}},
          r{{p, via}};
      if (!detail_floer::novikov_mats_equal(l, r)) compose_ok = false;
      if (cx0.basis.count(p) && cx1.basis.count(p) &&
          cx0.basis.at(p) == cx1.basis.at(p)) {
        QMat m = constant_term_matrix(a01.mats.at(p));
        if (m.rows() != m.cols() || !inverse(m)) window_iso_ok = false;
      }
    }
  }
  rep.add("floer.random_datasets_validate", valid_ok, valid_witness);
  rep.add("floer.mutation_action_rejected", mut_action);
  rep.add("floer.mutation_degree_rejected", mut_degree);
  rep.add("floer.mutation_dsquared_rejected", mut_dd);
  rep.add("floer.action_linear_on_cone", linear_ok);
  rep.add("floer.window_equality_isomorphism", window_iso_ok);
  rep.add("floer.action_maps_compose", compose_ok);
  return rep;
}

inline Report flop_suite(std::uint64_t seed, int cases) {
  (void)seed;
  (void)cases;
  Report rep;
  std::map<std::pair<long long, long long>, std::vector<Rat>> cup;
  for (long long i = 0; i <= 1; ++i)
    for (long long j = 0; j <= 1; ++j) cup[{i, j}] = {Rat(0), Rat(0)};
  auto z = build_flop_algebra(1, Rat(1), cup, {}, 1, 0, {Rat(1)}, {Rat(-1)});
  rep.merge(continuation_consistency_check(z, 5));
  rep.add("flop.associativity_predicate", flop_associativity_check(z, 5));
  auto bad = continuation_consistency_check(z, 5, true);
  bool neg_fails = false;
  for (const auto& ck : bad.checks)
    if (ck.name == "flop.identical_rational_functions" && !ck.pass)
      neg_fails = true;
  rep.add("flop.negative_control_detected", neg_fails);
  return rep;
}

/// All suites with one seed; the verify-all entry point.
inline Report verify_all(std::uint64_t seed) {
  Report rep;
  rep.merge(cones_suite(seed, 40));
  rep.merge(novikov_suite(seed + 1, 40));
  rep.merge(cz_suite(seed + 2, 60));
  rep.merge(systems_suite(seed + 3, 12));
  rep.merge(floer_suite(seed + 4, 10));
  rep.merge(flop_suite(seed + 5, 1));
  return rep;
}

}  // namespace verify
}  // namespace floerlib

#endif

