#ifndef FLOERLIB_CONES_HPP
#define FLOERLIB_CONES_HPP

#include "floerlib/lp.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace floerlib {

/// Element of a free abelian group Z^r, written additively.
using GroupElement = std::vector<long long>;

inline GroupElement g_add(const GroupElement& a, const GroupElement& b) {
  GroupElement r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline GroupElement g_sub(const GroupElement& a, const GroupElement& b) {
  GroupElement r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline GroupElement g_neg(const GroupElement& a) {
  GroupElement r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

inline GroupElement g_scale(long long k, const GroupElement& a) {
  GroupElement r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = k * a[i];
  return r;
}

inline GroupElement g_zero(std::size_t rank) { return GroupElement(rank, 0); }

inline bool g_is_zero(const GroupElement& a) {
  for (auto c : a)
    if (c != 0) return false;
  return true;
}

inline Rat pair_covector(const std::vector<Rat>& f, const GroupElement& a) {
  Rat s(0);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (a[i] != 0) s += f[i] * Rat(a[i]);
  return s;
}

inline std::string g_str(const GroupElement& a) {
  std::string s = "[";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(a[i]);
  }
  return s + "]";
}

/// Parse "[3,-2]" into a group element of the expected rank.
inline GroupElement parse_group_element(const std::string& text,
                                        std::size_t rank) {
  std::string s = text;
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw std::invalid_argument("group element must look like [a,b,...]: " + text);
  s = s.substr(1, s.size() - 2);
  GroupElement out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw std::invalid_argument("empty component in " + text);
    out.push_back(std::stoll(tok));
  }
  if (out.empty() && !s.empty())
    throw std::invalid_argument("bad group element " + text);
  if (out.size() != rank)
    throw std::invalid_argument("group element " + text + " has length " +
                                std::to_string(out.size()) + ", expected rank " +
                                std::to_string(rank));
  return out;
}

/// Rational polyhedral cone in the dual of Z^r, presented by generating
/// covectors with a derived facet description (inequalities f(x) >= 0; the
/// linear span's equations appear as opposite pairs).
struct RationalCone {
  std::size_t rank = 0;
  std::vector<std::vector<Rat>> generators;
  std::vector<std::vector<Rat>> facets;

  bool is_trivial() const {
    for (const auto& g : generators)
      for (const auto& c : g)
        if (c != 0) return false;
    return true;
  }
};

namespace detail {

inline void normalize_direction(std::vector<Rat>& v) {
  for (const auto& c : v) {
    if (c == 0) continue;
    Rat scale = rat_abs(c);
    for (auto& x : v) x /= scale;
    return;
  }
}

inline std::vector<std::vector<Rat>> nonzero_rows(
    const std::vector<std::vector<Rat>>& rows) {
  std::vector<std::vector<Rat>> out;
  for (const auto& r : rows) {
    bool z = true;
    for (const auto& c : r)
      if (c != 0) z = false;
    if (!z) out.push_back(r);
  }
  return out;
}

inline void for_each_subset(std::size_t n, std::size_t k,
                            const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (k > n) return;
  std::vector<std::size_t> c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = i;
  while (true) {
    fn(c);
    if (k == 0) return;
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (c[i] != i + n - k) {
        ++c[i];
        for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
        break;
      }
      if (i == 0) return;
    }
  }
}

/// Facet normals of a full-dimensional cone in Q^s given by generator
/// coordinate vectors. Every facet hyperplane is spanned by s-1 independent
/// generators, so subset enumeration is complete.
inline std::vector<std::vector<Rat>> full_dim_facets(
    const std::vector<std::vector<Rat>>& gens, std::size_t s) {
  std::vector<std::vector<Rat>> out;
  std::set<std::vector<Rat>> seen;
  for_each_subset(gens.size(), s - 1, [&](const std::vector<std::size_t>& c) {
    QMat sub(s - 1, s);
    for (std::size_t i = 0; i + 1 < s; ++i)
      for (std::size_t j = 0; j < s; ++j) sub(i, j) = gens[c[i]][j];
    auto ker = kernel_basis(sub);
    if (ker.size() != 1) return;
    std::vector<Rat> u = ker[0];
    int neg = 0, pos = 0;
    for (const auto& g : gens) {
      Rat d(0);
      for (std::size_t j = 0; j < s; ++j) d += u[j] * g[j];
      if (d > 0) ++pos;
      if (d < 0) ++neg;
    }
    if (pos == 0 && neg == 0) return;  // vanishes on all generators
    if (pos != 0 && neg != 0) return;  // not supporting
    if (pos == 0)
      for (auto& x : u) x = -x;
    normalize_direction(u);
    if (seen.insert(u).second) out.push_back(u);
  });
  return out;
}

}  // namespace detail

/// Build a cone from generating covectors, deriving its facet description.
/// The empty generator list yields the trivial cone {0}.
inline RationalCone cone_from_generators(std::size_t rank,
                                         std::vector<std::vector<Rat>> gens) {
  for (const auto& g : gens)
    if (g.size() != rank)
      throw std::invalid_argument("cone generator has wrong dimension");

  RationalCone cone;
  cone.rank = rank;
  cone.generators = gens;

  auto nz = detail::nonzero_rows(gens);

  // span of the generators
  QMat gm(nz.size(), rank);
  for (std::size_t i = 0; i < nz.size(); ++i)
    for (std::size_t j = 0; j < rank; ++j) gm(i, j) = nz[i][j];
  QMat red = gm;
  auto pivots = rref_in_place(red);
  std::size_t s = pivots.size();

  // span equations f(x) = 0 become opposite facet pairs
  auto orth = kernel_basis(nz.empty() ? QMat(0, rank) : gm);
  for (auto& f : orth) {
    detail::normalize_direction(f);
    cone.facets.push_back(f);
    std::vector<Rat> neg(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) neg[i] = -f[i];
    cone.facets.push_back(neg);
  }
  if (s == 0) return cone;

  // coordinates of generators with respect to a basis of the span
  std::vector<std::vector<Rat>> basis;
  for (std::size_t r = 0; r < s; ++r) {
    std::vector<Rat> b(rank, Rat(0));
    for (std::size_t j = 0; j < rank; ++j) b[j] = red(r, j);
    basis.push_back(b);
  }
  QMat bmat(rank, s);
  for (std::size_t j = 0; j < s; ++j)
    for (std::size_t i = 0; i < rank; ++i) bmat(i, j) = basis[j][i];
  std::vector<std::vector<Rat>> coords;
  for (const auto& g : nz) {
    auto sol = solve(bmat, g);
    coords.push_back(*sol);
  }

  auto inner = detail::full_dim_facets(coords, s);

  // lift u (on span coordinates) to a covector on Q^rank: f = u o coords,
  // i.e. f^T = u^T (B^T B)^{-1} B^T
  QMat bt = bmat.transpose();
  QMat gram = bt * bmat;
  QMat gram_inv = *inverse(gram);
  for (const auto& u : inner) {
    QMat urow(1, s);
    for (std::size_t j = 0; j < s; ++j) urow(0, j) = u[j];
    QMat frow = urow * gram_inv * bt;
    std::vector<Rat> f(rank);
    for (std::size_t j = 0; j < rank; ++j) f[j] = frow(0, j);
    detail::normalize_direction(f);
    cone.facets.push_back(f);
  }
  return cone;
}

/// Membership x in cone, decided by exact LP on the generators.
inline bool cone_contains(const RationalCone& q, const std::vector<Rat>& x) {
  return in_cone_span(detail::nonzero_rows(q.generators), x);
}

/// Membership via the derived facet inequalities.
inline bool cone_contains_by_facets(const RationalCone& q,
                                    const std::vector<Rat>& x) {
  for (const auto& f : q.facets) {
    Rat d(0);
    for (std::size_t i = 0; i < q.rank; ++i) d += f[i] * x[i];
    if (d < 0) return false;
  }
  return true;
}

/// Q is salient iff Q cap -Q = {0}: no nontrivial nonnegative combination of
/// the nonzero generators vanishes.
inline bool is_salient(const RationalCone& q) {
  auto nz = detail::nonzero_rows(q.generators);
  if (nz.empty()) return true;
  QMat a(q.rank + 1, nz.size());
  for (std::size_t j = 0; j < nz.size(); ++j) {
    for (std::size_t i = 0; i < q.rank; ++i) a(i, j) = nz[j][i];
    a(q.rank, j) = 1;
  }
  std::vector<Rat> b(q.rank + 1, Rat(0));
  b[q.rank] = 1;
  return !lp_feasible_point(a, b).has_value();
}

/// Whether every generator of inner lies in outer (checked by facets).
inline bool cone_subset(const RationalCone& inner, const RationalCone& outer) {
  if (inner.rank != outer.rank) return false;
  for (const auto& g : inner.generators)
    if (!cone_contains_by_facets(outer, g)) return false;
  return true;
}

/// The order context: ambient rank, cone, and optionally a distinguished
/// cofinal element y with its certificate exponents.
struct ConeOrderContext {
  std::size_t rank = 0;
  RationalCone cone;
  std::optional<GroupElement> y;
  std::map<GroupElement, long long> cofinal_certificate;

  bool operator==(const ConeOrderContext& o) const {
    return rank == o.rank && cone.generators == o.cone.generators && y == o.y;
  }
};

inline ConeOrderContext make_context(RationalCone cone) {
  ConeOrderContext ctx;
  ctx.rank = cone.rank;
  ctx.cone = std::move(cone);
  return ctx;
}

/// x <= y in the cone preorder: f(y - x) >= 0 for every generator f of Q.
inline bool cone_leq(const ConeOrderContext& ctx, const GroupElement& x,
                     const GroupElement& y) {
  if (x.size() != ctx.rank || y.size() != ctx.rank)
    throw std::invalid_argument("group element rank mismatch");
  GroupElement d = g_sub(y, x);
  for (const auto& f : ctx.cone.generators)
    if (pair_covector(f, d) < 0) return false;
  return true;
}

struct CofinalSearchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Find a cofinal element as the sum of a generating set of nonnegative
/// elements, each obtained from a given group generator by sign flips or by
/// adding a small nonnegative combination of previously accepted elements.
/// The certificate maps each input generator g to an exponent n with
/// g <= n*y.
inline GroupElement cofinal_element(ConeOrderContext& ctx,
                                    const std::vector<GroupElement>& group_gens,
                                    long long bound = 16) {
  const std::size_t r = ctx.rank;
  auto nonneg = [&](const GroupElement& v) {
    return cone_leq(ctx, g_zero(r), v);
  };

  std::vector<GroupElement> accepted;
  auto push_accepted = [&](const GroupElement& v) {
    for (const auto& a : accepted)
      if (a == v) return;
    accepted.push_back(v);
  };

  // handle the generators that are nonnegative (up to sign) first so the
  // harder ones can borrow from them
  std::vector<GroupElement> ordered;
  for (const auto& g : group_gens)
    if (nonneg(g) || nonneg(g_neg(g))) ordered.push_back(g);
  for (const auto& g : group_gens)
    if (!(nonneg(g) || nonneg(g_neg(g)))) ordered.push_back(g);

  for (const auto& g : ordered) {
    if (g.size() != r) throw std::invalid_argument("generator rank mismatch");
    std::optional<GroupElement> found;
    for (const GroupElement& base : {g, g_neg(g)}) {
      if (nonneg(base)) {
        found = base;
        break;
      }
    }
    if (!found) {
      // add nonnegative combinations of already accepted elements, smallest
      // total coefficient first
      for (long long total = 1; total <= bound && !found; ++total) {
        std::vector<long long> coef(accepted.size(), 0);
        // enumerate compositions of `total` over the accepted list
        std::function<bool(std::size_t, long long)> rec =
            [&](std::size_t pos, long long rem) -> bool {
          if (pos == coef.size()) {
            if (rem != 0) return false;
            GroupElement h = g_zero(r);
            for (std::size_t i = 0; i < accepted.size(); ++i)
              if (coef[i]) h = g_add(h, g_scale(coef[i], accepted[i]));
            for (const GroupElement& base : {g, g_neg(g)}) {
              GroupElement cand = g_add(base, h);
              if (nonneg(cand)) {
                found = cand;
                return true;
              }
            }
            return false;
          }
          for (long long c = 0; c <= rem; ++c) {
            coef[pos] = c;
            if (rec(pos + 1, rem - c)) return true;
          }
          coef[pos] = 0;
          return false;
        };
        rec(0, total);
      }
    }
    if (!found)
      throw CofinalSearchError(
          "cofinal element search bound exceeded at generator " + g_str(g) +
          "; raise the bound");
    push_accepted(*found);
  }

  GroupElement y = g_zero(r);
  for (const auto& a : accepted) y = g_add(y, a);

  // certificate: every input generator is dominated by a power of y
  std::map<GroupElement, long long> cert;
  for (const auto& g : group_gens) {
    bool ok = false;
    for (long long n = 0; n <= 4 * bound + 4; ++n) {
      if (cone_leq(ctx, g, g_scale(n, y))) {
        cert[g] = n;
        ok = true;
        break;
      }
    }
    if (!ok)
      throw CofinalSearchError("no certificate exponent for generator " +
                               g_str(g));
  }
  ctx.y = y;
  ctx.cofinal_certificate = std::move(cert);
  return y;
}

/// Membership in the monomial ideal (y^m): y^m <= a in the cone order.
/// These are exactly the exponents a Novikov truncation at level m drops.
inline bool ideal_member(const ConeOrderContext& ctx, long long m,
                         const GroupElement& a) {
  if (!ctx.y) throw std::invalid_argument("context has no cofinal element");
  if (m < 0) throw std::invalid_argument("ideal power must be nonnegative");
  return cone_leq(ctx, g_scale(m, *ctx.y), a);
}

/// Cone file format: first line "rank <r>", then one generator per line as
/// space-separated rationals.
inline RationalCone parse_cone_text(const std::string& text) {
  std::istringstream in(text);
  std::string word;
  if (!(in >> word) || word != "rank")
    throw std::invalid_argument("cone file must start with 'rank <r>'");
  std::size_t r = 0;
  if (!(in >> r)) throw std::invalid_argument("bad rank in cone file");
  std::vector<std::vector<Rat>> gens;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<Rat> g;
    std::string tok;
    while (ls >> tok) g.push_back(parse_rat(tok));
    if (g.empty()) continue;
    if (g.size() != r)
      throw std::invalid_argument("generator line of length " +
                                  std::to_string(g.size()) + ", expected " +
                                  std::to_string(r));
    gens.push_back(std::move(g));
  }
  return cone_from_generators(r, gens);
}

inline std::string cone_to_text(const RationalCone& q) {
  std::ostringstream os;
  os << "rank " << q.rank << "\n";
  for (const auto& g : q.generators) {
    for (std::size_t i = 0; i < g.size(); ++i) os << (i ? " " : "") << g[i];
    os << "\n";
  }
  return os.str();
}

}  // namespace floerlib

#endif
