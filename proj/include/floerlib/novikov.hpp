#ifndef FLOERLIB_NOVIKOV_HPP
#define FLOERLIB_NOVIKOV_HPP

#include "floerlib/cones.hpp"

#include <memory>
#include <numeric>

namespace floerlib {

// --- coefficient rings -----------------------------------------------------

struct RingQ {
  using Elem = Rat;
  static constexpr const char* name = "Q";
  Elem zero() const { return Rat(0); }
  Elem one() const { return Rat(1); }
  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem neg(const Elem& a) const { return -a; }
  bool is_zero(const Elem& a) const { return a == 0; }
  bool is_unit(const Elem& a) const { return a != 0; }
  Elem inv(const Elem& a) const { return Rat(1) / a; }
  std::string str(const Elem& a) const { return to_string(a); }
  Elem parse(const std::string& s) const { return parse_rat(s); }
  bool operator==(const RingQ&) const { return true; }
};

struct RingZ {
  using Elem = Int;
  static constexpr const char* name = "Z";
  Elem zero() const { return Int(0); }
  Elem one() const { return Int(1); }
  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem neg(const Elem& a) const { return -a; }
  bool is_zero(const Elem& a) const { return a == 0; }
  bool is_unit(const Elem& a) const { return a == 1 || a == -1; }
  Elem inv(const Elem& a) const {
    if (!is_unit(a)) throw std::domain_error("non-unit integer");
    return a;
  }
  std::string str(const Elem& a) const { return to_string(a); }
  Elem parse(const std::string& s) const { return Int(s); }
  bool operator==(const RingZ&) const { return true; }
};

/// Prime field Z/p with a runtime modulus.
struct RingFp {
  long long p = 2;
  using Elem = long long;
  static constexpr const char* name = "Fp";
  explicit RingFp(long long prime = 2) : p(prime) {}
  Elem norm(long long a) const {
    a %= p;
    return a < 0 ? a + p : a;
  }
  Elem zero() const { return 0; }
  Elem one() const { return norm(1); }
  Elem add(Elem a, Elem b) const { return norm(a + b); }
  Elem sub(Elem a, Elem b) const { return norm(a - b); }
  Elem mul(Elem a, Elem b) const { return norm(a * b); }
  Elem neg(Elem a) const { return norm(-a); }
  bool is_zero(Elem a) const { return norm(a) == 0; }
  bool is_unit(Elem a) const { return norm(a) != 0; }
  Elem inv(Elem a) const {
    long long t = 0, nt = 1, r = p, nr = norm(a);
    if (nr == 0) throw std::domain_error("zero has no inverse mod p");
    while (nr != 0) {
      long long q = r / nr;
      t -= q * nt;
      std::swap(t, nt);
      r -= q * nr;
      std::swap(r, nr);
    }
    return norm(t);
  }
  std::string str(Elem a) const { return std::to_string(norm(a)); }
  Elem parse(const std::string& s) const { return norm(std::stoll(s)); }
  bool operator==(const RingFp& o) const { return p == o.p; }
};

// --- truncated Novikov series ----------------------------------------------

using Truncation = std::pair<GroupElement, long long>;

/// Finite term list modelling an element of the (truncated) Novikov ring:
/// exponents in Z^r, coefficients in R, with an optional truncation
/// certificate (y, m) meaning the element is a representative modulo the
/// monomial ideal (y^m).
template <class R>
struct NovikovSeries {
  R ring{};
  std::shared_ptr<const ConeOrderContext> ctx;
  std::map<GroupElement, typename R::Elem> terms;
  std::optional<Truncation> trunc;
  std::optional<GroupElement> lower_bound;

  bool is_zero() const { return terms.empty(); }
};

using QSeries = NovikovSeries<RingQ>;

template <class R>
bool same_context(const NovikovSeries<R>& a, const NovikovSeries<R>& b) {
  if (!(a.ring == b.ring)) return false;
  if (a.ctx == b.ctx) return true;
  return a.ctx && b.ctx && *a.ctx == *b.ctx;
}

/// Is exponent `e` dropped by truncation (y, m) under the context order?
inline bool truncation_drops(const ConeOrderContext& ctx, const Truncation& t,
                             const GroupElement& e) {
  return cone_leq(ctx, g_scale(t.second, t.first), e);
}

template <class R>
void normalize_series(NovikovSeries<R>& s) {
  for (auto it = s.terms.begin(); it != s.terms.end();) {
    bool drop = s.ring.is_zero(it->second);
    if (!drop && s.trunc) drop = truncation_drops(*s.ctx, *s.trunc, it->first);
    it = drop ? s.terms.erase(it) : std::next(it);
  }
  if (s.lower_bound) {
    for (const auto& [e, c] : s.terms)
      if (!cone_leq(*s.ctx, *s.lower_bound, e))
        throw std::invalid_argument("series term " + g_str(e) +
                                    " violates the declared lower bound");
  }
}

template <class R>
NovikovSeries<R> series_zero(R ring,
                             std::shared_ptr<const ConeOrderContext> ctx,
                             std::optional<Truncation> trunc = std::nullopt) {
  NovikovSeries<R> s;
  s.ring = ring;
  s.ctx = std::move(ctx);
  s.trunc = std::move(trunc);
  return s;
}

template <class R>
NovikovSeries<R> series_monomial(R ring,
                                 std::shared_ptr<const ConeOrderContext> ctx,
                                 typename R::Elem coeff, GroupElement exp,
                                 std::optional<Truncation> trunc = std::nullopt) {
  auto s = series_zero(ring, std::move(ctx), std::move(trunc));
  if (!ring.is_zero(coeff)) s.terms[std::move(exp)] = coeff;
  normalize_series(s);
  return s;
}

template <class R>
NovikovSeries<R> series_one(R ring, std::shared_ptr<const ConeOrderContext> ctx,
                            std::optional<Truncation> trunc = std::nullopt) {
  return series_monomial(ring, std::move(ctx), ring.one(),
                         g_zero(ctx ? ctx->rank : 0), std::move(trunc));
}

template <class R>
std::optional<Truncation> merge_truncations(const NovikovSeries<R>& a,
                                            const NovikovSeries<R>& b) {
  if (!a.trunc) return b.trunc;
  if (!b.trunc) return a.trunc;
  if (a.trunc->first != b.trunc->first)
    throw std::invalid_argument("truncation certificates use different cofinal elements");
  return Truncation{a.trunc->first, std::min(a.trunc->second, b.trunc->second)};
}

template <class R>
NovikovSeries<R> series_add(const NovikovSeries<R>& a,
                            const NovikovSeries<R>& b) {
  if (!same_context(a, b))
    throw std::invalid_argument("mismatched cone context in series_add");
  NovikovSeries<R> r = a;
  r.trunc = merge_truncations(a, b);
  r.lower_bound.reset();
  for (const auto& [e, c] : b.terms) {
    auto it = r.terms.find(e);
    if (it == r.terms.end())
      r.terms[e] = c;
    else
      it->second = r.ring.add(it->second, c);
  }
  normalize_series(r);
  return r;
}

template <class R>
NovikovSeries<R> series_neg(const NovikovSeries<R>& a) {
  NovikovSeries<R> r = a;
  for (auto& [e, c] : r.terms) c = r.ring.neg(c);
  return r;
}

template <class R>
NovikovSeries<R> series_sub(const NovikovSeries<R>& a,
                            const NovikovSeries<R>& b) {
  return series_add(a, series_neg(b));
}

template <class R>
NovikovSeries<R> series_mul(const NovikovSeries<R>& a,
                            const NovikovSeries<R>& b) {
  if (!same_context(a, b))
    throw std::invalid_argument("mismatched cone context in series_mul");
  NovikovSeries<R> r = series_zero(a.ring, a.ctx, merge_truncations(a, b));
  for (const auto& [ea, ca] : a.terms)
    for (const auto& [eb, cb] : b.terms) {
      GroupElement e = g_add(ea, eb);
      if (r.trunc && truncation_drops(*r.ctx, *r.trunc, e)) continue;
      auto prod = r.ring.mul(ca, cb);
      auto it = r.terms.find(e);
      if (it == r.terms.end())
        r.terms[e] = prod;
      else
        it->second = r.ring.add(it->second, prod);
    }
  normalize_series(r);
  return r;
}

template <class R>
NovikovSeries<R> series_scale(const NovikovSeries<R>& a,
                              const typename R::Elem& c) {
  NovikovSeries<R> r = a;
  for (auto& [e, v] : r.terms) v = r.ring.mul(v, c);
  normalize_series(r);
  return r;
}

template <class R>
bool series_eq(const NovikovSeries<R>& a, const NovikovSeries<R>& b) {
  return series_sub(a, b).is_zero();
}

/// Quotient map onto F_0/(y^m): drops exactly the ideal members. A ring map;
/// idempotent.
template <class R>
NovikovSeries<R> series_truncate(const NovikovSeries<R>& a,
                                 const GroupElement& y, long long m) {
  if (!a.ctx->y || *a.ctx->y != y)
    throw std::invalid_argument("truncation element is not the context's cofinal element");
  NovikovSeries<R> r = a;
  long long level = m;
  if (r.trunc) {
    if (r.trunc->first != y)
      throw std::invalid_argument("conflicting truncation elements");
    level = std::min(level, r.trunc->second);
  }
  r.trunc = Truncation{y, level};
  normalize_series(r);
  return r;
}

/// min over exponents of f(a_i); empty optional encodes +infinity (the zero
/// series). f must lie in the cone.
template <class R>
std::optional<Rat> valuation(const NovikovSeries<R>& a,
                             const std::vector<Rat>& f) {
  if (!cone_contains(a.ctx->cone, f))
    throw std::invalid_argument("valuation functional lies outside the cone");
  std::optional<Rat> v;
  for (const auto& [e, c] : a.terms) {
    Rat x = pair_covector(f, e);
    if (!v || x < *v) v = x;
  }
  return v;
}

/// Inverse of a unit by geometric-series iteration, expanded through
/// exponent level `order` (so a*b = 1 modulo (y^{order+1}), hence modulo
/// (y^order)).
template <class R>
NovikovSeries<R> invert_unit(const NovikovSeries<R>& a, long long order,
                             long long max_steps = 512) {
  const auto& ctx = *a.ctx;
  if (!ctx.y) throw std::invalid_argument("context has no cofinal element");
  GroupElement zero = g_zero(ctx.rank);
  auto it = a.terms.find(zero);
  if (it == a.terms.end() || !a.ring.is_unit(it->second))
    throw std::domain_error("series has no invertible constant term");
  for (const auto& [e, c] : a.terms) {
    if (e == zero) continue;
    if (!cone_leq(ctx, zero, e) || g_is_zero(e))
      throw std::domain_error("series support is not positive");
  }
  Truncation t{*ctx.y, order + 1};
  auto c_inv = a.ring.inv(it->second);
  // u := 1 - c^{-1} a has positive support; sum the geometric series until
  // the running power dies at this truncation level
  auto u = series_sub(series_one(a.ring, a.ctx, t),
                      series_truncate(series_scale(a, c_inv), t.first, t.second));
  auto acc = series_one(a.ring, a.ctx, t);
  auto pw = series_one(a.ring, a.ctx, t);
  long long steps = 0;
  while (true) {
    pw = series_mul(pw, u);
    if (pw.is_zero()) break;
    acc = series_add(acc, pw);
    if (++steps > max_steps)
      throw std::domain_error("series is not invertible at this truncation");
  }
  auto b = series_scale(acc, c_inv);
  auto check = series_mul(a, b);
  if (!series_eq(check, series_one(a.ring, a.ctx, t)))
    throw std::logic_error("inversion self-check failed");
  return b;
}

/// Change the ambient cone to a subcone Q1 of the current cone: identity on
/// terms, truncation recomputed against the weaker order (drops more terms).
template <class R>
NovikovSeries<R> restrict_cone(const NovikovSeries<R>& a,
                               const RationalCone& q1) {
  if (!cone_subset(q1, a.ctx->cone))
    throw std::invalid_argument("target cone is not contained in the current cone");
  auto sub = std::make_shared<ConeOrderContext>(make_context(q1));
  sub->y = a.ctx->y;
  if (sub->y && !a.ctx->cofinal_certificate.empty()) {
    // the common cofinal element stays cofinal for the subcone; refresh the
    // certificate exponents against the weaker order
    for (const auto& [g, n] : a.ctx->cofinal_certificate) {
      bool ok = false;
      for (long long k = 0; k <= 4 * std::max<long long>(n, 16) + 4; ++k)
        if (cone_leq(*sub, g, g_scale(k, *sub->y))) {
          sub->cofinal_certificate[g] = k;
          ok = true;
          break;
        }
      if (!ok)
        throw CofinalSearchError("cofinal certificate lost under restriction");
    }
  }
  NovikovSeries<R> r;
  r.ring = a.ring;
  r.ctx = sub;
  r.terms = a.terms;
  r.trunc = a.trunc;
  r.lower_bound = a.lower_bound;
  normalize_series(r);
  return r;
}

// --- localization along the cofinal element ---------------------------------

/// Pair (x, y^n) modelling x / y^n.
template <class R>
struct LocalizedElement {
  NovikovSeries<R> numerator;
  long long power = 0;
};

template <class R>
LocalizedElement<R> localize(const NovikovSeries<R>& a, long long n) {
  if (n < 0) throw std::invalid_argument("negative localization power");
  GroupElement zero = g_zero(a.ctx->rank);
  for (const auto& [e, c] : a.terms)
    if (!cone_leq(*a.ctx, zero, e))
      throw std::invalid_argument("numerator must lie in the positive part");
  LocalizedElement<R> l;
  l.numerator = a;
  l.numerator.lower_bound = zero;
  l.power = n;
  return l;
}

template <class R>
LocalizedElement<R> localized_mul(const LocalizedElement<R>& a,
                                  const LocalizedElement<R>& b) {
  LocalizedElement<R> r;
  r.numerator = series_mul(a.numerator, b.numerator);
  r.numerator.lower_bound = g_zero(a.numerator.ctx->rank);
  r.power = a.power + b.power;
  return r;
}

template <class R>
LocalizedElement<R> localized_add(const LocalizedElement<R>& a,
                                  const LocalizedElement<R>& b) {
  const auto& ctx = *a.numerator.ctx;
  if (!ctx.y) throw std::invalid_argument("context has no cofinal element");
  auto ymono = [&](long long k) {
    return series_monomial(a.numerator.ring, a.numerator.ctx,
                           a.numerator.ring.one(), g_scale(k, *ctx.y),
                           merge_truncations(a.numerator, b.numerator));
  };
  LocalizedElement<R> r;
  r.numerator = series_add(series_mul(a.numerator, ymono(b.power)),
                           series_mul(b.numerator, ymono(a.power)));
  r.numerator.lower_bound = g_zero(ctx.rank);
  r.power = a.power + b.power;
  return r;
}

/// (x, y^n) ~ (x', y^n') iff x y^{n'+k} = x' y^{n+k} for some k >= 0. The
/// cofinal element acts injectively on the positive completion (exponent
/// shifts are injective), so k = 0 already decides equivalence; at a fixed
/// truncation larger k would only discard information.
template <class R>
bool localized_eq(const LocalizedElement<R>& a, const LocalizedElement<R>& b) {
  const auto& ctx = *a.numerator.ctx;
  if (!ctx.y) throw std::invalid_argument("context has no cofinal element");
  auto tr = merge_truncations(a.numerator, b.numerator);
  auto lhsm = series_monomial(a.numerator.ring, a.numerator.ctx,
                              a.numerator.ring.one(), g_scale(b.power, *ctx.y),
                              tr);
  auto rhsm = series_monomial(a.numerator.ring, a.numerator.ctx,
                              a.numerator.ring.one(), g_scale(a.power, *ctx.y),
                              tr);
  return series_eq(series_mul(a.numerator, lhsm),
                   series_mul(b.numerator, rhsm));
}

// --- text grammar ------------------------------------------------------------

/// Grammar: terms "<coeff>*t^[i,...,j]" joined by " + ", "0" for the zero
/// series; coefficient a rational p/q or integer.
template <class R>
std::string series_to_text(const NovikovSeries<R>& s) {
  if (s.terms.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : s.terms) {
    if (!first) out += " + ";
    out += s.ring.str(c) + "*t^" + g_str(e);
    first = false;
  }
  return out;
}

template <class R>
NovikovSeries<R> series_from_text(R ring,
                                  std::shared_ptr<const ConeOrderContext> ctx,
                                  const std::string& text,
                                  std::optional<Truncation> trunc = std::nullopt) {
  auto s = series_zero(ring, ctx, std::move(trunc));
  if (text == "0") return s;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(" + ", pos);
    std::string term = text.substr(pos, next == std::string::npos
                                            ? std::string::npos
                                            : next - pos);
    auto star = term.find("*t^");
    if (star == std::string::npos)
      throw std::invalid_argument("bad series term '" + term + "'");
    auto coeff = ring.parse(term.substr(0, star));
    auto exp = parse_group_element(term.substr(star + 3), ctx->rank);
    auto it = s.terms.find(exp);
    if (it == s.terms.end())
      s.terms[exp] = coeff;
    else
      it->second = ring.add(it->second, coeff);
    if (next == std::string::npos) break;
    pos = next + 3;
  }
  normalize_series(s);
  return s;
}

// --- Tor1 vanishing at fixed truncation --------------------------------------

/// Monomial basis of F_0/(y^m) for a full-dimensional salient cone: the
/// finitely many nonnegative exponents not yet in the ideal.
inline std::vector<GroupElement> truncated_monomial_basis(
    const ConeOrderContext& ctx, long long m, long long coord_bound = 24) {
  if (!ctx.y) throw std::invalid_argument("context has no cofinal element");
  QMat gm(ctx.cone.generators.size(), ctx.rank);
  for (std::size_t i = 0; i < ctx.cone.generators.size(); ++i)
    for (std::size_t j = 0; j < ctx.rank; ++j)
      gm(i, j) = ctx.cone.generators[i][j];
  if (rank(gm) != ctx.rank)
    throw std::invalid_argument("truncated basis requires a full-dimensional cone");
  std::vector<GroupElement> basis;
  GroupElement cur(ctx.rank, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == ctx.rank) {
      if (cone_leq(ctx, g_zero(ctx.rank), cur) && !ideal_member(ctx, m, cur))
        basis.push_back(cur);
      return;
    }
    for (long long v = -coord_bound; v <= coord_bound; ++v) {
      cur[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return basis;
}

inline Rat rat_of_coeff(const RingQ&, const Rat& c) { return c; }
inline Rat rat_of_coeff(const RingZ&, const Int& c) { return Rat(c); }

/// Tor_1 vanishing for a finitely presented module at fixed truncation.
/// M = coker(A) over R = F^{Q0}_0/(y^m); the target ring is the further
/// quotient along the weaker Q1-order. Exact finite-dimensional computation
/// over Q or Z coefficients.
template <class R>
bool tor1_vanishes(const std::vector<std::vector<NovikovSeries<R>>>& a,
                   const ConeOrderContext& ctx0, const RationalCone& q1,
                   long long m, long long coord_bound = 24) {
  if (!cone_subset(q1, ctx0.cone))
    throw std::invalid_argument("target cone is not a subcone");
  auto ctx1 = make_context(q1);
  ctx1.y = ctx0.y;
  auto b0 = truncated_monomial_basis(ctx0, m, coord_bound);
  std::map<GroupElement, std::size_t> index0;
  for (std::size_t i = 0; i < b0.size(); ++i) index0[b0[i]] = i;
  std::vector<bool> survives(b0.size(), true);  // survives the Q1-quotient
  for (std::size_t i = 0; i < b0.size(); ++i)
    survives[i] = !ideal_member(ctx1, m, b0[i]);

  // basis of the quotient ring: the monomials the weaker order keeps
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < b0.size(); ++i)
    if (survives[i]) kept.push_back(i);
  std::vector<std::ptrdiff_t> pos(b0.size(), -1);
  for (std::size_t i = 0; i < kept.size(); ++i) pos[kept[i]] = i;

  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  const std::size_t nb = b0.size();
  const std::size_t ns = kept.size();
  R ring = rows && cols ? a[0][0].ring : R{};

  QMat a_r(rows * nb, cols * nb);
  QMat a_s(rows * ns, cols * ns);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      for (const auto& [e, c] : a[i][j].terms)
        for (std::size_t bidx = 0; bidx < nb; ++bidx) {
          GroupElement prod = g_add(e, b0[bidx]);
          auto it = index0.find(prod);
          if (it == index0.end()) continue;  // fell into the ideal
          Rat cv = rat_of_coeff(ring, c);
          a_r(i * nb + it->second, j * nb + bidx) += cv;
          if (survives[bidx] && survives[it->second])
            a_s(i * ns + pos[it->second], j * ns + pos[bidx]) += cv;
        }

  auto ker_r = kernel_basis(a_r);
  std::size_t ker_s_dim = cols * ns - rank(a_s);

  // image of ker(A) tensored up: kernel generators times kept monomials,
  // projected into the quotient coordinates
  std::vector<std::vector<Rat>> image_vecs;
  for (const auto& k : ker_r) {
    for (std::size_t bmul : kept) {
      std::vector<Rat> v(cols * ns, Rat(0));
      for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t bidx = 0; bidx < nb; ++bidx) {
          const Rat& coef = k[j * nb + bidx];
          if (coef == 0) continue;
          GroupElement prod = g_add(b0[bmul], b0[bidx]);
          auto it = index0.find(prod);
          if (it == index0.end() || !survives[it->second]) continue;
          v[j * ns + pos[it->second]] += coef;
        }
      image_vecs.push_back(std::move(v));
    }
  }
  QMat img(image_vecs.size(), cols * ns);
  for (std::size_t i = 0; i < image_vecs.size(); ++i)
    for (std::size_t j = 0; j < cols * ns; ++j) img(i, j) = image_vecs[i][j];
  return rank(img) == ker_s_dim;
}

}  // namespace floerlib

#endif
