#ifndef FLOERLIB_RATIONAL_HPP
#define FLOERLIB_RATIONAL_HPP

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace floerlib {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

inline int sign_of(const Rat& x) { return x.sign(); }
inline int sign_of(const Int& x) { return x.sign(); }

inline Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

/// Parse "p", "p/q" or a plain decimal like "-1.25" into an exact rational.
inline Rat parse_rat(const std::string& tok) {
  if (tok.empty()) throw std::invalid_argument("empty rational token");
  auto slash = tok.find('/');
  if (slash != std::string::npos) {
    Int p(tok.substr(0, slash));
    Int q(tok.substr(slash + 1));
    if (q == 0) throw std::invalid_argument("zero denominator in '" + tok + "'");
    return Rat(p, q);
  }
  auto dot = tok.find('.');
  if (dot != std::string::npos) {
    std::string digits = tok.substr(0, dot) + tok.substr(dot + 1);
    std::size_t frac = tok.size() - dot - 1;
    Int den = 1;
    for (std::size_t i = 0; i < frac; ++i) den *= 10;
    return Rat(Int(digits), den);
  }
  return Rat(Int(tok));
}

inline std::string to_string(const Rat& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

inline std::string to_string(const Int& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

/// Exact half-integers; Conley-Zehnder values are stored as twice their value.
struct Half {
  long long twice = 0;

  Half() = default;
  explicit Half(long long t) : twice(t) {}
  static Half whole(long long k) { return Half(2 * k); }

  Half operator+(Half o) const { return Half(twice + o.twice); }
  Half operator-(Half o) const { return Half(twice - o.twice); }
  Half operator-() const { return Half(-twice); }
  Half& operator+=(Half o) {
    twice += o.twice;
    return *this;
  }
  bool operator==(Half o) const { return twice == o.twice; }
  bool operator!=(Half o) const { return twice != o.twice; }
  bool operator<(Half o) const { return twice < o.twice; }
  bool operator<=(Half o) const { return twice <= o.twice; }

  bool is_integer() const { return twice % 2 == 0; }
  Rat as_rat() const { return Rat(twice, 2); }

  std::string str() const {
    if (twice % 2 == 0) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
  }
};

inline Half half_abs(Half h) { return Half(h.twice < 0 ? -h.twice : h.twice); }

}  // namespace floerlib

#endif
