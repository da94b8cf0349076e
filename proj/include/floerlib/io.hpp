#ifndef FLOERLIB_IO_HPP
#define FLOERLIB_IO_HPP

#include "floerlib/cz.hpp"
#include "floerlib/sh.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace floerlib {

using nlohmann::json;

inline Rat rat_from_json(const json& j) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_string()) return parse_rat(j.get<std::string>());
  throw std::invalid_argument("rational values must be integers or 'p/q' strings");
}

inline std::vector<Rat> covector_from_json(const json& j) {
  std::vector<Rat> out;
  for (const auto& x : j) out.push_back(rat_from_json(x));
  return out;
}

inline GroupElement group_element_from_json(const json& j, std::size_t rank) {
  GroupElement g;
  for (const auto& x : j) g.push_back(x.get<long long>());
  if (g.size() != rank)
    throw std::invalid_argument("group element with wrong rank in dataset");
  return g;
}

inline RationalCone cone_from_json(const json& j, std::size_t rank) {
  std::vector<std::vector<Rat>> gens;
  for (const auto& row : j) gens.push_back(covector_from_json(row));
  return cone_from_generators(rank, gens);
}

inline IntervalDomainPair pair_from_json(const json& j, std::size_t rank) {
  IntervalDomainPair p;
  p.q_minus = cone_from_json(j.at("q_minus"), rank + 2);
  p.q_plus = cone_from_json(j.at("q_plus"), rank + 2);
  p.a_minus = covector_from_json(j.at("a_minus"));
  p.a_plus = covector_from_json(j.at("a_plus"));
  if (p.a_minus.size() != rank + 2 || p.a_plus.size() != rank + 2)
    throw std::invalid_argument("window functionals must have length rank + 2");
  return p;
}

inline CappedOrbitRecord orbit_from_json(const json& j, std::size_t rank) {
  CappedOrbitRecord o;
  o.id = j.at("id").get<std::string>();
  o.index = j.at("index").get<long long>();
  o.capping = group_element_from_json(j.at("capping"), rank);
  o.i1 = rat_from_json(j.at("I1"));
  o.i2 = j.contains("I2") ? rat_from_json(j.at("I2")) : Rat(0);
  std::string loc = j.at("location").get<std::string>();
  if (loc == "inside")
    o.location = OrbitLocation::Inside;
  else if (loc == "outside")
    o.location = OrbitLocation::Outside;
  else
    throw std::invalid_argument("orbit location must be inside or outside");
  return o;
}

inline std::vector<DifferentialEntry> entries_from_json(const json& j,
                                                        std::size_t rank) {
  std::vector<DifferentialEntry> out;
  for (const auto& e : j) {
    DifferentialEntry d;
    d.src = e.at("src").get<std::string>();
    d.dst = e.at("dst").get<std::string>();
    d.weight = group_element_from_json(e.at("weight"), rank);
    d.count = rat_from_json(e.at("count"));
    out.push_back(std::move(d));
  }
  return out;
}

struct DatasetFile {
  FloerDataset base;
  std::optional<IntervalDomainPair> window;
  std::optional<FloerLadder> ladder;  // stage 0 is the base dataset
};

inline DatasetFile parse_dataset_json(const json& j) {
  DatasetFile f;
  const auto& g = j.at("geometry");
  f.base.geometry.rank = g.at("rank").get<std::size_t>();
  f.base.geometry.w = covector_from_json(g.at("w"));
  f.base.geometry.n = g.at("n").get<long long>();
  if (f.base.geometry.w.size() != f.base.geometry.rank)
    throw std::invalid_argument("correction covector has wrong rank");

  const auto& cc = j.at("cone_context");
  auto ctx = std::make_shared<ConeOrderContext>(
      make_context(cone_from_json(cc.at("generators"), f.base.geometry.rank)));
  if (cc.contains("y"))
    ctx->y = group_element_from_json(cc.at("y"), f.base.geometry.rank);
  else {
    std::vector<GroupElement> gens;
    for (std::size_t i = 0; i < f.base.geometry.rank; ++i) {
      GroupElement e(f.base.geometry.rank, 0);
      e[i] = 1;
      gens.push_back(e);
      e[i] = -1;
      gens.push_back(e);
    }
    cofinal_element(*ctx, gens);
  }
  f.base.cone_ctx = ctx;
  if (cc.contains("trunc_level"))
    f.base.trunc_level = cc.at("trunc_level").get<long long>();

  for (const auto& o : j.at("orbits"))
    f.base.orbits.push_back(orbit_from_json(o, f.base.geometry.rank));
  if (j.contains("differential"))
    f.base.differential =
        entries_from_json(j.at("differential"), f.base.geometry.rank);

  if (j.contains("window"))
    f.window = pair_from_json(j.at("window"), f.base.geometry.rank);

  if (j.contains("ladder") || j.contains("window_family")) {
    FloerLadder lad;
    LadderStage s0;
    s0.level = Rat(0);
    s0.data = f.base;
    lad.stages.push_back(std::move(s0));
    if (j.contains("ladder"))
      for (const auto& st : j.at("ladder")) {
        LadderStage s;
        s.level = st.contains("level") ? rat_from_json(st.at("level")) : Rat(0);
        s.data = f.base;
        if (st.contains("orbits")) {
          s.data.orbits.clear();
          for (const auto& o : st.at("orbits"))
            s.data.orbits.push_back(orbit_from_json(o, f.base.geometry.rank));
        }
        if (st.contains("differential"))
          s.data.differential =
              entries_from_json(st.at("differential"), f.base.geometry.rank);
        if (st.contains("continuation"))
          s.continuation =
              entries_from_json(st.at("continuation"), f.base.geometry.rank);
        lad.stages.push_back(std::move(s));
      }
    if (j.contains("window_family")) {
      const auto& wf = j.at("window_family");
      lad.windows.q_minus =
          cone_from_json(wf.at("q_minus"), f.base.geometry.rank + 2);
      lad.windows.q_plus =
          cone_from_json(wf.at("q_plus"), f.base.geometry.rank + 2);
      for (const auto& a : wf.at("a_minus_levels"))
        lad.windows.a_minus_levels.push_back(covector_from_json(a));
      for (const auto& a : wf.at("a_plus_levels"))
        lad.windows.a_plus_levels.push_back(covector_from_json(a));
    }
    f.ladder = std::move(lad);
  }
  return f;
}

inline DatasetFile load_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  in >> j;
  return parse_dataset_json(j);
}

// --- path files -----------------------------------------------------------------

namespace detail_io {

struct SexpTokens {
  std::vector<std::string> toks;
  std::size_t pos = 0;

  const std::string& peek() const {
    if (pos >= toks.size()) throw std::invalid_argument("unexpected end of path");
    return toks[pos];
  }
  std::string next() {
    auto t = peek();
    ++pos;
    return t;
  }
};

inline SexpTokens tokenize_sexp(const std::string& text) {
  SexpTokens t;
  std::string cur;
  for (char c : text) {
    if (c == '(' || c == ')') {
      if (!cur.empty()) {
        t.toks.push_back(cur);
        cur.clear();
      }
      t.toks.push_back(std::string(1, c));
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) {
        t.toks.push_back(cur);
        cur.clear();
      }
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) t.toks.push_back(cur);
  return t;
}

inline QMat read_matrix(SexpTokens& t, std::size_t rows, std::size_t cols) {
  QMat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = parse_rat(t.next());
  return m;
}

inline PathPtr parse_sexp(SexpTokens& t) {
  if (t.next() != "(") throw std::invalid_argument("expected ( in path");
  std::string head = t.next();
  PathPtr out;
  if (head == "rotation") {
    out = make_rotation(parse_rat(t.next()));
  } else if (head == "rotation-seg") {
    Rat a = parse_rat(t.next()), b = parse_rat(t.next());
    out = make_rotation_segment(a, b);
  } else if (head == "shear") {
    std::string dir = t.next();
    std::size_t n = std::stoull(t.next());
    QMat b = read_matrix(t, n, n);
    out = make_shear(b, dir == "-" ? -1 : +1);
  } else if (head == "shear-seg") {
    std::string kind = t.next();
    std::size_t n = std::stoull(t.next());
    QMat s0 = read_matrix(t, n, n);
    QMat s1 = read_matrix(t, n, n);
    out = make_shear_segment(kind == "upper", s0, s1);
  } else if (head == "constant") {
    std::size_t n = std::stoull(t.next());
    out = make_constant(read_matrix(t, 2 * n, 2 * n));
  } else if (head == "hamexp") {
    std::size_t n = std::stoull(t.next());
    Rat dur = parse_rat(t.next());
    out = make_ham_exp(read_matrix(t, 2 * n, 2 * n), dur);
  } else if (head == "sum") {
    auto a = parse_sexp(t);
    auto b = parse_sexp(t);
    out = make_direct_sum(a, b);
  } else if (head == "cat") {
    auto a = parse_sexp(t);
    auto b = parse_sexp(t);
    out = make_catenation(a, b);
  } else {
    throw std::invalid_argument("unknown path constructor " + head);
  }
  if (t.next() != ")") throw std::invalid_argument("expected ) in path");
  return out;
}

}  // namespace detail_io

/// Path file: "symbolic:" followed by a constructor tree, or "sampled:"
/// followed by CSV rows "t, m11, m12, ..." (row major).
inline SymplecticPath parse_path_text(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("path file needs a symbolic: or sampled: header");
  std::string kind = text.substr(0, colon);
  std::string body = text.substr(colon + 1);
  if (kind == "symbolic") {
    auto toks = detail_io::tokenize_sexp(body);
    return symbolic(detail_io::parse_sexp(toks));
  }
  if (kind != "sampled")
    throw std::invalid_argument("unknown path kind " + kind);
  SampledPath sp;
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<Rat> vals;
    std::string tok;
    std::istringstream ls(line);
    while (std::getline(ls, tok, ',')) {
      std::string trimmed;
      for (char c : tok)
        if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
      if (!trimmed.empty()) vals.push_back(parse_rat(trimmed));
    }
    if (vals.empty()) continue;
    std::size_t dd = vals.size() - 1;
    std::size_t side = 0;
    while (side * side < dd) ++side;
    if (side * side != dd || side % 2 != 0)
      throw std::invalid_argument("sampled row is not t followed by a square 2n x 2n matrix");
    QMat m(side, side);
    for (std::size_t i = 0; i < side; ++i)
      for (std::size_t j = 0; j < side; ++j) m(i, j) = vals[1 + i * side + j];
    if (sp.samples.empty()) sp.half_dim = side / 2;
    sp.samples.emplace_back(vals[0], std::move(m));
  }
  return sampled(sp);
}

inline std::string slurp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace floerlib

#endif
