// Command line front end: exact cone orders, truncated Novikov arithmetic,
// Conley-Zehnder indices, double-system limits, filtered Floer pipelines and
// the flop consistency demo.

#include "floerlib/io.hpp"
#include "floerlib/verify.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace floerlib;

namespace {

Truncation parse_trunc(const std::vector<std::string>& toks, std::size_t rank) {
  GroupElement y;
  long long m = -1;
  for (const auto& t : toks) {
    if (t.rfind("y=", 0) == 0)
      y = parse_group_element(t.substr(2), rank);
    else if (t.rfind("m=", 0) == 0)
      m = std::stoll(t.substr(2));
    else
      throw std::invalid_argument("truncation tokens look like y=[1,1] m=4");
  }
  if (y.empty() || m < 0)
    throw std::invalid_argument("truncation needs both y=[...] and m=<int>");
  return {y, m};
}

std::vector<Rat> parse_point(const std::string& text, std::size_t rank) {
  // "[q1,q2;lm;lp]"
  std::string s = text;
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']')
    s = s.substr(1, s.size() - 2);
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ';')) parts.push_back(tok);
  if (parts.size() != 3)
    throw std::invalid_argument("point must look like [q1,...;lm;lp]");
  std::vector<Rat> pt;
  std::stringstream qs(parts[0]);
  while (std::getline(qs, tok, ',')) pt.push_back(parse_rat(tok));
  if (pt.size() != rank) throw std::invalid_argument("point q-part has wrong rank");
  pt.push_back(parse_rat(parts[1]));
  pt.push_back(parse_rat(parts[2]));
  return pt;
}

int finish(const Report& rep, bool as_json) {
  if (as_json) {
    json out = json::array();
    for (const auto& c : rep.checks)
      out.push_back({{"name", c.name}, {"pass", c.pass}, {"witness", c.witness}});
    std::cout << out.dump(2) << "\n";
  } else {
    rep.print(std::cout);
  }
  return rep.all_pass() ? 0 : 1;
}

FlopAlgebra flop_from_json(const json& j) {
  long long l = j.at("l").get<long long>();
  Rat n = rat_from_json(j.at("N"));
  std::size_t rank = j.value("rank", 1);
  std::size_t gi = j.value("gamma_index", 0);
  std::map<std::pair<long long, long long>, std::vector<Rat>> cup;
  if (j.contains("cup"))
    for (const auto& e : j.at("cup")) {
      long long i = e.at("i").get<long long>(), jj = e.at("j").get<long long>();
      std::vector<Rat> row;
      for (const auto& x : e.at("to")) row.push_back(rat_from_json(x));
      cup[{i, jj}] = row;
      cup[{jj, i}] = row;
    }
  for (long long i = 0; i <= l; ++i)
    for (long long jj = 0; jj <= l; ++jj)
      if (!cup.count({i, jj}))
        cup[{i, jj}] = std::vector<Rat>(l + 1, Rat(0));
  std::vector<std::tuple<long long, long long, long long, GroupElement, Rat>> extras;
  if (j.contains("extras"))
    for (const auto& e : j.at("extras"))
      extras.emplace_back(e.at("i").get<long long>(), e.at("j").get<long long>(),
                          e.at("k").get<long long>(),
                          group_element_from_json(e.at("beta"), rank),
                          rat_from_json(e.at("count")));
  std::vector<Rat> wx = j.contains("omega_x") ? covector_from_json(j.at("omega_x"))
                                              : std::vector<Rat>{Rat(1)};
  std::vector<Rat> wh = j.contains("omega_xhat")
                            ? covector_from_json(j.at("omega_xhat"))
                            : std::vector<Rat>{Rat(-1)};
  return build_flop_algebra(l, n, cup, extras, rank, gi, wx, wh);
}

std::vector<long long> parse_degree_range(const std::string& text) {
  auto dots = text.find("..");
  std::vector<long long> out;
  if (dots == std::string::npos) {
    out.push_back(std::stoll(text));
    return out;
  }
  long long lo = std::stoll(text.substr(0, dots));
  long long hi = std::stoll(text.substr(dots + 2));
  for (long long d = lo; d <= hi; ++d) out.push_back(d);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact algebra of cone-filtered Floer theory"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "structured report output");

  // --- cone ---
  auto* cone_cmd = app.add_subcommand("cone", "rational polyhedral cone orders");
  std::string cone_file, arg_x, arg_y, arg_a;
  long long arg_m = 0;
  auto* cone_info = cone_cmd->add_subcommand("info", "facets and salience");
  cone_info->add_option("file", cone_file)->required();
  auto* cone_sal = cone_cmd->add_subcommand("salient", "salience test");
  cone_sal->add_option("file", cone_file)->required();
  auto* cone_leq_cmd = cone_cmd->add_subcommand("leq", "cone order x <= y");
  cone_leq_cmd->add_option("file", cone_file)->required();
  cone_leq_cmd->add_option("x", arg_x)->required();
  cone_leq_cmd->add_option("y", arg_y)->required();
  auto* cone_cof = cone_cmd->add_subcommand("cofinal", "cofinal element");
  cone_cof->add_option("file", cone_file)->required();
  long long cof_bound = 16;
  cone_cof->add_option("--bound", cof_bound);
  auto* cone_ideal = cone_cmd->add_subcommand("ideal-member", "a in (y^m)?");
  cone_ideal->add_option("file", cone_file)->required();
  cone_ideal->add_option("--m", arg_m)->required();
  cone_ideal->add_option("--a", arg_a)->required();

  // --- novikov ---
  auto* nov_cmd = app.add_subcommand("novikov", "truncated Novikov arithmetic");
  std::string nov_op, nov_file, nov_sub, series1, series2;
  std::vector<std::string> trunc_toks;
  long long nov_order = 3;
  nov_cmd->add_option("op", nov_op, "add|mul|truncate|invert|restrict|valuation")
      ->required();
  nov_cmd->add_option("cone", nov_file)->required();
  nov_cmd->add_option("a", series1)->required();
  nov_cmd->add_option("b", series2, "second series, subcone file, or covector");
  nov_cmd->add_option("--trunc", trunc_toks)->expected(2);
  nov_cmd->add_option("--order", nov_order);

  // --- cz ---
  auto* cz_cmd = app.add_subcommand("cz", "Conley-Zehnder indices");
  std::string path_file, tol_str = "1/1000000000", reeb_a, reeb_d;
  std::uint64_t seed = 7;
  int cases = 100;
  auto* cz_index_cmd = cz_cmd->add_subcommand("index", "index of a path file");
  cz_index_cmd->add_option("file", path_file)->required();
  cz_index_cmd->add_option("--tol", tol_str);
  auto* cz_axioms = cz_cmd->add_subcommand("axioms", "axiom property suite");
  cz_axioms->add_option("--seed", seed);
  cz_axioms->add_option("--cases", cases);
  auto* cz_reeb = cz_cmd->add_subcommand("reeb", "toric Reeb model index");
  cz_reeb->add_option("--a", reeb_a)->required();
  cz_reeb->add_option("--d", reeb_d)->required();

  // --- sys ---
  auto* sys_cmd = app.add_subcommand("sys", "double systems and limits");
  std::string sys_op, sys_file;
  sys_cmd->add_option("op", sys_op, "lim|lim1|ml-check|cofinal-test")->required();
  sys_cmd->add_option("file", sys_file);
  sys_cmd->add_option("--seed", seed);
  sys_cmd->add_option("--cases", cases);

  // --- floer ---
  auto* floer_cmd = app.add_subcommand("floer", "filtered Floer pipeline");
  std::string floer_op, floer_file, target_file, window_file,
      degree_range = "-2..2", point_str = "";
  long long box = 2;
  floer_cmd->add_option("op", floer_op,
                        "validate|hf|sh|base-change|spectrum")
      ->required();
  floer_cmd->add_option("file", floer_file)->required();
  floer_cmd->add_option("--target-cone", target_file);
  floer_cmd->add_option("--window", window_file,
                        "pair file overriding the dataset's window");
  floer_cmd->add_option("--degrees", degree_range);
  floer_cmd->add_option("--trunc", trunc_toks)->expected(2);
  floer_cmd->add_option("--point", point_str);
  floer_cmd->add_option("--box", box);

  // --- flop ---
  auto* flop_cmd = app.add_subcommand("flop", "flop algebra consistency");
  std::string flop_op = "demo", flop_file;
  long long flop_l = 1, flop_order = 5;
  std::string flop_n = "1";
  flop_cmd->add_option("op", flop_op, "demo|check")->required();
  flop_cmd->add_option("file", flop_file);
  flop_cmd->add_option("--N", flop_n);
  flop_cmd->add_option("--l", flop_l);
  flop_cmd->add_option("--order", flop_order);

  // --- verify-all ---
  auto* verify_cmd = app.add_subcommand("verify-all", "every property suite");
  verify_cmd->add_option("--seed", seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cone_cmd) {
      auto cone = parse_cone_text(slurp_file(cone_file));
      if (*cone_info) {
        std::cout << "rank " << cone.rank << "\nsalient "
                  << (is_salient(cone) ? "yes" : "no") << "\nfacets:\n";
        for (const auto& f : cone.facets) {
          for (std::size_t i = 0; i < f.size(); ++i)
            std::cout << (i ? " " : "") << f[i];
          std::cout << "\n";
        }
      } else if (*cone_sal) {
        std::cout << (is_salient(cone) ? "salient" : "not salient") << "\n";
        return is_salient(cone) ? 0 : 1;
      } else if (*cone_leq_cmd) {
        auto ctx = make_context(cone);
        bool r = cone_leq(ctx, parse_group_element(arg_x, cone.rank),
                          parse_group_element(arg_y, cone.rank));
        std::cout << (r ? "true" : "false") << "\n";
        return r ? 0 : 1;
      } else if (*cone_cof) {
        auto ctx = make_context(cone);
        auto y = cofinal_element(ctx, verify::standard_group_gens(cone.rank),
                                 cof_bound);
        std::cout << g_str(y) << "\n";
      } else if (*cone_ideal) {
        auto ctx = make_context(cone);
        cofinal_element(ctx, verify::standard_group_gens(cone.rank), cof_bound);
        bool r = ideal_member(ctx, arg_m, parse_group_element(arg_a, cone.rank));
        std::cout << (r ? "true" : "false") << "\n";
        return r ? 0 : 1;
      }
      return 0;
    }

    if (*nov_cmd) {
      auto cone = parse_cone_text(slurp_file(nov_file));
      auto ctx = std::make_shared<ConeOrderContext>(make_context(cone));
      std::optional<Truncation> tr;
      if (!trunc_toks.empty()) {
        tr = parse_trunc(trunc_toks, cone.rank);
        ctx->y = tr->first;
      } else {
        cofinal_element(*ctx, verify::standard_group_gens(cone.rank));
      }
      std::shared_ptr<const ConeOrderContext> cctx = ctx;
      RingQ qq;
      auto a = series_from_text(qq, cctx, series1, tr);
      if (nov_op == "add" || nov_op == "mul") {
        auto b = series_from_text(qq, cctx, series2, tr);
        auto r = nov_op == "add" ? series_add(a, b) : series_mul(a, b);
        std::cout << series_to_text(r) << "\n";
      } else if (nov_op == "truncate") {
        if (!tr) throw std::invalid_argument("truncate needs --trunc");
        std::cout << series_to_text(series_truncate(a, tr->first, tr->second))
                  << "\n";
      } else if (nov_op == "invert") {
        std::cout << series_to_text(invert_unit(a, nov_order)) << "\n";
      } else if (nov_op == "restrict") {
        auto sub = parse_cone_text(slurp_file(series2));
        std::cout << series_to_text(restrict_cone(a, sub)) << "\n";
      } else if (nov_op == "valuation") {
        std::vector<Rat> f;
        std::stringstream ss(series2);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(parse_rat(tok));
        auto v = valuation(a, f);
        std::cout << (v ? to_string(*v) : "+inf") << "\n";
      } else {
        throw std::invalid_argument("unknown novikov op " + nov_op);
      }
      return 0;
    }

    if (*cz_cmd) {
      if (*cz_index_cmd) {
        auto path = parse_path_text(slurp_file(path_file));
        auto r = cz_index(path, parse_rat(tol_str));
        std::cout << r.value.str() << "\n";
        return 0;
      }
      if (*cz_axioms) return finish(verify::cz_suite(seed, cases), as_json);
      if (*cz_reeb) {
        auto split = [](const std::string& s) {
          std::vector<long long> out;
          std::stringstream ss(s);
          std::string tok;
          while (std::getline(ss, tok, ',')) out.push_back(std::stoll(tok));
          return out;
        };
        auto a = split(reeb_a);
        auto d = split(reeb_d);
        auto w = symbolic(make_constant(QMat::identity(2)));
        std::cout << reeb_model_index(a, d, w).str() << "\n";
        return 0;
      }
    }

    if (*sys_cmd) {
      if (sys_op == "cofinal-test")
        return finish(verify::systems_suite(seed, cases), as_json);
      auto tower = parse_tower_text(slurp_file(sys_file));
      if (sys_op == "lim") {
        auto l = inverse_limit_tower(tower);
        for (const auto& [d, r] : l.ranks)
          std::cout << "degree " << d << " rank " << r << "\n";
        if (l.ranks.empty()) std::cout << "zero\n";
      } else if (sys_op == "lim1") {
        auto r = lim1_tower(tower);
        std::cout << (r.is_zero ? "zero" : "nonzero") << "\n";
        if (!r.is_zero) std::cout << r.witness << "\n";
        return r.is_zero ? 0 : 2;
      } else if (sys_op == "ml-check") {
        TowerSliceSystem tss;
        tss.coef = tower.coef;
        tss.I = FinitePoset::chain(1);
        tss.slices.push_back(tower);
        bool ml = mittag_leffler_check(tss);
        std::cout << (ml ? "mittag-leffler" : "not mittag-leffler") << "\n";
        return ml ? 0 : 1;
      } else {
        throw std::invalid_argument("unknown sys op " + sys_op);
      }
      return 0;
    }

    if (*floer_cmd) {
      auto file = load_dataset_file(floer_file);
      if (!window_file.empty()) {
        std::ifstream in(window_file);
        json wj;
        in >> wj;
        file.window = pair_from_json(wj, file.base.geometry.rank);
      }
      auto degrees = parse_degree_range(degree_range);
      Truncation tr = trunc_toks.empty()
                          ? Truncation{*file.base.cone_ctx->y,
                                       file.base.trunc_level}
                          : parse_trunc(trunc_toks, file.base.geometry.rank);
      if (floer_op == "validate") {
        auto rep = validate_dataset(file.base,
                                    file.window ? &*file.window : nullptr);
        return finish(rep, as_json);
      }
      if (floer_op == "hf") {
        if (!file.window)
          throw std::invalid_argument("dataset file has no window");
        auto cx = build_complex(file.base, *file.window, degrees, tr);
        auto h = homology(cx);
        for (long long p : degrees)
          std::cout << "degree " << p << " basis " << cx.rank_at(p) << " HF "
                    << (h.ranks.count(p) ? h.ranks.at(p) : 0) << "\n";
        return 0;
      }
      if (floer_op == "sh") {
        if (!file.ladder) throw std::invalid_argument("file has no ladder");
        auto res = sh_compute(*file.ladder, degrees, tr);
        res.report.print(std::cout);
        std::cout << "lim1_flag " << (res.mittag_leffler ? "zero" : "unknown")
                  << "\nSH ranks:";
        for (const auto& [d, r] : res.lim.module.ranks)
          std::cout << " [" << d << "]=" << r;
        std::cout << "\n";
        return res.report.all_pass() ? 0 : 1;
      }
      if (floer_op == "base-change") {
        if (!file.ladder) throw std::invalid_argument("file has no ladder");
        if (target_file.empty())
          throw std::invalid_argument("base-change needs --target-cone");
        std::ifstream in(target_file);
        json tj;
        in >> tj;
        auto q1m = cone_from_json(tj.at("q_minus"), file.base.geometry.rank + 2);
        auto q1p = cone_from_json(tj.at("q_plus"), file.base.geometry.rank + 2);
        auto res = base_change_check(*file.ladder, q1m, q1p, degrees, tr);
        return finish(res.report, as_json);
      }
      if (floer_op == "spectrum") {
        if (point_str.empty())
          throw std::invalid_argument("spectrum needs --point");
        auto pt = parse_point(point_str, file.base.geometry.rank);
        for (const auto& v : action_spectrum(file.base, pt, box))
          std::cout << v << "\n";
        return 0;
      }
      throw std::invalid_argument("unknown floer op " + floer_op);
    }

    if (*flop_cmd) {
      FlopAlgebra z;
      if (flop_op == "demo") {
        std::map<std::pair<long long, long long>, std::vector<Rat>> cup;
        for (long long i = 0; i <= flop_l; ++i)
          for (long long j = 0; j <= flop_l; ++j)
            cup[{i, j}] = std::vector<Rat>(flop_l + 1, Rat(0));
        z = build_flop_algebra(flop_l, parse_rat(flop_n), cup, {}, 1, 0,
                               {Rat(1)}, {Rat(-1)});
      } else if (flop_op == "check") {
        std::ifstream in(flop_file);
        json j;
        in >> j;
        z = flop_from_json(j);
      } else {
        throw std::invalid_argument("unknown flop op " + flop_op);
      }
      std::cout << "product table (A_i * A_j over the common ring):\n";
      auto cctx = common_ring_context(z);
      for (long long i = 0; i <= z.l; ++i)
        for (long long j = i; j <= z.l; ++j) {
          auto row = flop_product(z, i, j, cctx);
          std::cout << "  A" << i << "*A" << j << " =";
          bool any = false;
          for (long long k = 0; k <= z.l; ++k)
            if (!row[k].is_zero()) {
              std::cout << " (" << series_to_text(row[k]) << ")*Ahat" << k;
              any = true;
            }
          std::cout << (any ? "" : " 0") << "\n";
        }
      auto sx = standard_scales(z, true, flop_order);
      auto sh = standard_scales(z, false, flop_order);
      std::cout << "rescaled tables:\n";
      for (long long i = 0; i <= z.l; ++i)
        for (long long j = i; j <= z.l; ++j) {
          auto rx = rescale_constant(z, sx, i, j, flop_order);
          auto rh = rescale_constant(z, sh, i, j, flop_order);
          for (long long k = 0; k <= z.l; ++k) {
            if (rx[k].is_zero() && rh[k].is_zero()) continue;
            std::cout << "  X   (" << i << "," << j << ")->" << k << ": "
                      << series_to_text(rx[k]) << "\n";
            std::cout << "  Xhat(" << i << "," << j << ")->" << k << ": "
                      << series_to_text(rh[k]) << "\n";
          }
        }
      auto rep = continuation_consistency_check(z, flop_order);
      rep.add("flop.associativity_predicate",
              flop_associativity_check(z, flop_order));
      return finish(rep, as_json);
    }

    if (*verify_cmd) return finish(verify::verify_all(seed), as_json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
