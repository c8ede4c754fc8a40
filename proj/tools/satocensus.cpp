// Command line front end for the satocensus library.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include "satocensus/satocensus.hpp"

using namespace satocensus;

namespace {

struct Common {
  i64 p = 10007;
  std::uint64_t seed = 1;
  std::string out;
  unsigned threads = 1;
  std::string format;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_format) {
  c.format = default_format;
  sub->add_option("--p", c.p, "prime p");
  sub->add_option("--seed", c.seed, "random seed");
  sub->add_option("--out", c.out, "output directory for artifacts");
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::Range(1u, 256u));
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

// Writes text to DIR/file when --out is given, stdout otherwise.
void emit(const Common& c, const std::string& file, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::create_directories(c.out);
  auto path = (std::filesystem::path(c.out) / file).string();
  std::ofstream(path) << text;
  std::cerr << "wrote " << path << "\n";
}

void print_report(const Common& c, const ExperimentReport& r) {
  if (c.format == "csv") {
    std::cout << "key,value\n";
    for (auto& [k, v] : r.stats.items()) std::cout << k << ',' << v.dump() << '\n';
  } else {
    std::cout << r.to_json().dump(2) << '\n';
  }
  if (!c.out.empty()) {
    auto path = detail::artifact_path(c.out, r.name + "_report.json");
    std::ofstream(path) << r.to_json().dump(2) << '\n';
  }
}

std::string dist_csv(const DiscreteDist& d) {
  std::string s = "value_num,value_den,mass_num,mass_den\n";
  for (const auto& a : d.atoms())
    s += a.value.get_num().get_str() + ',' + a.value.get_den().get_str() + ',' + a.mass.get_num().get_str() + ',' +
         a.mass.get_den().get_str() + '\n';
  return s;
}

json dist_json(const DiscreteDist& d) {
  json atoms = json::array();
  for (const auto& a : d.atoms()) atoms.push_back({{"value", to_string(a.value)}, {"mass", to_string(a.mass)}});
  json j{{"atoms", atoms}};
  if (d.tail()) j["tail"] = {{"mass", to_string(d.tail()->mass)}, {"value", to_string(d.tail()->value)}};
  auto m = moments(d);
  j["mean"] = to_string(m.mean);
  j["variance"] = to_string(m.variance);
  return j;
}

PrimeClass parse_class(i64 l, const std::string& s) {
  if (l == 2) {
    static const std::map<std::string, TwoAdicCase> m{{"p=2", TwoAdicCase::p_is_2},
                                                      {"3mod4", TwoAdicCase::three_mod_4},
                                                      {"5mod8", TwoAdicCase::five_mod_8},
                                                      {"1mod8", TwoAdicCase::one_mod_8}};
    auto it = m.find(s);
    if (it == m.end()) throw CLI::ValidationError("--class", "for l=2 use p=2, 3mod4, 5mod8 or 1mod8");
    return PrimeClass::two_adic(it->second);
  }
  return PrimeClass::odd(l, std::stoi(s));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elliptic curve trace censuses, local factors and distribution distances"};
  app.require_subcommand(1);

  // census
  Common census_c;
  std::string census_method = "batched";
  auto* census = app.add_subcommand("census", "per-trace curve counts");
  add_common(census, census_c, "csv");
  census->add_option("--method", census_method, "batched, direct, slow or classno")
      ->check(CLI::IsMember({"batched", "direct", "slow", "classno"}));

  // classno
  i64 cl_delta = -23;
  bool cl_forms = false;
  auto* classno = app.add_subcommand("classno", "Hurwitz class number H(D)");
  classno->add_option("--delta", cl_delta, "negative discriminant")->required();
  classno->add_flag("--forms", cl_forms, "also list reduced forms");

  // gekeler
  Common gk_c;
  i64 gk_l0 = 0;
  int gk_k = 0;
  std::string gk_mode = "grh";
  double gk_exponent = 3.0, gk_kappa = 1.0;
  auto* gekeler = app.add_subcommand("gekeler", "truncated product estimates per trace");
  add_common(gekeler, gk_c, "csv");
  gekeler->add_option("--l0", gk_l0, "explicit cutoff (overrides --mode)");
  gekeler->add_option("--k", gk_k, "use v_{l,k} factors at this level");
  gekeler->add_option("--mode", gk_mode, "grh or unconditional")->check(CLI::IsMember({"grh", "unconditional"}));
  gekeler->add_option("--exponent", gk_exponent, "exponent in (log p)^e");
  gekeler->add_option("--kappa", gk_kappa, "kappa in g_kappa(p)");

  // ydist
  Common yd_c;
  i64 yd_l = 3;
  int yd_S = 4, yd_k = 0;
  std::string yd_class;
  auto* ydist = app.add_subcommand("ydist", "local law Y_{l,p} or its truncation");
  add_common(ydist, yd_c, "csv");
  ydist->add_option("--l", yd_l, "prime l");
  ydist->add_option("--S", yd_S, "family depth for the table");
  ydist->add_option("--k", yd_k, "enumerate Y_{l,p,k} at this level instead");
  ydist->add_option("--class", yd_class, "class instead of --p: symbol for odd l, p=2/3mod4/5mod8/1mod8 for l=2");

  // zdist
  Common zd_c;
  i64 zd_l1 = 20;
  int zd_k = 3;
  double zd_prune = 1e-9;
  auto* zdist = app.add_subcommand("zdist", "truncated product law Z_p");
  add_common(zdist, zd_c, "csv");
  zdist->add_option("--l1", zd_l1, "primes l < l1");
  zdist->add_option("--k", zd_k, "level");
  zdist->add_option("--prune", zd_prune, "prune atoms lighter than this");

  // metric
  Common mt_c;
  std::string mt_a, mt_b;
  auto* metric = app.add_subcommand("metric", "distances between two point-cloud CSVs");
  add_common(metric, mt_c, "json");
  metric->add_option("a", mt_a, "first cloud (x[,y],mass)")->required();
  metric->add_option("b", mt_b, "second cloud")->required();

  // verify
  Common vf_c;
  i64 vf_min = 5, vf_max = 199;
  auto* verify = app.add_subcommand("verify", "census against class numbers");
  add_common(verify, vf_c, "json");
  verify->add_option("--p-min", vf_min);
  verify->add_option("--p-max", vf_max);

  // vertical
  Common vt_c;
  int vt_bins = 50;
  auto* vertical = app.add_subcommand("vertical", "fixed-bin semicircle deviation");
  add_common(vertical, vt_c, "json");
  vertical->add_option("--bins", vt_bins);

  // strong
  Common st_c;
  double st_alpha = 0.2;
  bool st_sliding = false;
  auto* strong = app.add_subcommand("strong", "windowed sup error with w = ceil(p^alpha)");
  add_common(strong, st_c, "json");
  strong->add_option("--alpha", st_alpha);
  strong->add_flag("--sliding", st_sliding, "slide windows by one trace");

  // twod
  Common td_c;
  TwoDOptions td_o;
  auto* twod = app.add_subcommand("twod", "2D trace/count cloud against the heuristic model");
  add_common(twod, td_c, "json");
  twod->add_option("--l1", td_o.l1);
  twod->add_option("--k", td_o.k);
  twod->add_option("--samples", td_o.n_samples);
  twod->add_option("--prune", td_o.prune_eps);
  twod->add_option("--transport-points", td_o.transport_points);
  twod->add_option("--exact-points", td_o.exact_points);

  // primeseq
  Common ps_c;
  PrimeSeqOptions ps_o;
  std::vector<std::string> ps_symbols;
  std::string ps_mod8;
  auto* primeseq = app.add_subcommand("primeseq", "Z laws along primes with a fixed symbol pattern");
  add_common(primeseq, ps_c, "json");
  primeseq->add_option("--symbol", ps_symbols, "constraint l:e, repeatable (e.g. 3:+1)");
  primeseq->add_option("--mod8", ps_mod8, "1mod8, 3mod4 or 5mod8")->check(CLI::IsMember({"1mod8", "3mod4", "5mod8"}));
  primeseq->add_option("--count", ps_o.count);
  primeseq->add_option("--l1", ps_o.l1);
  primeseq->add_option("--k", ps_o.k);
  primeseq->add_option("--prune", ps_o.prune_eps);
  primeseq->add_option("--start", ps_o.start);

  // isogeny
  Common is_c;
  IsogenyOptions is_o;
  bool is_unweighted = false;
  auto* isogeny = app.add_subcommand("isogeny", "isogeny class size distribution");
  add_common(isogeny, is_c, "json");
  isogeny->add_flag("--unweighted", is_unweighted, "use plain class counts");
  isogeny->add_option("--l1", is_o.l1);
  isogeny->add_option("--k", is_o.k);
  isogeny->add_option("--samples", is_o.n_samples);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*census) {
      TraceCensus c;
      if (census_method == "slow") c = slow_pair_census(census_c.p);
      else if (census_method == "classno") c = census_via_class_numbers(census_c.p, census_c.threads);
      else
        c = weighted_census(census_c.p, {census_c.threads, census_method == "direct" ? CensusMethod::direct
                                                                                      : CensusMethod::batched});
      if (census_c.format == "json") {
        json rows = json::array();
        for (i64 t = -c.max_trace(); t <= c.max_trace(); ++t) {
          json row{{"t", t}, {"weighted", to_string(c.weighted(t))}};
          if (c.has_unweighted()) row["unweighted"] = c.unweighted(t);
          rows.push_back(row);
        }
        emit(census_c, "census_p" + std::to_string(census_c.p) + ".json",
             json{{"p", c.p()}, {"total", to_string(c.total_weighted())}, {"traces", rows}}.dump(2) + "\n");
      } else {
        std::ostringstream os;
        c.write_csv(os);
        emit(census_c, "census_p" + std::to_string(census_c.p) + ".csv", os.str());
      }
    } else if (*classno) {
      std::cout << to_string(hurwitz_class_number(cl_delta)) << "\n";
      if (cl_forms)
        for (const auto& f : reduced_forms(cl_delta)) std::cout << "(" << f.a << "," << f.b << "," << f.c << ")\n";
    } else if (*gekeler) {
      CutoffPlan plan;
      if (gk_l0 > 0) plan.l0 = gk_l0;
      else
        plan = cutoff_l0(gk_c.p, gk_mode == "grh" ? CutoffMode::grh_poly : CutoffMode::unconditional, gk_exponent,
                         gk_kappa);
      const i64 p = gk_c.p, T = isqrt(4 * p - 1);
      std::ostringstream os;
      os << "t,delta,exact_num,exact_den,estimate,rel_error\n";
      for (i64 t = -T; t <= T; ++t) {
        Rational h = hurwitz_class_number(t * t - 4 * p);
        double est = gekeler_estimate(t, p, plan, gk_k);
        os << t << ',' << t * t - 4 * p << ',' << h.get_num().get_str() << ',' << h.get_den().get_str() << ','
           << fmt17(est) << ',' << fmt17(std::fabs(est - h.get_d()) / h.get_d()) << '\n';
      }
      std::cerr << "l0 = " << plan.l0 << "\n";
      emit(gk_c, "gekeler_p" + std::to_string(p) + ".csv", os.str());
    } else if (*ydist) {
      PrimeClass cls = yd_class.empty() ? PrimeClass::of(yd_l, yd_c.p) : parse_class(yd_l, yd_class);
      DiscreteDist d = yd_k > 0 ? y_k_enumerated(yd_l, cls.representative(), yd_k) : y_table(cls, yd_S);
      if (yd_c.format == "json") {
        auto j = dist_json(d);
        j["class"] = cls.label();
        emit(yd_c, "ydist.json", j.dump(2) + "\n");
      } else {
        std::string s = dist_csv(d);
        if (d.tail()) s += to_string(d.tail()->value) + ",tail," + to_string(d.tail()->mass) + ",tail\n";
        emit(yd_c, "ydist.csv", s);
      }
    } else if (*zdist) {
      auto z = z_truncated(zd_c.p, zd_l1, zd_k, zd_prune);
      auto m = moments(z.dist);
      json summary{{"p", zd_c.p},
                   {"l1", zd_l1},
                   {"k", zd_k},
                   {"atoms", z.dist.size()},
                   {"mean", m.mean.get_d()},
                   {"variance", m.variance.get_d()},
                   {"pruned_mass", z.pruned_mass},
                   {"pruned_atoms", z.pruned_atoms}};
      if (zd_c.format == "json") {
        emit(zd_c, "zdist.json", summary.dump(2) + "\n");
      } else {
        emit(zd_c, "zdist.csv", dist_csv(z.dist));
        std::cerr << summary.dump() << "\n";
      }
    } else if (*metric) {
      auto a = read_cloud_csv(mt_a), b = read_cloud_csv(mt_b);
      json j;
      j["w1"] = wasserstein1(a, b);
      j["upper"] = prokhorov_upper(a, b);
      if (a.size() + b.size() <= kProkhorovCap) j["exact"] = prokhorov_exact(a, b);
      else j["exact"] = nullptr;
      std::cout << j.dump(2) << "\n";
    } else if (*verify) {
      print_report(vf_c, cmd_gekeler_verify(vf_min, vf_max, vf_c.threads));
    } else if (*vertical) {
      print_report(vt_c, cmd_vertical_st(vt_c.p, vt_bins, vt_c.out, vt_c.threads));
    } else if (*strong) {
      print_report(st_c, cmd_strong_st(st_c.p, st_alpha, st_c.out, st_sliding, st_c.threads));
    } else if (*twod) {
      td_o.seed = td_c.seed;
      td_o.threads = td_c.threads;
      print_report(td_c, cmd_2dst(td_c.p, td_o, td_c.out));
    } else if (*primeseq) {
      PatternConstraint pc;
      for (const auto& s : ps_symbols) {
        auto colon = s.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("--symbol expects l:e");
        pc.require_symbol(std::stoll(s.substr(0, colon)), std::stoi(s.substr(colon + 1)));
      }
      if (ps_mod8 == "1mod8") pc.require_mod8(Mod8Tag::one_mod_8);
      else if (ps_mod8 == "3mod4") pc.require_mod8(Mod8Tag::three_mod_4);
      else if (ps_mod8 == "5mod8") pc.require_mod8(Mod8Tag::five_mod_8);
      print_report(ps_c, cmd_prime_seq(pc, ps_o));
    } else if (*isogeny) {
      is_o.weighted = !is_unweighted;
      is_o.seed = is_c.seed;
      is_o.threads = is_c.threads;
      print_report(is_c, cmd_isogeny_dist(is_c.p, is_o, is_c.out));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
