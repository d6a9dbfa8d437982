#include "jacobi_watson/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "jacobi_watson/abel.hpp"
#include "jacobi_watson/errors.hpp"
#include "jacobi_watson/estimates.hpp"
#include "jacobi_watson/harmonic.hpp"
#include "jacobi_watson/kernels.hpp"
#include "jacobi_watson/measure.hpp"
#include "jacobi_watson/test_functions.hpp"

namespace jw::cli {

using nlohmann::json;

// --- formatting ------------------------------------------------------------

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_json(std::string& s, const json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        s += "{}";
        return;
      }
      s += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) s += ",\n";
        first = false;
        s += pad + json(it.key()).dump() + ": ";
        write_json(s, it.value(), indent, depth + 1);
      }
      s += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        s += "[]";
        return;
      }
      s += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) s += ",\n";
        s += pad;
        write_json(s, j[i], indent, depth + 1);
      }
      s += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      s += std::isfinite(v) ? fmt17(v) : "null";
      return;
    }
    default: s += j.dump();
  }
}

}  // namespace

std::string dump_json(const json& j, int indent) {
  std::string s;
  write_json(s, j, indent, 0);
  s += "\n";
  return s;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  auto number = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size()) fail(ErrorKind::domain, "bad grid value '" + t + "'");
    return v;
  };
  if (const auto c1 = spec.find(':'); c1 != std::string::npos) {
    const auto c2 = spec.find(':', c1 + 1);
    require(c2 != std::string::npos, ErrorKind::domain, "range grids read a:b:n");
    const double a = number(spec.substr(0, c1)), b = number(spec.substr(c1 + 1, c2 - c1 - 1));
    const double nd = number(spec.substr(c2 + 1));
    require(nd >= 1 && nd == std::floor(nd), ErrorKind::domain, "grid point count must be a positive integer");
    const int n = static_cast<int>(nd);
    if (n == 1) return {a};
    for (int i = 0; i < n; ++i) out.push_back(i == n - 1 ? b : a + (b - a) * i / (n - 1));
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number(item));
  require(!out.empty(), ErrorKind::domain, "grids must be nonempty");
  return out;
}

// --- reports ---------------------------------------------------------------

namespace {

struct Report {
  json command = json::object();
  json results = json::object();
  std::vector<EstimateCheck> checks;

  void check(std::string name, std::string anchor, double value, double bound, bool pass, bool hard = true) {
    checks.push_back({std::move(name), std::move(anchor), value, bound, pass, hard});
  }
  bool pass() const { return all_hard_pass(checks); }
  json to_json() const {
    json cs = json::array();
    for (const auto& c : checks)
      cs.push_back({{"name", c.name}, {"anchor", c.anchor}, {"value", c.value}, {"bound", c.bound},
                    {"pass", c.pass}, {"hard", c.hard}});
    return {{"schema", 1}, {"command", command}, {"results", results}, {"checks", cs}, {"pass", pass()}};
  }
};

struct GridRow {
  double x, r, value;
  std::string method;
  double error_estimate;
};

std::string csv(const std::vector<GridRow>& rows) {
  std::string s = "x,r,value,method,error_estimate\n";
  for (const auto& row : rows)
    s += fmt17(row.x) + "," + fmt17(row.r) + "," + fmt17(row.value) + "," + row.method + "," +
         fmt17(row.error_estimate) + "\n";
  return s;
}

json rows_json(const std::vector<GridRow>& rows) {
  json a = json::array();
  for (const auto& row : rows)
    a.push_back({{"x", row.x}, {"r", row.r}, {"value", row.value}, {"method", row.method},
                 {"error_estimate", row.error_estimate}});
  return a;
}

struct Config {
  double alpha = 0.0, beta = 0.0;
  double r = 0.9, x = 0.5, y = 0.3;
  double lambda = 0.7, p = 2.0;
  std::string kernel_suite = "eval", estimates_suite = "all";
  std::string method = "auto", quantity = "mean", route = "series";
  std::string f = "P:3", measure = "jacobi:0.5,0.5", weight = "-0.3,-0.3", kind = "a1";
  std::string x_grid, r_grid;
  int levels = 12, n = 513;
  std::string out = "json", output = "-";
  unsigned long seed = 0;
  double jitter = 0.0;
};

// Interior grid points moved by jitter * (local spacing) * U(-1/2, 1/2).
std::vector<double> jittered(std::vector<double> g, const Config& c) {
  if (c.jitter <= 0.0 || g.size() < 3) return g;
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const auto base = g;
  for (std::size_t i = 1; i + 1 < g.size(); ++i)
    g[i] = base[i] + c.jitter * u(rng) * std::min(base[i] - base[i - 1], base[i + 1] - base[i]);
  return g;
}

std::vector<double> grid_or(const std::string& spec, const std::string& fallback) {
  return parse_grid(spec.empty() ? fallback : spec);
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// --- kernel ----------------------------------------------------------------

KernelEval eval_method(const JacobiParams& p, const AbelParameter& ab, double x, double y, const std::string& m) {
  if (m == "series") return watson_kernel_series(p, ab, x, y);
  if (m == "bailey") return watson_kernel_bailey(p, ab, x, y);
  if (m == "integral") return watson_kernel_integral(p, ab, x, y);
  return watson_kernel(p, ab, x, y);
}

Report kernel_cmd(const Config& c, std::vector<GridRow>* rows) {
  const JacobiParams p(c.alpha, c.beta);
  Report rep;
  rep.command = {{"name", "kernel"}, {"alpha", c.alpha}, {"beta", c.beta}, {"suite", c.kernel_suite},
                 {"method", c.method}};
  if (c.kernel_suite == "mass") {
    const auto rs = c.r_grid.empty() ? std::vector<double>{c.r} : parse_grid(c.r_grid);
    const auto xs = c.x_grid.empty() ? std::vector<double>{c.x} : jittered(parse_grid(c.x_grid), c);
    rep.command["r"] = rs;
    rep.command["x"] = xs;
    json out = json::array();
    for (double r : rs) {
      const AbelParameter ab(r);
      const double tol = r <= 0.95 ? 1e-8 : 1e-6;
      double worst = 0.0, min_k = INFINITY;
      for (double x : xs) {
        const double mass = kernel_mass(p, ab, x);
        const KernelRow K(p, ab, x);
        double mk = INFINITY;
        for (int i = 0; i <= 400; ++i) mk = std::min(mk, K(-1.0 + i / 200.0));
        out.push_back({{"r", r}, {"x", x}, {"mass", mass}, {"min_kernel", mk}});
        worst = std::max(worst, std::abs(mass - 1.0));
        min_k = std::min(min_k, mk);
      }
      rep.check("mass r=" + fmt17(r), "int K(r,x,y) dJ(y) = 1", worst, tol, worst <= tol);
      rep.check("nonnegative r=" + fmt17(r), "K(r,x,y) >= 0", min_k, -1e-10, min_k >= -1e-10);
    }
    rep.results["rows"] = out;
    return rep;
  }
  if (c.kernel_suite == "grid" || rows) {
    const auto rs = grid_or(c.r_grid, "0.5,0.9,0.99");
    const auto xs = jittered(grid_or(c.x_grid, "-1:1:100"), c);
    rep.command["r_grid"] = rs;
    rep.command["x_grid"] = xs;
    rep.command["y"] = c.y;
    std::vector<GridRow> local;
    double min_v = INFINITY;
    for (double r : rs) {
      const AbelParameter ab(r);
      for (double x : xs) {
        const auto e = eval_method(p, ab, x, c.y, c.method);
        local.push_back({x, r, e.value, std::string(to_string(e.method)), e.error_estimate});
        min_v = std::min(min_v, e.value);
      }
    }
    rep.check("nonnegative", "K(r,x,y) >= 0", min_v, -1e-10, min_v >= -1e-10);
    if (rows) *rows = std::move(local);
    else rep.results["rows"] = rows_json(local);
    return rep;
  }
  // eval: every applicable method at one point, cross-checked.
  const AbelParameter ab(c.r);
  rep.command["r"] = c.r;
  rep.command["x"] = c.x;
  rep.command["y"] = c.y;
  auto record = [&](const KernelEval& e) {
    rep.results[std::string(to_string(e.method))] = {
        {"value", e.value}, {"error_estimate", e.error_estimate}, {"terms_or_nodes", e.terms_or_nodes}};
  };
  const auto series = watson_kernel_series(p, ab, c.x, c.y);
  record(series);
  if (BaileyArguments::make(ab, c.x, c.y).margin > 0.1) {
    const auto b = watson_kernel_bailey(p, ab, c.x, c.y);
    record(b);
    const double d = rel_diff(series.value, b.value);
    rep.check("series_vs_bailey", "series = Bailey F4 representation", d, 1e-8, d <= 1e-8);
  }
  if (c.alpha + c.beta > -1.0 && c.r > 0.5) {
    const auto w = watson_kernel_integral(p, ab, c.x, c.y);
    record(w);
    const double d = rel_diff(series.value, w.value);
    rep.check("series_vs_integral", "series = Watson integral representation", d, 1e-4, d <= 1e-4);
  }
  rep.check("nonnegative", "K(r,x,y) >= 0", series.value, -1e-10, series.value >= -1e-10);
  return rep;
}

// --- abel ------------------------------------------------------------------

AbelRoute abel_route(const std::string& s) {
  if (s == "series") return AbelRoute::series;
  if (s == "kernel") return AbelRoute::kernel;
  fail(ErrorKind::domain, "abel mean routes are series and kernel");
}

ModifiedRoute modified_route(const std::string& s) {
  if (s == "series") return ModifiedRoute::series;
  if (s == "direct") return ModifiedRoute::direct;
  if (s == "factored") return ModifiedRoute::factored;
  fail(ErrorKind::domain, "modified mean routes are series, direct and factored");
}

Report abel_cmd(const Config& c, std::vector<GridRow>* rows) {
  const JacobiParams p(c.alpha, c.beta);
  const auto f = test_functions::parse(c.f, p);
  Report rep;
  rep.command = {{"name", "abel"}, {"alpha", c.alpha}, {"beta", c.beta}, {"f", c.f}, {"quantity", c.quantity},
                 {"route", c.route}};
  if (c.quantity == "maximal") {
    require(c.levels >= 2, ErrorKind::domain, "maximal needs --levels >= 2");
    const auto grid = default_r_grid(c.levels), coarse = default_r_grid(c.levels - 1);
    const auto xs = jittered(grid_or(c.x_grid, fmt17(c.x)), c);
    rep.command["levels"] = c.levels;
    rep.command["x_grid"] = xs;
    std::vector<GridRow> local;
    for (double x : xs) {
      const double v = jacobi_maximal(f, p, x, grid);
      local.push_back({x, grid.back(), v, "series", v - jacobi_maximal(f, p, x, coarse)});
    }
    if (rows) *rows = std::move(local);
    else rep.results["rows"] = rows_json(local);
    return rep;
  }
  const bool modified = c.quantity == "modified";
  require(modified || c.quantity == "mean", ErrorKind::domain, "quantity is mean, modified or maximal");
  auto value = [&](double r, double x, const std::string& route) {
    return modified ? modified_abel_mean(f, p, r, x, modified_route(route)) : abel_mean(f, p, r, x, abel_route(route));
  };
  if (rows || !c.x_grid.empty() || !c.r_grid.empty()) {
    const auto rs = grid_or(c.r_grid, fmt17(c.r));
    const auto xs = jittered(grid_or(c.x_grid, fmt17(c.x)), c);
    rep.command["r_grid"] = rs;
    rep.command["x_grid"] = xs;
    std::vector<GridRow> local;
    for (double r : rs)
      for (double x : xs) local.push_back({x, r, value(r, x, c.route), c.route, std::nan("")});
    if (rows) *rows = std::move(local);
    else rep.results["rows"] = rows_json(local);
    return rep;
  }
  rep.command["r"] = c.r;
  rep.command["x"] = c.x;
  const std::string other = modified ? (c.route == "series" ? "direct" : "series")
                                     : (c.route == "series" ? "kernel" : "series");
  const double v = value(c.r, c.x, c.route), w = value(c.r, c.x, other);
  rep.results[c.route] = v;
  rep.results[other] = w;
  const double d = std::abs(v - w) / std::max(1.0, std::abs(v));
  rep.check("routes_agree", c.route + " = " + other, d, 1e-6, d <= 1e-6);
  return rep;
}

// --- cz --------------------------------------------------------------------

std::string cz_anchor(const std::string& name) {
  if (name == "average_above_lambda") return "lambda < avg_I f";
  if (name == "average_at_most_2lambda") return "avg_I f <= 2 lambda";
  if (name == "bad_part_mean") return "int_I b dmu = 0";
  if (name == "disjoint") return "selected intervals disjoint";
  if (name == "good_part_on_G_at_most_2lambda") return "|g| <= 2 lambda on G";
  if (name == "mass_G") return "mu(G) <= |f|_1 / lambda";
  if (name == "mass_Gstar") return "mu(G*) <= 3 |f|_1 / lambda";
  return name;
}

JacobiParams params_of(const WeightedMeasure& m, const Config& c) {
  if (m.family() == "jacobi") return JacobiParams(m.params()[0], m.params()[1]);
  return JacobiParams(c.alpha, c.beta);
}

Report cz_cmd(const Config& c) {
  const auto m = WeightedMeasure::parse(c.measure);
  const auto f = test_functions::parse(c.f, params_of(m, c));
  Report rep;
  rep.command = {{"name", "cz"}, {"measure", c.measure}, {"f", c.f}, {"lambda", c.lambda}};
  const auto d = cz_decompose(m, f, c.lambda);
  json iv = json::array();
  for (const auto& I : d.intervals)
    iv.push_back({{"left", I.left}, {"right", I.right}, {"mass", I.mass}, {"average", I.average()}});
  json gs = json::array();
  for (const auto& G : d.Gstar) gs.push_back({G.left, G.right});
  rep.results = {{"lambda", d.lambda},     {"l1_norm", d.l1_norm},       {"trivial", d.trivial},
                 {"intervals", iv},        {"residual_leaves", d.residual.size()},
                 {"mass_G", d.mass_G},     {"mass_Gstar", d.mass_Gstar}, {"Gstar", gs}};
  for (const auto& ch : d.checks) rep.check(ch.name, cz_anchor(ch.name), ch.value, ch.bound, ch.pass);
  return rep;
}

// --- weights ---------------------------------------------------------------

Report weights_cmd(const Config& c) {
  const auto m = WeightedMeasure::parse(c.measure);
  const auto e = parse_grid(c.weight);
  require(e.size() == 2, ErrorKind::domain, "--weight takes the two exponents l,r");
  const PowerWeight w{e[0], e[1]};
  Report rep;
  rep.command = {{"name", "weights"}, {"measure", c.measure}, {"weight", e}, {"kind", c.kind}, {"n", c.n}};
  WeightConstant wc;
  if (c.kind == "a1") {
    const auto xs = grid_or(c.x_grid, "-0.99,-0.5,0,0.3,0.9,0.999");
    rep.command["x_grid"] = xs;
    wc = a1_constant(w, m, xs, c.n);
  } else {
    require(c.kind == "ap", ErrorKind::domain, "--kind is a1 or ap");
    require(c.p > 1.0, ErrorKind::domain, "A_p needs p > 1");
    rep.command["p"] = c.p;
    wc = ap_constant(w, m, c.p, c.n);
  }
  rep.results = {{"value", wc.value}, {"coarse", wc.coarse}, {"divergent", wc.divergent}};
  const bool ok = std::isfinite(wc.value) && !wc.divergent;
  rep.check(c.kind + "_constant", c.kind == "a1" ? "w*(x) <= C w(x)" : "(avg w)(avg w^{-1/(p-1)})^{p-1} <= C",
            wc.value, 1.5 * wc.coarse, ok);
  return rep;
}

// --- estimates -------------------------------------------------------------

void suite_poisson(Report& rep) {
  json res = json::object();
  for (auto tag : {PoissonTag::k1, PoissonTag::k2, PoissonTag::k3}) {
    const auto q = poisson_mass(tag);
    const double stated = PoissonTypeKernel{tag}.stated_mass();
    res[std::string(to_string(tag))] = {{"mass", q.value}, {"error_estimate", q.error}};
    const double d = std::abs(q.value - stated);
    rep.check("mass " + std::string(to_string(tag)), "int " + std::string(to_string(tag)) + " = " + fmt17(stated), d,
              1e-6, d <= 1e-6);
  }
  for (double a : {-0.5, 0.0, 1.7}) {
    const double v = poisson_mass(PoissonTag::k4, a).value;
    res["k4 alpha=" + fmt17(a)] = v;
    rep.check("mass k4 alpha=" + fmt17(a), "int k4 < inf for 1 + alpha/2 > 1/2", v, INFINITY, std::isfinite(v),
              false);
  }
  rep.results["poisson"] = res;
}

void suite_lemma2(Report& rep) {
  const std::vector<double> probe{-0.5, 0.0, 0.5, 1.7}, rs{0.6, 0.9, 0.99};
  json res = json::array();
  for (double a : probe)
    for (double b : probe) {
      const JacobiParams p(a, b);
      const auto basic = fit_basic_inequality(p, rs, 9);
      const auto dyadic = fit_dyadic_majorant(p, rs, 9);
      res.push_back({{"alpha", a}, {"beta", b}, {"basic_C", basic.fine}, {"basic_C_coarse", basic.coarse},
                     {"dyadic_C", dyadic.fine}, {"dyadic_C_coarse", dyadic.coarse}});
      const std::string tag = " (" + fmt17(a) + "," + fmt17(b) + ")";
      rep.check("basic_inequality" + tag, "K <= C (1 + L)", basic.fine, basic.coarse,
                std::isfinite(basic.fine) && basic.variation() < 0.25, false);
      rep.check("dyadic_majorant" + tag, "L <= C sum 2^{-n/2} chi_{I_n} / J(I_n)", dyadic.fine, dyadic.coarse,
                std::isfinite(dyadic.fine) && dyadic.variation() < 0.25, false);
    }
  rep.results["lemma2"] = res;
}

void suite_lemma3(Report& rep) {
  const std::vector<double> xs{0.0, 0.25, 0.5, 0.75, 0.9, 1.0};
  double coarse[3] = {0, 0, 0}, fine[3] = {0, 0, 0};
  for (int j = 2; j <= 12; ++j)
    for (double x : xs) {
      const auto v = estm_integrals(AbelParameter(1.0 - std::ldexp(1.0, -j)), x);
      const double vals[3] = {v.v1, v.v2, v.v_proof};
      for (int i = 0; i < 3; ++i) {
        fine[i] = std::max(fine[i], vals[i]);
        if (j <= 8) coarse[i] = std::max(coarse[i], vals[i]);
      }
    }
  const char* names[3] = {"v1", "v2", "v_proof"};
  const char* anchors[3] = {"(1-r) int_k^2 (s-k)^{-1/2} (s-x)^{-1/2} ds < C",
                            "(1-r) int_k^2 (s-k)^{-1/2} (s-1)^{-1/2} (s-x)^{-1/2} ds < C",
                            "(1-r) int_k^2 (s-k)^{-1/2} (s-1)^{-1} ds < C"};
  json res = json::object();
  for (int i = 0; i < 3; ++i) {
    res[names[i]] = {{"sup_j_le_12", fine[i]}, {"sup_j_le_8", coarse[i]}};
    rep.check(std::string(names[i]) + " uniform in r", anchors[i], fine[i], coarse[i],
              std::isfinite(fine[i]) && fine[i] <= 1.25 * coarse[i], false);
  }
  rep.results["lemma3"] = res;
}

void suite_kernelest(Report& rep) {
  std::vector<double> zs, as;
  for (int i = 0; i < 100; ++i) zs.push_back(-10.0 + 20.0 * i / 99.0);
  for (int i = 0; i < 100; ++i) as.push_back(-0.995 + 1.99 * i / 99.0);
  json res = json::array();
  for (double eta : {1.1, 1.5, 3.0}) {
    const auto k = kernel_shift_check(eta, zs, as);
    res.push_back({{"eta", eta}, {"worst_outer", k.worst_outer}, {"worst_inner", k.worst_inner},
                   {"points", k.points}, {"violations", k.violations}});
    const std::string tag = " eta=" + fmt17(eta);
    rep.check("shift |z|>3" + tag, "ratio <= (9/4)^eta", k.worst_outer, k.const_outer,
              k.worst_outer <= k.const_outer);
    rep.check("shift |z|<=3" + tag, "ratio <= 10^eta", k.worst_inner, k.const_inner, k.worst_inner <= k.const_inner);
  }
  rep.results["kernelest"] = res;
}

void suite_mainest(Report& rep) {
  const auto s = mainest_sweep({-0.5, 0.0, 0.5, 1.7}, {0.6, 0.9, 0.99}, {0.0, 0.25, 0.5, 0.75, 0.9, 0.99});
  rep.results["mainest"] = {{"sup", s.fine}, {"sup_coarse", s.coarse}, {"points", s.points},
                            {"divergent", s.divergent()}};
  rep.check("mainest sup stable", "sup_{r,x} int L (1-y)^alpha dy < inf", s.factor(), 1.5,
            s.finite() && s.factor() <= 1.5, false);
}

void suite_joperator(Report& rep) {
  json res = json::array();
  for (double a : {-0.5, 0.0, 1.7}) {
    const auto s = joperator_sweep(a, {0.6, 0.9, 0.99}, {0.0, 0.25, 0.5, 0.75, 0.95});
    res.push_back({{"alpha", a}, {"worst_ratio", s.fine}, {"worst_ratio_coarse", s.coarse}, {"points", s.points}});
    rep.check("J/f* stable alpha=" + fmt17(a), "J f(x) <= C f*_J(x)", s.factor(), 2.0,
              s.finite() && s.factor() <= 2.0, false);
  }
  rep.results["joperator"] = res;
}

void suite_sxy(Report& rep) {
  for (auto& c : sxy_inequalities_check(50)) rep.checks.push_back(std::move(c));
}

Report estimates_cmd(const Config& c) {
  Report rep;
  rep.command = {{"name", "estimates"}, {"suite", c.estimates_suite}};
  const bool all = c.estimates_suite == "all";
  auto run = [&](const char* name, void (*fn)(Report&)) {
    if (all || c.estimates_suite == name) fn(rep);
  };
  run("poisson", suite_poisson);
  run("lemma2", suite_lemma2);
  run("lemma3", suite_lemma3);
  run("kernelest", suite_kernelest);
  run("mainest", suite_mainest);
  run("joperator", suite_joperator);
  run("sxy", suite_sxy);
  return rep;
}

// --- report-all ------------------------------------------------------------

json report_all(bool& pass) {
  json sections = json::object();
  pass = true;
  auto add = [&](const std::string& name, const Report& r) {
    sections[name] = r.to_json();
    pass = pass && r.pass();
  };
  for (auto [a, b] : {std::pair{0.0, 0.0}, std::pair{-0.5, 0.5}, std::pair{1.7, -0.5}}) {
    Config c;
    c.alpha = a;
    c.beta = b;
    c.kernel_suite = "mass";
    c.r_grid = "0.5,0.9,0.99";
    c.x_grid = "-0.9,0,0.7";
    add("kernel (" + fmt17(a) + "," + fmt17(b) + ")", kernel_cmd(c, nullptr));
  }
  add("abel", abel_cmd(Config{}, nullptr));
  add("cz", cz_cmd(Config{}));
  add("weights", weights_cmd(Config{}));
  add("estimates", estimates_cmd(Config{}));
  return {{"schema", 1}, {"command", {{"name", "report-all"}}}, {"sections", sections}, {"pass", pass}};
}

// --- argument plumbing -----------------------------------------------------

const std::vector<std::string> kCommands{"kernel", "abel", "cz", "weights", "estimates", "report-all"};

std::string config_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return fmt17(v.get<double>());
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) s += (s.empty() ? "" : ",") + config_value(e);
    return s;
  }
  return v.dump();
}

// Folds --config FILE into the argument list: the file's keys become
// options placed before the explicit flags, so flags override the file.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw CLI::ValidationError("--config", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw CLI::ValidationError("--config", "the config file must hold a JSON object");
  std::string command;
  const auto pos = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end();
  });
  if (pos != args.end()) {
    command = *pos;
    args.erase(pos);
  } else if (j.contains("command")) {
    command = j["command"].get<std::string>();
  }
  std::vector<std::string> out;
  if (!command.empty()) out.push_back(command);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "command") continue;
    out.push_back("--" + it.key());
    out.push_back(config_value(it.value()));
  }
  out.insert(out.end(), args.begin(), args.end());
  return out;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Jacobi expansions, Watson kernels, Calderon-Zygmund tools and kernel estimates", "jacobi-watson"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file of option values; explicit flags take precedence");

  auto io = [&](CLI::App* s, bool csv_allowed) {
    s->add_option("--out", c.out, "Report format")
        ->check(CLI::IsMember(csv_allowed ? std::vector<std::string>{"json", "csv"} : std::vector<std::string>{"json"}))
        ->capture_default_str();
    s->add_option("-o,--output", c.output, "Output path ('-' for stdout)")->capture_default_str();
  };
  auto params = [&](CLI::App* s) {
    s->add_option("--alpha", c.alpha, "Jacobi parameter alpha > -1")->capture_default_str();
    s->add_option("--beta", c.beta, "Jacobi parameter beta > -1")->capture_default_str();
  };
  auto grids = [&](CLI::App* s) {
    s->add_option("--x-grid", c.x_grid, "x grid: a:b:n or a comma list");
    s->add_option("--r-grid", c.r_grid, "r grid: a:b:n or a comma list");
    s->add_option("--seed", c.seed, "Seed for grid jitter")->capture_default_str();
    s->add_option("--jitter", c.jitter, "Interior x-grid jitter as a fraction of the spacing")->capture_default_str();
  };

  auto* kernel = app.add_subcommand("kernel", "Watson kernel values, mass and grids");
  params(kernel);
  grids(kernel);
  io(kernel, true);
  kernel->add_option("--r", c.r, "Abel parameter")->capture_default_str();
  kernel->add_option("--x", c.x, "Kernel row point")->capture_default_str();
  kernel->add_option("--y", c.y, "Kernel column point")->capture_default_str();
  kernel->add_option("--suite", c.kernel_suite, "eval, mass or grid")
      ->check(CLI::IsMember({"eval", "mass", "grid"}))
      ->capture_default_str();
  kernel->add_option("--method", c.method, "Evaluation method for grids")
      ->check(CLI::IsMember({"auto", "series", "bailey", "integral"}))
      ->capture_default_str();

  auto* abel = app.add_subcommand("abel", "Abel means, modified means and the Jacobi maximal function");
  params(abel);
  grids(abel);
  io(abel, true);
  abel->add_option("--f", c.f, "Test function")->capture_default_str();
  abel->add_option("--r", c.r, "Abel parameter")->capture_default_str();
  abel->add_option("--x", c.x, "Evaluation point")->capture_default_str();
  abel->add_option("--quantity", c.quantity, "mean, modified or maximal")
      ->check(CLI::IsMember({"mean", "modified", "maximal"}))
      ->capture_default_str();
  abel->add_option("--route", c.route, "series or kernel (mean); series, direct or factored (modified)")
      ->capture_default_str();
  abel->add_option("--levels", c.levels, "Levels of the r grid 1 - 2^-j for the maximal function")
      ->capture_default_str();

  auto* cz = app.add_subcommand("cz", "Calderon-Zygmund decomposition with invariant checks");
  params(cz);
  io(cz, false);
  cz->add_option("--measure", c.measure, "Measure spec")->capture_default_str();
  cz->add_option("--f", c.f, "Test function")->capture_default_str();
  cz->add_option("--lambda", c.lambda, "Level lambda > 0")->capture_default_str();

  auto* weights = app.add_subcommand("weights", "A_1 / A_p constants of power weights");
  io(weights, false);
  weights->add_option("--measure", c.measure, "Measure spec")->capture_default_str();
  weights->add_option("--weight", c.weight, "Exponents l,r of (x-a)^l (b-x)^r")->capture_default_str();
  weights->add_option("--kind", c.kind, "a1 or ap")->check(CLI::IsMember({"a1", "ap"}))->capture_default_str();
  weights->add_option("--p", c.p, "Exponent p > 1 for A_p")->capture_default_str();
  weights->add_option("--n", c.n, "Window grid points (2^k + 1)")->capture_default_str();
  weights->add_option("--x-grid", c.x_grid, "Evaluation points for A_1");

  auto* estimates = app.add_subcommand("estimates", "Kernel-estimate verification suites");
  io(estimates, false);
  estimates->add_option("--suite", c.estimates_suite, "Suite to run")
      ->check(CLI::IsMember({"all", "poisson", "lemma2", "lemma3", "kernelest", "mainest", "joperator", "sxy"}))
      ->capture_default_str();

  auto* all = app.add_subcommand("report-all", "Every suite with default settings, as one report");
  io(all, false);

  try {
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  std::string text;
  bool pass = true;
  try {
    if (*all) {
      text = dump_json(report_all(pass));
    } else {
      std::vector<GridRow> rows;
      const bool want_csv = c.out == "csv";
      Report rep;
      if (*kernel) rep = kernel_cmd(c, want_csv ? &rows : nullptr);
      else if (*abel) rep = abel_cmd(c, want_csv ? &rows : nullptr);
      else if (*cz) rep = cz_cmd(c);
      else if (*weights) rep = weights_cmd(c);
      else rep = estimates_cmd(c);
      pass = rep.pass();
      text = want_csv ? csv(rows) : dump_json(rep.to_json());
      if (want_csv && !pass)
        for (const auto& ch : rep.checks)
          if (ch.hard && !ch.pass) err << "check failed: " << ch.name << "\n";
    }
  } catch (const Error& e) {
    err << "jacobi-watson: " << to_string(e.kind()) << " error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::domain) return kExitUsage;
    // Numerical failures still produce a (failing) report.
    Report rep;
    rep.results["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    rep.check("computation", std::string(to_string(e.kind())), std::nan(""), std::nan(""), false);
    text = dump_json(rep.to_json());
    pass = false;
  }

  if (c.output == "-") {
    out << text;
  } else {
    std::ofstream file(c.output);
    if (!(file << text)) {
      err << "jacobi-watson: cannot write " << c.output << "\n";
      return kExitUsage;
    }
  }
  return pass ? kExitPass : kExitCheckFailed;
}

}  // namespace jw::cli
