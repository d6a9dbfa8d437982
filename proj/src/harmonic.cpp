#include "jacobi_watson/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "jacobi_watson/errors.hpp"
#include "jacobi_watson/parallel.hpp"

namespace jw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const AdaptiveOptions kCellOptions{1e-16, 1e-13, 2000};

double integrate_f(const WeightedMeasure& m, const TestFunction& f, double l, double r, bool absolute,
                   std::span<const double> extra = {}) {
  std::vector<double> breaks(f.breakpoints.begin(), f.breakpoints.end());
  breaks.insert(breaks.end(), extra.begin(), extra.end());
  if (absolute)
    return m.integrate([&](double y) { return std::abs(f(y)); }, l, r, breaks, kCellOptions).value;
  return m.integrate([&](double y) { return f(y); }, l, r, breaks, kCellOptions).value;
}

PowerDensity as_density(const PowerWeight& w, const Interval& s) { return {s.left, s.right, w.left_exp, w.right_exp}; }

}  // namespace

WindowGrid WindowGrid::dyadic(const Interval& s, int level) {
  require(level >= 0 && level <= 24, ErrorKind::domain, "dyadic level out of range");
  const int n = 1 << level;
  WindowGrid g;
  g.points.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) g.points[static_cast<std::size_t>(i)] = s.left + s.length() * i / n;
  g.points.back() = s.right;
  return g;
}

WindowGrid WindowGrid::graded(const Interval& s, int n) {
  require(n >= 2, ErrorKind::domain, "graded grid needs at least two points");
  WindowGrid g;
  g.points.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (1.0 - std::cos(std::numbers::pi * i / (n - 1)));
    g.points[static_cast<std::size_t>(i)] = s.left + s.length() * u;
  }
  g.points.front() = s.left;
  g.points.back() = s.right;
  return g;
}

MaximalFunction::MaximalFunction(const WeightedMeasure& m, std::function<double(double, double)> cell_integral,
                                 WindowGrid grid)
    : measure_(&m), cell_integral_(std::move(cell_integral)), grid_(std::move(grid)) {
  const auto& g = grid_.points;
  require(g.size() >= 2 && std::is_sorted(g.begin(), g.end()), ErrorKind::domain, "window grid must be sorted");
  F_.assign(g.size(), 0.0);
  M_.assign(g.size(), 0.0);
  std::vector<double> fi(g.size() - 1), mi(g.size() - 1);
  parallel_for(fi.size(), [&](std::size_t i) {
    fi[i] = cell_integral_(g[i], g[i + 1]);
    mi[i] = measure_->interval_mass(g[i], g[i + 1]);
  });
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    F_[i + 1] = F_[i] + fi[i];
    M_[i + 1] = M_[i] + mi[i];
  }
}

MaximalFunction::MaximalFunction(const WeightedMeasure& m, const TestFunction& f, WindowGrid grid)
    : MaximalFunction(
          m, [&m, f](double l, double r) { return integrate_f(m, f, l, r, true); }, std::move(grid)) {}

double MaximalFunction::operator()(double x) const {
  const auto& g = grid_.points;
  require(x >= g.front() && x <= g.back(), ErrorKind::domain, "maximal function evaluated outside the grid");
  // Index of x in the grid with x inserted.
  std::size_t c = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), x) - g.begin());
  if (c == g.size()) c = g.size() - 1;
  c = std::max<std::size_t>(c, 1);
  // Cell [g[c-1], g[c]] contains x.
  const double fl = x > g[c - 1] ? cell_integral_(g[c - 1], x) : 0.0;
  const double ml = x > g[c - 1] ? measure_->interval_mass(g[c - 1], x) : 0.0;
  const double Fx = F_[c - 1] + fl, Mx = M_[c - 1] + ml;
  // Windows [a, b] with a in {g[0..c-1], x} and b in {x, g[c..]}.
  std::vector<double> Fa(F_.begin(), F_.begin() + static_cast<std::ptrdiff_t>(c));
  std::vector<double> Ma(M_.begin(), M_.begin() + static_cast<std::ptrdiff_t>(c));
  Fa.push_back(Fx);
  Ma.push_back(Mx);
  std::vector<double> Fb{Fx}, Mb{Mx};
  // Right part from x: F_[j] for j >= c is measured from g[0]; consistent with Fx.
  for (std::size_t j = c; j < g.size(); ++j) {
    Fb.push_back(F_[j]);
    Mb.push_back(M_[j]);
  }
  double best = 0.0;
  for (std::size_t i = 0; i < Fa.size(); ++i)
    for (std::size_t j = 0; j < Fb.size(); ++j) {
      const double mass = Mb[j] - Ma[i];
      if (!(mass > 0.0)) continue;
      best = std::max(best, std::abs(Fb[j] - Fa[i]) / mass);
    }
  return best;
}

double MaximalFunction::average(double l, double r) const {
  const double mass = measure_->interval_mass(l, r);
  require(mass > 0.0, ErrorKind::degenerate, "average over a zero-mass window");
  return cell_integral_(l, r) / mass;
}

double hl_maximal(const WeightedMeasure& m, const TestFunction& f, double x, int level) {
  return MaximalFunction(m, f, WindowGrid::dyadic(m.support(), level))(x);
}

namespace {

double lateral(const WeightedMeasure& m, const std::function<double(double, double)>& integral, double a, Side side) {
  const Interval s = m.support();
  require(a >= s.left && a <= s.right, ErrorKind::domain, "lateral maximal point outside the support");
  const double span = side == Side::left ? a - s.left : s.right - a;
  if (!(span > 0.0)) return 0.0;
  std::vector<double> fractions;
  for (int i = 1; i <= 64; ++i) fractions.push_back(i / 64.0);
  for (int k = 1; k <= 208; ++k) fractions.push_back(std::exp2(-k / 4.0));
  double best = -kInf;
  for (double t : fractions) {
    const double l = side == Side::left ? a - span * t : a;
    const double r = side == Side::left ? a : a + span * t;
    if (!(r > l)) continue;
    const double mass = m.interval_mass(l, r);
    if (!(mass > 0.0)) continue;
    best = std::max(best, integral(l, r) / mass);
  }
  return best;
}

}  // namespace

double lateral_maximal(const WeightedMeasure& m, const TestFunction& f, double a, Side side) {
  return lateral(m, [&](double l, double r) { return integrate_f(m, f, l, r, false); }, a, side);
}

// --- Calderon-Zygmund ------------------------------------------------------

namespace {

bool covered(const std::vector<CZInterval>& v, double x) {
  auto it = std::upper_bound(v.begin(), v.end(), x, [](double y, const CZInterval& I) { return y < I.left; });
  if (it == v.begin()) return false;
  --it;
  return x >= it->left && x <= it->right;
}

const CZInterval* find(const std::vector<CZInterval>& v, double x) {
  auto it = std::upper_bound(v.begin(), v.end(), x, [](double y, const CZInterval& I) { return y < I.left; });
  if (it == v.begin()) return nullptr;
  --it;
  return x >= it->left && x <= it->right ? &*it : nullptr;
}

// Upper bound for f on [l, r]: the declared one, or a sampled estimate.
double upper_bound_on(const TestFunction& f, double l, double r) {
  if (f.sup_on) return f.sup_on(l, r);
  double m = -kInf;
  for (int i = 0; i <= 32; ++i) m = std::max(m, f(l + (r - l) * i / 32.0));
  return m;
}

struct CZState {
  const WeightedMeasure& m;
  const TestFunction& f;
  double lambda;
  int max_depth;
  double min_mass;
  std::vector<CZInterval> selected, residual;

  void visit(const Interval& I, int depth) {
    const auto [A, B] = m.equal_measure_split(I);
    CZInterval halves[2];
    int i = 0;
    for (const Interval& H : {A, B}) {
      halves[i++] = {H.left, H.right, m.interval_mass(H), integrate_f(m, f, H.left, H.right, false)};
    }
    if (halves[0].average() > lambda && halves[1].average() > lambda)
      fail(ErrorKind::degenerate, "both halves exceed lambda below a parent whose average does not");
    for (const CZInterval& h : halves) {
      if (!(h.mass > 0.0)) continue;
      if (h.average() > lambda) {
        selected.push_back(h);
      } else if (upper_bound_on(f, h.left, h.right) <= lambda) {
        continue;
      } else if (depth + 1 >= max_depth || h.mass < min_mass || !(h.right - h.left > 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(h.left)))) {
        residual.push_back(h);
      } else {
        visit({h.left, h.right}, depth + 1);
      }
    }
  }
};

}  // namespace

bool CZDecomposition::in_G(double x) const { return covered(intervals, x); }

bool CZDecomposition::in_Gstar(double x) const {
  for (const auto& I : Gstar)
    if (x >= I.left && x <= I.right) return true;
  return false;
}

double CZDecomposition::good(double x) const {
  if (const auto* I = find(intervals, x)) return I->average();
  if (const auto* I = find(residual, x)) return I->average();
  return f(x);
}

bool CZDecomposition::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CZCheck& c) { return c.pass; });
}

CZDecomposition cz_decompose(const WeightedMeasure& m, const TestFunction& f, double lambda, const CZOptions& opt) {
  require(lambda > 0.0, ErrorKind::domain, "lambda must be positive");
  const Interval S = m.support();
  if (!f.nonnegative) {
    for (int i = 0; i <= 2000; ++i) {
      const double x = S.left + S.length() * i / 2000.0;
      if (f(x) < 0.0) fail(ErrorKind::domain, "Calderon-Zygmund decomposition needs f >= 0");
    }
  }
  CZDecomposition out;
  out.lambda = lambda;
  out.f = [f](double x) { return f(x); };
  out.l1_norm = integrate_f(m, f, S.left, S.right, false);
  require(std::isfinite(out.l1_norm), ErrorKind::domain, "f is not integrable");
  const double total_mass = m.total_mass();
  if (out.l1_norm / total_mass > lambda) {
    out.trivial = true;
    out.intervals.push_back({S.left, S.right, total_mass, out.l1_norm});
  } else if (upper_bound_on(f, S.left, S.right) > lambda) {
    CZState st{m, f, lambda, opt.max_depth, opt.min_mass_fraction * total_mass, {}, {}};
    st.visit(S, 0);
    out.intervals = std::move(st.selected);
    out.residual = std::move(st.residual);
  }
  auto by_left = [](const CZInterval& a, const CZInterval& b) { return a.left < b.left; };
  std::sort(out.intervals.begin(), out.intervals.end(), by_left);
  std::sort(out.residual.begin(), out.residual.end(), by_left);

  std::vector<Interval> tripled;
  for (const auto& I : out.intervals) {
    out.mass_G += I.mass;
    tripled.push_back({m.offset_by_mass(I.left, I.mass, -1), m.offset_by_mass(I.right, I.mass, +1)});
  }
  std::sort(tripled.begin(), tripled.end(), [](const Interval& a, const Interval& b) { return a.left < b.left; });
  for (const auto& T : tripled) {
    if (!out.Gstar.empty() && T.left <= out.Gstar.back().right)
      out.Gstar.back().right = std::max(out.Gstar.back().right, T.right);
    else
      out.Gstar.push_back(T);
  }
  for (const auto& G : out.Gstar) out.mass_Gstar += m.interval_mass(G);

  const double bound = out.l1_norm / lambda;
  auto add = [&](std::string name, double value, double b, bool pass) {
    out.checks.push_back({std::move(name), value, b, pass});
  };
  if (!out.trivial) {
    double lo = kInf, hi = 0.0, bad = 0.0, overlap = 0.0;
    for (std::size_t k = 0; k < out.intervals.size(); ++k) {
      const auto& I = out.intervals[k];
      lo = std::min(lo, I.average() / lambda);
      hi = std::max(hi, I.average() / lambda);
      // Independent recomputation of the bad part's mean.
      const double fresh = m.integrate([&](double y) { return f(y) - I.average(); }, I.left, I.right,
                                       f.breakpoints, {1e-17, 1e-14, 4000})
                               .value;
      bad = std::max(bad, std::abs(fresh));
      if (k > 0) overlap = std::max(overlap, std::max(0.0, out.intervals[k - 1].right - I.left));
    }
    if (out.intervals.empty()) lo = kInf, hi = 0.0;
    add("average_above_lambda", out.intervals.empty() ? 0.0 : lo, 1.0, out.intervals.empty() || lo > 1.0);
    add("average_at_most_2lambda", hi, 2.0, hi <= 2.0 * (1.0 + 1e-12));
    add("bad_part_mean", bad, 1e-9 * out.l1_norm, bad <= 1e-9 * out.l1_norm);
    add("disjoint", overlap, 1e-12, overlap <= 1e-12);
    double g_sup = 0.0;
    for (const auto& I : out.intervals) g_sup = std::max(g_sup, I.average());
    for (const auto& I : out.residual) g_sup = std::max(g_sup, I.average());
    add("good_part_on_G_at_most_2lambda", g_sup, 2.0 * lambda, g_sup <= 2.0 * lambda * (1.0 + 1e-12));
  }
  add("mass_G", out.mass_G, bound, out.mass_G <= bound * (1.0 + 1e-12));
  add("mass_Gstar", out.mass_Gstar, 3.0 * bound, out.mass_Gstar <= 3.0 * bound * (1.0 + 1e-12));
  return out;
}

// --- Zygmund ---------------------------------------------------------------

KernelFamily watson_family(const JacobiParams& p) {
  KernelFamily K;
  K.tag = "watson";
  K.row = [p](double r, double x) -> std::function<double(double)> {
    auto row = std::make_shared<KernelRow>(p, AbelParameter(r), x);
    return [row](double y) { return (*row)(y); };
  };
  K.features = [](double r, double x) {
    std::vector<double> f{x};
    for (int j = 0; j <= 10; ++j) {
      const double d = std::ldexp(1.0 - r, 2 * j);
      if (d >= 2.0) break;
      for (double y : {x - d, x + d})
        if (y > -1.0 && y < 1.0) f.push_back(y);
    }
    return f;
  };
  return K;
}

KernelFamily poisson_k2_family() {
  KernelFamily K;
  K.tag = "k2";
  K.row = [](double r, double x) -> std::function<double(double)> {
    const double t = 1.0 - r;
    return [t, x](double y) {
      const double u = (x - y) / t;
      return 1.0 / (t * std::pow(1.0 + u * u, 1.5));
    };
  };
  K.features = [](double r, double x) {
    std::vector<double> f{x};
    for (int j = 0; j <= 12; ++j) {
      const double d = std::ldexp(1.0 - r, 2 * j);
      f.push_back(x - d);
      f.push_back(x + d);
    }
    return f;
  };
  return K;
}

namespace {

// Stieltjes sums of mu(x, y) against |dK| on the side of x (mu at the cell
// midpoint in mass), for each nested
// depth d <= D (2^d cells, graded quadratically toward x).
std::vector<double> one_sided_variation(const std::function<double(double)>& row, const WeightedMeasure& m, double x,
                                        double edge, int D) {
  const int N = 1 << D;
  std::vector<double> y(static_cast<std::size_t>(N) + 1), k(y.size()), mu(y.size(), 0.0);
  for (int i = 0; i <= N; ++i) {
    const double t = static_cast<double>(i) / N;
    y[static_cast<std::size_t>(i)] = x + (edge - x) * t * t;
  }
  y.back() = edge;
  for (std::size_t i = 0; i < y.size(); ++i) k[i] = row(y[i]);
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double l = std::min(y[i - 1], y[i]), r = std::max(y[i - 1], y[i]);
    mu[i] = mu[i - 1] + (r > l ? m.interval_mass(l, r) : 0.0);
  }
  std::vector<double> out;
  for (int d = 0; d <= D; ++d) {
    const int stride = 1 << (D - d);
    double s = 0.0;
    for (int i = stride; i <= N; i += stride) {
      const auto a = static_cast<std::size_t>(i - stride), b = static_cast<std::size_t>(i);
      s += 0.5 * (mu[a] + mu[b]) * std::abs(k[b] - k[a]);
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

ZygmundConstants zygmund_constants(const KernelFamily& K, const WeightedMeasure& m, const std::vector<double>& r_grid,
                                   const std::vector<double>& x_grid, int partition_depth) {
  require(partition_depth >= 1 && partition_depth <= 14, ErrorKind::domain, "partition depth must lie in [1,14]");
  require(!r_grid.empty() && !x_grid.empty(), ErrorKind::domain, "Zygmund grids must be nonempty");
  const Interval S = m.support();
  const std::size_t n = r_grid.size() * x_grid.size();
  std::vector<double> m1(n, 0.0);
  std::vector<std::vector<double>> m2(n);
  parallel_for(n, [&](std::size_t idx) {
    const double r = r_grid[idx / x_grid.size()], x = x_grid[idx % x_grid.size()];
    const auto row = K.row(r, x);
    const auto features = K.features(r, x);
    m1[idx] = m.integrate([&](double y) { return std::abs(row(y)); }, S.left, S.right, features,
                          {1e-15, 1e-12, 4000})
                  .value;
    const auto right = one_sided_variation(row, m, x, S.right, partition_depth);
    const auto left = one_sided_variation(row, m, x, S.left, partition_depth);
    std::vector<double> v(right.size());
    for (std::size_t d = 0; d < v.size(); ++d) v[d] = std::max(right[d], left[d]);
    m2[idx] = std::move(v);
  });
  ZygmundConstants c;
  c.M2_by_depth.assign(static_cast<std::size_t>(partition_depth) + 1, 0.0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    c.M1 = std::max(c.M1, m1[idx]);
    for (std::size_t d = 0; d < c.M2_by_depth.size(); ++d)
      c.M2_by_depth[d] = std::max(c.M2_by_depth[d], m2[idx][d]);
  }
  c.M2 = c.M2_by_depth.back();
  for (std::size_t d = 1; d < c.M2_by_depth.size(); ++d)
    if (c.M2_by_depth[d] > 10.0 * c.M2_by_depth[d - 1] && c.M2_by_depth[d - 1] > 0.0) c.variation_converged = false;
  if (!std::isfinite(c.M1) || !std::isfinite(c.M2)) c.variation_converged = false;
  return c;
}

namespace {

double kernel_against(const KernelFamily& K, const WeightedMeasure& m, const TestFunction& f, double r, double x) {
  const Interval S = m.support();
  const auto row = K.row(r, x);
  auto breaks = K.features(r, x);
  breaks.insert(breaks.end(), f.breakpoints.begin(), f.breakpoints.end());
  return m.integrate([&](double y) { return row(y) * f(y); }, S.left, S.right, breaks, {1e-15, 1e-12, 4000}).value;
}

}  // namespace

BoundCheck zygmund_bound_check(const KernelFamily& K, const WeightedMeasure& m, const TestFunction& f,
                               const ZygmundConstants& c, const std::vector<double>& r_grid,
                               const std::vector<double>& x_grid) {
  const MaximalFunction fstar(m, f, WindowGrid::dyadic(m.support(), 10));
  std::vector<double> ratio(x_grid.size() * r_grid.size(), 0.0), fitted(ratio.size(), 0.0);
  std::vector<char> used(ratio.size(), 0);
  parallel_for(ratio.size(), [&](std::size_t idx) {
    const double x = x_grid[idx / r_grid.size()], r = r_grid[idx % r_grid.size()];
    const double fs = fstar(x);
    if (!(fs > 0.0)) return;
    const double v = std::abs(kernel_against(K, m, f, r, x));
    ratio[idx] = v / (c.M() * fs);
    fitted[idx] = v / fs;
    used[idx] = 1;
  });
  BoundCheck out;
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    if (!used[i]) continue;
    ++out.points;
    out.worst_ratio = std::max(out.worst_ratio, ratio[i]);
    out.fitted = std::max(out.fitted, fitted[i]);
  }
  return out;
}

BoundCheck proposition_check(const KernelFamily& K, const WeightedMeasure& m, const TestFunction& f, double lambda,
                             const ZygmundConstants& c, const std::vector<double>& r_grid,
                             const std::vector<double>& x_grid) {
  const auto cz = cz_decompose(m, f, lambda);
  const double C = 2.0 * c.M1 + 8.0 * c.M2;
  std::vector<double> sup(x_grid.size(), -1.0);
  parallel_for(x_grid.size(), [&](std::size_t i) {
    const double x = x_grid[i];
    if (cz.in_Gstar(x)) return;
    double s = 0.0;
    for (double r : r_grid) s = std::max(s, std::abs(kernel_against(K, m, f, r, x)));
    sup[i] = s;
  });
  BoundCheck out;
  for (double s : sup) {
    if (s < 0.0) continue;
    ++out.points;
    out.fitted = std::max(out.fitted, s / lambda);
    out.worst_ratio = std::max(out.worst_ratio, s / (C * lambda));
  }
  return out;
}

// --- Muckenhoupt -----------------------------------------------------------

double PowerWeight::operator()(const Interval& s, double x) const {
  double v = 1.0;
  if (left_exp != 0.0) v *= std::pow(x - s.left, left_exp);
  if (right_exp != 0.0) v *= std::pow(s.right - x, right_exp);
  return v;
}

namespace {

double ap_sup(const PowerWeight& w, const WeightedMeasure& m, double p_exp, int n) {
  const Interval S = m.support();
  const auto g = WindowGrid::graded(S, n).points;
  const PowerDensity A = m.density().times(as_density(w, S));
  const PowerDensity B = m.density().times(as_density(w, S).power(-1.0 / (p_exp - 1.0)));
  std::vector<double> FA(g.size(), 0.0), FB(g.size(), 0.0), M(g.size(), 0.0);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    FA[i + 1] = FA[i] + A.mass(g[i], g[i + 1]);
    FB[i + 1] = FB[i] + B.mass(g[i], g[i + 1]);
    M[i + 1] = M[i] + m.interval_mass(g[i], g[i + 1]);
  }
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const double mass = M[j] - M[i];
      if (!(mass > 0.0)) continue;
      const double a = (FA[j] - FA[i]) / mass, b = (FB[j] - FB[i]) / mass;
      const double v = a * std::pow(b, p_exp - 1.0);
      if (std::isnan(v)) return kInf;
      best = std::max(best, v);
    }
  return best;
}

double a1_sup(const PowerWeight& w, const WeightedMeasure& m, const std::vector<double>& x_grid, int n) {
  const Interval S = m.support();
  const PowerDensity A = m.density().times(as_density(w, S));
  const MaximalFunction wstar(m, [A](double l, double r) { return A.mass(l, r); }, WindowGrid::graded(S, n));
  std::vector<double> ratio(x_grid.size());
  parallel_for(x_grid.size(), [&](std::size_t i) { ratio[i] = wstar(x_grid[i]) / w(S, x_grid[i]); });
  return *std::max_element(ratio.begin(), ratio.end());
}

WeightConstant classify(double fine, double coarse) {
  WeightConstant c{fine, coarse, false};
  c.divergent = !std::isfinite(fine) || !std::isfinite(coarse) || fine > 1.5 * coarse;
  return c;
}

}  // namespace

WeightConstant ap_constant(const PowerWeight& w, const WeightedMeasure& m, double p_exp, int n) {
  if (!(p_exp > 1.0)) fail(ErrorKind::domain, "ap_constant needs p > 1; use a1_constant for p = 1");
  require(n >= 8, ErrorKind::domain, "window grid too small");
  return classify(ap_sup(w, m, p_exp, n), ap_sup(w, m, p_exp, (n + 1) / 2));
}

WeightConstant a1_constant(const PowerWeight& w, const WeightedMeasure& m, const std::vector<double>& x_grid, int n) {
  require(!x_grid.empty(), ErrorKind::domain, "x-grid must be nonempty");
  require(n >= 8, ErrorKind::domain, "window grid too small");
  return classify(a1_sup(w, m, x_grid, n), a1_sup(w, m, x_grid, (n + 1) / 2));
}

}  // namespace jw
