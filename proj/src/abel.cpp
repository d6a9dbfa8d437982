#include "jacobi_watson/abel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <string>

#include "jacobi_watson/errors.hpp"
#include "jacobi_watson/parallel.hpp"
#include "jacobi_watson/quadrature.hpp"

namespace jw {

std::string_view to_string(CoefficientMethod m) {
  switch (m) {
    case CoefficientMethod::exact_steps: return "exact_steps";
    case CoefficientMethod::gauss_jacobi: return "gauss_jacobi";
    case CoefficientMethod::piecewise_gauss_jacobi: return "piecewise_gauss_jacobi";
  }
  return "unknown";
}

namespace {

constexpr int kSpectralCap = 16384;
constexpr int kStepCap = 400000;
constexpr double kInf = std::numeric_limits<double>::infinity();

// The unweighted factor s of f.
double shape(const TestFunction& f, double x) {
  if (!f.steps.empty()) {
    const auto it = std::upper_bound(f.breakpoints.begin(), f.breakpoints.end(), x);
    return f.steps[static_cast<std::size_t>(it - f.breakpoints.begin())];
  }
  return f.smooth(x);
}

std::vector<double> interior_cuts(const TestFunction& f) {
  std::vector<double> cuts{-1.0};
  for (double b : f.breakpoints)
    if (b > -1.0 && b < 1.0) cuts.push_back(b);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

// Adds w * s_i * P_n(x_i) over the nodes into acc[0..N].
void accumulate(const RecurrenceTable& t, std::span<const double> x, std::span<const double> ws,
                std::vector<double>& acc) {
  const std::size_t n_terms = acc.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = ws[i];
    if (w == 0.0) continue;
    double p0 = 1.0;
    acc[0] += w;
    if (n_terms == 1) continue;
    double p1 = t.a[1] * x[i] + t.b[1];
    acc[1] += w * p1;
    for (std::size_t n = 2; n < n_terms; ++n) {
      const double p2 = (t.a[n] * x[i] + t.b[n]) * p1 - t.c[n] * p0;
      acc[n] += w * p2;
      p0 = p1;
      p1 = p2;
    }
  }
}

Expansion exact_steps(const TestFunction& f, const JacobiParams& p, int N) {
  Expansion e{p, std::vector<double>(static_cast<std::size_t>(N) + 1, 0.0), CoefficientMethod::exact_steps};
  const auto cuts = interior_cuts(f);
  const auto tab = recurrence_table(p, static_cast<std::size_t>(N) + 1);
  const auto J = WeightedMeasure::jacobi(p.alpha, p.beta);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double v = shape(f, 0.5 * (cuts[i] + cuts[i + 1]));
    e.coeffs[0] += v * J.interval_mass(cuts[i], cuts[i + 1]);
  }
  e.coeffs[0] *= tab->inv_norm[0];
  if (N == 0) return e;
  // Jumps at the interior cuts; int_t^1 P_n dJ has a closed form through
  // P_{n-1}^{(alpha+1, beta+1)}.
  const JacobiParams shifted(p.alpha + 1.0, p.beta + 1.0);
  const auto up = recurrence_table(shifted, static_cast<std::size_t>(N));
  std::vector<double> vals(static_cast<std::size_t>(N));
  for (std::size_t j = 1; j + 1 < cuts.size(); ++j) {
    const double t = cuts[j];
    const double jump = shape(f, 0.5 * (t + cuts[j + 1])) - shape(f, 0.5 * (cuts[j - 1] + t));
    if (jump == 0.0) continue;
    const double envelope = std::pow(1.0 - t, p.alpha + 1.0) * std::pow(1.0 + t, p.beta + 1.0);
    up->eval_all(t, vals);
    for (int n = 1; n <= N; ++n)
      e.coeffs[static_cast<std::size_t>(n)] += jump * envelope * vals[static_cast<std::size_t>(n - 1)] / (2.0 * n);
  }
  for (int n = 1; n <= N; ++n) e.coeffs[static_cast<std::size_t>(n)] *= tab->inv_norm[static_cast<std::size_t>(n)];
  return e;
}

// Gauss-Jacobi on each piece with the endpoint weights of f and of the Jacobi
// measure folded into the rule wherever the piece touches +-1.
Expansion spectral(const TestFunction& f, const JacobiParams& p, int N, int nodes) {
  const double A = p.alpha + f.right_exp;
  const double B = p.beta + f.left_exp;
  require(A > -1.0 && B > -1.0, ErrorKind::domain, "f is not integrable against the Jacobi measure");
  const auto cuts = interior_cuts(f);
  const auto tab = recurrence_table(p, static_cast<std::size_t>(N) + 1);
  std::vector<double> acc(static_cast<std::size_t>(N) + 1, 0.0);
  std::vector<double> xs, ws;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double l = cuts[i], r = cuts[i + 1];
    const double L = r - l;
    const bool at_left = l == -1.0, at_right = r == 1.0;
    const QuadratureRule& rule =
        gauss_jacobi(JacobiParams(at_right ? A : 0.0, at_left ? B : 0.0), nodes);
    double scale = 0.5 * L;
    if (at_left && !at_right) scale = std::pow(0.5 * L, B + 1.0);
    if (at_right && !at_left) scale = std::pow(0.5 * L, A + 1.0);
    xs.resize(rule.nodes.size());
    ws.resize(rule.nodes.size());
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double t = rule.nodes[k];
      const double one_plus = at_left ? 0.5 * L * (1.0 + t) : (l + 1.0) + 0.5 * L * (1.0 + t);
      const double one_minus = at_right ? 0.5 * L * (1.0 - t) : (1.0 - r) + 0.5 * L * (1.0 - t);
      const double x = at_left ? -1.0 + one_plus : 1.0 - one_minus;
      double w = rule.weights[k] * scale * shape(f, x);
      if (!at_left) w *= std::pow(one_plus, B);
      if (!at_right) w *= std::pow(one_minus, A);
      xs[k] = x;
      ws[k] = w;
    }
    accumulate(*tab, xs, ws, acc);
  }
  for (std::size_t n = 0; n < acc.size(); ++n) acc[n] *= tab->inv_norm[n];
  return {p, std::move(acc),
          cuts.size() > 2 ? CoefficientMethod::piecewise_gauss_jacobi : CoefficientMethod::gauss_jacobi};
}

bool globally_smooth(const TestFunction& f) {
  return f.steps.empty() && !f.weighted() && interior_cuts(f).size() == 2;
}

int truncation_for(double r) {
  return static_cast<int>(std::ceil(std::log(1e-17) / std::log(r))) + 32;
}

int spectral_nodes(int N) { return N / 2 + 64; }

// Doubles the degree until the normalized coefficients |c(n)| sqrt(h_n) in
// the upper quarter fall below 1e-16 of the largest, then trims.
Expansion converged_expansion(const TestFunction& f, const JacobiParams& p) {
  for (int N = 64;; N *= 2) {
    Expansion e = spectral(f, p, N, spectral_nodes(N));
    const auto tab = recurrence_table(p, static_cast<std::size_t>(N) + 1);
    auto size = [&](int n) {
      return std::abs(e.coeffs[static_cast<std::size_t>(n)]) / std::sqrt(tab->inv_norm[static_cast<std::size_t>(n)]);
    };
    double top = 0.0, tail = 0.0;
    for (int n = 0; n <= N; ++n) {
      top = std::max(top, size(n));
      if (4 * n > 3 * N) tail = std::max(tail, size(n));
    }
    if (tail <= 1e-16 * top || N >= kSpectralCap / 2) {
      int last = N;
      while (last > 0 && size(last) <= 1e-17 * top) --last;
      e.coeffs.resize(static_cast<std::size_t>(last) + 1);
      return e;
    }
  }
}

std::string cache_key(const TestFunction& f, const JacobiParams& p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "|%.17g|%.17g", p.alpha, p.beta);
  return f.tag + f.identity + buf;
}

TestFunction divided_by_half_weight(const TestFunction& f, const JacobiParams& p) {
  TestFunction g = f;
  g.tag = f.tag + "/w";
  g.left_exp = f.left_exp - 0.5 * p.beta;
  g.right_exp = f.right_exp - 0.5 * p.alpha;
  if (std::abs(g.left_exp) < 1e-15) g.left_exp = 0.0;
  if (std::abs(g.right_exp) < 1e-15) g.right_exp = 0.0;
  return g;
}

double half_weight(const JacobiParams& p, double x) {
  double w = 1.0;
  if (p.alpha != 0.0) w *= std::pow(1.0 - x, 0.5 * p.alpha);
  if (p.beta != 0.0) w *= std::pow(1.0 + x, 0.5 * p.beta);
  return w;
}

// Breaks resolving the boundary layers of width ~ (1-r) that the Abel mean
// develops at the pieces of f and at the ends of [-1,1].
std::vector<double> layer_breaks(const TestFunction& f, double r, std::initializer_list<double> extra = {}) {
  std::vector<double> centers(f.breakpoints.begin(), f.breakpoints.end());
  centers.insert(centers.end(), extra.begin(), extra.end());
  centers.push_back(-1.0);
  centers.push_back(1.0);
  std::vector<double> out;
  for (double c : centers) {
    if (c > -1.0 && c < 1.0) out.push_back(c);
    for (int j = 0; j <= 10; ++j) {
      const double d = std::ldexp(1.0 - r, 2 * j);
      if (d >= 2.0) break;
      for (double y : {c - d, c + d})
        if (y > -1.0 && y < 1.0) out.push_back(y);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void check_r(double r) {
  require(r > 0.0 && r < 1.0, ErrorKind::domain, "Abel parameter r must lie in (0,1)");
}

const AdaptiveOptions kNormOptions{1e-15, 1e-11, 4000};

}  // namespace

Expansion fourier_jacobi_coefficients(const TestFunction& f, const JacobiParams& p, int N, int nodes) {
  require(N >= 0, ErrorKind::domain, "truncation degree must be nonnegative");
  if (f.piecewise_constant()) return exact_steps(f, p, N);
  require(nodes >= N + 1, ErrorKind::domain, "need at least N+1 quadrature nodes");
  return spectral(f, p, N, nodes);
}

std::shared_ptr<const Expansion> expansion_for(const TestFunction& f, const JacobiParams& p, double r) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const Expansion>> cache;
  const std::string key = cache_key(f, p);
  const bool smooth = globally_smooth(f);
  const bool exact = f.degree >= 0 && !f.weighted() && f.steps.empty();
  int needed = 0;
  if (!exact && !smooth) {
    needed = truncation_for(r);
    const int cap = f.piecewise_constant() ? kStepCap : kSpectralCap;
    if (needed > cap)
      fail(ErrorKind::convergence, "expansion of " + f.tag + " would need " + std::to_string(needed) +
                                       " terms at r = " + std::to_string(r) + "; use the kernel route");
  }
  {
    std::lock_guard lock(mu);
    auto it = cache.find(key);
    if (it != cache.end() && (exact || smooth || it->second->N() >= needed)) return it->second;
  }
  std::shared_ptr<const Expansion> e;
  if (exact)
    e = std::make_shared<Expansion>(spectral(f, p, f.degree, f.degree + 1));
  else if (smooth)
    e = std::make_shared<Expansion>(converged_expansion(f, p));
  else if (f.piecewise_constant())
    e = std::make_shared<Expansion>(exact_steps(f, p, std::max(needed, 1024)));
  else {
    const int N = std::max(needed, 256);
    e = std::make_shared<Expansion>(spectral(f, p, N, spectral_nodes(N)));
  }
  std::lock_guard lock(mu);
  auto& slot = cache[key];
  if (!slot || slot->N() < e->N()) slot = e;
  return slot;
}

double partial_sum(const Expansion& e, int m, double x) {
  require(m >= 0 && m <= e.N(), ErrorKind::domain, "partial sum degree exceeds the expansion");
  const auto tab = recurrence_table(e.params, static_cast<std::size_t>(m) + 1);
  double sum = e.coeffs[0];
  if (m == 0) return sum;
  double p0 = 1.0, p1 = tab->a[1] * x + tab->b[1];
  sum += e.coeffs[1] * p1;
  for (int n = 2; n <= m; ++n) {
    const auto k = static_cast<std::size_t>(n);
    const double p2 = (tab->a[k] * x + tab->b[k]) * p1 - tab->c[k] * p0;
    sum += e.coeffs[k] * p2;
    p0 = p1;
    p1 = p2;
  }
  return sum;
}

double abel_sum(const Expansion& e, double r, double x) {
  const int N = e.N();
  const auto tab = recurrence_table(e.params, static_cast<std::size_t>(N) + 1);
  double sum = e.coeffs[0];
  if (N == 0) return sum;
  double p0 = 1.0, p1 = tab->a[1] * x + tab->b[1];
  double rn = r;
  sum += rn * e.coeffs[1] * p1;
  for (int n = 2; n <= N; ++n) {
    rn *= r;
    if (rn < 1e-19) break;
    const auto k = static_cast<std::size_t>(n);
    const double p2 = (tab->a[k] * x + tab->b[k]) * p1 - tab->c[k] * p0;
    sum += rn * e.coeffs[k] * p2;
    p0 = p1;
    p1 = p2;
  }
  return sum;
}

double abel_mean(const TestFunction& f, const JacobiParams& p, double r, double x, AbelRoute route) {
  check_r(r);
  require(x >= -1.0 && x <= 1.0, ErrorKind::domain, "x must lie in [-1,1]");
  if (route == AbelRoute::series) return abel_sum(*expansion_for(f, p, r), r, x);
  const KernelRow row(p, AbelParameter(r), x);
  const PowerDensity d{-1.0, 1.0, p.beta + f.left_exp, p.alpha + f.right_exp};
  const auto breaks = layer_breaks(f, r, {x});
  return d.integrate_with_breaks([&](double y) { return row(y) * shape(f, y); }, -1.0, 1.0, breaks,
                                 {1e-15, 1e-12, 4000})
      .value;
}

double modified_abel_mean(const TestFunction& f, const JacobiParams& p, double r, double x, ModifiedRoute route) {
  check_r(r);
  require(x >= -1.0 && x <= 1.0, ErrorKind::domain, "x must lie in [-1,1]");
  const double wx = half_weight(p, x);
  switch (route) {
    case ModifiedRoute::series: {
      const TestFunction g = divided_by_half_weight(f, p);
      return wx * abel_sum(*expansion_for(g, p, r), r, x);
    }
    case ModifiedRoute::factored: {
      const KernelRow row(p, AbelParameter(r), x);
      const PowerDensity d{-1.0, 1.0, 0.5 * p.beta + f.left_exp, 0.5 * p.alpha + f.right_exp};
      const auto breaks = layer_breaks(f, r, {x});
      return wx * d.integrate_with_breaks([&](double y) { return row(y) * shape(f, y); }, -1.0, 1.0, breaks,
                                          {1e-15, 1e-12, 4000})
                      .value;
    }
    case ModifiedRoute::direct: {
      const KernelRow row(p, AbelParameter(r), x);
      std::vector<double> cuts{-1.0};
      for (double b : layer_breaks(f, r, {x})) cuts.push_back(b);
      cuts.push_back(1.0);
      double total = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double l = cuts[i], u = cuts[i + 1];
        auto integrand = [&](double y, double dl, double du) {
          const double one_plus = l == -1.0 ? dl : (l + 1.0) + dl;
          const double one_minus = u == 1.0 ? du : (1.0 - u) + du;
          double ky = row(y) * wx;
          if (p.alpha != 0.0) ky *= std::pow(one_minus, 0.5 * p.alpha);
          if (p.beta != 0.0) ky *= std::pow(one_plus, 0.5 * p.beta);
          return ky * f(y, one_minus, one_plus);
        };
        total += integrate_tanh_sinh_offsets(integrand, l, u, 1e-13, 12).value;
      }
      return total;
    }
  }
  return 0.0;
}

std::vector<double> default_r_grid(int levels) {
  require(levels >= 1, ErrorKind::domain, "r-grid needs at least one level");
  std::vector<double> g;
  for (int j = 1; j <= levels; ++j) g.push_back(1.0 - std::ldexp(1.0, -j));
  return g;
}

double jacobi_maximal(const TestFunction& f, const JacobiParams& p, double x, const std::vector<double>& r_grid) {
  require(!r_grid.empty(), ErrorKind::domain, "r-grid must be nonempty");
  const double r_max = *std::max_element(r_grid.begin(), r_grid.end());
  check_r(r_max);
  const auto e = expansion_for(f, p, r_max);
  double m = 0.0;
  for (double r : r_grid) {
    check_r(r);
    m = std::max(m, std::abs(abel_sum(*e, r, x)));
  }
  return m;
}

namespace {

// sup of |h| sampled on a uniform grid plus points hugging the cuts.
double sampled_sup(const std::function<double(double)>& h, const std::vector<double>& breaks) {
  double m = 0.0;
  constexpr int kSamples = 4096;
  for (int i = 0; i <= kSamples; ++i) m = std::max(m, std::abs(h(-1.0 + 2.0 * i / kSamples)));
  for (double b : breaks)
    for (double d : {-1e-12, 1e-12})
      if (b + d > -1.0 && b + d < 1.0) m = std::max(m, std::abs(h(b + d)));
  return m;
}

}  // namespace

double lp_norm(const TestFunction& f, const JacobiParams& p, double p_exp) {
  require(p_exp >= 1.0, ErrorKind::domain, "norm exponent must be at least 1");
  if (std::isinf(p_exp)) {
    if (std::isfinite(f.sup_abs)) return f.sup_abs;
    if (f.left_exp < 0.0 || f.right_exp < 0.0) return kInf;
    return sampled_sup([&](double x) { return f(x); }, f.breakpoints);
  }
  const PowerDensity d{-1.0, 1.0, p.beta + p_exp * f.left_exp, p.alpha + p_exp * f.right_exp};
  if (d.left_exp <= -1.0 || d.right_exp <= -1.0) return kInf;
  const auto q = d.integrate_with_breaks([&](double x) { return std::pow(std::abs(shape(f, x)), p_exp); }, -1.0,
                                         1.0, f.breakpoints, kNormOptions);
  return std::pow(q.value, 1.0 / p_exp);
}

double abel_lp_norm(const TestFunction& f, const JacobiParams& p, double r, double p_exp) {
  check_r(r);
  require(p_exp >= 1.0, ErrorKind::domain, "norm exponent must be at least 1");
  const auto e = expansion_for(f, p, r);
  const auto breaks = layer_breaks(f, r);
  auto h = [&](double x) { return abel_sum(*e, r, x); };
  if (std::isinf(p_exp)) return sampled_sup(h, breaks);
  const PowerDensity d{-1.0, 1.0, p.beta, p.alpha};
  const auto q = d.integrate_with_breaks([&](double x) { return std::pow(std::abs(h(x)), p_exp); }, -1.0, 1.0,
                                         breaks, kNormOptions);
  return std::pow(q.value, 1.0 / p_exp);
}

std::vector<double> lp_convergence_probe(const TestFunction& f, const JacobiParams& p, double p_exp,
                                         const std::vector<double>& r_sequence) {
  require(p_exp >= 1.0 && std::isfinite(p_exp), ErrorKind::domain, "norm exponent must lie in [1, inf)");
  // Negative weight exponents of f are moved into the measure so that the
  // integrand stays bounded at the ends.
  const double nl = std::min(f.left_exp, 0.0), nr = std::min(f.right_exp, 0.0);
  const PowerDensity d{-1.0, 1.0, p.beta + p_exp * nl, p.alpha + p_exp * nr};
  std::vector<double> out(r_sequence.size(), kInf);
  if (d.left_exp <= -1.0 || d.right_exp <= -1.0) return out;
  for (std::size_t i = 0; i < r_sequence.size(); ++i) {
    const double r = r_sequence[i];
    check_r(r);
    const auto e = expansion_for(f, p, r);
    auto h = [&](double x) {
      const double om = 1.0 - x, op = 1.0 + x;
      double diff = abel_sum(*e, r, x) - f(x, om, op);
      if (nl != 0.0) diff *= std::pow(op, -nl);
      if (nr != 0.0) diff *= std::pow(om, -nr);
      return std::pow(std::abs(diff), p_exp);
    };
    const auto q = d.integrate_with_breaks(h, -1.0, 1.0, layer_breaks(f, r), kNormOptions);
    out[i] = std::pow(q.value, 1.0 / p_exp);
  }
  return out;
}

double lebesgue_l2_norm(const TestFunction& f) {
  const PowerDensity d{-1.0, 1.0, 2.0 * f.left_exp, 2.0 * f.right_exp};
  if (d.left_exp <= -1.0 || d.right_exp <= -1.0) return kInf;
  const auto q = d.integrate_with_breaks([&](double x) { const double s = shape(f, x); return s * s; }, -1.0, 1.0,
                                         f.breakpoints, kNormOptions);
  return std::sqrt(q.value);
}

double modified_abel_l2_norm(const TestFunction& f, const JacobiParams& p, double r) {
  check_r(r);
  const TestFunction g = divided_by_half_weight(f, p);
  const auto e = expansion_for(g, p, r);
  // |w(x) g(r,x)|^2 dx = |g(r,x)|^2 J(dx).
  const PowerDensity d{-1.0, 1.0, p.beta, p.alpha};
  const auto q = d.integrate_with_breaks(
      [&](double x) {
        const double v = abel_sum(*e, r, x);
        return v * v;
      },
      -1.0, 1.0, layer_breaks(f, r), kNormOptions);
  return std::sqrt(q.value);
}

Weak11Result weak11_probe(const TestFunction& f, const JacobiParams& p, const std::vector<double>& lambda_grid,
                          int x_cells, const std::vector<double>& r_grid) {
  require(!lambda_grid.empty() && x_cells > 0 && !r_grid.empty(), ErrorKind::domain, "weak11 grids must be nonempty");
  Weak11Result out;
  out.l1_norm = lp_norm(f, p, 1.0);
  require(out.l1_norm > 0.0 && std::isfinite(out.l1_norm), ErrorKind::degenerate, "f must have finite nonzero L1 norm");
  const auto J = WeightedMeasure::jacobi(p.alpha, p.beta);
  std::vector<double> edges(static_cast<std::size_t>(x_cells) + 1), cdf(edges.size());
  for (int i = 0; i <= x_cells; ++i) edges[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / x_cells;
  edges.back() = 1.0;
  for (std::size_t i = 0; i < edges.size(); ++i) cdf[i] = J.cdf(edges[i]);
  expansion_for(f, p, *std::max_element(r_grid.begin(), r_grid.end()));
  std::vector<double> maximal(static_cast<std::size_t>(x_cells));
  parallel_for(maximal.size(), [&](std::size_t i) {
    maximal[i] = jacobi_maximal(f, p, 0.5 * (edges[i] + edges[i + 1]), r_grid);
  });
  for (double lambda : lambda_grid) {
    double mass = 0.0;
    for (std::size_t i = 0; i < maximal.size(); ++i)
      if (maximal[i] > lambda) mass += cdf[i + 1] - cdf[i];
    const double ratio = lambda * mass / out.l1_norm;
    out.ratios.push_back(ratio);
    out.worst_ratio = std::max(out.worst_ratio, ratio);
  }
  return out;
}

}  // namespace jw
