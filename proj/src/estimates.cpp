#include "jacobi_watson/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "jacobi_watson/errors.hpp"
#include "jacobi_watson/harmonic.hpp"
#include "jacobi_watson/parallel.hpp"

namespace jw {

bool all_hard_pass(const std::vector<EstimateCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const EstimateCheck& c) { return !c.hard || c.pass; });
}

// --- Poisson-type kernels --------------------------------------------------

std::string_view to_string(PoissonTag t) {
  switch (t) {
    case PoissonTag::k1: return "k1";
    case PoissonTag::k2: return "k2";
    case PoissonTag::k3: return "k3";
    case PoissonTag::k4: return "k4";
  }
  return "?";
}

PoissonTag parse_poisson_tag(std::string_view s) {
  for (auto t : {PoissonTag::k1, PoissonTag::k2, PoissonTag::k3, PoissonTag::k4})
    if (s == to_string(t)) return t;
  fail(ErrorKind::domain, "unknown Poisson-type kernel '" + std::string(s) + "'");
}

double PoissonTypeKernel::exponent() const {
  switch (tag) {
    case PoissonTag::k1:
    case PoissonTag::k2: return 1.5;
    case PoissonTag::k3: return 1.0;
    case PoissonTag::k4: return 1.0 + 0.5 * alpha;
  }
  return 0.0;
}

double PoissonTypeKernel::operator()(double x) const {
  if (tag == PoissonTag::k1) return std::pow(std::abs(x) + 1.0, -1.5);
  return std::pow(x * x + 1.0, -exponent());
}

double PoissonTypeKernel::stated_mass() const {
  switch (tag) {
    case PoissonTag::k1: return 4.0;
    case PoissonTag::k2: return 2.0;
    case PoissonTag::k3: return std::numbers::pi;
    case PoissonTag::k4: break;
  }
  return std::nan("");
}

QuadratureResult poisson_mass(PoissonTag tag, double alpha) {
  const PoissonTypeKernel k{tag, alpha};
  const double e = k.exponent();
  if (tag == PoissonTag::k4 && !(e > 0.5))
    fail(ErrorKind::divergence, "k4 is not integrable for alpha <= -1 (exponent 1 + alpha/2 <= 1/2)");
  // x = tan t on [0, pi/2): k(tan t) sec^2 t, written in c = cos t and
  // sn = sin t, with c taken from the exact distance to pi/2.
  auto integrand = [&](double, double t, double to_end) {
    const double c = std::sin(to_end), sn = std::sin(t);
    if (tag == PoissonTag::k1) return std::pow(c, -0.5) * std::pow(c + sn, -1.5);
    return std::pow(c, 2.0 * e - 2.0);
  };
  auto half = integrate_tanh_sinh_offsets(integrand, 0.0, 0.5 * std::numbers::pi, 1e-13);
  half.value *= 2.0;
  half.error *= 2.0;
  return half;
}

// --- L and the dyadic majorant ---------------------------------------------

void require_lemma_regime(const AbelParameter& ab) {
  if (!(ab.k < 2.0)) fail(ErrorKind::regime, "the s-integrals need k < 2, i.e. r > 3 - 2 sqrt(2)");
}

namespace {

// Breakpoints in u = (s-k)^{1/2} at the scales where s - 1 and the
// denominator change regime.
std::vector<double> u_breaks(const AbelParameter& ab, double umax) {
  std::vector<double> out;
  for (double u = 0.25 * std::sqrt(ab.k_minus_one); u < umax; u *= 2.0) out.push_back(u);
  return out;
}

// The s-integrand of L in u, times 2 (from ds/(s-k)^{1/2} = 2 du), at fixed
// d = x - y and m = min(x, y).
struct LIntegrand {
  double alpha, k1, km, d2;
  double operator()(double u) const {
    const double u2 = u * u;
    const double s1 = k1 + u2, sm = km + u2;
    return 2.0 * std::pow(sm, 1.0 - alpha) / std::pow(d2 + s1 * sm, 1.5);
  }
};

QuadratureResult L_impl(double alpha, const AbelParameter& ab, double x, double y, const AdaptiveOptions& opt) {
  const double m = std::min(x, y);
  const double umax = std::sqrt(2.0 - ab.k);
  const LIntegrand g{alpha, ab.k_minus_one, ab.k_minus_one + (1.0 - m), (x - y) * (x - y)};
  const auto breaks = u_breaks(ab, umax);
  auto out = integrate_pieces(g, 0.0, umax, breaks, opt);
  out.value *= 1.0 - ab.r;
  out.error *= 1.0 - ab.r;
  return out;
}

}  // namespace

QuadratureResult L_majorant(const JacobiParams& p, const AbelParameter& ab, double x, double y,
                            const AdaptiveOptions& opt) {
  require_lemma_regime(ab);
  require(x >= 0.0 && x <= 1.0, ErrorKind::domain, "L needs 0 <= x <= 1");
  require(std::abs(y) <= 1.0, ErrorKind::domain, "L needs |y| <= 1");
  return L_impl(p.alpha, ab, x, y, opt);
}

DyadicMajorant::DyadicMajorant(const JacobiParams& p, const AbelParameter& ab, double x) : x_(x) {
  require(x >= -1.0 && x <= 1.0, ErrorKind::domain, "dyadic majorant center outside [-1,1]");
  phi_ = std::sqrt(ab.k_minus_one * (ab.k_minus_one + (1.0 - x)));
  const auto J = WeightedMeasure::jacobi(p.alpha, p.beta);
  total_ = J.total_mass();
  for (int n = 0;; ++n) {
    const Interval I = interval(n);
    masses_.push_back(J.interval_mass(I));
    if (I.left == -1.0 && I.right == 1.0) break;
  }
}

Interval DyadicMajorant::interval(int n) const {
  const double h = std::ldexp(phi_, n);
  return {std::max(-1.0, x_ - h), std::min(1.0, x_ + h)};
}

double DyadicMajorant::operator()(double y) const {
  const double d = std::abs(y - x_);
  const int last = n_max();
  double sum = 0.0;
  for (int n = 0; n < last; ++n)
    if (d <= std::ldexp(phi_, n)) sum += std::exp2(-0.5 * n) / masses_[static_cast<std::size_t>(n)];
  // n >= last: every I_n is [-1, 1].
  sum += std::exp2(-0.5 * last) / (1.0 - std::numbers::sqrt2 / 2.0) / total_;
  return sum;
}

namespace {

std::vector<double> uniform(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  out.back() = b;
  return out;
}

// sup over r_grid x uniform x-grid x uniform y-grid of ratio(r, x, y).
template <class Ratio>
double grid_sup(const std::vector<double>& r_grid, int n, const Ratio& ratio) {
  const auto xs = uniform(0.0, 1.0, n), ys = uniform(-1.0, 1.0, n);
  std::vector<double> sups(r_grid.size() * xs.size(), 0.0);
  parallel_for(sups.size(), [&](std::size_t idx) {
    const double r = r_grid[idx / xs.size()], x = xs[idx % xs.size()];
    sups[idx] = ratio(r, x, ys);
  });
  return *std::max_element(sups.begin(), sups.end());
}

template <class Ratio>
ConstantFit fit(const std::vector<double>& r_grid, int n, const Ratio& ratio) {
  require(n >= 2, ErrorKind::domain, "fit grids need at least 2 points");
  require(!r_grid.empty(), ErrorKind::domain, "empty r grid");
  ConstantFit out;
  out.coarse = grid_sup(r_grid, n, ratio);
  out.fine = grid_sup(r_grid, 2 * n - 1, ratio);
  out.points = static_cast<long>(r_grid.size()) * (2 * n - 1) * (2 * n - 1);
  return out;
}

}  // namespace

ConstantFit fit_basic_inequality(const JacobiParams& p, const std::vector<double>& r_grid, int n) {
  return fit(r_grid, n, [&](double r, double x, const std::vector<double>& ys) {
    const AbelParameter ab(r);
    require_lemma_regime(ab);
    const KernelRow K(p, ab, x);
    double s = 0.0;
    for (double y : ys) s = std::max(s, K(y) / (1.0 + L_impl(p.alpha, ab, x, y, {1e-15, 1e-11, 4000}).value));
    return s;
  });
}

ConstantFit fit_dyadic_majorant(const JacobiParams& p, const std::vector<double>& r_grid, int n) {
  return fit(r_grid, n, [&](double r, double x, const std::vector<double>& ys) {
    const AbelParameter ab(r);
    require_lemma_regime(ab);
    const DyadicMajorant D(p, ab, x);
    double s = 0.0;
    for (double y : ys) s = std::max(s, L_impl(p.alpha, ab, x, y, {1e-15, 1e-11, 4000}).value / D(y));
    return s;
  });
}

// --- s-integrals -----------------------------------------------------------

EstmIntegrals estm_integrals(const AbelParameter& ab, double x) {
  require_lemma_regime(ab);
  require(x >= 0.0 && x <= 1.0, ErrorKind::domain, "the s-integrals need 0 <= x <= 1");
  const double umax = std::sqrt(2.0 - ab.k);
  const double k1 = ab.k_minus_one, kx = ab.k_minus_one + (1.0 - x);
  const auto breaks = u_breaks(ab, umax);
  const AdaptiveOptions opt{1e-16, 1e-13, 4000};
  auto run = [&](auto g) { return (1.0 - ab.r) * integrate_pieces(g, 0.0, umax, breaks, opt).value; };
  return {
      run([&](double u) { return 2.0 / std::sqrt(kx + u * u); }),
      run([&](double u) { return 2.0 / std::sqrt((k1 + u * u) * (kx + u * u)); }),
      run([&](double u) { return 2.0 / (k1 + u * u); }),
  };
}

// --- kernel shift ----------------------------------------------------------

KernelShiftResult kernel_shift_check(double eta, const std::vector<double>& z_grid, const std::vector<double>& a_grid) {
  require(eta > 1.0, ErrorKind::domain, "the kernel shift bound needs eta > 1");
  for (double a : a_grid) require(std::abs(a) < 1.0, ErrorKind::domain, "shift a must satisfy |a| < 1");
  KernelShiftResult out;
  out.eta = eta;
  out.const_outer = std::pow(2.25, eta);
  out.const_inner = std::pow(10.0, eta);
  for (double z : z_grid) {
    const bool outer = std::abs(z) > 3.0;
    const double C = outer ? out.const_outer : out.const_inner;
    double& worst = outer ? out.worst_outer : out.worst_inner;
    for (double a : a_grid) {
      const double ratio = std::pow((z * z + 1.0) / ((z + a) * (z + a) + 1.0), eta);
      worst = std::max(worst, ratio);
      if (ratio > C) ++out.violations;
      ++out.points;
    }
  }
  return out;
}

// --- the main estimate and the J operators ---------------------------------

namespace {

// int_0^1 L(r, x, y) (1-y)^{alpha + re} (1+y)^{le} s(y) dy.
QuadratureResult j_impl(double alpha, const AbelParameter& ab, double x, const std::function<double(double)>& s,
                        double le, double re, const std::vector<double>& f_breaks, const MainestOptions& opt) {
  require_lemma_regime(ab);
  require(x >= 0.0 && x <= 1.0, ErrorKind::domain, "the J operator point must lie on the operator's half");
  const PowerDensity w{-1.0, 1.0, le, alpha + re};
  if (!(alpha + re > -1.0)) return {std::numeric_limits<double>::infinity(), 0.0, 0, false};
  const AdaptiveOptions inner{1e-300, std::max(1e-14, 1e-2 * opt.rel_tol), 4000};
  auto g = [&](double y) { return L_impl(alpha, ab, x, y, inner).value * s(y); };
  // The row peaks at y = x with width about phi.
  const double phi = std::sqrt(ab.k_minus_one * (ab.k_minus_one + (1.0 - x)));
  std::vector<double> breaks = f_breaks;
  if (opt.split_at_x) breaks.push_back(x);
  for (double h = phi; h < 1.0; h *= 4.0) {
    breaks.push_back(x - h);
    breaks.push_back(x + h);
  }
  return w.integrate_with_breaks(g, 0.0, 1.0, breaks, {1e-300, opt.rel_tol, 4000});
}

}  // namespace

QuadratureResult mainest_integral(const JacobiParams& p, const AbelParameter& ab, double x,
                                  const MainestOptions& opt) {
  return j_impl(p.alpha, ab, x, [](double) { return 1.0; }, 0.0, 0.0, {}, opt);
}

QuadratureResult j_operator_apply(const JacobiParams& p, const AbelParameter& ab, const TestFunction& f, double x,
                                  JSide side, const MainestOptions& opt) {
  if (side == JSide::alpha) {
    auto s = [&f](double y) { return f(y, 1.0, 1.0); };
    return j_impl(p.alpha, ab, x, s, f.left_exp, f.right_exp, f.breakpoints, opt);
  }
  require(x >= -1.0 && x <= 0.0, ErrorKind::domain, "J_beta points lie in [-1, 0]");
  auto s = [&f](double y) { return f(-y, 1.0, 1.0); };
  std::vector<double> breaks;
  for (double b : f.breakpoints) breaks.push_back(-b);
  return j_impl(p.beta, ab, -x, s, f.right_exp, f.left_exp, breaks, opt);
}

SweepResult mainest_sweep(const std::vector<double>& alphas, const std::vector<double>& r_grid,
                          const std::vector<double>& x_grid, double rel_tol) {
  const std::size_t nr = r_grid.size(), nx = x_grid.size();
  std::vector<double> coarse(alphas.size() * nr * nx), fine(coarse.size());
  parallel_for(coarse.size(), [&](std::size_t i) {
    const JacobiParams p(alphas[i / (nr * nx)], 0.0);
    const AbelParameter ab(r_grid[(i / nx) % nr]);
    const double x = x_grid[i % nx];
    coarse[i] = mainest_integral(p, ab, x, {rel_tol}).value;
    fine[i] = mainest_integral(p, ab, x, {rel_tol * 1e-2}).value;
  });
  SweepResult out;
  out.coarse = *std::max_element(coarse.begin(), coarse.end());
  out.fine = *std::max_element(fine.begin(), fine.end());
  out.points = static_cast<long>(coarse.size());
  return out;
}

SweepResult joperator_sweep(double alpha, const std::vector<double>& r_grid, const std::vector<double>& x_grid,
                            double rel_tol) {
  const JacobiParams p(alpha, alpha);
  const auto J = WeightedMeasure::jacobi(alpha, alpha);
  const auto fam = test_functions::family(p);
  const std::size_t nr = r_grid.size(), nx = x_grid.size();
  const std::size_t per_f = 2 * nr * nx;
  std::vector<double> coarse(fam.size() * per_f, 0.0), fine(coarse.size(), 0.0);
  std::vector<MaximalFunction> m8, m10;
  for (const auto& f : fam) {
    m8.emplace_back(J, f, WindowGrid::dyadic(J.support(), 8));
    m10.emplace_back(J, f, WindowGrid::dyadic(J.support(), 10));
  }
  parallel_for(coarse.size(), [&](std::size_t i) {
    const std::size_t fi = i / per_f, rest = i % per_f;
    const JSide side = rest < nr * nx ? JSide::alpha : JSide::beta;
    const AbelParameter ab(r_grid[(rest % (nr * nx)) / nx]);
    const double x = side == JSide::alpha ? x_grid[rest % nx] : -x_grid[rest % nx];
    const double mc = m8[fi](x), mf = m10[fi](x);
    if (mc > 0.0) coarse[i] = std::abs(j_operator_apply(p, ab, fam[fi], x, side, {rel_tol}).value) / mc;
    if (mf > 0.0) fine[i] = std::abs(j_operator_apply(p, ab, fam[fi], x, side, {rel_tol * 1e-2}).value) / mf;
  });
  SweepResult out;
  out.coarse = *std::max_element(coarse.begin(), coarse.end());
  out.fine = *std::max_element(fine.begin(), fine.end());
  out.points = static_cast<long>(coarse.size());
  return out;
}

// --- the s, x, y estimates -------------------------------------------------

namespace {

struct SxyFits {
  double i_excess = -INFINITY, ii_lower_excess = -INFINITY, ii_upper_excess = -INFINITY;
  double iii_c1 = INFINITY, iii_c2 = 0.0;
  double iv_lower = INFINITY, iv_c = 0.0;
  double v_lower = INFINITY, v_c = 0.0;
};

SxyFits sxy_fits(int n) {
  const auto ss = uniform(1.0, 2.0, n), xs = uniform(0.0, 1.0, n), ys = uniform(-1.0, 1.0, n);
  SxyFits f;
  for (double s : ss)
    for (double x : xs)
      for (double y : ys) {
        const double m = std::min(x, y);
        f.i_excess = std::max(f.i_excess, (s * s - m) - 4.0 * (s - m));
        f.ii_lower_excess = std::max(f.ii_lower_excess, (s - m) - 2.0 * (s - x * y));
        f.ii_upper_excess = std::max(f.ii_upper_excess, 2.0 * (s - x * y) - 4.0 * (s - m));
        const auto g = WatsonGeometry::at(s, x, y);
        const double q = (x - y) * (x - y) + (s - 1.0) * (s - m);
        if (q > 0.0) {
          f.iii_c1 = std::min(f.iii_c1, g.Y * g.Y / q);
          f.iii_c2 = std::max(f.iii_c2, g.Y * g.Y / q);
        }
        const double z1 = s * s - m;
        if (z1 > 0.0) {
          f.iv_lower = std::min(f.iv_lower, g.Z1 / z1);
          f.iv_c = std::max(f.iv_c, g.Z1 / z1);
        }
        f.v_lower = std::min(f.v_lower, g.Z2 - (s * s + std::max(x, y)));
        f.v_c = std::max(f.v_c, g.Z2);
      }
  return f;
}

}  // namespace

std::vector<EstimateCheck> sxy_inequalities_check(int n) {
  require(n >= 2, ErrorKind::domain, "sxy grid needs at least 2 points per axis");
  const SxyFits c = sxy_fits(n), f = sxy_fits(2 * n - 1);
  std::vector<EstimateCheck> out;
  auto hard = [&](std::string name, std::string anchor, double excess) {
    out.push_back({std::move(name), std::move(anchor), excess, 0.0, excess <= 0.0, true});
  };
  // Fitted constants: finite, positive, stable within 25% under refinement.
  auto fitted = [&](std::string name, std::string anchor, double fine, double coarse) {
    const bool ok = std::isfinite(fine) && fine > 0.0 && std::abs(fine - coarse) <= 0.25 * fine;
    out.push_back({std::move(name), std::move(anchor), fine, coarse, ok, false});
  };
  hard("i", "s^2 - min(x,y) <= 4(s - min(x,y))", f.i_excess);
  hard("ii.lower", "s - min(x,y) <= 2(s - xy)", f.ii_lower_excess);
  hard("ii.upper", "2(s - xy) <= 4(s - min(x,y))", f.ii_upper_excess);
  fitted("iii.C1", "C1 Q <= Y^2, Q = (x-y)^2 + (s-1)(s-min(x,y))", f.iii_c1, c.iii_c1);
  fitted("iii.C2", "Y^2 <= C2 Q", f.iii_c2, c.iii_c2);
  out.push_back({"iv.lower", "s^2 - min(x,y) <= Z1", f.iv_lower, 1.0, f.iv_lower >= 1.0 - 1e-12, false});
  fitted("iv.C", "Z1 <= C (s^2 - min(x,y))", f.iv_c, c.iv_c);
  out.push_back({"v.lower", "s^2 + max(x,y) <= Z2", f.v_lower, 0.0, f.v_lower >= -1e-12, false});
  fitted("v.C", "Z2 <= C", f.v_c, c.v_c);

  // vi) and vii) on r_j = 1 - 2^{-j}, r > 1/2.
  double vi_low = -INFINITY, vi_high = -INFINITY;
  double vii_c1 = INFINITY, vii_c2 = 0.0, vii_c1_coarse = INFINITY, vii_c2_coarse = 0.0;
  double last_ratio = 0.0, last_gap = 0.0;
  const auto xs = uniform(0.0, 1.0, 2 * n - 1);
  for (int j = 2; j <= 40; ++j) {
    const AbelParameter ab(1.0 - std::ldexp(1.0, -j));
    const double k1 = ab.k_minus_one;
    for (double x : xs) {
      const double kx = k1 + (1.0 - x);
      const double phi = std::sqrt(k1 * kx);
      vi_low = std::max(vi_low, k1 - phi);
      vi_high = std::max(vi_high, phi - kx);
    }
    const double t = std::ldexp(1.0, -j);  // 1 - r
    const double a = k1 / (t * t), b = k1 / (t * (2.0 - t));
    vii_c1 = std::min(vii_c1, a);
    vii_c2 = std::max(vii_c2, b);
    if (j <= 20) {
      vii_c1_coarse = std::min(vii_c1_coarse, a);
      vii_c2_coarse = std::max(vii_c2_coarse, b);
    }
    last_ratio = a;
    last_gap = t;
  }
  hard("vi.lower", "k - 1 <= phi(x,r)", vi_low);
  hard("vi.upper", "phi(x,r) <= k - x", vi_high);
  fitted("vii.C1", "C1 (1-r)^2 <= k - 1", vii_c1, vii_c1_coarse);
  fitted("vii.C2", "k - 1 <= C2 (1 - r^2)", vii_c2, vii_c2_coarse);
  // (k-1)/(1-r)^2 = 1/(2 sqrt r (1 + sqrt r)^2) = (1 + (1-r) + ...)/8.
  out.push_back({"vii.limit", "(k-1)/(1-r)^2 -> 1/8", std::abs(last_ratio - 0.125), 0.25 * last_gap,
                 std::abs(last_ratio - 0.125) <= 0.25 * last_gap, false});
  return out;
}

}  // namespace jw
