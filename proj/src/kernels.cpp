#include "jacobi_watson/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "jacobi_watson/errors.hpp"
#include "jacobi_watson/measure.hpp"
#include "jacobi_watson/quadrature.hpp"

namespace jw {

std::string_view to_string(KernelMethod m) {
  switch (m) {
    case KernelMethod::series: return "series";
    case KernelMethod::bailey: return "bailey";
    case KernelMethod::integral: return "integral";
  }
  return "unknown";
}

AbelParameter::AbelParameter(double rr) : r(rr) {
  require(rr > 0.0 && rr < 1.0, ErrorKind::domain, "Abel parameter r must lie in (0,1)");
  k_minus_one = abel_k_minus_one(rr);
  k = 1.0 + k_minus_one;
}

WatsonGeometry WatsonGeometry::at(double s, double x, double y) {
  const double s2 = s * s;
  const double d = 0.5 * (x - y);
  const double Y = std::sqrt(d * d + (s2 - 1.0) * (s2 - x * y));
  return {Y, s2 - 0.5 * (x + y) + Y, s2 + 0.5 * (x + y) + Y};
}

BaileyArguments BaileyArguments::make(const AbelParameter& ab, double x, double y) {
  const double a = 0.5 * std::sqrt(std::max(0.0, (1.0 - x) * (1.0 - y)));
  const double b = 0.5 * std::sqrt(std::max(0.0, (1.0 + x) * (1.0 + y)));
  return {a, b, 1.0 - (a + b) / ab.k};
}

double dirichlet_kernel_direct(const JacobiParams& p, int m, double x, double y) {
  require(m >= 0, ErrorKind::domain, "Dirichlet kernel degree must be nonnegative");
  auto t = recurrence_table(p, m + 2);
  std::vector<double> px(m + 1), py(m + 1);
  t->eval_all(x, px);
  t->eval_all(y, py);
  double s = 0.0;
  for (int n = 0; n <= m; ++n) s += px[n] * py[n] * t->inv_norm[n];
  return s;
}

double dirichlet_kernel(const JacobiParams& p, int m, double x, double y) {
  if (std::abs(x - y) < 1e-6) return dirichlet_kernel_direct(p, m, x, y);
  auto t = recurrence_table(p, m + 2);
  std::vector<double> px(m + 2), py(m + 2);
  t->eval_all(x, px);
  t->eval_all(y, py);
  // Leading coefficients satisfy k_{m+1} / k_m = a_{m+1}.
  return (px[m + 1] * py[m] - px[m] * py[m + 1]) * t->inv_norm[m] / (t->a[m + 1] * (x - y));
}

F4Sum appell_f4_sum(double a1, double a2, double c1, double c2, double x, double y, double tol,
                    int max_diagonals) {
  if (!(std::sqrt(std::abs(x)) + std::sqrt(std::abs(y)) < 1.0))
    fail(ErrorKind::region, "F4 arguments outside the region sqrt|x| + sqrt|y| < 1");
  F4Sum out;
  double sum = 1.0;
  int small = 0;
  auto accept = [&](int d, double diag) {
    sum += diag;
    out.diagonals = d + 1;
    out.last_diagonal = diag;
    small = std::abs(diag) <= tol * std::abs(sum) ? small + 1 : 0;
    return small >= 3;
  };
  if (x == 0.0 || y == 0.0) {
    // One-variable series along the nonzero axis.
    const double z = x == 0.0 ? y : x;
    const double c = x == 0.0 ? c2 : c1;
    double term = 1.0;
    for (int d = 0; d < max_diagonals; ++d) {
      term *= (a1 + d) * (a2 + d) / ((c + d) * (d + 1.0)) * z;
      if (accept(d, term)) {
        out.value = sum;
        return out;
      }
    }
  } else {
    // Terms t(m, n) along an anti-diagonal are log-concave in m, so each
    // diagonal is summed outward from its peak. The peak term is carried from
    // one diagonal to the next by exact ratio steps, which keeps the far
    // tails from underflowing the part of the diagonal that matters.
    auto along = [&](int m, int n) {  // t(m+1, n-1) / t(m, n)
      return x * (c2 + n - 1.0) * n / (y * (c1 + m) * (m + 1.0));
    };
    int pm = 0;         // peak position m on the current diagonal (n = d - pm)
    double peak = 1.0;  // t(pm, d - pm)
    for (int d = 0; d + 1 < max_diagonals; ++d) {
      // Step to diagonal d + 1 by increasing n.
      const int n = d - pm;
      peak *= (a1 + d) * (a2 + d) / ((c2 + n) * (n + 1.0)) * y;
      const int dd = d + 1;
      // Walk to the maximum along the new diagonal.
      while (pm < dd && along(pm, dd - pm) > 1.0) {
        peak *= along(pm, dd - pm);
        ++pm;
      }
      while (pm > 0 && along(pm - 1, dd - pm + 1) < 1.0) {
        peak /= along(pm - 1, dd - pm + 1);
        --pm;
      }
      double diag = peak;
      double t = peak;
      for (int m = pm; m < dd; ++m) {
        t *= along(m, dd - m);
        diag += t;
        if (t < 1e-18 * diag) break;
      }
      t = peak;
      for (int m = pm; m > 0; --m) {
        t /= along(m - 1, dd - m + 1);
        diag += t;
        if (t < 1e-18 * diag) break;
      }
      if (accept(d, diag)) {
        out.value = sum;
        return out;
      }
    }
  }
  fail(ErrorKind::convergence, "F4 series did not converge within " + std::to_string(max_diagonals) +
                                   " anti-diagonals");
}

double appell_f4(double a1, double a2, double c1, double c2, double x, double y, double tol) {
  return appell_f4_sum(a1, a2, c1, c2, x, y, tol).value;
}

GrowthFit growth_fit(const JacobiParams& p) {
  static std::mutex mutex;
  static std::map<std::pair<double, double>, GrowthFit> cache;
  const auto key = std::make_pair(p.alpha, p.beta);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double e = std::max(p.q(), -0.5) + 0.5;
  constexpr int kDegree = 200, kPoints = 2001;
  std::vector<double> vals(kDegree + 1);
  double sup = 1.0;
  for (int i = 0; i < kPoints; ++i) {
    const double x = -1.0 + 2.0 * i / (kPoints - 1);
    jacobi_eval_all(p, x, vals);
    for (int n = 1; n <= kDegree; ++n) sup = std::max(sup, std::abs(vals[n]) / std::pow(n, e));
  }
  const GrowthFit fit{1.05 * sup, e};
  std::lock_guard lock(mutex);
  cache.emplace(key, fit);
  return fit;
}

namespace {

constexpr std::size_t kMaxTerms = 100000;

// Bound C^2 n^{2e} r^n / h_n on the n-th term, n >= 1.
double term_bound(const GrowthFit& g, double log_r, const RecurrenceTable& t, std::size_t n) {
  return g.C * g.C * std::exp(2.0 * g.e * std::log(static_cast<double>(n)) + n * log_r) *
         t.inv_norm[n];
}

}  // namespace

KernelEval watson_kernel_series(const JacobiParams& p, const AbelParameter& ab, double x, double y,
                                double tol) {
  const GrowthFit g = growth_fit(p);
  const double log_r = std::log(ab.r);
  auto table = recurrence_table(p, 512);
  double px0 = 1.0, py0 = 1.0;
  double px1 = table->a[1] * x + table->b[1], py1 = table->a[1] * y + table->b[1];
  double rn = ab.r;
  double sum = table->inv_norm[0] + rn * px1 * py1 * table->inv_norm[1];
  for (std::size_t n = 2; n < kMaxTerms; ++n) {
    if (n + 2 >= table->size()) table = recurrence_table(p, std::min(kMaxTerms + 3, 2 * table->size()));
    const RecurrenceTable& t = *table;
    const double px2 = (t.a[n] * x + t.b[n]) * px1 - t.c[n] * px0;
    const double py2 = (t.a[n] * y + t.b[n]) * py1 - t.c[n] * py0;
    px0 = px1, px1 = px2, py0 = py1, py1 = py2;
    rn *= ab.r;
    sum += rn * px1 * py1 * t.inv_norm[n];
    const double b1 = term_bound(g, log_r, t, n + 1);
    const double b2 = term_bound(g, log_r, t, n + 2);
    if (b2 < b1) {
      const double tail = b1 / (1.0 - b2 / b1);
      if (tail <= tol * std::abs(sum)) return {sum, KernelMethod::series, tail, static_cast<long>(n + 1)};
    }
  }
  fail(ErrorKind::convergence, "Watson series did not reach tolerance within 1e5 terms (r = " +
                                   std::to_string(ab.r) + ", partial = " + std::to_string(sum) + ")");
}

KernelEval watson_kernel_bailey(const JacobiParams& p, const AbelParameter& ab, double x, double y,
                                double tol) {
  const BaileyArguments ba = BaileyArguments::make(ab, x, y);
  if (!(ba.margin > 0.0)) fail(ErrorKind::region, "Bailey representation outside its region");
  const double al = p.alpha, be = p.beta, s = al + be;
  const double log_pre = std::lgamma(s + 2.0) + std::log1p(-ab.r) - (s + 1.0) * std::numbers::ln2 -
                         std::lgamma(al + 1.0) - std::lgamma(be + 1.0) - (s + 2.0) * std::log1p(ab.r);
  const double k2 = ab.k * ab.k;
  const F4Sum f = appell_f4_sum(0.5 * (s + 2.0), 0.5 * (s + 3.0), al + 1.0, be + 1.0,
                                ba.a * ba.a / k2, ba.b * ba.b / k2, tol);
  const double pre = std::exp(log_pre);
  return {pre * f.value, KernelMethod::bailey, pre * (std::abs(f.last_diagonal) + 1e-16 * f.value),
          f.diagonals};
}

namespace {

// The omega-integral of Watson's representation written with eps = cos^2/k^2:
// int_0^{pi/2} cos^{a+b} w cos((a-b) w) / (z1^a z2^b yh) dw, which equals
// k^{2+2(a+b)} times the printed integral.
struct WatsonIntegrand {
  double al, be, x, y, k, km1;

  double operator()(double c, double sn, double w) const {
    const double k2 = k * k;
    const double c2 = c * c, s2 = sn * sn;
    const double base = km1 * (k + 1.0) + s2;  // k^2 - cos^2 w
    const double eps = c2 / k2;
    const double one_minus_eps = base / k2;
    const double one_minus_xy_eps = (base + (1.0 - x * y) * c2) / k2;
    const double d = 0.5 * (x - y) * eps;
    const double yh = std::sqrt(one_minus_eps * one_minus_xy_eps + d * d);
    const double z1 = one_minus_eps + eps * 0.5 * ((1.0 - x) + (1.0 - y)) + yh;
    const double z2 = one_minus_eps + eps * 0.5 * ((1.0 + x) + (1.0 + y)) + yh;
    double v = std::cos((al - be) * w) / yh;
    if (al != 0.0) v /= std::pow(z1, al);
    if (be != 0.0) v /= std::pow(z2, be);
    return v;
  }
};

QuadratureResult watson_omega_integral(const JacobiParams& p, double r, double x, double y) {
  const double km1 = abel_k_minus_one(r);
  const WatsonIntegrand g{p.alpha, p.beta, x, y, 1.0 + km1, km1};
  const double s = p.alpha + p.beta;
  const AdaptiveOptions opt{0.0, 2e-14, 4000};
  constexpr double kQuarter = 0.25 * std::numbers::pi;
  auto head = [&](double w) {
    const double c = std::cos(w);
    return std::pow(c, s) * g(c, std::sin(w), w);
  };
  // Breakpoints resolve the peak of width ~ sqrt(k-1) at w = 0.
  std::vector<double> breaks;
  for (double f = 1.0; f <= 1e3; f *= 10.0) breaks.push_back(f * std::sqrt(km1));
  QuadratureResult out = integrate_pieces(head, 0.0, kQuarter, breaks, opt);
  if (s >= 0.0) {
    out += integrate_adaptive(head, kQuarter, 2.0 * kQuarter, opt);
  } else {
    // t = pi/2 - w and v = t^{s+1}/(s+1) remove the cos^{s} singularity.
    const double e = s + 1.0;
    auto tail = [&](double v) {
      const double t = std::pow(e * v, 1.0 / e);
      if (t == 0.0) return g(0.0, 1.0, 2.0 * kQuarter);
      const double st = std::sin(t);
      return std::pow(st / t, s) * g(st, std::cos(t), 2.0 * kQuarter - t);
    };
    out += integrate_adaptive(tail, 0.0, std::pow(kQuarter, e) / e, opt);
  }
  return out;
}

}  // namespace

KernelEval watson_kernel_integral(const JacobiParams& p, const AbelParameter& ab, double x, double y) {
  const double s = p.alpha + p.beta;
  require(s > -1.0, ErrorKind::regime, "Watson integral requires alpha + beta > -1");
  require(ab.r > 0.5 && ab.r < 1.0, ErrorKind::regime, "Watson integral requires 1/2 < r < 1");
  auto F = [&](double r, long& nodes) {
    const QuadratureResult q = watson_omega_integral(p, r, x, y);
    nodes += q.evaluations;
    return std::pow(abel_k(r), -1.0 - s) * q.value;
  };
  const double h = std::max(1e-5, (1.0 - ab.r) * 1e-3);
  long nodes = 0;
  const double fp = F(ab.r + h, nodes), fm = F(ab.r - h, nodes);
  const double fp2 = F(ab.r + 2 * h, nodes), fm2 = F(ab.r - 2 * h, nodes);
  const double d1 = (fp - fm) / (2.0 * h);
  const double d2 = (fp2 - fm2) / (4.0 * h);
  const double scale = std::pow(ab.r, 0.5 * (1.0 - s)) / std::numbers::pi;
  return {scale * d1, KernelMethod::integral, scale * std::abs(d1 - d2) / 3.0 + 1e-12 * std::abs(scale * d1),
          nodes};
}

KernelEval watson_kernel(const JacobiParams& p, const AbelParameter& ab, double x, double y) {
  if (BaileyArguments::make(ab, x, y).margin > 0.05) return watson_kernel_bailey(p, ab, x, y);
  return watson_kernel_series(p, ab, x, y);
}

double modified_watson_kernel(const JacobiParams& p, const AbelParameter& ab, double x, double y) {
  const double w = std::pow((1.0 - x) * (1.0 - y), 0.5 * p.alpha) *
                   std::pow((1.0 + x) * (1.0 + y), 0.5 * p.beta);
  return watson_kernel(p, ab, x, y).value * w;
}

KernelRow::KernelRow(const JacobiParams& p, const AbelParameter& ab, double x, double abs_tol) {
  const GrowthFit g = growth_fit(p);
  const double log_r = std::log(ab.r);
  table_ = recurrence_table(p, 512);
  coeff_.push_back(table_->inv_norm[0]);
  double px0 = 1.0, px1 = table_->a[1] * x + table_->b[1];
  coeff_.push_back(ab.r * px1 * table_->inv_norm[1]);
  double rn = ab.r;
  for (std::size_t n = 2;; ++n) {
    if (n >= kMaxTerms)
      fail(ErrorKind::convergence, "kernel row did not reach tolerance within 1e5 terms");
    if (n + 2 >= table_->size()) table_ = recurrence_table(p, std::min(kMaxTerms + 3, 2 * table_->size()));
    const RecurrenceTable& t = *table_;
    const double px2 = (t.a[n] * x + t.b[n]) * px1 - t.c[n] * px0;
    px0 = px1;
    px1 = px2;
    rn *= ab.r;
    coeff_.push_back(rn * px1 * t.inv_norm[n]);
    const double b1 = term_bound(g, log_r, t, n + 1);
    const double b2 = term_bound(g, log_r, t, n + 2);
    if (b2 < b1) {
      tail_ = b1 / (1.0 - b2 / b1);
      if (tail_ <= abs_tol) break;
    }
  }
}

double KernelRow::operator()(double y) const {
  const RecurrenceTable& t = *table_;
  double p0 = 1.0, p1 = t.a[1] * y + t.b[1];
  double s = coeff_[0] + coeff_[1] * p1;
  for (std::size_t n = 2; n < coeff_.size(); ++n) {
    const double p2 = (t.a[n] * y + t.b[n]) * p1 - t.c[n] * p0;
    p0 = p1;
    p1 = p2;
    s += coeff_[n] * p1;
  }
  return s;
}

double kernel_mass(const JacobiParams& p, const AbelParameter& ab, double x) {
  const auto m = WeightedMeasure::jacobi(p.alpha, p.beta);
  const KernelRow row(p, ab, x, 1e-14 / m.total_mass());
  // Resolve the peak of width ~ (1 - r) around y = x.
  std::vector<double> breaks{x};
  for (double f = 1.0; f <= 64.0; f *= 4.0) {
    breaks.push_back(x - f * (1.0 - ab.r));
    breaks.push_back(x + f * (1.0 - ab.r));
  }
  const AdaptiveOptions opt{1e-15, 1e-12, 4000};
  return m.integrate([&](double y) { return row(y); }, -1.0, 1.0, breaks, opt).value;
}

}  // namespace jw
