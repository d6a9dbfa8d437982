#include "jacobi_watson/polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <limits>
#include <numbers>
#include <tuple>
#include <utility>

#include "jacobi_watson/errors.hpp"

namespace jw {

JacobiParams::JacobiParams(double a, double b) : alpha(a), beta(b) {
  require(a > -1.0 && b > -1.0 && std::isfinite(a) && std::isfinite(b), ErrorKind::domain,
          "Jacobi exponents must exceed -1");
}

double abel_k(double r) { return 1.0 + abel_k_minus_one(r); }

double abel_k_minus_one(double r) {
  require(r > 0.0, ErrorKind::domain, "Abel parameter must be positive");
  const double s = std::sqrt(r);
  return (1.0 - s) * (1.0 - s) / (2.0 * s);
}

double log_gamma(double x) { return std::lgamma(x); }

double beta_function(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double binomial_shifted(int n, double a) {
  if (n == 0) return 1.0;
  return std::exp(std::lgamma(n + a + 1.0) - std::lgamma(n + 1.0) - std::lgamma(a + 1.0));
}

namespace {

// Coefficients of P_n = (a x + b) P_{n-1} - c P_{n-2} for n >= 2.
struct Step {
  double a, b, c;
};

Step recurrence_step(double al, double be, int n) {
  const double s = 2.0 * n + al + be;
  const double denom = 2.0 * n * (n + al + be) * (s - 2.0);
  return {(s - 1.0) * s * (s - 2.0) / denom, (s - 1.0) * (al * al - be * be) / denom,
          2.0 * (n + al - 1.0) * (n + be - 1.0) * s / denom};
}

double p1(double al, double be, double x) { return (al + 1.0) + (al + be + 2.0) * 0.5 * (x - 1.0); }

double eval_raw(double al, double be, int n, double x) {
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = p1(al, be, x);
  for (int k = 2; k <= n; ++k) {
    const Step st = recurrence_step(al, be, k);
    const double next = (st.a * x + st.b) * cur - st.c * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double norm_raw(double al, double be, int n) {
  const double s = al + be + 1.0;
  if (n == 0) return std::exp2(s) * beta_function(al + 1.0, be + 1.0);
  return std::exp2(s) / (2.0 * n + s) *
         std::exp(std::lgamma(n + al + 1.0) + std::lgamma(n + be + 1.0) - std::lgamma(n + 1.0) -
                  std::lgamma(n + s));
}

}  // namespace

double jacobi_eval(const JacobiParams& p, int n, double x) {
  require(n >= 0, ErrorKind::domain, "degree must be nonnegative");
  return eval_raw(p.alpha, p.beta, n, x);
}

void jacobi_eval_all(const JacobiParams& p, double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = p1(p.alpha, p.beta, x);
  for (std::size_t k = 2; k < out.size(); ++k) {
    const Step st = recurrence_step(p.alpha, p.beta, static_cast<int>(k));
    out[k] = (st.a * x + st.b) * out[k - 1] - st.c * out[k - 2];
  }
}

double jacobi_derivative(const JacobiParams& p, int n, double x) {
  require(n >= 0, ErrorKind::domain, "degree must be nonnegative");
  if (n == 0) return 0.0;
  return 0.5 * (n + p.alpha + p.beta + 1.0) * eval_raw(p.alpha + 1.0, p.beta + 1.0, n - 1, x);
}

double jacobi_norm(const JacobiParams& p, int n) {
  require(n >= 0, ErrorKind::domain, "degree must be nonnegative");
  return norm_raw(p.alpha, p.beta, n);
}

double jacobi_function_eval(const JacobiParams& p, int n, double x) {
  require(x >= -1.0 && x <= 1.0, ErrorKind::domain, "Jacobi function argument outside [-1,1]");
  if ((x == 1.0 && p.alpha < 0.0) || (x == -1.0 && p.beta < 0.0))
    fail(ErrorKind::singular, "Jacobi function evaluated at a singular endpoint");
  return jacobi_function_eval(p, n, x, 1.0 - x, 1.0 + x);
}

double jacobi_function_eval(const JacobiParams& p, int n, double x, double one_minus_x,
                            double one_plus_x) {
  if ((one_minus_x == 0.0 && p.alpha < 0.0) || (one_plus_x == 0.0 && p.beta < 0.0))
    fail(ErrorKind::singular, "Jacobi function evaluated at a singular endpoint");
  return jacobi_eval(p, n, x) * std::pow(one_minus_x, 0.5 * p.alpha) *
         std::pow(one_plus_x, 0.5 * p.beta);
}

double growth_bound_probe(const JacobiParams& p, int n_max, int x_points) {
  require(p.q() >= -0.5, ErrorKind::regime, "growth bound requires max(alpha,beta) >= -1/2");
  require(n_max >= 2, ErrorKind::domain, "growth probe needs n_max >= 2");
  require(x_points >= 2, ErrorKind::domain, "growth probe needs at least two grid points");
  const double e = p.q() + 0.5;
  std::vector<double> vals(n_max + 1);
  double sup = 0.0;
  for (int i = 0; i < x_points; ++i) {
    const double x = -1.0 + 2.0 * i / (x_points - 1);
    jacobi_eval_all(p, x, vals);
    for (int n = 1; n <= n_max; ++n) sup = std::max(sup, std::abs(vals[n]) / std::pow(n, e));
  }
  return sup;
}

void RecurrenceTable::eval_all(double x, std::span<double> out) const {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = a[1] * x + b[1];
  for (std::size_t k = 2; k < out.size(); ++k)
    out[k] = (a[k] * x + b[k]) * out[k - 1] - c[k] * out[k - 2];
}

namespace {

std::shared_ptr<const RecurrenceTable> build_table(const JacobiParams& p, std::size_t n) {
  auto t = std::make_shared<RecurrenceTable>();
  t->params = p;
  const double al = p.alpha, be = p.beta;
  n = std::max<std::size_t>(n, 2);
  t->a.assign(n, 0.0);
  t->b.assign(n, 0.0);
  t->c.assign(n, 0.0);
  t->inv_norm.assign(n, 0.0);
  t->a[1] = 0.5 * (al + be + 2.0);
  t->b[1] = 0.5 * (al - be);
  for (std::size_t k = 2; k < n; ++k) {
    const Step st = recurrence_step(al, be, static_cast<int>(k));
    t->a[k] = st.a;
    t->b[k] = st.b;
    t->c[k] = st.c;
  }
  // h_0 and h_1 directly, then the ratio h_n / h_{n-1}, which avoids the
  // precision loss of large log-Gamma differences.
  double h = norm_raw(al, be, 0);
  t->inv_norm[0] = 1.0 / h;
  h = norm_raw(al, be, 1);
  t->inv_norm[1] = 1.0 / h;
  const double s = al + be;
  for (std::size_t k = 2; k < n; ++k) {
    const double kk = static_cast<double>(k);
    h *= (2.0 * kk + s - 1.0) / (2.0 * kk + s + 1.0) * (kk + al) * (kk + be) / (kk * (kk + s));
    t->inv_norm[k] = 1.0 / h;
  }
  return t;
}

}  // namespace

std::shared_ptr<const RecurrenceTable> recurrence_table(const JacobiParams& p, std::size_t n_terms) {
  static std::mutex mutex;
  static std::map<std::pair<double, double>, std::shared_ptr<const RecurrenceTable>> cache;
  const auto key = std::make_pair(p.alpha, p.beta);
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end() && it->second->size() >= n_terms) return it->second;
  }
  // Grow geometrically so that repeated requests do not rebuild each time.
  std::size_t target = std::max<std::size_t>(n_terms, 256);
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) target = std::max(target, 2 * it->second->size());
  }
  auto table = build_table(p, target);
  std::lock_guard lock(mutex);
  auto& slot = cache[key];
  if (!slot || slot->size() < table->size()) slot = table;
  return slot;
}

namespace {

// Eigenvalues of the symmetric tridiagonal matrix (diag d, off-diagonal e with
// e[i] coupling i and i+1) by the implicit QL method with Wilkinson shifts.
std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> e) {
  const int n = static_cast<int>(d.size());
  e.resize(n, 0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (++iter > 60) fail(ErrorKind::convergence, "tridiagonal eigensolver did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? r : -r));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace

QuadratureRule compute_gauss_jacobi(const JacobiParams& p, int n) {
  require(n >= 1, ErrorKind::domain, "quadrature order must be positive");
  const double al = p.alpha, be = p.beta, s = al + be;
  std::vector<double> diag(n), off(n, 0.0);
  for (int j = 0; j < n; ++j) {
    if (j == 0)
      diag[j] = (be - al) / (s + 2.0);
    else
      diag[j] = (be * be - al * al) / ((2.0 * j + s) * (2.0 * j + s + 2.0));
  }
  for (int j = 1; j < n; ++j) {
    double b2;
    if (j == 1) {
      b2 = 4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + s) * (2.0 + s) * (3.0 + s));
    } else {
      const double t = 2.0 * j + s;
      b2 = 4.0 * j * (j + al) * (j + be) * (j + s) / (t * t * (t + 1.0) * (t - 1.0));
    }
    off[j - 1] = std::sqrt(b2);
  }
  QuadratureRule rule;
  rule.nodes = tridiagonal_eigenvalues(std::move(diag), std::move(off));
  rule.weights.resize(n);
  std::vector<double> inv_h(n);
  for (int k = 0; k < n; ++k) inv_h[k] = 1.0 / norm_raw(al, be, k);
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) {
    double x = rule.nodes[i];
    for (int it = 0; it < 3; ++it) {
      const double f = eval_raw(al, be, n, x);
      const double df = 0.5 * (n + s + 1.0) * eval_raw(al + 1.0, be + 1.0, n - 1, x);
      if (df == 0.0) break;
      const double nx = x - f / df;
      if (!(nx > -1.0 && nx < 1.0)) break;
      const double step = std::abs(nx - x);
      x = nx;
      if (step < 1e-17) break;
    }
    rule.nodes[i] = x;
    jacobi_eval_all(p, x, vals);
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += vals[k] * vals[k] * inv_h[k];
    rule.weights[i] = 1.0 / sum;
  }
  return rule;
}

const QuadratureRule& gauss_jacobi(const JacobiParams& p, int n) {
  static std::mutex mutex;
  static std::map<std::tuple<double, double, int>, std::unique_ptr<QuadratureRule>> cache;
  const auto key = std::make_tuple(p.alpha, p.beta, n);
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  auto rule = std::make_unique<QuadratureRule>(compute_gauss_jacobi(p, n));
  std::lock_guard lock(mutex);
  auto& slot = cache[key];
  if (!slot) slot = std::move(rule);
  return *slot;
}

}  // namespace jw
