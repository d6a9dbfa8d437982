#include "jacobi_watson/quadrature.hpp"

#include <numbers>

namespace jw {

QuadratureResult integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                                     double rel_tol, int max_level) {
  // Abscissae that round onto an endpoint are dropped.
  auto g = [&](double x, double, double) { return x > a && x < b ? f(x) : 0.0; };
  return integrate_tanh_sinh_offsets(g, a, b, rel_tol, max_level);
}

QuadratureResult integrate_tanh_sinh_offsets(const std::function<double(double, double, double)>& f,
                                             double a, double b, double rel_tol, int max_level) {
  QuadratureResult out;
  if (a == b) return out;
  const double half = 0.5 * (b - a);
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  // Far enough out that the neglected end pieces stay below 1e-15 even for
  // (x-a)^{-0.9}; the offsets keep the tiny distances exact there.
  constexpr double kTMax = 6.0;

  // Contribution of abscissa t (and -t when t > 0) with unit step.
  auto node_sum = [&](double t) {
    const double u = kHalfPi * std::sinh(t);
    const double e2 = std::exp(-2.0 * u);
    const double w = 2.0 * std::numbers::pi * std::cosh(t) * e2 / ((1.0 + e2) * (1.0 + e2));
    if (!(w > 0.0) || !std::isfinite(w)) return 0.0;
    // 1 - tanh(u) without cancellation.
    const double complement = 2.0 * e2 / (1.0 + e2);
    double s = 0.0;
    const double d = half * complement;
    const double xr = b - d;
    if (d > 0.0) {
      s += w * f(xr, (b - a) - d, d);
      ++out.evaluations;
    }
    if (t > 0.0) {
      const double xl = a + d;
      if (d > 0.0) {
        s += w * f(xl, d, (b - a) - d);
        ++out.evaluations;
      }
    }
    return s;
  };

  double h = 1.0;
  double sum = 0.0;
  for (double t = 0.0; t <= kTMax; t += h) sum += node_sum(t);
  double estimate = half * h * sum;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    double fresh = 0.0;
    for (double t = h; t <= kTMax; t += 2.0 * h) fresh += node_sum(t);
    sum += fresh;
    const double next = half * h * sum;
    const double diff = std::abs(next - estimate);
    estimate = next;
    out.error = diff;
    if (level >= 3 && diff <= rel_tol * std::abs(next)) {
      out.value = next;
      return out;
    }
  }
  out.value = estimate;
  out.converged = out.error <= 100.0 * rel_tol * std::abs(estimate);
  return out;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p1 = x, p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Final derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = center - half * x;
    nodes[n - 1 - i] = center + half * x;
    weights[i] = weights[n - 1 - i] = half * w;
  }
}

}  // namespace jw
