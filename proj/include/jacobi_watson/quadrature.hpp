#pragma once

// Adaptive quadrature used throughout the library: a globally adaptive
// Gauss-Kronrod (7/15) integrator in the style of QUADPACK's QAG, and a
// double-exponential (tanh-sinh) rule for integrands with endpoint
// singularities of unknown strength.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace jw {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;

  QuadratureResult& operator+=(const QuadratureResult& other) {
    value += other.value;
    error += other.error;
    evaluations += other.evaluations;
    converged = converged && other.converged;
    return *this;
  }
};

struct AdaptiveOptions {
  double abs_tol = 1e-15;
  double rel_tol = 1e-13;
  int max_segments = 2000;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the 7-point rule embedded at odd Kronrod indices.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double abs_sum = std::abs(kronrod);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    kronrod += kKronrodWeights[j] * (f1[j] + f2[j]);
    abs_sum += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    asc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  asc *= std::abs(half);
  const double value = kronrod * half;
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * abs_sum * std::abs(half);
  if (roundoff > err) err = roundoff;
  return {a, b, value, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature of f over [a, b]. The segment
/// with the largest error estimate is bisected until the summed estimate is
/// below max(abs_tol, rel_tol * |value|) or max_segments is reached
/// (converged = false in that case).
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, const AdaptiveOptions& opt = {}) {
  QuadratureResult out;
  if (a == b) return out;
  std::priority_queue<detail::Segment> heap;
  auto first = detail::kronrod15(f, a, b);
  out.evaluations = 15;
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int segments = 1;
  std::vector<detail::Segment> frozen;
  double frozen_err = 0.0;
  while (total_err - frozen_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (heap.empty()) break;
    if (segments >= opt.max_segments) {
      out.converged = false;
      break;
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
      // Segment at machine resolution: keep its contribution, stop refining it.
      frozen.push_back(worst);
      frozen_err += worst.error;
      continue;
    }
    auto left = detail::kronrod15(f, worst.a, mid);
    auto right = detail::kronrod15(f, mid, worst.b);
    out.evaluations += 30;
    ++segments;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum for accuracy.
  double sum = 0.0, err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  for (const auto& s : frozen) {
    sum += s.value;
    err += s.error;
  }
  out.value = sum;
  out.error = err;
  if (frozen_err > 10.0 * std::max(opt.abs_tol, opt.rel_tol * std::abs(sum))) out.converged = false;
  return out;
}

/// Integrates over [a, b] split at the given interior breakpoints (points
/// outside (a, b) are ignored). Tolerances apply per piece.
template <class F>
QuadratureResult integrate_pieces(F&& f, double a, double b, std::span<const double> breakpoints,
                                  const AdaptiveOptions& opt = {}) {
  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  QuadratureResult out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    out += integrate_adaptive(f, cuts[i], cuts[i + 1], opt);
  return out;
}

/// Tanh-sinh quadrature over [a, b]. Integrand values at points that round
/// onto an endpoint are skipped, so algebraic endpoint singularities need no
/// special treatment by the caller.
QuadratureResult integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                                     double rel_tol = 1e-12, int max_level = 12);

/// Same rule for integrands that need the exact distances to the endpoints,
/// f(x, x - a, b - x). Near an endpoint x itself has rounded onto a grid of
/// spacing eps*|x|, while the distances keep full relative precision.
QuadratureResult integrate_tanh_sinh_offsets(const std::function<double(double, double, double)>& f,
                                             double a, double b, double rel_tol = 1e-12,
                                             int max_level = 12);

/// Gauss-Legendre nodes and weights on [a, b], computed by Newton iteration
/// on the Legendre recurrence.
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace jw
