#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "jacobi_watson/errors.hpp"
#include "jacobi_watson/quadrature.hpp"

namespace jw {

struct Interval {
  double left = 0.0;
  double right = 0.0;
  double length() const { return right - left; }
  double midpoint() const { return 0.5 * (left + right); }
  bool contains(double x) const { return left <= x && x <= right; }
  bool operator==(const Interval&) const = default;
};

/// [k 2^{-j}, (k+1) 2^{-j}].
struct DyadicInterval {
  long long k = 0;
  int j = 0;
  double left() const { return std::ldexp(static_cast<double>(k), -j); }
  double right() const { return std::ldexp(static_cast<double>(k + 1), -j); }
  Interval interval() const { return {left(), right()}; }
  /// The dyadic triple [(k-1) 2^{-j}, (k+2) 2^{-j}].
  Interval tripled() const {
    return {std::ldexp(static_cast<double>(k - 1), -j), std::ldexp(static_cast<double>(k + 2), -j)};
  }
};

/// Density (x-a)^L (b-x)^R on [a,b]. Exponents may be any real; integrals
/// over intervals touching a non-integrable endpoint evaluate to +infinity.
/// Every family member (Jacobi, power, Lebesgue, and their products with
/// power weights) is of this form.
struct PowerDensity {
  double a = -1.0, b = 1.0;
  double left_exp = 0.0, right_exp = 0.0;

  double operator()(double x) const {
    double v = 1.0;
    if (left_exp != 0.0) v *= std::pow(x - a, left_exp);
    if (right_exp != 0.0) v *= std::pow(b - x, right_exp);
    return v;
  }
  PowerDensity times(const PowerDensity& w) const;
  PowerDensity power(double s) const { return {a, b, left_exp * s, right_exp * s}; }

  /// Integral of f(x) * density(x) over [l, r] within [a, b], with the
  /// substitution v = (x-a)^{L+1} (mirrored at b) for negative exponents.
  template <class F>
  QuadratureResult integrate(F&& f, double l, double r, const AdaptiveOptions& opt = {}) const;

  QuadratureResult integrate_with_breaks(const std::function<double(double)>& f, double l, double r,
                                         std::span<const double> breaks,
                                         const AdaptiveOptions& opt = {}) const;
  double mass(double l, double r) const;
};

/// An absolutely continuous measure on a compact interval.
class WeightedMeasure {
 public:
  static WeightedMeasure lebesgue(double a, double b);
  static WeightedMeasure jacobi(double alpha, double beta);
  /// x^a on [0,1], or |x|^a on [-1,0] when on_negative_side is set.
  static WeightedMeasure power(double a, bool on_negative_side = false);
  /// This measure multiplied by the power weight (x-a)^l (b-x)^r on the same support.
  WeightedMeasure weighted(double left_exp, double right_exp) const;
  static WeightedMeasure from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Parses "lebesgue", "lebesgue:a,b", "jacobi:0.5,0.5", "power:1", "power-neg:1".
  static WeightedMeasure parse(const std::string& spec);

  const PowerDensity& density() const { return density_; }
  double density(double x) const { return density_(x); }
  Interval support() const { return {density_.a, density_.b}; }
  double total_mass() const { return total_mass_; }
  const std::string& family() const { return family_; }
  const std::vector<double>& params() const { return params_; }

  /// G(x) = mass of [a, x].
  double cdf(double x) const;
  double interval_mass(double l, double r) const;
  double interval_mass(const Interval& I) const { return interval_mass(I.left, I.right); }
  /// Integral of f against the measure over [l, r].
  template <class F>
  QuadratureResult integrate(F&& f, double l, double r, const AdaptiveOptions& opt = {}) const {
    check_inside(l, r);
    return density_.integrate(std::forward<F>(f), l, r, opt);
  }
  QuadratureResult integrate(const std::function<double(double)>& f, double l, double r,
                             std::span<const double> breaks, const AdaptiveOptions& opt = {}) const {
    check_inside(l, r);
    return density_.integrate_with_breaks(f, l, r, breaks, opt);
  }

  /// Point s with mass(l, s) = mass(s, r), by bisection on the cdf.
  double split_point(const Interval& I) const;
  std::pair<Interval, Interval> equal_measure_split(const Interval& I) const;
  /// Point y on the given side of x (side < 0: left) with mass between x and y
  /// equal to the request, clipped to the support.
  double offset_by_mass(double x, double mass, int side) const;
  /// mu(3I clipped to the support) / mu(I), 3I the concentric triple.
  double doubling_ratio(const Interval& I) const;

  void check_inside(double l, double r) const;

 private:
  WeightedMeasure(std::string family, std::vector<double> params, PowerDensity d);
  std::string family_;
  std::vector<double> params_;
  std::string base_family_;
  PowerDensity density_;
  double total_mass_ = 0.0;
};

/// ((k+2)^{a+1} - (k-1)^{a+1}) / ((k+1)^{a+1} - k^{a+1}), computed without
/// cancellation for large k. Independent of j; requires a > -1 and k >= 2.
double dyadic_doubling_ratio_closed_form(double a, long long k, int j = 0);

/// Bracket [min(3, C_a), max(3, C_a)], C_a = 3^{a+1} / (2^{a+1} - 1).
std::pair<double, double> doubling_bracket(double a);

// ---------------------------------------------------------------------------

template <class F>
QuadratureResult PowerDensity::integrate(F&& f, double l, double r, const AdaptiveOptions& opt) const {
  QuadratureResult out;
  if (!(r > l)) return out;
  const double L = left_exp, R = right_exp;
  if ((l == a && L <= -1.0) || (r == b && R <= -1.0)) {
    out.value = std::numeric_limits<double>::infinity();
    out.converged = false;
    return out;
  }
  const bool sub_left = L < 0.0 && (l - a) <= (r - l);
  const bool sub_right = R < 0.0 && (b - r) <= (r - l);
  auto plain = [&](double lo, double hi) {
    return integrate_adaptive([&](double x) { return f(x) * (*this)(x); }, lo, hi, opt);
  };
  // Left piece via v = (x-a)^{L+1}/(L+1); dx (x-a)^L = dv.
  auto left_piece = [&](double lo, double hi) {
    const double e = L + 1.0;
    const double v0 = std::pow(lo - a, e) / e, v1 = std::pow(hi - a, e) / e;
    auto g = [&](double v) {
      const double t = std::pow(e * v, 1.0 / e);
      const double x = a + t;
      double w = 1.0;
      if (R != 0.0) w = std::pow(b - x, R);
      return f(x) * w;
    };
    return integrate_adaptive(g, v0, v1, opt);
  };
  auto right_piece = [&](double lo, double hi) {
    const double e = R + 1.0;
    const double v0 = std::pow(b - hi, e) / e, v1 = std::pow(b - lo, e) / e;
    auto g = [&](double v) {
      const double t = std::pow(e * v, 1.0 / e);
      const double x = b - t;
      double w = 1.0;
      if (L != 0.0) w = std::pow(x - a, L);
      return f(x) * w;
    };
    return integrate_adaptive(g, v0, v1, opt);
  };
  if (sub_left && sub_right) {
    const double m = 0.5 * (l + r);
    out += left_piece(l, m);
    out += right_piece(m, r);
  } else if (sub_left) {
    out += left_piece(l, r);
  } else if (sub_right) {
    out += right_piece(l, r);
  } else {
    out += plain(l, r);
  }
  return out;
}

}  // namespace jw
