#include "jacobi_watson/measure.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace jw {

namespace {

const AdaptiveOptions kMassOptions{0.0, 1e-13, 4000};

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::domain, "cannot parse number '" + item + "'");
    }
  }
  return out;
}

}  // namespace

PowerDensity PowerDensity::times(const PowerDensity& w) const {
  require(w.a == a && w.b == b, ErrorKind::domain, "power weights must share the support");
  return {a, b, left_exp + w.left_exp, right_exp + w.right_exp};
}

QuadratureResult PowerDensity::integrate_with_breaks(const std::function<double(double)>& f, double l,
                                                     double r, std::span<const double> breaks,
                                                     const AdaptiveOptions& opt) const {
  std::vector<double> cuts{l};
  for (double c : breaks)
    if (c > l && c < r) cuts.push_back(c);
  cuts.push_back(r);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  QuadratureResult out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) out += integrate(f, cuts[i], cuts[i + 1], opt);
  return out;
}

double PowerDensity::mass(double l, double r) const {
  return integrate([](double) { return 1.0; }, l, r, kMassOptions).value;
}

WeightedMeasure::WeightedMeasure(std::string family, std::vector<double> params, PowerDensity d)
    : family_(std::move(family)), params_(std::move(params)), density_(d) {
  require(d.a < d.b, ErrorKind::domain, "measure support must be a nondegenerate interval");
  require(d.left_exp > -1.0 && d.right_exp > -1.0, ErrorKind::domain,
          "density exponents must exceed -1 for a finite measure");
  total_mass_ = density_.mass(d.a, d.b);
}

WeightedMeasure WeightedMeasure::lebesgue(double a, double b) {
  return WeightedMeasure("lebesgue", {}, PowerDensity{a, b, 0.0, 0.0});
}

WeightedMeasure WeightedMeasure::jacobi(double alpha, double beta) {
  require(alpha > -1.0 && beta > -1.0, ErrorKind::domain, "Jacobi exponents must exceed -1");
  return WeightedMeasure("jacobi", {alpha, beta}, PowerDensity{-1.0, 1.0, beta, alpha});
}

WeightedMeasure WeightedMeasure::power(double a, bool on_negative_side) {
  require(a > -1.0, ErrorKind::domain, "power exponent must exceed -1");
  if (on_negative_side) return WeightedMeasure("power-neg", {a}, PowerDensity{-1.0, 0.0, 0.0, a});
  return WeightedMeasure("power", {a}, PowerDensity{0.0, 1.0, a, 0.0});
}

WeightedMeasure WeightedMeasure::weighted(double left_exp, double right_exp) const {
  std::vector<double> p{static_cast<double>(params_.size())};
  p.insert(p.end(), params_.begin(), params_.end());
  p.push_back(left_exp);
  p.push_back(right_exp);
  WeightedMeasure out("product", std::move(p),
                      density_.times({density_.a, density_.b, left_exp, right_exp}));
  out.base_family_ = family_.rfind("product", 0) == 0 ? base_family_ : family_;
  return out;
}

nlohmann::json WeightedMeasure::to_json() const {
  nlohmann::json j;
  j["family"] = family_;
  j["params"] = params_;
  j["support"] = {density_.a, density_.b};
  if (family_ == "product") {
    j["base"] = base_family_;
    j["exponents"] = {density_.left_exp, density_.right_exp};
  }
  return j;
}

WeightedMeasure WeightedMeasure::from_json(const nlohmann::json& j) {
  try {
    const std::string family = j.at("family").get<std::string>();
    const auto params = j.value("params", std::vector<double>{});
    auto need = [&](std::size_t n) {
      require(params.size() == n, ErrorKind::domain, "wrong number of measure parameters");
    };
    if (family == "jacobi") {
      need(2);
      return jacobi(params[0], params[1]);
    }
    if (family == "power" || family == "power-neg") {
      need(1);
      return power(params[0], family == "power-neg");
    }
    if (family == "lebesgue") {
      double a = -1.0, b = 1.0;
      if (j.contains("support")) {
        a = j["support"].at(0).get<double>();
        b = j["support"].at(1).get<double>();
      }
      return lebesgue(a, b);
    }
    if (family == "product") {
      require(!params.empty(), ErrorKind::domain, "product measure needs parameters");
      const auto nb = static_cast<std::size_t>(params[0]);
      need(nb + 3);
      nlohmann::json base{{"family", j.at("base")},
                          {"params", std::vector<double>(params.begin() + 1, params.begin() + 1 + nb)}};
      if (j.contains("support")) base["support"] = j["support"];
      return from_json(base).weighted(params[nb + 1], params[nb + 2]);
    }
    fail(ErrorKind::domain, "unknown measure family '" + family + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::domain, std::string("malformed measure descriptor: ") + e.what());
  }
}

WeightedMeasure WeightedMeasure::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string family = spec.substr(0, colon);
  const std::vector<double> nums =
      colon == std::string::npos ? std::vector<double>{} : parse_numbers(spec.substr(colon + 1));
  if (family == "lebesgue") {
    if (nums.empty()) return lebesgue(-1.0, 1.0);
    require(nums.size() == 2, ErrorKind::domain, "lebesgue:a,b expects two numbers");
    return lebesgue(nums[0], nums[1]);
  }
  nlohmann::json j{{"family", family}, {"params", nums}};
  return from_json(j);
}

void WeightedMeasure::check_inside(double l, double r) const {
  if (!(l >= density_.a && r <= density_.b && l <= r))
    fail(ErrorKind::domain, "interval outside the measure support");
}

double WeightedMeasure::cdf(double x) const {
  check_inside(density_.a, x);
  return density_.mass(density_.a, x);
}

double WeightedMeasure::interval_mass(double l, double r) const {
  check_inside(l, r);
  return density_.mass(l, r);
}

double WeightedMeasure::split_point(const Interval& I) const {
  const double total = interval_mass(I);
  if (!(total > 0.0)) fail(ErrorKind::degenerate, "equal-measure split of a zero-mass interval");
  const double target = 0.5 * total;
  double lo = I.left, hi = I.right, mass_lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double m = mass_lo + density_.mass(lo, mid);
    if (m < target) {
      lo = mid;
      mass_lo = m;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi) > lo && 0.5 * (lo + hi) < hi ? 0.5 * (lo + hi) : hi;
}

std::pair<Interval, Interval> WeightedMeasure::equal_measure_split(const Interval& I) const {
  const double s = split_point(I);
  return {{I.left, s}, {s, I.right}};
}

double WeightedMeasure::offset_by_mass(double x, double mass, int side) const {
  const double edge = side < 0 ? density_.a : density_.b;
  if (mass <= 0.0) return x;
  const double available = side < 0 ? interval_mass(edge, x) : interval_mass(x, edge);
  if (mass >= available) return edge;
  double near = x, far = edge, acc = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (near + far);
    if (mid == near || mid == far) break;
    const double piece = side < 0 ? density_.mass(mid, near) : density_.mass(near, mid);
    if (acc + piece < mass) {
      near = mid;
      acc += piece;
    } else {
      far = mid;
    }
  }
  return far;
}

double WeightedMeasure::doubling_ratio(const Interval& I) const {
  const double m = interval_mass(I);
  if (!(m > 0.0)) fail(ErrorKind::degenerate, "doubling ratio of a zero-mass interval");
  const double len = I.length();
  const double l = std::max(density_.a, I.left - len);
  const double r = std::min(density_.b, I.right + len);
  return density_.mass(l, r) / m;
}

double dyadic_doubling_ratio_closed_form(double a, long long k, int j) {
  (void)j;
  require(a > -1.0, ErrorKind::domain, "power exponent must exceed -1");
  require(k >= 2, ErrorKind::domain, "dyadic index must be at least 2");
  const double kk = static_cast<double>(k);
  if (a == 0.0) return ((kk + 2.0) - (kk - 1.0)) / ((kk + 1.0) - kk);
  const double e = a + 1.0;
  // (k+2)^e - (k-1)^e = (k-1)^e expm1(e log1p(3/(k-1))), likewise below.
  const double scale = std::exp(e * std::log1p(-1.0 / kk));
  return scale * std::expm1(e * std::log1p(3.0 / (kk - 1.0))) / std::expm1(e * std::log1p(1.0 / kk));
}

std::pair<double, double> doubling_bracket(double a) {
  const double c = std::pow(3.0, a + 1.0) / (std::pow(2.0, a + 1.0) - 1.0);
  return {std::min(3.0, c), std::max(3.0, c)};
}

}  // namespace jw
