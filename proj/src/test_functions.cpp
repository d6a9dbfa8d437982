#include "jacobi_watson/test_functions.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "jacobi_watson/errors.hpp"

namespace jw {

double TestFunction::operator()(double x, double one_minus_x, double one_plus_x) const {
  double v;
  if (!steps.empty()) {
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    v = steps[static_cast<std::size_t>(it - breakpoints.begin())];
  } else {
    v = smooth(x);
  }
  if (left_exp != 0.0) v *= std::pow(one_plus_x, left_exp);
  if (right_exp != 0.0) v *= std::pow(one_minus_x, right_exp);
  return v;
}

TestFunction TestFunction::scaled(double c) const {
  TestFunction out = *this;
  std::ostringstream os;
  os.precision(17);
  os << c << "*" << tag;
  out.tag = os.str();
  auto s = smooth;
  out.smooth = [s, c](double x) { return c * s(x); };
  for (double& v : out.steps) v *= c;
  if (c < 0.0) out.nonnegative = false;
  out.sup_abs = std::abs(c) * sup_abs;
  if (sup_on) {
    auto b = sup_on;
    if (c >= 0.0)
      out.sup_on = [b, c](double l, double r) { return c * b(l, r); };
    else
      out.sup_on = nullptr;
  }
  return out;
}

namespace test_functions {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

TestFunction from_steps(std::string tag, std::vector<double> breaks, std::vector<double> values) {
  TestFunction f;
  f.tag = std::move(tag);
  f.breakpoints = breaks;
  f.steps = values;
  f.smooth = [breaks, values](double x) {
    return values[static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), x) - breaks.begin())];
  };
  f.nonnegative = std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; });
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  f.sup_abs = m;
  f.sup_on = [breaks, values](double l, double r) {
    const auto lo = std::upper_bound(breaks.begin(), breaks.end(), l) - breaks.begin();
    const auto hi = std::lower_bound(breaks.begin(), breaks.end(), r) - breaks.begin();
    double s = -std::numeric_limits<double>::infinity();
    for (auto i = lo; i <= hi; ++i) s = std::max(s, values[static_cast<std::size_t>(i)]);
    return s;
  };
  return f;
}

}  // namespace

TestFunction constant(double c) {
  TestFunction f = from_steps(c == 1.0 ? "one" : "const:" + fmt(c), {}, {c});
  f.degree = 0;
  return f;
}

TestFunction sign() { return from_steps("sign", {0.0}, {-1.0, 1.0}); }

TestFunction indicator(double a, double b, double height) {
  require(a < b, ErrorKind::domain, "indicator needs a < b");
  std::string tag = "indicator:" + fmt(a) + "," + fmt(b);
  if (height != 1.0) tag = fmt(height) + "*" + tag;
  return from_steps(tag, {a, b}, {0.0, height, 0.0});
}

TestFunction jacobi_polynomial(const JacobiParams& p, int k) {
  require(k >= 0, ErrorKind::domain, "polynomial degree must be nonnegative");
  TestFunction f;
  f.tag = "P:" + std::to_string(k);
  f.identity = "@" + fmt(p.alpha) + "," + fmt(p.beta);
  f.smooth = [p, k](double x) { return jacobi_eval(p, k, x); };
  f.degree = k;
  f.nonnegative = k == 0;
  f.sup_abs = k == 0 ? 1.0 : std::max(std::abs(jacobi_eval(p, k, 1.0)), std::abs(jacobi_eval(p, k, -1.0)));
  if (p.q() < -0.5) f.sup_abs = std::numeric_limits<double>::infinity();
  return f;
}

TestFunction jacobi_function(const JacobiParams& p, int k) {
  TestFunction f = jacobi_polynomial(p, k);
  f.tag = "F:" + std::to_string(k);
  f.left_exp = 0.5 * p.beta;
  f.right_exp = 0.5 * p.alpha;
  f.sup_abs = std::numeric_limits<double>::infinity();
  return f;
}

TestFunction bump(double center, double width) {
  require(width > 0.0, ErrorKind::domain, "bump width must be positive");
  TestFunction f;
  f.tag = center == 0.0 && width == 0.1 ? "bump" : "bump:" + fmt(center) + "," + fmt(width);
  f.smooth = [center, width](double x) {
    const double t = (x - center) / width;
    return std::exp(-t * t);
  };
  f.nonnegative = true;
  f.sup_abs = 1.0;
  f.sup_on = [g = f.smooth, center](double l, double r) { return g(std::clamp(center, l, r)); };
  return f;
}

TestFunction endpoint_singular(double gamma, double clip) {
  require(gamma < 0.0 && clip > 1.0, ErrorKind::domain, "endpoint_singular needs gamma < 0 and clip > 1");
  TestFunction f;
  f.tag = gamma == -0.2 && clip == 10.0 ? "singular" : "singular:" + fmt(gamma) + "," + fmt(clip);
  const double knee = 1.0 - std::pow(clip, 1.0 / gamma);
  f.smooth = [gamma, clip](double x) { return std::min(std::pow(1.0 - x, gamma), clip); };
  // Graded cuts toward the knee keep each smooth piece well separated from
  // the singularity relative to its length.
  for (double d = 1.0 - knee; d < 0.5; d *= 10.0) f.breakpoints.push_back(1.0 - d);
  f.breakpoints.push_back(0.0);
  std::sort(f.breakpoints.begin(), f.breakpoints.end());
  f.nonnegative = true;
  f.sup_abs = clip;
  // Nondecreasing in x.
  f.sup_on = [g = f.smooth](double, double r) { return g(r); };
  return f;
}

TestFunction exponential() {
  TestFunction f;
  f.tag = "exp";
  f.smooth = [](double x) { return std::exp(x); };
  f.nonnegative = true;
  f.sup_abs = std::exp(1.0);
  f.sup_on = [](double, double r) { return std::exp(r); };
  return f;
}

TestFunction custom(std::string tag, std::function<double(double)> g, std::vector<double> breaks) {
  TestFunction f;
  static std::atomic<long> serial{0};
  f.tag = std::move(tag);
  f.identity = "#" + std::to_string(++serial);
  f.smooth = std::move(g);
  std::sort(breaks.begin(), breaks.end());
  f.breakpoints = std::move(breaks);
  return f;
}

TestFunction parse(const std::string& spec, const JacobiParams& p) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        args.push_back(std::stod(item));
      } catch (const std::exception&) {
        fail(ErrorKind::domain, "bad test-function argument '" + item + "'");
      }
    }
  }
  auto nargs = [&](std::size_t n) {
    require(args.size() == n, ErrorKind::domain, ("wrong argument count for test function " + name).c_str());
  };
  if (name == "one") return constant(1.0);
  if (name == "sign") return sign();
  if (name == "exp") return exponential();
  if (name == "const") {
    nargs(1);
    return constant(args[0]);
  }
  if (name == "indicator") {
    nargs(2);
    return indicator(args[0], args[1]);
  }
  if (name == "P" || name == "F") {
    nargs(1);
    const int k = static_cast<int>(args[0]);
    return name == "P" ? jacobi_polynomial(p, k) : jacobi_function(p, k);
  }
  if (name == "bump") {
    if (args.empty()) return bump();
    nargs(2);
    return bump(args[0], args[1]);
  }
  if (name == "singular") {
    if (args.empty()) return endpoint_singular();
    nargs(2);
    return endpoint_singular(args[0], args[1]);
  }
  fail(ErrorKind::domain, "unknown test function '" + spec + "'");
}

std::vector<TestFunction> family(const JacobiParams& p) {
  return {constant(1.0), sign(), jacobi_polynomial(p, 3), jacobi_function(p, 2), bump(), endpoint_singular()};
}

}  // namespace test_functions

}  // namespace jw
