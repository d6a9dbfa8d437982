#include <doctest.h>

#include <cmath>

#include "jacobi_watson/errors.hpp"
#include "jacobi_watson/kernels.hpp"
#include "jacobi_watson/measure.hpp"

using namespace jw;

namespace {

// sum_n r^n (n + 1/2) P_n(x), from the Legendre generating function.
double legendre_kernel_at_one(double r, double x) {
  return 0.5 * (1 - r * r) / std::pow(1 - 2 * r * x + r * r, 1.5);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("Dirichlet kernel") {
  const JacobiParams p(0.0, 0.0);
  CHECK(dirichlet_kernel(p, 0, 0.3, -0.2) == doctest::Approx(1.0 / jacobi_norm(p, 0)));
  double direct = 0.0;
  for (int n = 0; n <= 5; ++n) direct += jacobi_eval(p, n, 0.3) * jacobi_eval(p, n, -0.4) / jacobi_norm(p, n);
  CHECK(std::abs(dirichlet_kernel(p, 5, 0.3, -0.4) - direct) <= 1e-10);
  const JacobiParams q(1.7, -0.5);
  for (int m : {1, 4, 11}) {
    CHECK(dirichlet_kernel(q, m, 0.7, 0.7 + 1e-7) ==
          doctest::Approx(dirichlet_kernel_direct(q, m, 0.7, 0.7 + 1e-7)).epsilon(1e-10));
    CHECK(dirichlet_kernel(q, m, 0.3, -0.9) ==
          doctest::Approx(dirichlet_kernel_direct(q, m, 0.3, -0.9)).epsilon(1e-10));
    const auto& rule = gauss_jacobi(q, 20);
    double s = 0.0;
    for (int i = 0; i < rule.order(); ++i) s += rule.weights[i] * dirichlet_kernel(q, m, 0.25, rule.nodes[i]);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Appell F4") {
  CHECK(appell_f4(1.2, 0.7, 1.5, 2.5, 0.0, 0.0) == 1.0);
  // y = 0 reduces to a single hypergeometric sum.
  const double a1 = 1.25, a2 = 1.75, c1 = 1.5, x = 0.3;
  double term = 1.0, single = 1.0;
  for (int m = 0; m < 400; ++m) {
    term *= (a1 + m) * (a2 + m) / ((c1 + m) * (m + 1.0)) * x;
    single += term;
  }
  CHECK(appell_f4(a1, a2, c1, 0.5, x, 0.0) == doctest::Approx(single).epsilon(1e-14));
  // Symmetry F4(a,b;c1,c2;x,y) = F4(a,b;c2,c1;y,x).
  CHECK(appell_f4(1.1, 1.6, 0.5, 2.7, 0.2, 0.15) ==
        doctest::Approx(appell_f4(1.1, 1.6, 2.7, 0.5, 0.15, 0.2)).epsilon(1e-14));
  CHECK_THROWS_AS(appell_f4(1, 1, 1, 1, 0.5, 0.5), Error);
}

TEST_CASE("series kernel against the Legendre closed form") {
  const JacobiParams p(0, 0);
  for (double r : {0.1, 0.5, 0.9, 0.99})
    for (double x : {-0.9, 0.0, 0.5, 0.95}) {
      const auto k = watson_kernel_series(p, AbelParameter(r), x, 1.0);
      CHECK(rel(k.value, legendre_kernel_at_one(r, x)) <= 1e-11);
      CHECK(k.method == KernelMethod::series);
      CHECK(k.error_estimate >= 0.0);
    }
  CHECK(watson_kernel_series(p, AbelParameter(1e-9), 0.3, 0.4).value ==
        doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("Bailey representation") {
  const JacobiParams p(0, 0);
  const AbelParameter ab(0.5);
  const double s = watson_kernel_series(p, ab, 0, 0).value;
  CHECK(rel(watson_kernel_bailey(p, ab, 0, 0).value, s) <= 1e-8);
  const JacobiParams q(0.5, 0.5);
  const AbelParameter ab7(0.7);
  CHECK(rel(watson_kernel_bailey(q, ab7, 0.2, 0.1).value, watson_kernel_series(q, ab7, 0.2, 0.1).value) <=
        1e-8);
  // x = 1, y = -1: F4 reduces to 1, leaving the prefactor.
  const JacobiParams t(1.7, -0.5);
  const double pre = std::tgamma(3.2) * 0.5 / (std::pow(2.0, 2.2) * std::tgamma(2.7) * std::tgamma(0.5) *
                                               std::pow(1.5, 3.2));
  CHECK(watson_kernel_bailey(t, ab, 1.0, -1.0).value == doctest::Approx(pre).epsilon(1e-14));
  CHECK(rel(watson_kernel_series(t, ab, 1.0, -1.0).value, pre) <= 1e-10);
  // Nonnegativity on a grid inside the region.
  const AbelParameter ab9(0.9);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      const double x = -1 + 2 * (i + 0.5) / 50, y = -1 + 2 * (j + 0.5) / 50;
      if (BaileyArguments::make(ab9, x, y).margin > 0.02) CHECK(watson_kernel_bailey(t, ab9, x, y).value >= 0.0);
    }
  CHECK_THROWS_AS(watson_kernel_bailey(p, AbelParameter(0.999), 0.5, 0.5), Error);
}

TEST_CASE("Watson integral representation") {
  const JacobiParams p(0, 0);
  const AbelParameter ab(0.8);
  const double s = watson_kernel_series(p, ab, 0.3, 0.1).value;
  CHECK(rel(watson_kernel_integral(p, ab, 0.3, 0.1).value, s) <= 1e-4);
  CHECK(rel(watson_kernel_integral(p, ab, 0.1, 0.3).value, watson_kernel_integral(p, ab, 0.3, 0.1).value) <=
        1e-8);
  const JacobiParams q(-0.3, 0.1);
  const AbelParameter ab9(0.9);
  CHECK(rel(watson_kernel_integral(q, ab9, 0.6, -0.3).value, watson_kernel_series(q, ab9, 0.6, -0.3).value) <=
        1e-4);
  CHECK_THROWS_AS(watson_kernel_integral({-0.5, -0.5}, ab, 0.1, 0.2), Error);
  CHECK_THROWS_AS(watson_kernel_integral(p, AbelParameter(0.4), 0.1, 0.2), Error);
}

TEST_CASE("modified kernel") {
  const AbelParameter ab(0.8);
  CHECK(modified_watson_kernel({0, 0}, ab, 0.3, 0.2) == doctest::Approx(watson_kernel({0, 0}, ab, 0.3, 0.2).value));
  const JacobiParams p(-0.5, -0.5);
  const double w = std::pow(0.5 * 0.8, -0.25) * std::pow(1.5 * 1.2, -0.25);
  CHECK(modified_watson_kernel(p, ab, 0.5, 0.2) ==
        doctest::Approx(w * watson_kernel_series(p, ab, 0.5, 0.2).value).epsilon(1e-10));
  CHECK(modified_watson_kernel(p, ab, 0.5, 0.2) == doctest::Approx(modified_watson_kernel(p, ab, 0.2, 0.5)));
}

TEST_CASE("conservation") {
  CHECK(std::abs(kernel_mass({0, 0}, AbelParameter(0.5), 0.0) - 1.0) <= 1e-8);
  CHECK(std::abs(kernel_mass({0.5, -0.5}, AbelParameter(1e-6), 0.3) - 1.0) <= 1e-10);
  CHECK(std::abs(kernel_mass({1.7, -0.5}, AbelParameter(0.9), 0.99) - 1.0) <= 1e-6);
  CHECK(std::abs(kernel_mass({-0.5, 1.7}, AbelParameter(0.99), -0.5) - 1.0) <= 1e-6);
}

TEST_CASE("kernel row matches pointwise series") {
  const JacobiParams p(0.5, 1.7);
  const AbelParameter ab(0.95);
  const KernelRow row(p, ab, 0.4, 1e-14);
  for (double y : {-1.0, -0.3, 0.39, 0.4, 0.9})
    CHECK(row(y) == doctest::Approx(watson_kernel_series(p, ab, 0.4, y).value).epsilon(1e-11));
}

TEST_CASE("growth fit exponent") {
  CHECK(growth_fit({-0.7, -0.8}).e == 0.0);
  CHECK(growth_fit({1.7, 0.0}).e == doctest::Approx(2.2));
}
