#include <doctest.h>

#include <cmath>
#include <numbers>

#include "jacobi_watson/errors.hpp"
#include "jacobi_watson/estimates.hpp"
#include "jacobi_watson/harmonic.hpp"

using namespace jw;

namespace {

// (1-r) int_k^2 F(s, s - k) (s-k)^{-1/2} ds by tanh-sinh in s, independent of
// the library's u-substitution.
template <class F>
double s_oracle(const AbelParameter& ab, F F_s) {
  auto g = [&](double s, double sk, double) { return F_s(s, sk) / std::sqrt(sk); };
  return (1.0 - ab.r) * integrate_tanh_sinh_offsets(g, ab.k, 2.0, 1e-14).value;
}

// Nested tanh-sinh oracle for int_0^1 L(r,x,y) (1-y)^alpha dy, split at y = x.
double mainest_oracle(double alpha, const AbelParameter& ab, double x) {
  auto L = [&](double y) {
    const double m = std::min(x, y), d2 = (x - y) * (x - y);
    return s_oracle(ab, [&](double, double sk) {
      const double s1 = ab.k_minus_one + sk, sm = ab.k_minus_one + (1.0 - m) + sk;
      return std::pow(sm, 1.0 - alpha) / std::pow(d2 + s1 * sm, 1.5);
    });
  };
  auto g = [&](double y, double, double one_minus_y) { return L(y) * std::pow(one_minus_y, alpha); };
  return integrate_tanh_sinh_offsets(g, 0.0, x, 1e-10).value + integrate_tanh_sinh_offsets(g, x, 1.0, 1e-10).value;
}

}  // namespace

TEST_CASE("Poisson-type kernels: shape and masses") {
  for (auto tag : {PoissonTag::k1, PoissonTag::k2, PoissonTag::k3, PoissonTag::k4}) {
    const PoissonTypeKernel k{tag, 0.4};
    double prev = k(0.0);
    for (int i = 1; i <= 200; ++i) {
      const double x = 0.05 * i;
      CHECK(k(x) > 0.0);
      CHECK(k(x) == k(-x));
      CHECK(k(x) <= prev);
      prev = k(x);
    }
  }
  CHECK(poisson_mass(PoissonTag::k1).value == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(poisson_mass(PoissonTag::k2).value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(poisson_mass(PoissonTag::k3).value == doctest::Approx(std::numbers::pi).epsilon(1e-12));
  // int (1+x^2)^{-e} dx = sqrt(pi) Gamma(e - 1/2) / Gamma(e).
  for (double a : {-0.9, -0.5, 0.0, 1.7}) {
    const double e = 1.0 + 0.5 * a;
    const double oracle = std::sqrt(std::numbers::pi) * std::tgamma(e - 0.5) / std::tgamma(e);
    CHECK(poisson_mass(PoissonTag::k4, a).value == doctest::Approx(oracle).epsilon(1e-9));
  }
  CHECK_THROWS_AS(poisson_mass(PoissonTag::k4, -1.0), Error);
  CHECK(parse_poisson_tag("k3") == PoissonTag::k3);
  CHECK_THROWS_AS(parse_poisson_tag("k7"), Error);
}

TEST_CASE("L majorant against direct s quadrature") {
  for (auto [a, r, x, y] : {std::tuple{0.0, 0.9, 0.5, 0.5}, std::tuple{-0.5, 0.99, 0.9, 0.3},
                            std::tuple{1.7, 0.6, 0.1, -0.8}, std::tuple{0.5, 0.999, 1.0, 1.0}}) {
    const AbelParameter ab(r);
    const double m = std::min(x, y), d2 = (x - y) * (x - y);
    const double oracle = s_oracle(ab, [&](double, double sk) {
      const double s1 = ab.k_minus_one + sk, sm = ab.k_minus_one + (1.0 - m) + sk;
      return std::pow(sm, 1.0 - a) / std::pow(d2 + s1 * sm, 1.5);
    });
    CHECK(L_majorant(JacobiParams(a, 0.0), ab, x, y).value == doctest::Approx(oracle).epsilon(1e-9));
  }
  // y = x: (s-x)^{-1/2-alpha} (s-1)^{-3/2}.
  const AbelParameter ab(0.9);
  const double diag = s_oracle(ab, [&](double s, double sk) {
    return std::pow(s - 0.5, -0.5) * std::pow(ab.k_minus_one + sk, -1.5);
  });
  CHECK(L_majorant(JacobiParams(0, 0), ab, 0.5, 0.5).value == doctest::Approx(diag).epsilon(1e-9));

  CHECK_THROWS_AS(L_majorant(JacobiParams(0, 0), AbelParameter(0.05), 0.5, 0.5), Error);
  CHECK_THROWS_AS(L_majorant(JacobiParams(0, 0), ab, -0.1, 0.5), Error);
}

TEST_CASE("dyadic majorant") {
  const JacobiParams p(0.5, -0.3);
  const AbelParameter ab(0.95);
  const double x = 0.4;
  const DyadicMajorant D(p, ab, x);
  CHECK(D.phi() >= ab.k_minus_one);
  CHECK(D.phi() <= ab.k - x);
  for (int n = 1; n <= D.n_max(); ++n) {
    CHECK(D.interval(n).left <= D.interval(n - 1).left);
    CHECK(D.interval(n).right >= D.interval(n - 1).right);
  }
  // Direct truncated sum, far past the point where I_n is all of [-1,1].
  const auto J = WeightedMeasure::jacobi(0.5, -0.3);
  for (double y : {0.4, 0.41, 0.6, -0.9}) {
    double sum = 0.0;
    for (int n = 0; n < 200; ++n) {
      const double h = std::ldexp(D.phi(), n);
      if (std::abs(y - x) <= h) sum += std::exp2(-0.5 * n) / J.interval_mass(std::max(-1.0, x - h), std::min(1.0, x + h));
    }
    CHECK(D(y) == doctest::Approx(sum).epsilon(1e-12));
  }

  const auto fit = fit_dyadic_majorant(p, {0.6, 0.9, 0.99}, 9);
  CHECK(std::isfinite(fit.fine));
  CHECK(fit.fine >= fit.coarse);
  CHECK(fit.variation() < 0.25);
}

TEST_CASE("basic inequality K <= C (1 + L)") {
  for (double a : {-0.5, 0.0, 1.7}) {
    const auto fit = fit_basic_inequality(JacobiParams(a, 0.5), {0.6, 0.9, 0.99}, 9);
    CHECK(std::isfinite(fit.fine));
    CHECK(fit.fine >= fit.coarse);
    CHECK_MESSAGE(fit.variation() < 0.25, "alpha=" << a << " coarse=" << fit.coarse << " fine=" << fit.fine);
  }
}

TEST_CASE("s-integrals: closed forms and uniform bounds") {
  for (double r : {0.6, 0.9, 0.999})
    for (double x : {0.0, 0.5, 1.0}) {
      const AbelParameter ab(r);
      const auto v = estm_integrals(ab, x);
      const double u = std::sqrt(2.0 - ab.k);
      const double kx = ab.k_minus_one + (1.0 - x);
      CHECK(v.v1 == doctest::Approx((1 - r) * 2.0 * std::asinh(u / std::sqrt(kx))).epsilon(1e-11));
      const double q = std::sqrt(ab.k_minus_one);
      CHECK(v.v_proof == doctest::Approx((1 - r) * 2.0 / q * std::atan(u / q)).epsilon(1e-11));
      const double v2 = s_oracle(ab, [&](double, double sk) {
        return 1.0 / std::sqrt((ab.k_minus_one + sk) * (kx + sk));
      });
      CHECK(v.v2 == doctest::Approx(v2).epsilon(1e-10));
      if (x == 1.0) CHECK(v.v2 == doctest::Approx(v.v_proof).epsilon(1e-12));
    }
  // r_j = 1 - 2^{-j}: (1-r) pi / sqrt(k-1) -> pi sqrt(8) bounds all three.
  double sup = 0.0;
  for (int j = 1; j <= 12; ++j)
    for (double x : {0.0, 0.5, 0.9, 1.0}) {
      const auto v = estm_integrals(AbelParameter(1.0 - std::ldexp(1.0, -j)), x);
      sup = std::max({sup, v.v1, v.v2, v.v_proof});
    }
  CHECK(sup < std::numbers::pi * std::sqrt(8.0));
}

TEST_CASE("kernel shift") {
  std::vector<double> zs, as;
  for (int i = 0; i <= 100; ++i) zs.push_back(-10.0 + 0.2 * i);
  for (int i = 0; i < 100; ++i) as.push_back(-0.999 + 1.998 * i / 99.0);
  for (double eta : {1.1, 1.5, 3.0}) {
    const auto res = kernel_shift_check(eta, zs, as);
    CHECK(res.violations == 0);
    CHECK(res.points == 10100);
    CHECK(res.worst_outer <= res.const_outer);
    CHECK(res.worst_inner <= res.const_inner);
  }
  CHECK(kernel_shift_check(1.5, {0.0}, {1e-9}).worst_inner == doctest::Approx(1.0).epsilon(1e-12));
  const auto z5 = kernel_shift_check(1.5, {5.0}, {0.99});
  CHECK(z5.worst_outer <= 27.0 / 8.0);
  const auto z0 = kernel_shift_check(1.5, {0.0}, {0.99});
  CHECK(z0.worst_inner == doctest::Approx(std::pow(1.0 / (0.99 * 0.99 + 1.0), 1.5)).epsilon(1e-14));
  CHECK_THROWS_AS(kernel_shift_check(1.0, zs, as), Error);
  CHECK_THROWS_AS(kernel_shift_check(1.5, zs, {1.0}), Error);
}

TEST_CASE("main estimate") {
  const AbelParameter ab(0.9);
  const JacobiParams p0(0, 0);
  const double v = mainest_integral(p0, ab, 0.5).value;
  CHECK(v == doctest::Approx(mainest_oracle(0.0, ab, 0.5)).epsilon(1e-7));
  CHECK(mainest_integral(p0, ab, 0.5, {1e-5}).value == doctest::Approx(v).epsilon(0.02));

  // alpha = -0.5 near the endpoint; oracle with u = (1-y)^{1/2} on [x, 1].
  const AbelParameter ab99(0.99);
  const double x = 0.9;
  auto L = [&](double y) { return L_majorant(JacobiParams(-0.5, 0), ab99, x, y, {1e-300, 1e-13, 4000}).value; };
  const double left = integrate_adaptive([&](double y) { return L(y) / std::sqrt(1 - y); }, 0.0, x,
                                         {1e-300, 1e-10, 4000}).value;
  const double right = integrate_tanh_sinh([&](double u) { return 2.0 * L(1.0 - u * u); }, 0.0, std::sqrt(1 - x),
                                           1e-10).value;
  const auto hard = mainest_integral(JacobiParams(-0.5, 0), ab99, x);
  CHECK(std::isfinite(hard.value));
  CHECK(hard.value == doctest::Approx(left + right).epsilon(1e-6));

  const JacobiParams p17(1.7, 0);
  CHECK(mainest_integral(p17, ab, 0.3, {1e-10, false}).value ==
        doctest::Approx(mainest_integral(p17, ab, 0.3, {1e-10, true}).value).epsilon(1e-6));

  const auto sweep = mainest_sweep({-0.5, 0.0, 1.7}, {0.6, 0.9, 0.99}, {0.0, 0.5, 0.9});
  CHECK(sweep.finite());
  CHECK(sweep.factor() < 1.5);
  CHECK(!sweep.divergent());
}

TEST_CASE("J operators") {
  const JacobiParams p(0, 0);
  const AbelParameter ab(0.9);
  const auto one = test_functions::constant(1.0);
  CHECK(j_operator_apply(p, ab, one, 0.5, JSide::alpha).value ==
        doctest::Approx(mainest_integral(p, ab, 0.5).value).epsilon(1e-9));

  const auto bump = test_functions::bump(0.5, 0.1);
  for (double x : {0.0, 0.3, 0.5, 0.8}) {
    const double j1 = j_operator_apply(p, ab, bump, x, JSide::alpha).value;
    CHECK(j_operator_apply(p, ab, bump.scaled(2.0), x, JSide::alpha).value == doctest::Approx(2.0 * j1).epsilon(1e-9));
    const double m = hl_maximal(WeightedMeasure::jacobi(0, 0), bump, x, 10);
    CHECK(std::isfinite(j1 / m));
  }

  // J_beta at -x for (a, b) is J_alpha at x for (b, a) applied to f(-y).
  const JacobiParams q(0.5, -0.3), q_swapped(-0.3, 0.5);
  const auto e = test_functions::exponential();
  const auto e_mirror = test_functions::custom("exp(-y)", [&](double y) { return e(-y); });
  for (double x : {0.1, 0.7})
    CHECK(j_operator_apply(q, ab, e, -x, JSide::beta).value ==
          doctest::Approx(j_operator_apply(q_swapped, ab, e_mirror, x, JSide::alpha).value).epsilon(1e-9));
  CHECK_THROWS_AS(j_operator_apply(q, ab, e, 0.5, JSide::beta), Error);

  const auto sweep = joperator_sweep(0.0, {0.6, 0.9}, {0.0, 0.5, 0.9});
  CHECK(sweep.finite());
  CHECK(sweep.factor() < 2.0);
}

TEST_CASE("s, x, y estimates") {
  const auto checks = sxy_inequalities_check(20);
  for (const auto& c : checks) CHECK_MESSAGE(c.pass, c.name << " value=" << c.value << " bound=" << c.bound);
  CHECK(all_hard_pass(checks));
  // i) and ii) are equalities at the corner s = 1, x = y = 1.
  for (const auto& c : checks)
    if (c.name == "i" || c.name.rfind("ii.", 0) == 0) CHECK(c.value == 0.0);
}
