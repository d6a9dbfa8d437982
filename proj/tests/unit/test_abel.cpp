#include <doctest.h>

#include <cmath>
#include <vector>

#include "jacobi_watson/abel.hpp"
#include "jacobi_watson/errors.hpp"
#include "jacobi_watson/quadrature.hpp"

using namespace jw;

namespace {

// int_l^u g(x) (1-x)^a (1+x)^b dx by tanh-sinh with exact endpoint offsets.
double weighted_oracle(const std::function<double(double)>& g, double a, double b, double l, double u) {
  auto h = [&](double x, double dl, double du) {
    const double op = l == -1.0 ? dl : 1.0 + x;
    const double om = u == 1.0 ? du : 1.0 - x;
    return g(x) * std::pow(om, a) * std::pow(op, b);
  };
  return integrate_tanh_sinh_offsets(h, l, u, 1e-14, 14).value;
}

}  // namespace

TEST_CASE("coefficients of simple functions") {
  const JacobiParams leg(0, 0);
  const auto sq = test_functions::custom("x^2", [](double x) { return x * x; });
  const auto e = fourier_jacobi_coefficients(sq, leg, 4, 5);
  // x^2 = P_0/3 + 2 P_2/3.
  CHECK(e.coeffs[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(std::abs(e.coeffs[1]) < 1e-14);
  CHECK(e.coeffs[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(std::abs(e.coeffs[3]) < 1e-14);
  CHECK(std::abs(e.coeffs[4]) < 1e-14);

  const JacobiParams p(0.5, -0.3);
  const auto one = fourier_jacobi_coefficients(test_functions::constant(1.0), p, 8, 9);
  CHECK(one.coeffs[0] == doctest::Approx(1.0).epsilon(1e-13));
  for (int n = 1; n <= 8; ++n) CHECK(std::abs(one.coeffs[n]) < 1e-13);
  for (int k : {0, 3, 7}) {
    const auto pk = fourier_jacobi_coefficients(test_functions::jacobi_polynomial(p, k), p, 10, 11);
    for (int n = 0; n <= 10; ++n) CHECK(std::abs(pk.coeffs[n] - (n == k ? 1.0 : 0.0)) < 1e-12);
  }
  CHECK_THROWS_AS(fourier_jacobi_coefficients(sq, leg, 4, 4), Error);
}

TEST_CASE("step coefficients: closed form against quadrature and piecewise rules") {
  const JacobiParams p(0.5, -0.3);
  const auto sign = test_functions::sign();
  const auto exact = fourier_jacobi_coefficients(sign, p, 40, 0);
  CHECK(exact.method == CoefficientMethod::exact_steps);
  for (int n : {0, 1, 2, 5, 17, 40}) {
    auto Pn = [&](double x) { return jacobi_eval(p, n, x); };
    const double oracle = (weighted_oracle(Pn, p.alpha, p.beta, 0.0, 1.0) -
                           weighted_oracle(Pn, p.alpha, p.beta, -1.0, 0.0)) / jacobi_norm(p, n);
    CHECK(std::abs(exact.coeffs[n] - oracle) < 1e-12);
  }
  // Same function without the step structure goes through piecewise Gauss-Jacobi.
  const auto generic = test_functions::custom("sgn", [](double x) { return x < 0 ? -1.0 : 1.0; }, {0.0});
  const auto pw = fourier_jacobi_coefficients(generic, p, 40, 60);
  CHECK(pw.method == CoefficientMethod::piecewise_gauss_jacobi);
  for (int n = 0; n <= 40; ++n) CHECK(std::abs(pw.coeffs[n] - exact.coeffs[n]) < 1e-13);

  // Bessel's inequality.
  const auto e = fourier_jacobi_coefficients(sign, p, 2000, 0);
  double bessel = 0.0;
  for (int n = 0; n <= 2000; ++n) bessel += e.coeffs[n] * e.coeffs[n] * jacobi_norm(p, n);
  const double l2sq = std::pow(lp_norm(sign, p, 2.0), 2);
  CHECK(bessel <= l2sq * (1 + 1e-12));
  CHECK(bessel > 0.99 * l2sq);
}

TEST_CASE("weighted coefficients fold the weight into the rule") {
  const JacobiParams p(-0.5, 0.7);
  const auto F2 = test_functions::jacobi_function(p, 2);
  const auto e = fourier_jacobi_coefficients(F2, p, 6, 200);
  for (int n = 0; n <= 6; ++n) {
    auto g = [&](double x) { return jacobi_eval(p, 2, x) * jacobi_eval(p, n, x); };
    const double oracle = weighted_oracle(g, 1.5 * p.alpha, 1.5 * p.beta, -1.0, 1.0) / jacobi_norm(p, n);
    CHECK(std::abs(e.coeffs[n] - oracle) < 1e-12);
  }
}

TEST_CASE("partial sums") {
  const JacobiParams p(0.5, 0.5);
  const auto cubic = test_functions::custom("cubic", [](double x) { return 2 * x * x * x - x + 0.25; });
  const auto e = fourier_jacobi_coefficients(cubic, p, 6, 8);
  CHECK(partial_sum(e, 0, 0.3) == e.coeffs[0]);
  for (double x : {-1.0, -0.4, 0.0, 0.77, 1.0})
    CHECK(std::abs(partial_sum(e, 3, x) - cubic(x)) < 1e-10);
  CHECK_THROWS_AS(partial_sum(e, 7, 0.0), Error);

  // Dirichlet-kernel integral against e^x.
  const JacobiParams leg(0, 0);
  const auto ex = test_functions::exponential();
  const auto ee = fourier_jacobi_coefficients(ex, leg, 5, 30);
  for (double x : {-0.6, 0.2, 0.9}) {
    const double via_kernel =
        integrate_adaptive([&](double y) { return dirichlet_kernel(leg, 5, x, y) * std::exp(y); }, -1.0, 1.0).value;
    CHECK(std::abs(partial_sum(ee, 5, x) - via_kernel) < 1e-12);
  }
}

TEST_CASE("Abel means") {
  const JacobiParams p(0.5, -0.3);
  const auto one = test_functions::constant(1.0);
  for (double r : {0.2, 0.9, 0.999})
    for (double x : {-1.0, 0.1, 0.8}) CHECK(std::abs(abel_mean(one, p, r, x) - 1.0) < 1e-13);
  const auto P4 = test_functions::jacobi_polynomial(p, 4);
  for (double r : {0.3, 0.95})
    for (double x : {-0.7, 0.4})
      CHECK(std::abs(abel_mean(P4, p, r, x) - std::pow(r, 4) * jacobi_eval(p, 4, x)) < 1e-13);
  CHECK_THROWS_AS(abel_mean(one, p, 1.0, 0.0), Error);
  CHECK_THROWS_AS(abel_mean(one, p, 0.0, 0.0), Error);

  const auto sign = test_functions::sign();
  const JacobiParams leg(0, 0);
  CHECK(std::abs(abel_mean(sign, leg, 0.95, 0.5, AbelRoute::series) -
                 abel_mean(sign, leg, 0.95, 0.5, AbelRoute::kernel)) < 1e-6);
  for (const auto& f : test_functions::family(p))
    for (double x : {-0.9, 0.05, 0.6}) {
      const double s = abel_mean(f, p, 0.9, x, AbelRoute::series);
      const double k = abel_mean(f, p, 0.9, x, AbelRoute::kernel);
      CHECK_MESSAGE(std::abs(s - k) < 1e-7, f.tag << " x=" << x);
    }
}

TEST_CASE("modified Abel means") {
  const JacobiParams leg(0, 0);
  const auto bump = test_functions::bump();
  for (auto route : {ModifiedRoute::direct, ModifiedRoute::factored, ModifiedRoute::series})
    CHECK(std::abs(modified_abel_mean(bump, leg, 0.7, 0.1, route) - abel_mean(bump, leg, 0.7, 0.1)) < 1e-10);

  for (const JacobiParams p : {JacobiParams(-0.5, -0.5), JacobiParams(0.5, 1.0)}) {
    for (int k : {0, 2, 5}) {
      const auto Fk = test_functions::jacobi_function(p, k);
      for (double x : {-0.8, 0.3}) {
        const double want = std::pow(0.8, k) * jacobi_function_eval(p, k, x);
        CHECK(std::abs(modified_abel_mean(Fk, p, 0.8, x, ModifiedRoute::series) - want) < 1e-12);
        CHECK(std::abs(modified_abel_mean(Fk, p, 0.8, x, ModifiedRoute::direct) - want) < 1e-9);
      }
    }
  }
  const JacobiParams ch(-0.5, -0.5);
  const auto one = test_functions::constant(1.0);
  const double direct = modified_abel_mean(one, ch, 0.8, 0.3, ModifiedRoute::direct);
  const double factored = modified_abel_mean(one, ch, 0.8, 0.3, ModifiedRoute::factored);
  CHECK(std::abs(direct - factored) < 1e-8);
  CHECK(std::abs(modified_abel_mean(one, ch, 0.8, 0.3, ModifiedRoute::series) - factored) < 1e-8);
}

TEST_CASE("maximal function") {
  const JacobiParams p(0.5, 0.5);
  const auto grid = default_r_grid();
  CHECK(grid.size() == 12);
  CHECK(grid.front() == 0.5);
  CHECK(std::abs(jacobi_maximal(test_functions::constant(1.0), p, 0.2, grid) - 1.0) < 1e-13);
  const auto bump = test_functions::bump();
  for (double x : {-0.5, 0.0, 0.3}) {
    const double m = jacobi_maximal(bump, p, x, grid);
    for (double r : grid) CHECK(m >= abel_mean(bump, p, r, x));
  }
  const JacobiParams leg(0, 0);
  const auto ind = test_functions::indicator(0.4, 0.6);
  std::vector<double> coarse = default_r_grid(10), fine;
  for (int j = 2; j <= 20; ++j) fine.push_back(1.0 - std::pow(2.0, -0.5 * j));
  const double mc = jacobi_maximal(ind, leg, 0.5, coarse);
  const double mf = jacobi_maximal(ind, leg, 0.5, fine);
  CHECK(mf >= mc);
  CHECK(mf <= 1.01 * mc);
}

TEST_CASE("L^p convergence") {
  const JacobiParams p(0.5, -0.3);
  const auto P3 = test_functions::jacobi_polynomial(p, 3);
  const std::vector<double> rs{0.5, 0.9, 0.99};
  const auto norms = lp_convergence_probe(P3, p, 2.0, rs);
  for (std::size_t i = 0; i < rs.size(); ++i)
    CHECK(std::abs(norms[i] - (1 - std::pow(rs[i], 3)) * std::sqrt(jacobi_norm(p, 3))) < 1e-8);
  for (double v : lp_convergence_probe(test_functions::constant(1.0), p, 1.0, rs)) CHECK(v < 1e-13);

  // Parseval for a band-limited function.
  const auto poly = test_functions::custom("poly", [](double x) { return x * x * x * x - 0.5 * x; });
  const auto e = fourier_jacobi_coefficients(poly, p, 4, 5);
  for (double r : {0.6, 0.93}) {
    double parseval = 0.0;
    for (int n = 0; n <= 4; ++n) parseval += std::pow(std::pow(r, n) - 1, 2) * e.coeffs[n] * e.coeffs[n] * jacobi_norm(p, n);
    CHECK(std::abs(std::pow(lp_convergence_probe(poly, p, 2.0, {r})[0], 2) - parseval) < 1e-8);
  }

  const auto sign = test_functions::sign();
  const auto l1 = lp_convergence_probe(sign, JacobiParams(0, 0), 1.0, {0.9, 0.99, 0.999});
  CHECK(l1[0] > l1[1]);
  CHECK(l1[1] > l1[2]);
  CHECK(l1[2] < 0.01);
}

TEST_CASE("contraction for the test family") {
  for (const JacobiParams p : {JacobiParams(0, 0), JacobiParams(-0.5, 0.5)}) {
    for (const auto& f : test_functions::family(p)) {
      for (double pe : {1.0, 2.0, 4.0, double(INFINITY)}) {
        const double nf = lp_norm(f, p, pe);
        if (!std::isfinite(nf)) continue;
        for (double r : {0.5, 0.9, 0.99}) {
          const double nr = abel_lp_norm(f, p, r, pe);
          CHECK_MESSAGE(nr <= nf * (1 + 1e-8), f.tag << " p=" << pe << " r=" << r);
        }
      }
    }
  }
}

TEST_CASE("weak (1,1) probe") {
  const JacobiParams leg(0, 0);
  const auto one = test_functions::constant(1.0);
  const auto w1 = weak11_probe(one, leg, {0.25, 0.5, 0.99, 1.5}, 256, default_r_grid(6));
  CHECK(w1.ratios[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(w1.ratios[2] == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(w1.ratios[3] == 0.0);

  const auto bump = test_functions::bump(0.0, 0.05);
  std::vector<double> lambdas;
  for (int i = 0; i <= 10; ++i) lambdas.push_back(0.1 * std::pow(100.0, i / 10.0));
  const auto coarse = weak11_probe(bump, leg, lambdas, 1024, default_r_grid(10));
  const auto fine = weak11_probe(bump, leg, lambdas, 2048, default_r_grid(10));
  CHECK(std::isfinite(fine.worst_ratio));
  CHECK(fine.worst_ratio > 0.0);
  CHECK(fine.worst_ratio < 2 * coarse.worst_ratio);
  CHECK(coarse.worst_ratio < 2 * fine.worst_ratio);

  const auto twice = weak11_probe(bump.scaled(2.0), leg, [&] {
    std::vector<double> l2;
    for (double l : lambdas) l2.push_back(2 * l);
    return l2;
  }(), 1024, default_r_grid(10));
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    CHECK(twice.ratios[i] == doctest::Approx(coarse.ratios[i]).epsilon(1e-12));
}
