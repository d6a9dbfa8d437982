#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "jacobi_watson/kernels.hpp"
#include "jacobi_watson/measure.hpp"
#include "jacobi_watson/polynomials.hpp"
#include "jacobi_watson/test_functions.hpp"

namespace jw {

enum class CoefficientMethod { exact_steps, gauss_jacobi, piecewise_gauss_jacobi };
std::string_view to_string(CoefficientMethod m);

/// Fourier-Jacobi coefficients c(0..N) of a function.
struct Expansion {
  JacobiParams params;
  std::vector<double> coeffs;
  CoefficientMethod method = CoefficientMethod::gauss_jacobi;
  int N() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// c(n) = (1/h_n) int f P_n dJ for n <= N. Piecewise-constant functions use
/// closed-form integrals of P_n over each piece; otherwise Gauss-Jacobi with
/// `nodes` points (per piece when f has breakpoints, with the endpoint
/// weights of f folded into the rule).
Expansion fourier_jacobi_coefficients(const TestFunction& f, const JacobiParams& p, int N, int nodes);

/// Expansion long enough for Abel means at parameter r (cached per function
/// tag and parameter pair). Smooth functions are expanded to numerical
/// convergence; others are truncated where r^n falls below 1e-16.
std::shared_ptr<const Expansion> expansion_for(const TestFunction& f, const JacobiParams& p, double r);

/// sum_{n<=m} c(n) P_n(x).
double partial_sum(const Expansion& e, int m, double x);
/// sum_n r^n c(n) P_n(x).
double abel_sum(const Expansion& e, double r, double x);

enum class AbelRoute { series, kernel };
/// Abel mean f(r, x), by the coefficient series or by integrating the
/// Watson kernel against f.
double abel_mean(const TestFunction& f, const JacobiParams& p, double r, double x,
                 AbelRoute route = AbelRoute::series);

enum class ModifiedRoute { direct, factored, series };
/// Integral of the modified Watson kernel against f in Lebesgue measure.
/// direct: tanh-sinh in dy of K~ f; factored: the weight factors pulled out
/// and folded into the quadrature measure; series: Jacobi-function series.
double modified_abel_mean(const TestFunction& f, const JacobiParams& p, double r, double x,
                          ModifiedRoute route = ModifiedRoute::series);

/// r_j = 1 - 2^{-j}, j = 1..levels.
std::vector<double> default_r_grid(int levels = 12);
/// max over the grid of |f(r, x)|.
double jacobi_maximal(const TestFunction& f, const JacobiParams& p, double x, const std::vector<double>& r_grid);

/// ||f||_{p, alpha, beta}; p_exp = infinity gives the sampled sup.
double lp_norm(const TestFunction& f, const JacobiParams& p, double p_exp);
/// ||f(r, .)||_{p, alpha, beta}.
double abel_lp_norm(const TestFunction& f, const JacobiParams& p, double r, double p_exp);
/// ||f(r, .) - f||_{p, alpha, beta} for each r.
std::vector<double> lp_convergence_probe(const TestFunction& f, const JacobiParams& p, double p_exp,
                                         const std::vector<double>& r_sequence);

/// Lebesgue L^2 norms of f and of the modified Abel means.
double lebesgue_l2_norm(const TestFunction& f);
double modified_abel_l2_norm(const TestFunction& f, const JacobiParams& p, double r);

struct Weak11Result {
  double worst_ratio = 0.0;
  std::vector<double> ratios;  // per lambda
  double l1_norm = 0.0;
};
/// lambda * J{x : f*(x) > lambda} / ||f||_1, with f* the maximal function over
/// r_grid evaluated at the midpoints of x_cells uniform cells and the level
/// set measured by exact cell masses.
Weak11Result weak11_probe(const TestFunction& f, const JacobiParams& p, const std::vector<double>& lambda_grid,
                          int x_cells, const std::vector<double>& r_grid);

}  // namespace jw
