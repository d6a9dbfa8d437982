#pragma once

#include <memory>
#include <span>
#include <vector>

namespace jw {

/// Exponent pair of the Jacobi weight (1-x)^alpha (1+x)^beta.
struct JacobiParams {
  double alpha = 0.0;
  double beta = 0.0;

  JacobiParams() = default;
  /// Throws a domain error unless both exponents exceed -1.
  JacobiParams(double a, double b);

  double q() const { return alpha > beta ? alpha : beta; }
  /// The pair with exponents exchanged, i.e. the weight reflected by x -> -x.
  JacobiParams swapped() const { return {beta, alpha}; }
  bool operator==(const JacobiParams&) const = default;
};

/// Abel variable k(r) = (sqrt(r) + 1/sqrt(r)) / 2.
double abel_k(double r);
/// k(r) - 1 = (1 - sqrt(r))^2 / (2 sqrt(r)), without cancellation.
double abel_k_minus_one(double r);

double log_gamma(double x);
double beta_function(double a, double b);
/// Generalized binomial coefficient binom(n + a, n) through log-Gamma.
double binomial_shifted(int n, double a);

/// P_n^{(alpha,beta)}(x) by the forward three-term recurrence.
double jacobi_eval(const JacobiParams& p, int n, double x);
/// Writes P_0(x), ..., P_{out.size()-1}(x).
void jacobi_eval_all(const JacobiParams& p, double x, std::span<double> out);
/// d/dx P_n^{(alpha,beta)}(x).
double jacobi_derivative(const JacobiParams& p, int n, double x);
/// h_n = integral of P_n^2 against the Jacobi measure.
double jacobi_norm(const JacobiParams& p, int n);
/// Jacobi function P_n(x) (1-x)^{alpha/2} (1+x)^{beta/2}. Throws a singular
/// error at an endpoint whose half exponent is negative.
double jacobi_function_eval(const JacobiParams& p, int n, double x);
/// Variant taking 1-x and 1+x separately, for arguments extremely close to
/// an endpoint.
double jacobi_function_eval(const JacobiParams& p, int n, double x, double one_minus_x,
                            double one_plus_x);

/// Sup over n in [1, n_max] and a dense x grid of |P_n(x)| / n^{q+1/2}.
/// Requires q >= -1/2 (regime error otherwise).
double growth_bound_probe(const JacobiParams& p, int n_max, int x_points = 2001);

/// Recurrence P_n = (a_n x + b_n) P_{n-1} - c_n P_{n-2} together with the
/// reciprocal norms for n = 0..size-1. Shared across threads once built.
struct RecurrenceTable {
  JacobiParams params;
  std::vector<double> a, b, c, inv_norm;

  std::size_t size() const { return inv_norm.size(); }
  /// Fills out[0..out.size()) with P_n(x); out.size() must not exceed size().
  void eval_all(double x, std::span<double> out) const;
};

/// Table with at least n_terms entries, cached per parameter pair.
std::shared_ptr<const RecurrenceTable> recurrence_table(const JacobiParams& p, std::size_t n_terms);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order() const { return static_cast<int>(nodes.size()); }
};

/// n-point Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta, exact for
/// polynomials of degree <= 2n-1. Rules are cached and immutable.
const QuadratureRule& gauss_jacobi(const JacobiParams& p, int n);

/// Uncached computation (Golub-Welsch eigenvalues, Newton polishing,
/// Christoffel weights).
QuadratureRule compute_gauss_jacobi(const JacobiParams& p, int n);

}  // namespace jw
