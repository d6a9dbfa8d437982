#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "jacobi_watson/polynomials.hpp"

namespace jw {

enum class KernelMethod { series, bailey, integral };
std::string_view to_string(KernelMethod m);

struct KernelEval {
  double value = 0.0;
  KernelMethod method = KernelMethod::series;
  double error_estimate = 0.0;
  long terms_or_nodes = 0;
};

/// Abel parameter r in (0,1) with k = (sqrt(r) + 1/sqrt(r)) / 2 > 1.
struct AbelParameter {
  double r;
  double k;
  double k_minus_one;
  explicit AbelParameter(double r);
};

/// Y, Z1, Z2 of the Watson representation at (s, x, y).
struct WatsonGeometry {
  double Y, Z1, Z2;
  static WatsonGeometry at(double s, double x, double y);
};

/// F4 arguments of the Bailey representation; the series is used only when
/// margin = 1 - (a+b)/k is positive.
struct BaileyArguments {
  double a, b, margin;
  static BaileyArguments make(const AbelParameter& ab, double x, double y);
};

/// Dirichlet kernel sum_{n<=m} P_n(x) P_n(y) / h_n via Christoffel-Darboux
/// (direct sum when |x - y| < 1e-6).
double dirichlet_kernel(const JacobiParams& p, int m, double x, double y);
double dirichlet_kernel_direct(const JacobiParams& p, int m, double x, double y);

struct F4Sum {
  double value = 0.0;
  int diagonals = 0;
  double last_diagonal = 0.0;
};

/// Appell F4(a1, a2; c1, c2; x, y) summed by anti-diagonals m + n = d. Stops
/// after three consecutive diagonal sums below tol * |partial|. Region error
/// unless sqrt|x| + sqrt|y| < 1; convergence error past max_diagonals.
F4Sum appell_f4_sum(double a1, double a2, double c1, double c2, double x, double y, double tol = 1e-16,
                    int max_diagonals = 5000);
double appell_f4(double a1, double a2, double c1, double c2, double x, double y, double tol = 1e-16);

/// Bound |P_n(x)| <= C n^e with e = max(q, -1/2) + 1/2 and C fitted once per
/// parameter pair (cached).
struct GrowthFit {
  double C;
  double e;
};
GrowthFit growth_fit(const JacobiParams& p);

/// Series sum_n r^n P_n(x) P_n(y) / h_n, truncated when the growth-bound tail
/// estimate drops below tol * |partial|. Convergence error beyond 1e5 terms.
KernelEval watson_kernel_series(const JacobiParams& p, const AbelParameter& ab, double x, double y,
                                double tol = 1e-15);
/// Bailey / Appell F4 representation. Region error when the margin is <= 0.
KernelEval watson_kernel_bailey(const JacobiParams& p, const AbelParameter& ab, double x, double y,
                                double tol = 1e-16);
/// Watson's integral representation, differentiated in r by central
/// differences. Requires alpha + beta > -1 and 1/2 < r < 1.
KernelEval watson_kernel_integral(const JacobiParams& p, const AbelParameter& ab, double x, double y);
/// Bailey when its margin exceeds 0.05, otherwise the series.
KernelEval watson_kernel(const JacobiParams& p, const AbelParameter& ab, double x, double y);
/// Kernel times (1-x)^{a/2} (1-y)^{a/2} (1+x)^{b/2} (1+y)^{b/2}.
double modified_watson_kernel(const JacobiParams& p, const AbelParameter& ab, double x, double y);

/// The kernel row y -> K(r, x, y) at fixed (r, x), with coefficients
/// r^n P_n(x) / h_n precomputed and the truncation chosen so that the
/// uniform tail is below abs_tol.
class KernelRow {
 public:
  KernelRow(const JacobiParams& p, const AbelParameter& ab, double x, double abs_tol = 1e-14);
  double operator()(double y) const;
  int terms() const { return static_cast<int>(coeff_.size()); }
  double tail_bound() const { return tail_; }

 private:
  std::shared_ptr<const RecurrenceTable> table_;
  std::vector<double> coeff_;
  double tail_ = 0.0;
};

/// Integral of K(r, x, y) against the Jacobi measure in y.
double kernel_mass(const JacobiParams& p, const AbelParameter& ab, double x);

}  // namespace jw
