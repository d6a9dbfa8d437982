#pragma once

#include <functional>
#include <string>
#include <vector>

#include "jacobi_watson/kernels.hpp"
#include "jacobi_watson/measure.hpp"
#include "jacobi_watson/test_functions.hpp"

namespace jw {

/// Sorted window endpoints; the window family is every [g_i, g_j], i < j.
struct WindowGrid {
  std::vector<double> points;

  /// 2^level uniform cells on the support.
  static WindowGrid dyadic(const Interval& support, int level);
  /// n points clustered quadratically toward both ends (cosine spacing).
  static WindowGrid graded(const Interval& support, int n);
};

/// Non-centered maximal function over a window family, from prefix sums of
/// cell integrals. The evaluation point is inserted into the grid, so windows
/// ending exactly at x belong to the family.
class MaximalFunction {
 public:
  /// cell_integral(l, r) = int_l^r f dmu.
  MaximalFunction(const WeightedMeasure& m, std::function<double(double, double)> cell_integral, WindowGrid grid);
  MaximalFunction(const WeightedMeasure& m, const TestFunction& f, WindowGrid grid);

  double operator()(double x) const;
  /// Average over [l, r] of the integrated quantity (|f| for a TestFunction).
  double average(double l, double r) const;
  const WindowGrid& grid() const { return grid_; }

 private:
  const WeightedMeasure* measure_;
  std::function<double(double, double)> cell_integral_;
  WindowGrid grid_;
  std::vector<double> F_, M_;
};

/// f*_mu(x) over the dyadic window family of the given level.
double hl_maximal(const WeightedMeasure& m, const TestFunction& f, double x, int level = 10);

enum class Side { left, right };
/// Left: sup over l <= x < a of the average over [x, a]; right: sup over
/// a < x <= r of the average over [a, x]. Window ends are graded toward a
/// down to relative distance 2^-52.
double lateral_maximal(const WeightedMeasure& m, const TestFunction& f, double a, Side side);

// --- Calderon-Zygmund decomposition ---------------------------------------

struct CZOptions {
  int max_depth = 40;
  double min_mass_fraction = 1e-9;
};

struct CZInterval {
  double left, right;
  double mass;      // mu(I)
  double integral;  // int_I f dmu
  double average() const { return integral / mass; }
};

struct CZCheck {
  std::string name;
  double value, bound;
  bool pass;
};

struct CZDecomposition {
  double lambda = 0.0;
  double l1_norm = 0.0;
  /// The global average exceeded lambda; intervals holds the whole support.
  bool trivial = false;
  std::vector<CZInterval> intervals;
  /// Leaves where the recursion stopped without selecting; g takes their
  /// average there.
  std::vector<CZInterval> residual;
  double mass_G = 0.0;
  double mass_Gstar = 0.0;
  std::vector<Interval> Gstar;  // union of the tripled intervals, merged
  std::vector<CZCheck> checks;
  std::function<double(double)> f;

  bool in_G(double x) const;
  bool in_Gstar(double x) const;
  double good(double x) const;
  double bad(double x) const { return f(x) - good(x); }
  bool all_pass() const;
};

CZDecomposition cz_decompose(const WeightedMeasure& m, const TestFunction& f, double lambda, const CZOptions& opt = {});

// --- Zygmund lemma ---------------------------------------------------------

/// A kernel K(r, x, y) given row by row.
struct KernelFamily {
  std::string tag;
  std::function<std::function<double(double)>(double r, double x)> row;
  /// y-locations where the row changes quickly.
  std::function<std::vector<double>(double r, double x)> features;
};

/// Watson kernel rows for the given parameters (supported on [-1,1]).
KernelFamily watson_family(const JacobiParams& p);
/// (1/t) k2((x-y)/t) with t = 1-r and k2(u) = (1+u^2)^{-3/2}.
KernelFamily poisson_k2_family();

struct ZygmundConstants {
  double M1 = 0.0;
  double M2 = 0.0;
  double M() const { return M1 + 2.0 * M2; }
  /// M2 at each partition depth (finest last).
  std::vector<double> M2_by_depth;
  bool variation_converged = true;
};

/// M1 = max of int |K| dmu; M2 = max of the one-sided Stieltjes sums
/// sum mu(x, .) |K(y_i) - K(y_{i-1})|, with mu(x, .) averaged over the two
/// ends of each cell, on nested partitions of depth up to partition_depth
/// graded toward x.
ZygmundConstants zygmund_constants(const KernelFamily& K, const WeightedMeasure& m, const std::vector<double>& r_grid,
                                   const std::vector<double>& x_grid, int partition_depth = 12);

struct BoundCheck {
  double worst_ratio = 0.0;
  /// Largest |int K f dmu| / f*(x) seen (an empirical constant).
  double fitted = 0.0;
  int points = 0;
};

/// max |int K f dmu| / (M f*_mu(x)) over the grids.
BoundCheck zygmund_bound_check(const KernelFamily& K, const WeightedMeasure& m, const TestFunction& f,
                               const ZygmundConstants& c, const std::vector<double>& r_grid,
                               const std::vector<double>& x_grid);

/// For x outside G*_lambda: max sup_r |int K f dmu| / (C lambda) with
/// C = 2 M1 + 8 M2. `fitted` is max sup_r |int K f dmu| / lambda.
BoundCheck proposition_check(const KernelFamily& K, const WeightedMeasure& m, const TestFunction& f, double lambda,
                             const ZygmundConstants& c, const std::vector<double>& r_grid,
                             const std::vector<double>& x_grid);

// --- Muckenhoupt constants -------------------------------------------------

/// A weight (x-a)^l (b-x)^r on the support of the measure it is used with.
struct PowerWeight {
  double left_exp = 0.0;
  double right_exp = 0.0;
  double operator()(const Interval& support, double x) const;
};

struct WeightConstant {
  double value = 0.0;
  double coarse = 0.0;  // same quantity on the half-size family
  bool divergent = false;
};

/// sup over windows of (avg w)(avg w^{-1/(p-1)})^{p-1}, on the graded grid
/// with n points and on the nested (n+1)/2 point grid (n = 2^k + 1 keeps
/// the two nested); divergent when the sup is infinite or grows by more than
/// 1.5 between the two.
WeightConstant ap_constant(const PowerWeight& w, const WeightedMeasure& m, double p_exp, int n = 513);

/// max over x_grid of w*_mu(x) / w(x), with the graded window family of n
/// points (and (n+1)/2 for `coarse`).
WeightConstant a1_constant(const PowerWeight& w, const WeightedMeasure& m, const std::vector<double>& x_grid,
                           int n = 513);

}  // namespace jw
