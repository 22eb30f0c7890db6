#ifndef EFIE_SPLINES_HPP_
#define EFIE_SPLINES_HPP_

#include <vector>

#include "efie/types.hpp"

namespace efie {

/// A p-open knot vector on [0,1]: the first and last knot repeat p+1 times.
struct KnotVector {
  int degree = 0;
  std::vector<double> knots;

  /// Number of basis functions, #knots - p - 1.
  int num_basis() const { return static_cast<int>(knots.size()) - degree - 1; }

  /// Bezier knot vector [0,...,0,1,...,1] of the given degree.
  static KnotVector bezier(int p);

  /// p-open vector with `elems` uniform elements and the given interior
  /// knot multiplicity (1 = maximal smoothness, p = C^0, p+1 = broken).
  static KnotVector uniform_open(int p, int elems, int interior_multiplicity = 1);

  /// Throws argument_error if the p-open structure is violated.
  void validate() const;
};

/// b_i^p(x) by the Cox-de Boor recursion, 0/0 terms resolved to 0. At x = 1
/// the value is the left limit, so the basis still sums to one.
double bspline_value(const KnotVector& kv, int i, double x);

/// d/dx b_i^p(x) via the degree-reduction identity. Zero for p = 0.
double bspline_derivative(const KnotVector& kv, int i, double x);

/// Index of the knot span containing x (left-closed; x = 1 falls into the
/// last non-empty span).
int find_span(const KnotVector& kv, double x);

/// All p+1 basis functions that can be non-zero at x. values[j] is
/// b_{first+j}^p(x); the values sum to one.
struct SpanValues {
  int first = 0;
  std::vector<double> values;
};
SpanValues bspline_nonzero(const KnotVector& kv, double x);

/// Non-zero basis values and first derivatives at x in one pass.
struct SpanValuesDerivs {
  int first = 0;
  std::vector<double> values;
  std::vector<double> derivs;
};
SpanValuesDerivs bspline_nonzero_derivs(const KnotVector& kv, double x);

/// Knot vector of the same degree whose interior breakpoints are the dyadic
/// points j/2^level, each with multiplicity 1.
KnotVector dyadic_refine(const KnotVector& kv, int level);

}  // namespace efie

#endif  // EFIE_SPLINES_HPP_
