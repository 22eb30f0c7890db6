#include "efie/splines.hpp"

#include <algorithm>
#include <cmath>

namespace efie {

KnotVector KnotVector::bezier(int p) {
  KnotVector kv;
  kv.degree = p;
  kv.knots.assign(p + 1, 0.0);
  kv.knots.insert(kv.knots.end(), p + 1, 1.0);
  return kv;
}

KnotVector KnotVector::uniform_open(int p, int elems, int interior_multiplicity) {
  KnotVector kv;
  kv.degree = p;
  kv.knots.assign(p + 1, 0.0);
  for (int j = 1; j < elems; ++j)
    kv.knots.insert(kv.knots.end(), interior_multiplicity, static_cast<double>(j) / elems);
  kv.knots.insert(kv.knots.end(), p + 1, 1.0);
  return kv;
}

void KnotVector::validate() const {
  if (degree < 0) throw argument_error("knot vector: negative degree");
  const int m = static_cast<int>(knots.size());
  if (m < 2 * (degree + 1)) throw argument_error("knot vector: too few knots");
  for (int i = 0; i + 1 < m; ++i)
    if (knots[i] > knots[i + 1]) throw argument_error("knot vector: knots not non-decreasing");
  for (int i = 0; i <= degree; ++i)
    if (knots[i] != 0.0 || knots[m - 1 - i] != 1.0)
      throw argument_error("knot vector: not p-open on [0,1]");
}

namespace {

// b_i^0 with the closed-interval convention at x = 1.
double b0(const std::vector<double>& knots, int i, double x) {
  if (x == 1.0) return (knots[i] < 1.0 && knots[i + 1] == 1.0) ? 1.0 : 0.0;
  return (knots[i] <= x && x < knots[i + 1]) ? 1.0 : 0.0;
}

double cox_de_boor(const std::vector<double>& knots, int p, int i, double x) {
  if (p == 0) return b0(knots, i, x);
  double left = 0.0, right = 0.0;
  const double dl = knots[i + p] - knots[i];
  if (dl > 0.0) left = (x - knots[i]) / dl * cox_de_boor(knots, p - 1, i, x);
  const double dr = knots[i + p + 1] - knots[i + 1];
  if (dr > 0.0) right = (knots[i + p + 1] - x) / dr * cox_de_boor(knots, p - 1, i + 1, x);
  return left + right;
}

}  // namespace

double bspline_value(const KnotVector& kv, int i, double x) {
  if (i < 0 || i >= kv.num_basis()) throw argument_error("bspline_value: index out of range");
  if (x < 0.0 || x > 1.0) throw argument_error("bspline_value: x outside [0,1]");
  return cox_de_boor(kv.knots, kv.degree, i, x);
}

double bspline_derivative(const KnotVector& kv, int i, double x) {
  if (i < 0 || i >= kv.num_basis()) throw argument_error("bspline_derivative: index out of range");
  if (x < 0.0 || x > 1.0) throw argument_error("bspline_derivative: x outside [0,1]");
  const int p = kv.degree;
  if (p == 0) return 0.0;
  double term = 0.0;
  const double dl = kv.knots[i + p] - kv.knots[i];
  if (dl > 0.0) term += cox_de_boor(kv.knots, p - 1, i, x) / dl;
  const double dr = kv.knots[i + p + 1] - kv.knots[i + 1];
  if (dr > 0.0) term -= cox_de_boor(kv.knots, p - 1, i + 1, x) / dr;
  return p * term;
}

int find_span(const KnotVector& kv, double x) {
  const int k = kv.num_basis();
  const int p = kv.degree;
  if (x >= kv.knots[k]) {  // x = 1: last non-empty span
    int s = k - 1;
    while (s > p && kv.knots[s] == kv.knots[s + 1]) --s;
    return s;
  }
  // binary search for xi_s <= x < xi_{s+1}
  int lo = p, hi = k;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    if (x < kv.knots[mid])
      hi = mid;
    else
      lo = mid;
  }
  return lo;
}

SpanValues bspline_nonzero(const KnotVector& kv, double x) {
  if (x < 0.0 || x > 1.0) throw argument_error("bspline_nonzero: x outside [0,1]");
  const int p = kv.degree;
  const int span = find_span(kv, x);
  SpanValues out;
  out.first = span - p;
  out.values.assign(p + 1, 0.0);
  out.values[0] = 1.0;
  std::vector<double> left(p + 1), right(p + 1);
  for (int j = 1; j <= p; ++j) {
    left[j] = x - kv.knots[span + 1 - j];
    right[j] = kv.knots[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = out.values[r] / (right[r + 1] + left[j - r]);
      out.values[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    out.values[j] = saved;
  }
  return out;
}

SpanValuesDerivs bspline_nonzero_derivs(const KnotVector& kv, double x) {
  const int p = kv.degree;
  SpanValuesDerivs out;
  const SpanValues vals = bspline_nonzero(kv, x);
  out.first = vals.first;
  out.values = vals.values;
  out.derivs.assign(p + 1, 0.0);
  if (p == 0) return out;

  // degree p-1 triangle on the same span
  const int span = vals.first + p;
  std::vector<double> lower(p, 0.0);
  lower[0] = 1.0;
  std::vector<double> left(p), right(p);
  for (int j = 1; j <= p - 1; ++j) {
    left[j] = x - kv.knots[span + 1 - j];
    right[j] = kv.knots[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = lower[r] / (right[r + 1] + left[j - r]);
      lower[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    lower[j] = saved;
  }
  // N'_{first+r} = p ( lower[r-1]/(xi_{i+p}-xi_i) - lower[r]/(xi_{i+p+1}-xi_{i+1}) )
  for (int r = 0; r <= p; ++r) {
    const int i = out.first + r;
    double d = 0.0;
    if (r > 0) {
      const double den = kv.knots[i + p] - kv.knots[i];
      if (den > 0.0) d += lower[r - 1] / den;
    }
    if (r < p) {
      const double den = kv.knots[i + p + 1] - kv.knots[i + 1];
      if (den > 0.0) d -= lower[r] / den;
    }
    out.derivs[r] = p * d;
  }
  return out;
}

KnotVector dyadic_refine(const KnotVector& kv, int level) {
  if (level < 0) throw argument_error("dyadic_refine: negative level");
  const int elems = 1 << level;
  return KnotVector::uniform_open(kv.degree, elems, 1);
}

}  // namespace efie
