// Internal: element-local Lagrange basis evaluation for the superspace.
#ifndef EFIE_SRC_SUPERSPACE_BASIS_HPP_
#define EFIE_SRC_SUPERSPACE_BASIS_HPP_

#include <vector>

#include "efie/spaces.hpp"

namespace efie::detail {

/// Lagrange polynomials on the given nodes, evaluated by product formulas.
/// Exactly interpolatory: value(a, nodes[b]) is 1 or 0 without rounding.
struct Lagrange {
  std::vector<double> nodes;

  double value(int a, double x) const {
    double r = 1.0;
    for (int b = 0; b < static_cast<int>(nodes.size()); ++b)
      if (b != a) r *= (x - nodes[b]) / (nodes[a] - nodes[b]);
    return r;
  }
  double deriv(int a, double x) const {
    const int m = static_cast<int>(nodes.size());
    double r = 0.0;
    for (int c = 0; c < m; ++c) {
      if (c == a) continue;
      double term = 1.0 / (nodes[a] - nodes[c]);
      for (int b = 0; b < m; ++b)
        if (b != a && b != c) term *= (x - nodes[b]) / (nodes[a] - nodes[b]);
      r += term;
    }
    return r;
  }
};

/// Scalar values and reference divergences (w.r.t. patch coordinates) of all
/// element-local superspace functions at element-local coordinates (a, b).
/// comp_of/col_of give the vector component of each local function.
struct LocalBasis {
  int p = 1;
  int nfun = 0;
  double n_scale = 1.0;  // elements per direction: d/du = n * d/da
  Lagrange hi, lo;
  std::vector<int> comp_of;

  explicit LocalBasis(const Superspace& ss) {
    p = ss.p;
    nfun = ss.funcs_per_element();
    n_scale = ss.mesh.n;
    hi.nodes = ss.nodes_hi;
    lo.nodes = ss.nodes_lo;
    comp_of.resize(nfun);
    for (int c = 0; c < 2; ++c) {
      const int mu = (c == 0) ? p + 1 : p;
      const int mv = (c == 0) ? p : p + 1;
      for (int bb = 0; bb < mv; ++bb)
        for (int aa = 0; aa < mu; ++aa) comp_of[ss.local_index(c, aa, bb)] = c;
    }
  }

  /// phi[I] and div[I] at (a,b); either pointer may be null.
  void eval(const Superspace& ss, double a, double b, double* phi, double* div) const {
    double hu[8], lu[8], hv[8], lv[8], dhu[8], dhv[8];
    for (int i = 0; i <= p; ++i) {
      hu[i] = hi.value(i, a);
      hv[i] = hi.value(i, b);
      if (div) {
        dhu[i] = hi.deriv(i, a);
        dhv[i] = hi.deriv(i, b);
      }
    }
    for (int i = 0; i < p; ++i) {
      lu[i] = lo.value(i, a);
      lv[i] = lo.value(i, b);
    }
    for (int bb = 0; bb < p; ++bb)
      for (int aa = 0; aa <= p; ++aa) {
        const int I = ss.local_index(0, aa, bb);
        if (phi) phi[I] = hu[aa] * lv[bb];
        if (div) div[I] = n_scale * dhu[aa] * lv[bb];
      }
    for (int bb = 0; bb <= p; ++bb)
      for (int aa = 0; aa < p; ++aa) {
        const int I = ss.local_index(1, aa, bb);
        if (phi) phi[I] = lu[aa] * hv[bb];
        if (div) div[I] = n_scale * lu[aa] * dhv[bb];
      }
  }
};

}  // namespace efie::detail

#endif  // EFIE_SRC_SUPERSPACE_BASIS_HPP_
