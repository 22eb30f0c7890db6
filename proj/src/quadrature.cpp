#include "efie/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace efie {

namespace {

// Gauss-Legendre on [-1,1] by Newton iteration on P_q.
void gauss_legendre(int q, std::vector<double>& x, std::vector<double>& w) {
  x.resize(q);
  w.resize(q);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (q + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < q; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
      }
      pp = q * (t * p0 - p1) / (t * t - 1.0);
      const double dt = p0 / pp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[q - 1 - i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * pp * pp);
    w[q - 1 - i] = w[i];
  }
  if (q % 2 == 1) x[q / 2] = 0.0;
}

}  // namespace

QuadratureRule gauss_rule(int q) {
  if (q < 1 || q > 64) throw argument_error("gauss_rule: q out of range [1,64]");
  std::vector<double> x, w;
  gauss_legendre(q, x, w);
  QuadratureRule rule;
  rule.nodes.resize(1, q);
  rule.weights.resize(q);
  for (int i = 0; i < q; ++i) {
    rule.nodes(0, i) = 0.5 * (x[i] + 1.0);
    rule.weights(i) = 0.5 * w[i];
  }
  return rule;
}

QuadratureRule tensor_rule(int q, int dim) {
  const QuadratureRule g = gauss_rule(q);
  QuadratureRule rule;
  const int n = static_cast<int>(std::pow(q, dim) + 0.5);
  rule.nodes.resize(dim, n);
  rule.weights.resize(n);
  for (int flat = 0; flat < n; ++flat) {
    int rest = flat;
    double wt = 1.0;
    for (int d = 0; d < dim; ++d) {
      const int id = rest % q;
      rest /= q;
      rule.nodes(d, flat) = g.nodes(0, id);
      wt *= g.weights(id);
    }
    rule.weights(flat) = wt;
  }
  return rule;
}

PairCase classify_element_pair(const Mesh& mesh, int e1, int e2) {
  return classify_pair_config(mesh, e1, e2).pair_case;
}

Vec2 d4_apply(int k, double a, double b) {
  switch (k) {
    case 0: return {a, b};
    case 1: return {b, 1.0 - a};          // rot 90
    case 2: return {1.0 - a, 1.0 - b};    // rot 180
    case 3: return {1.0 - b, a};          // rot 270
    case 4: return {b, a};                // transpose
    case 5: return {1.0 - a, b};          // flip u
    case 6: return {1.0 - b, 1.0 - a};    // anti-transpose
    case 7: return {a, 1.0 - b};          // flip v
    default: throw argument_error("d4_apply: map index out of range");
  }
}

namespace {

// Local edges by corner slots of the (c00,c10,c01,c11) table.
struct LocalEdge {
  int slot0, slot1;  // endpoint slots in ascending edge-parameter order
  int to_canonical;  // d4 map sending the canonical south edge onto it
};
// south (v=0): corners 0-1, param u; north (v=1): 2-3; west (u=0): 0-2,
// param v; east (u=1): 1-3.
constexpr LocalEdge kEdges[4] = {
    {0, 1, 0},  // south: identity
    {2, 3, 7},  // north: (a,b) -> (a,1-b)
    {0, 2, 4},  // west: transpose maps (u,0) -> (0,u)
    {1, 3, 3},  // east: rot270 maps (u,0) -> (1,u)
};
// corner slot -> d4 map sending canonical corner (0,0) there
constexpr int kCornerMap[4] = {0, 5, 7, 2};

// compose d4 maps: result(k1 after k2)(x) = d4(k1, d4(k2, x)); tabulated.
int d4_compose(int outer, int inner) {
  static int table[8][8];
  static bool init = false;
  if (!init) {
    const double pts[2][2] = {{0.25, 0.5}, {0.5, 0.125}};
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) {
        table[a][b] = -1;
        for (int c = 0; c < 8; ++c) {
          bool match = true;
          for (auto& pt : pts) {
            const Vec2 inner_pt = d4_apply(b, pt[0], pt[1]);
            const Vec2 lhs = d4_apply(a, inner_pt[0], inner_pt[1]);
            const Vec2 rhs = d4_apply(c, pt[0], pt[1]);
            if ((lhs - rhs).norm() > 1e-12) match = false;
          }
          if (match) {
            table[a][b] = c;
            break;
          }
        }
      }
    init = true;
  }
  return table[outer][inner];
}

}  // namespace

PairConfig classify_pair_config(const Mesh& mesh, int e1, int e2) {
  PairConfig cfg;
  if (e1 == e2) {
    cfg.pair_case = PairCase::identical;
    return cfg;
  }
  const auto& c1 = mesh.corner_ids[e1];
  const auto& c2 = mesh.corner_ids[e2];
  int shared1[4], shared2[4], ns = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (c1[a] == c2[b]) {
        shared1[ns] = a;
        shared2[ns] = b;
        ++ns;
      }
  if (ns == 0) {
    cfg.pair_case = PairCase::far;
    return cfg;
  }
  if (ns == 1) {
    cfg.pair_case = PairCase::common_vertex;
    cfg.rot1 = kCornerMap[shared1[0]];
    cfg.rot2 = kCornerMap[shared2[0]];
    return cfg;
  }
  if (ns == 2) {
    cfg.pair_case = PairCase::common_edge;
    auto find_edge = [](int sa, int sb) {
      for (int e = 0; e < 4; ++e) {
        if ((kEdges[e].slot0 == sa && kEdges[e].slot1 == sb) ||
            (kEdges[e].slot0 == sb && kEdges[e].slot1 == sa))
          return e;
      }
      throw geometry_error("classify: two shared corners without a shared edge");
    };
    const int edge1 = find_edge(shared1[0], shared1[1]);
    const int edge2 = find_edge(shared2[0], shared2[1]);
    cfg.rot1 = kEdges[edge1].to_canonical;
    cfg.rot2 = kEdges[edge2].to_canonical;
    // match edge direction: the canonical-parameter-0 endpoints must carry
    // the same global id; otherwise pre-compose side 2 with a u-flip.
    const int id1_start = c1[kEdges[edge1].slot0];
    const int id2_start = c2[kEdges[edge2].slot0];
    if (id1_start != id2_start) cfg.rot2 = d4_compose(cfg.rot2, 5);
    return cfg;
  }
  throw geometry_error("classify: elements share more than one edge");
}

QuadratureRule regularized_rule(PairCase pair_case, int q) {
  if (pair_case == PairCase::far) return tensor_rule(q, 4);
  const QuadratureRule base = tensor_rule(q, 4);
  const int nb = base.size();
  int subdomains = 0;
  switch (pair_case) {
    case PairCase::identical: subdomains = 8; break;
    case PairCase::common_edge: subdomains = 6; break;
    case PairCase::common_vertex: subdomains = 4; break;
    default: throw argument_error("regularized_rule: unknown case");
  }
  QuadratureRule rule;
  rule.nodes.resize(4, subdomains * nb);
  rule.weights.resize(subdomains * nb);
  int out = 0;

  auto push = [&](double s1, double s2, double t1, double t2, double w) {
    rule.nodes(0, out) = s1;
    rule.nodes(1, out) = s2;
    rule.nodes(2, out) = t1;
    rule.nodes(3, out) = t2;
    rule.weights(out) = w;
    ++out;
  };

  if (pair_case == PairCase::identical) {
    // relative coordinates z = t - s over [-1,1]^2, sign quadrants split
    // into two Duffy triangles each.
    for (int k = 0; k < nb; ++k) {
      const double lam = base.nodes(0, k), eta = base.nodes(1, k);
      const double u1 = base.nodes(2, k), u2 = base.nodes(3, k);
      const double w0 = base.weights(k);
      for (int sgn1 : {-1, 1})
        for (int sgn2 : {-1, 1})
          for (int tri = 0; tri < 2; ++tri) {
            const double z1 = sgn1 * (tri == 0 ? lam : lam * eta);
            const double z2 = sgn2 * (tri == 0 ? lam * eta : lam);
            const double s1 = std::max(0.0, -z1) + u1 * (1.0 - std::abs(z1));
            const double s2 = std::max(0.0, -z2) + u2 * (1.0 - std::abs(z2));
            push(s1, s2, s1 + z1, s2 + z2,
                 w0 * lam * (1.0 - std::abs(z1)) * (1.0 - std::abs(z2)));
          }
    }
  } else if (pair_case == PairCase::common_edge) {
    // shared edge at s2 = t2 = 0 with matched direction; singular point
    // (z1, s2, t2) = 0, 3D Duffy into three pyramids per sign of z1.
    for (int k = 0; k < nb; ++k) {
      const double lam = base.nodes(0, k), e1 = base.nodes(1, k), e2 = base.nodes(2, k);
      const double u = base.nodes(3, k);
      const double w0 = base.weights(k);
      for (int sgn : {-1, 1})
        for (int pyr = 0; pyr < 3; ++pyr) {
          double zeta, s2, t2;
          switch (pyr) {
            case 0: zeta = lam; s2 = lam * e1; t2 = lam * e2; break;
            case 1: zeta = lam * e1; s2 = lam; t2 = lam * e2; break;
            default: zeta = lam * e1; s2 = lam * e2; t2 = lam; break;
          }
          const double z1 = sgn * zeta;
          const double s1 = std::max(0.0, -z1) + u * (1.0 - zeta);
          push(s1, s2, s1 + z1, t2, w0 * lam * lam * (1.0 - zeta));
        }
    }
  } else {  // common_vertex at s = t = (0,0); 4D Duffy into four pyramids
    for (int k = 0; k < nb; ++k) {
      const double lam = base.nodes(0, k);
      const double e1 = base.nodes(1, k), e2 = base.nodes(2, k), e3 = base.nodes(3, k);
      const double w0 = base.weights(k);
      const double lw = w0 * lam * lam * lam;
      push(lam, lam * e1, lam * e2, lam * e3, lw);
      push(lam * e1, lam, lam * e2, lam * e3, lw);
      push(lam * e1, lam * e2, lam, lam * e3, lw);
      push(lam * e1, lam * e2, lam * e3, lam, lw);
    }
  }
  return rule;
}

}  // namespace efie
