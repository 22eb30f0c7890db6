#include "efie/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "efie/quadrature.hpp"

namespace efie {

void Mesh::param_box(int e, double& u0, double& u1, double& v0, double& v1) const {
  const auto c = coords(e);
  u0 = static_cast<double>(c.iu) / n;
  u1 = static_cast<double>(c.iu + 1) / n;
  v0 = static_cast<double>(c.iv) / n;
  v1 = static_cast<double>(c.iv + 1) / n;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// grid node (gu, gv) on the edge, in ascending edge-parameter order
std::pair<int, int> edge_grid_node(EdgeId e, int k, int n) {
  switch (e) {
    case EdgeId::u0: return {0, k};
    case EdgeId::u1: return {n, k};
    case EdgeId::v0: return {k, 0};
    default: return {k, n};
  }
}

}  // namespace

Mesh build_mesh(const MultipatchGeometry& geom, int level) {
  if (level < 0) throw argument_error("build_mesh: negative level");
  Mesh mesh;
  mesh.geom = &geom;
  mesh.level = level;
  mesh.n = 1 << level;
  const int n = mesh.n;
  const int np = static_cast<int>(geom.patches.size());
  const int grid = (n + 1) * (n + 1);

  UnionFind uf(np * grid);
  auto node_id = [&](int patch, int gu, int gv) { return (patch * (n + 1) + gv) * (n + 1) + gu; };
  for (const auto& ifc : geom.interfaces) {
    for (int k = 0; k <= n; ++k) {
      const int kb = ifc.reversed ? n - k : k;
      const auto [ua, va] = edge_grid_node(ifc.edge_a, k, n);
      const auto [ub, vb] = edge_grid_node(ifc.edge_b, kb, n);
      uf.unite(node_id(ifc.patch_a, ua, va), node_id(ifc.patch_b, ub, vb));
    }
  }

  mesh.corner_ids.resize(mesh.num_elements());
  mesh.diameters.resize(mesh.num_elements());
  mesh.centers.resize(mesh.num_elements());
  for (int p = 0; p < np; ++p)
    for (int iv = 0; iv < n; ++iv)
      for (int iu = 0; iu < n; ++iu) {
        const int e = mesh.element_id(p, iu, iv);
        mesh.corner_ids[e] = {uf.find(node_id(p, iu, iv)), uf.find(node_id(p, iu + 1, iv)),
                              uf.find(node_id(p, iu, iv + 1)),
                              uf.find(node_id(p, iu + 1, iv + 1))};
        const auto& patch = geom.patches[p];
        const Vec3 c00 = patch.eval(static_cast<double>(iu) / n, static_cast<double>(iv) / n);
        const Vec3 c10 = patch.eval(static_cast<double>(iu + 1) / n, static_cast<double>(iv) / n);
        const Vec3 c01 = patch.eval(static_cast<double>(iu) / n, static_cast<double>(iv + 1) / n);
        const Vec3 c11 =
            patch.eval(static_cast<double>(iu + 1) / n, static_cast<double>(iv + 1) / n);
        mesh.diameters[e] = std::max((c11 - c00).norm(), (c10 - c01).norm());
        mesh.centers[e] = 0.25 * (c00 + c10 + c01 + c11);
      }
  return mesh;
}

Superspace build_superspace(const MultipatchGeometry& geom, int p, int level) {
  if (p < 1 || p > 7) throw argument_error("build_superspace: degree must be in [1,7]");
  Superspace ss;
  ss.geom = &geom;
  ss.p = p;
  ss.level = level;
  ss.mesh = build_mesh(geom, level);
  const QuadratureRule hi = gauss_rule(p + 1), lo = gauss_rule(p);
  ss.nodes_hi.assign(hi.nodes.data(), hi.nodes.data() + p + 1);
  ss.nodes_lo.assign(lo.nodes.data(), lo.nodes.data() + p);
  return ss;
}

Vec3 mapped_basis_value(const NurbsPatch& patch, const DiscreteSpace& space, int comp, int i,
                        int j, double u, double v) {
  const double bi = bspline_value(space.knots_u[comp], i, u);
  const double bj = bspline_value(space.knots_v[comp], j, v);
  Vec3 x;
  Mat32 J;
  patch.eval_with_jacobian(u, v, x, J);
  const double xi = J.col(0).cross(J.col(1)).norm();
  if (xi <= 1e-14) throw geometry_error("mapped_basis_value: degenerate point");
  return J.col(comp) * (bi * bj / xi);
}

namespace {

// Normal-trace edge of a patchwise component function, or -1.
// Component 0 carries the normal on u-edges, component 1 on v-edges.
int trace_edge(const DiscreteSpace& s, int comp, int i, int j) {
  if (comp == 0) {
    if (i == 0) return 0;                  // u0
    if (i == s.dim_u(0) - 1) return 1;     // u1
  } else {
    if (j == 0) return 2;                  // v0
    if (j == s.dim_v(1) - 1) return 3;     // v1
  }
  return -1;
}

EdgeId edge_from_index(int e) {
  switch (e) {
    case 0: return EdgeId::u0;
    case 1: return EdgeId::u1;
    case 2: return EdgeId::v0;
    default: return EdgeId::v1;
  }
}
int edge_to_index(EdgeId e) { return static_cast<int>(e); }

struct PartnerRef {
  int patch, comp, i, j;
};

// Resolves the partner function across an interface: the normal-trace DOF
// with the matching trace index under the recorded orientation.
PartnerRef find_partner(const DiscreteSpace& s, const Interface& ifc, bool own_is_a,
                        int trace_index) {
  const int other_patch = own_is_a ? ifc.patch_b : ifc.patch_a;
  const EdgeId other_edge = own_is_a ? ifc.edge_b : ifc.edge_a;
  PartnerRef ref;
  ref.patch = other_patch;
  const int m = s.dim_v(0);  // trace dimension, equals dim_u(1)
  const int t = ifc.reversed ? m - 1 - trace_index : trace_index;
  switch (other_edge) {
    case EdgeId::u0: ref.comp = 0; ref.i = 0; ref.j = t; break;
    case EdgeId::u1: ref.comp = 0; ref.i = s.dim_u(0) - 1; ref.j = t; break;
    case EdgeId::v0: ref.comp = 1; ref.i = t; ref.j = 0; break;
    default: ref.comp = 1; ref.i = t; ref.j = s.dim_v(1) - 1; break;
  }
  return ref;
}

// Gluing sign: evaluate the physical normal component of both halves at
// sampled interface points and pick dir so they agree.
double find_orientation(const DiscreteSpace& s, const Interface& ifc, bool own_is_a,
                        int own_comp, int own_i, int own_j, const PartnerRef& partner) {
  const auto& geom = *s.geom;
  const int own_patch = own_is_a ? ifc.patch_a : ifc.patch_b;
  const EdgeId own_edge = own_is_a ? ifc.edge_a : ifc.edge_b;
  const EdgeId partner_edge = own_is_a ? ifc.edge_b : ifc.edge_a;
  const auto& pa = geom.patches[own_patch];
  const auto& pb = geom.patches[partner.patch];

  // sample inside the support of the own trace function
  const KnotVector& trace_knots = (own_comp == 0) ? s.knots_v[0] : s.knots_u[1];
  const int trace_index = (own_comp == 0) ? own_j : own_i;
  const double s0 = trace_knots.knots[trace_index];
  const double s1 = trace_knots.knots[trace_index + trace_knots.degree + 1];

  constexpr int kSamples = 11;
  double dir = 0.0;
  double best = 0.0;
  std::array<double, kSamples> va{}, vb{};
  for (int k = 0; k < kSamples; ++k) {
    const double x = s0 + (k + 1.0) / (kSamples + 1.0) * (s1 - s0);
    const Vec2 uv_a = edge_point(own_edge, x);
    const Vec2 uv_b = edge_point(partner_edge, ifc.reversed ? 1.0 - x : x);
    // conormal: in-plane unit vector orthogonal to the edge tangent
    Vec3 pt;
    Mat32 J;
    pa.eval_with_jacobian(uv_a[0], uv_a[1], pt, J);
    const Vec3 tangent =
        (own_edge == EdgeId::u0 || own_edge == EdgeId::u1) ? J.col(1) : J.col(0);
    const Vec3 nrm = J.col(0).cross(J.col(1)).normalized();
    const Vec3 conormal = nrm.cross(tangent).normalized();
    va[k] = conormal.dot(mapped_basis_value(pa, s, own_comp, own_i, own_j, uv_a[0], uv_a[1]));
    vb[k] = conormal.dot(
        mapped_basis_value(pb, s, partner.comp, partner.i, partner.j, uv_b[0], uv_b[1]));
    if (std::abs(va[k]) > best) {
      best = std::abs(va[k]);
      dir = (va[k] * vb[k] > 0.0) ? 1.0 : -1.0;
    }
  }
  if (best == 0.0) throw geometry_error("find_orientation: vanishing normal trace");
  for (int k = 0; k < kSamples; ++k) {
    const double scale = std::max(1.0, std::abs(va[k]));
    if (std::abs(va[k] - dir * vb[k]) > 1e-9 * scale)
      throw geometry_error("find_orientation: normal traces do not match across interface");
  }
  return dir;
}

}  // namespace

Eigen::SparseMatrix<double, Eigen::RowMajor> assemble_transformation(DiscreteSpace& space,
                                                                     const Superspace& ss) {
  const auto& geom = *space.geom;
  const int npatch = static_cast<int>(geom.patches.size());
  const int n = ss.mesh.n;

  // interface lookup by (patch, edge)
  std::vector<std::array<int, 4>> ifc_of(npatch, {-1, -1, -1, -1});
  for (int k = 0; k < static_cast<int>(geom.interfaces.size()); ++k) {
    const auto& ifc = geom.interfaces[k];
    ifc_of[ifc.patch_a][edge_to_index(ifc.edge_a)] = k;
    ifc_of[ifc.patch_b][edge_to_index(ifc.edge_b)] = k;
  }

  auto func_id = [&](int patch, int comp, int i, int j) {
    const int per_comp0 = space.dim_u(0) * space.dim_v(0);
    const int per_comp1 = space.dim_u(1) * space.dim_v(1);
    int id = patch * (per_comp0 + per_comp1);
    if (comp == 1) id += per_comp0;
    const int du = space.dim_u(comp);
    return id + j * du + i;
  };
  const int total_funcs = npatch * (space.dim_u(0) * space.dim_v(0) +
                                    space.dim_u(1) * space.dim_v(1));
  std::vector<char> skip(total_funcs, 0);

  // interpolation of one patchwise function into the superspace over the
  // elements of its knot support
  std::vector<Eigen::Triplet<double>> triplets;
  auto interpolate = [&](int row, int patch, int comp, int i, int j, double factor) {
    const auto& ku = space.knots_u[comp];
    const auto& kv = space.knots_v[comp];
    const double su0 = ku.knots[i], su1 = ku.knots[i + ku.degree + 1];
    const double sv0 = kv.knots[j], sv1 = kv.knots[j + kv.degree + 1];
    for (int iv = 0; iv < n; ++iv)
      for (int iu = 0; iu < n; ++iu) {
        const double eu0 = static_cast<double>(iu) / n, eu1 = static_cast<double>(iu + 1) / n;
        const double ev0 = static_cast<double>(iv) / n, ev1 = static_cast<double>(iv + 1) / n;
        if (eu1 <= su0 || eu0 >= su1 || ev1 <= sv0 || ev0 >= sv1) continue;
        const int e = ss.mesh.element_id(patch, iu, iv);
        const auto& nodes_u = (comp == 0) ? ss.nodes_hi : ss.nodes_lo;
        const auto& nodes_v = (comp == 0) ? ss.nodes_lo : ss.nodes_hi;
        for (int b = 0; b < static_cast<int>(nodes_v.size()); ++b)
          for (int a = 0; a < static_cast<int>(nodes_u.size()); ++a) {
            const double u = eu0 + nodes_u[a] * (eu1 - eu0);
            const double v = ev0 + nodes_v[b] * (ev1 - ev0);
            const double val = bspline_value(ku, i, u) * bspline_value(kv, j, v);
            if (val != 0.0)
              triplets.emplace_back(row, ss.global_index(e, ss.local_index(comp, a, b)),
                                    factor * val);
          }
      }
  };

  space.dofs.clear();
  int row = 0;
  for (int patch = 0; patch < npatch; ++patch)
    for (int comp = 0; comp < 2; ++comp)
      for (int j = 0; j < space.dim_v(comp); ++j)
        for (int i = 0; i < space.dim_u(comp); ++i) {
          if (skip[func_id(patch, comp, i, j)]) continue;
          DiscreteSpace::DofInfo info;
          info.patch = patch;
          info.comp = comp;
          info.i = i;
          info.j = j;
          interpolate(row, patch, comp, i, j, 1.0);

          const int edge = trace_edge(space, comp, i, j);
          const int ifc_index = edge >= 0 ? ifc_of[patch][edge] : -1;
          if (ifc_index >= 0) {
            const auto& ifc = geom.interfaces[ifc_index];
            const bool own_is_a =
                (ifc.patch_a == patch && edge_to_index(ifc.edge_a) == edge);
            const int trace_index = (comp == 0) ? j : i;
            const PartnerRef partner = find_partner(space, ifc, own_is_a, trace_index);
            const int pid = func_id(partner.patch, partner.comp, partner.i, partner.j);
            if (pid == func_id(patch, comp, i, j))
              throw geometry_error("assemble_transformation: function glued to itself");
            if (skip[pid])
              throw geometry_error("assemble_transformation: partner already consumed");
            skip[pid] = 1;
            const double dir =
                find_orientation(space, ifc, own_is_a, comp, i, j, partner);
            interpolate(row, partner.patch, partner.comp, partner.i, partner.j, dir);
            info.glued = true;
            info.partner_patch = partner.patch;
            info.partner_comp = partner.comp;
            info.partner_i = partner.i;
            info.partner_j = partner.j;
            info.dir = dir;
          }
          space.dofs.push_back(info);
          ++row;
        }

  Eigen::SparseMatrix<double, Eigen::RowMajor> T(row, ss.dim());
  T.setFromTriplets(triplets.begin(), triplets.end());
  return T;
}

namespace {

DiscreteSpace build_space(const MultipatchGeometry& geom, int p, int level,
                          DiscreteSpace::Kind kind) {
  if (p < 1) throw argument_error("space builder: degree must be >= 1");
  if (level < 0) throw argument_error("space builder: negative level");
  DiscreteSpace space;
  space.kind = kind;
  space.p = p;
  space.level = level;
  space.geom = &geom;
  const int n = 1 << level;
  const int mult_hi = (kind == DiscreteSpace::Kind::spline) ? 1 : p;  // degree p dirs
  const int mult_lo = (kind == DiscreteSpace::Kind::spline) ? 1 : p;  // degree p-1 dirs
  space.knots_u[0] = KnotVector::uniform_open(p, n, mult_hi);
  space.knots_v[0] = KnotVector::uniform_open(p - 1, n, mult_lo);
  space.knots_u[1] = KnotVector::uniform_open(p - 1, n, mult_lo);
  space.knots_v[1] = KnotVector::uniform_open(p, n, mult_hi);
  const Superspace ss = build_superspace(geom, p, level);
  space.T = assemble_transformation(space, ss);
  return space;
}

}  // namespace

DiscreteSpace build_spline_space(const MultipatchGeometry& geom, int p, int level) {
  return build_space(geom, p, level, DiscreteSpace::Kind::spline);
}

DiscreteSpace build_rt_space(const MultipatchGeometry& geom, int p, int level) {
  return build_space(geom, p, level, DiscreteSpace::Kind::raviart_thomas);
}

}  // namespace efie
