#ifndef EFIE_SPACES_HPP_
#define EFIE_SPACES_HPP_

#include <array>
#include <vector>

#include <Eigen/Sparse>

#include "efie/geometry.hpp"

namespace efie {

/// Dyadic element mesh over a multipatch geometry. Each patch carries an
/// n x n grid of elements, n = 2^level. Grid corners are identified across
/// patch interfaces so that adjacency queries work globally.
struct Mesh {
  const MultipatchGeometry* geom = nullptr;
  int level = 0;
  int n = 1;  // elements per direction and patch

  int num_patches() const { return static_cast<int>(geom->patches.size()); }
  int elements_per_patch() const { return n * n; }
  int num_elements() const { return num_patches() * n * n; }

  /// Deterministic element numbering: patch-major, then v-row, then u.
  int element_id(int patch, int iu, int iv) const { return (patch * n + iv) * n + iu; }
  struct ElementCoords {
    int patch, iu, iv;
  };
  ElementCoords coords(int e) const {
    return {e / (n * n), e % n, (e / n) % n};
  }
  /// Parameter box of an element within its patch.
  void param_box(int e, double& u0, double& u1, double& v0, double& v1) const;

  /// Global corner ids per element, in the order (0,0), (1,0), (0,1), (1,1)
  /// of the element's local corners.
  std::vector<std::array<int, 4>> corner_ids;

  /// Diameter estimate and centroid per element (corner-based).
  std::vector<double> diameters;
  std::vector<Vec3> centers;
};

Mesh build_mesh(const MultipatchGeometry& geom, int level);

/// Element-local vector polynomial superspace: on every element, component 0
/// has tensor degrees (p, p-1) and component 1 has (p-1, p); the local basis
/// is interpolatory at Gauss-Legendre node grids of matching size.
struct Superspace {
  const MultipatchGeometry* geom = nullptr;
  int p = 1;
  int level = 0;
  Mesh mesh;

  std::vector<double> nodes_hi;  // p+1 Gauss-Legendre nodes on [0,1]
  std::vector<double> nodes_lo;  // p   Gauss-Legendre nodes on [0,1]

  int funcs_per_component() const { return p * (p + 1); }
  int funcs_per_element() const { return 2 * p * (p + 1); }
  int dim() const { return mesh.num_elements() * funcs_per_element(); }

  /// Local index of a basis function within its element:
  /// component-major, then node row (v), then node column (u).
  int local_index(int comp, int a, int b) const {
    int base = comp * funcs_per_component();
    int mu = (comp == 0) ? p + 1 : p;
    return base + b * mu + a;
  }
  int global_index(int element, int local) const {
    return element * funcs_per_element() + local;
  }
};

Superspace build_superspace(const MultipatchGeometry& geom, int p, int level);

/// Evaluates superspace coefficients of a reference-domain vector function
/// restricted to one element: interpolation at the node grids reduces to
/// point evaluation. `fn(u, v, comp)` takes patch coordinates.
template <class Fn>
std::vector<double> interpolate_in_superspace(const Superspace& ss, int element, Fn&& fn) {
  std::vector<double> out(ss.funcs_per_element());
  double u0, u1, v0, v1;
  ss.mesh.param_box(element, u0, u1, v0, v1);
  for (int comp = 0; comp < 2; ++comp) {
    const auto& nu = (comp == 0) ? ss.nodes_hi : ss.nodes_lo;
    const auto& nv = (comp == 0) ? ss.nodes_lo : ss.nodes_hi;
    for (int b = 0; b < static_cast<int>(nv.size()); ++b)
      for (int a = 0; a < static_cast<int>(nu.size()); ++a) {
        double u = u0 + nu[a] * (u1 - u0);
        double v = v0 + nv[b] * (v1 - v0);
        out[ss.local_index(comp, a, b)] = fn(u, v, comp);
      }
  }
  return out;
}

/// Divergence-conforming discrete space together with its sparse
/// transformation into the superspace.
struct DiscreteSpace {
  enum class Kind { spline, raviart_thomas };

  Kind kind = Kind::spline;
  int p = 1;
  int level = 0;
  const MultipatchGeometry* geom = nullptr;

  /// Per patch and component, the tensor B-spline knot vectors.
  /// Component 0 is (ku[0], kv[0]) with degrees (p, p-1); component 1
  /// is (ku[1], kv[1]) with degrees (p-1, p). Same on every patch.
  std::array<KnotVector, 2> knots_u, knots_v;

  int dim_u(int comp) const { return knots_u[comp].num_basis(); }
  int dim_v(int comp) const { return knots_v[comp].num_basis(); }

  struct DofInfo {
    int patch = 0, comp = 0, i = 0, j = 0;  // owning patchwise function
    bool glued = false;
    int partner_patch = -1, partner_comp = -1, partner_i = -1, partner_j = -1;
    double dir = 1.0;  // gluing sign of the partner half
  };
  std::vector<DofInfo> dofs;

  Eigen::SparseMatrix<double, Eigen::RowMajor> T;  // ell x dim(P)

  int dof_count() const { return static_cast<int>(T.rows()); }
};

DiscreteSpace build_spline_space(const MultipatchGeometry& geom, int p, int level);
DiscreteSpace build_rt_space(const MultipatchGeometry& geom, int p, int level);

/// The paper's interpolation-and-gluing loop; used by both space builders.
/// Exposed for tests that exercise the transformation directly.
Eigen::SparseMatrix<double, Eigen::RowMajor> assemble_transformation(
    DiscreteSpace& space, const Superspace& ss);

/// Physical (Piola-mapped) value of a patchwise component basis function:
/// dF * (b_i b_j e_comp) / xi at patch coordinates (u, v).
Vec3 mapped_basis_value(const NurbsPatch& patch, const DiscreteSpace& space, int comp,
                        int i, int j, double u, double v);

}  // namespace efie

#endif  // EFIE_SPACES_HPP_
