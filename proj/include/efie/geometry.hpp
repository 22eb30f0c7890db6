#ifndef EFIE_GEOMETRY_HPP_
#define EFIE_GEOMETRY_HPP_

#include <array>
#include <string>
#include <vector>

#include "efie/splines.hpp"
#include "efie/types.hpp"

namespace efie {

/// Rational tensor-product surface patch F: [0,1]^2 -> R^3.
///
/// Control points are stored unweighted; the homogeneous form multiplies
/// them by the weights internally. Row-major layout, second index fastest:
/// cpts[j1 * k2 + j2].
struct NurbsPatch {
  KnotVector knots_u, knots_v;
  std::vector<Vec3> cpts;
  std::vector<double> weights;

  int count_u() const { return knots_u.num_basis(); }
  int count_v() const { return knots_v.num_basis(); }

  Vec3 eval(double u, double v) const;
  Mat32 jacobian(double u, double v) const;
  /// Fused evaluation of position and Jacobian (one basis pass).
  void eval_with_jacobian(double u, double v, Vec3& x, Mat32& J) const;

  /// Norm of the cross product of the Jacobian columns. Throws
  /// geometry_error below the degeneracy tolerance 1e-14.
  double surface_measure(double u, double v) const;
  Vec3 unit_normal(double u, double v) const;

  void validate() const;
};

enum class EdgeId { u0, u1, v0, v1 };

const char* edge_name(EdgeId e);

/// A glued pair of patch edges. `reversed` records whether the second
/// edge runs against the first one's parameter direction.
struct Interface {
  int patch_a = 0;
  EdgeId edge_a = EdgeId::u0;
  int patch_b = 0;
  EdgeId edge_b = EdgeId::u0;
  bool reversed = false;
};

struct MultipatchGeometry {
  std::vector<NurbsPatch> patches;
  std::vector<Interface> interfaces;
  std::vector<std::pair<int, EdgeId>> boundary_edges;
};

/// Point on a patch edge; t in [0,1] runs along the edge parameter
/// (v for u-edges, u for v-edges).
Vec2 edge_point(EdgeId e, double t);

/// Detects interfaces by comparing 11-point edge traces under all eight
/// edge/orientation pairings. An edge matching more than one partner
/// within tol is an ambiguous-topology error.
MultipatchGeometry build_topology(std::vector<NurbsPatch> patches, double tol = 1e-10);

/// Exact unit sphere as six rational Bezier patches of degree (4,4),
/// exterior-oriented. |F(u,v)| = 1 holds to rounding.
MultipatchGeometry builtin_sphere();

/// Fichera corner [-1/2,1/2]^3 minus the octant [0,1/2]^3: 24 flat bilinear
/// patches of side 0.5 with unit weights, exterior-oriented.
MultipatchGeometry builtin_fichera();

MultipatchGeometry load_geometry(const std::string& path);
void save_geometry(const MultipatchGeometry& geom, const std::string& path);

}  // namespace efie

#endif  // EFIE_GEOMETRY_HPP_
