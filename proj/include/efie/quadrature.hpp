#ifndef EFIE_QUADRATURE_HPP_
#define EFIE_QUADRATURE_HPP_

#include <vector>

#include "efie/spaces.hpp"
#include "efie/types.hpp"

namespace efie {

/// Nodes in [0,1]^d with positive weights. Weights of a d-cube rule sum to
/// the measure of the cube.
struct QuadratureRule {
  Eigen::MatrixXd nodes;  // d x n
  Eigen::VectorXd weights;
  int dim() const { return static_cast<int>(nodes.rows()); }
  int size() const { return static_cast<int>(nodes.cols()); }
};

/// 1D Gauss-Legendre rule on [0,1], exact for polynomials of degree 2q-1.
QuadratureRule gauss_rule(int q);

/// Plain tensor product of the 1D Gauss rule.
QuadratureRule tensor_rule(int q, int dim);

enum class PairCase { identical, common_edge, common_vertex, far };

/// Adjacency class of two mesh elements, across patch interfaces included.
PairCase classify_element_pair(const Mesh& mesh, int e1, int e2);

/// Adjacency class plus the square symmetries that move each element's
/// parameter domain into the canonical configuration assumed by
/// regularized_rule (shared edge at v=0 with matching direction; shared
/// vertex at the origin). rot1/rot2 index the maps of d4_apply.
struct PairConfig {
  PairCase pair_case = PairCase::far;
  int rot1 = 0, rot2 = 0;
};
PairConfig classify_pair_config(const Mesh& mesh, int e1, int e2);

/// The eight symmetries of the unit square, |Jacobian| = 1.
Vec2 d4_apply(int k, double a, double b);

/// Regularized 4D rule over reference pair coordinates (s1,s2,t1,t2) for
/// the canonical configuration of the given case: Duffy-type subdivisions
/// in relative coordinates (identical: 8 subdomains, common_edge: 6,
/// common_vertex: 4; far: plain tensor), composed with tensor Gauss rules
/// of q points per direction. Transform Jacobians are baked into weights.
QuadratureRule regularized_rule(PairCase pair_case, int q);

}  // namespace efie

#endif  // EFIE_QUADRATURE_HPP_
