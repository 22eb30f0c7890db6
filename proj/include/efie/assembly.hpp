#ifndef EFIE_ASSEMBLY_HPP_
#define EFIE_ASSEMBLY_HPP_

#include <functional>

#include "efie/quadrature.hpp"
#include "efie/spaces.hpp"

namespace efie {

/// Quadrature orders per direction; 0 means the default p+3 (far) and
/// p+4 (singular cases). The distance-based far-order reduction drops one
/// point when the element gap exceeds twice the element diameter.
struct QuadConfig {
  int far_order = 0;
  int singular_order = 0;
  bool distance_reduction = false;

  int resolve_far(int p) const { return far_order > 0 ? far_order : p + 3; }
  int resolve_singular(int p) const { return singular_order > 0 ? singular_order : p + 4; }
};

/// G_kappa(x,y) = e^{i kappa |x-y|} / (4 pi |x-y|). Throws numerical_error
/// at x = y.
Complex greens_function(double kappa, const Vec3& x, const Vec3& y);

/// grad_x G_kappa in closed form.
Vec3c greens_gradient_x(double kappa, const Vec3& x, const Vec3& y);

/// Dense EFIE Galerkin matrix in the superspace basis: for basis fields
/// b_i, b_j the entry is
///   -kappa  I[ G (dF b_i)·(dF b_j) ]  +  (1/kappa) I[ G div b_i div b_j ]
/// with I the double integral over reference pair coordinates; surface
/// measures cancel against the Piola factors. Singular element pairs use
/// the regularized rules.
Eigen::MatrixXcd assemble_matrix(const Superspace& ss, double kappa,
                                 const QuadConfig& quad = {});

/// Streams T A* T^T without materializing A*: every element-pair block is
/// scattered through the rows of each given transformation. Returns one
/// dense ell x ell matrix per T, bit-identical to the dense route.
std::vector<Eigen::MatrixXcd> assemble_transformed(
    const Superspace& ss, double kappa,
    const std::vector<const Eigen::SparseMatrix<double, Eigen::RowMajor>*>& transforms,
    const QuadConfig& quad = {});

enum class ExcitationTrace {
  rotated,     // -I[ (n x g)·(dF b_i) ], the printed rotated-trace pairing
  tangential,  // +I[ g·(dF b_i) ], the plain tangential pairing
};

/// Excitation vector in the superspace basis for a trace source g on the
/// surface; per-element tensor Gauss quadrature (the integrand is smooth).
Eigen::VectorXcd assemble_excitation(const Superspace& ss,
                                     const std::function<Vec3c(const Vec3&)>& source,
                                     const QuadConfig& quad = {},
                                     ExcitationTrace trace = ExcitationTrace::rotated);

/// Dense complex EFIE system. A and g live in the discrete space basis,
/// A_star and g_star in the superspace basis (A_star may be empty when the
/// system was assembled through the streaming route).
struct EfieSystem {
  double kappa = 1.0;
  Eigen::MatrixXcd A_star;
  Eigen::VectorXcd g_star;
  Eigen::MatrixXcd A;
  Eigen::VectorXcd g;
};

/// (A, g) = (T A* T^T, T g*).
void transform_system(const Eigen::SparseMatrix<double, Eigen::RowMajor>& T,
                      const Eigen::MatrixXcd& A_star, const Eigen::VectorXcd& g_star,
                      Eigen::MatrixXcd& A, Eigen::VectorXcd& g);

/// Reference path: assembles the system directly in the glued basis of the
/// discrete space, evaluating B-spline products elementwise with the same
/// quadrature rules. Slow; used to validate the superspace route.
Eigen::MatrixXcd assemble_direct(const DiscreteSpace& space, const Superspace& ss,
                                 double kappa, const QuadConfig& quad = {});

/// Binary dump of a transformed system (header + little-endian complex
/// doubles), for debugging.
void dump_system(const std::string& path, const EfieSystem& sys, uint64_t descriptor_hash);

}  // namespace efie

#endif  // EFIE_ASSEMBLY_HPP_
