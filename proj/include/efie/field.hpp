#ifndef EFIE_FIELD_HPP_
#define EFIE_FIELD_HPP_

#include <string>
#include <vector>

#include "efie/assembly.hpp"

namespace efie {

/// Hertz dipole with placement x0, moment p0 and wavenumber kappa.
struct Dipole {
  Vec3 position = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
  double kappa = 1.0;
};

/// Closed-form dipole field
///   e^{i k r} ( k^2/r (n x p0) x n + (1/r^3 - i k/r^2)(3 n (n·p0) - p0) ),
/// r = |x - x0|, n = (x - x0)/r. No 1/(4 pi) normalization.
Vec3c dipole_field(const Dipole& d, const Vec3& x);

/// Max component magnitude of curl curl e - kappa^2 e evaluated by
/// second-order central differences with step h. O(h^2) for the exact field.
double verify_maxwell(const Dipole& d, const Vec3& x, double h);

/// Exterior field -V(w)(x) of the EFIE representation for superspace
/// coefficients w_star; the gradient of the scalar term is applied to the
/// kernel analytically. Throws when x is closer to the surface than a tenth
/// of the smallest element diameter.
Vec3c evaluate_potential(const Superspace& ss, const Eigen::VectorXcd& w_star,
                         double kappa, const Vec3& x, int quad_order = 0);

/// Deterministic quasi-uniform points (Fibonacci lattice) on the sphere of
/// the given radius around the origin.
std::vector<Vec3> evaluation_sphere(double radius, int count);

/// max over points of the Euclidean norm of the complex 3-vector difference.
double max_pointwise_error(const std::vector<Vec3c>& computed,
                           const std::vector<Vec3c>& reference);

/// CSV dump x,y,z,Re(e1),Im(e1),Re(e2),Im(e2),Re(e3),Im(e3).
void dump_fields_csv(const std::string& path, const std::vector<Vec3>& points,
                     const std::vector<Vec3c>& fields);

}  // namespace efie

#endif  // EFIE_FIELD_HPP_
