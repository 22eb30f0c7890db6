#ifndef EFIE_SOLVER_HPP_
#define EFIE_SOLVER_HPP_

#include <functional>

#include "efie/types.hpp"

namespace efie {

struct SolveReport {
  Eigen::VectorXcd solution;
  long total_iterations = 0;  // inner iterations summed across restarts
  int restarts = 0;
  double final_relative_residual = 0.0;
};

/// Thrown when the iteration cap is exceeded; carries the best iterate.
class gmres_failure : public numerical_error {
 public:
  gmres_failure(const std::string& what, SolveReport best)
      : numerical_error(what), report(std::move(best)) {}
  SolveReport report;
};

/// Restarted GMRES with modified Gram-Schmidt and one reorthogonalization
/// pass when orthogonality degrades. Zero initial guess; stops at
/// ||b - A x||_2 / ||b||_2 < tol. A zero right-hand side returns the zero
/// solution with 0 iterations.
SolveReport gmres(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                  const Eigen::VectorXcd& rhs, double tol = 1e-10, int restart = 1500,
                  long max_total = 200000);

}  // namespace efie

#endif  // EFIE_SOLVER_HPP_
