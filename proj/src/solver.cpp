#include "efie/solver.hpp"

#include <cmath>

namespace efie {

SolveReport gmres(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                  const Eigen::VectorXcd& rhs, double tol, int restart, long max_total) {
  using Eigen::MatrixXcd;
  using Eigen::VectorXcd;
  const long n = rhs.size();
  if (n == 0) throw argument_error("gmres: empty right-hand side");
  if (restart < 1) throw argument_error("gmres: restart must be >= 1");

  SolveReport rep;
  rep.solution = VectorXcd::Zero(n);
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    rep.final_relative_residual = 0.0;
    return rep;
  }

  const int m = static_cast<int>(std::min<long>(restart, n));
  MatrixXcd V(n, m + 1);
  MatrixXcd H = MatrixXcd::Zero(m + 1, m);
  VectorXcd cs(m), sn(m), g(m + 1);

  VectorXcd r = rhs;  // residual for zero initial guess
  int cycle = 0;
  while (true) {
    const double beta = r.norm();
    rep.final_relative_residual = beta / bnorm;
    if (rep.final_relative_residual < tol) return rep;
    if (rep.total_iterations >= max_total)
      throw gmres_failure("gmres: iteration cap exceeded at relative residual " +
                              std::to_string(rep.final_relative_residual),
                          rep);
    if (cycle > 0) ++rep.restarts;
    ++cycle;

    V.col(0) = r / beta;
    g.setZero();
    g(0) = beta;
    int k = 0;
    bool breakdown = false;
    for (int j = 0; j < m && rep.total_iterations < max_total; ++j) {
      VectorXcd w = apply(V.col(j));
      ++rep.total_iterations;
      // modified Gram-Schmidt
      for (int i = 0; i <= j; ++i) {
        const Complex h = V.col(i).dot(w);
        H(i, j) = h;
        w -= h * V.col(i);
      }
      // one reorthogonalization pass when orthogonality degrades past 1e-8
      double wnorm = w.norm();
      if (wnorm > 0.0) {
        const VectorXcd defect = V.leftCols(j + 1).adjoint() * w;
        if (defect.lpNorm<Eigen::Infinity>() > 1e-8 * wnorm) {
          for (int i = 0; i <= j; ++i) {
            H(i, j) += defect(i);
            w -= defect(i) * V.col(i);
          }
          wnorm = w.norm();
        }
      }
      H(j + 1, j) = wnorm;
      k = j + 1;
      if (wnorm > 0.0)
        V.col(j + 1) = w / wnorm;
      else
        breakdown = true;  // invariant subspace reached: least squares is exact

      // Givens rotations: accumulated ones, then a new one for H(j+1, j)
      for (int i = 0; i < j; ++i) {
        const Complex tmp = std::conj(cs(i)) * H(i, j) + std::conj(sn(i)) * H(i + 1, j);
        H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
        H(i, j) = tmp;
      }
      const Complex a = H(j, j), b = H(j + 1, j);
      const double denom = std::sqrt(std::norm(a) + std::norm(b));
      if (denom == 0.0) {
        cs(j) = 1.0;
        sn(j) = 0.0;
      } else {
        cs(j) = a / denom;
        sn(j) = b / denom;
      }
      H(j, j) = std::conj(cs(j)) * a + std::conj(sn(j)) * b;
      H(j + 1, j) = 0.0;
      const Complex tmp = std::conj(cs(j)) * g(j) + std::conj(sn(j)) * g(j + 1);
      g(j + 1) = -sn(j) * g(j) + cs(j) * g(j + 1);
      g(j) = tmp;

      if (std::abs(g(j + 1)) / bnorm < tol || breakdown) break;
    }

    // x += V y with y from the reduced triangular system
    Eigen::VectorXcd y(k);
    for (int i = k - 1; i >= 0; --i) {
      Complex sum = g(i);
      for (int j2 = i + 1; j2 < k; ++j2) sum -= H(i, j2) * y(j2);
      y(i) = sum / H(i, i);
    }
    rep.solution += V.leftCols(k) * y;

    r = rhs - apply(rep.solution);  // true residual for stop/restart
    if (breakdown) {
      rep.final_relative_residual = r.norm() / bnorm;
      if (rep.final_relative_residual < tol) return rep;
      throw numerical_error("gmres: breakdown without convergence (singular operator?)");
    }
  }
}

}  // namespace efie
