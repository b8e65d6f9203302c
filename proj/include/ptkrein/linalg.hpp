#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include "ptkrein/types.hpp"

namespace ptkrein {

/// Deviation of M from Hermitian symmetry: ||M - M^dagger||_F / max(1, ||M||_F).
inline double hermitian_residual(const ComplexMatrix& m) {
  detail::require_square(m, "hermitian_residual");
  const double num = (m - m.adjoint()).norm();
  return num / std::max(1.0, m.norm());
}

inline bool is_hermitian(const ComplexMatrix& m, const Tolerance& tol = {}) {
  return hermitian_residual(m) <= tol.rel;
}

/// Eigenvalue sign counts of a Hermitian matrix. The input is symmetrized
/// before the eigensolve; |lambda| <= max(abs_floor, rel*||G||_F) counts as zero.
inline Inertia inertia(const ComplexMatrix& g, const Tolerance& tol = {}) {
  tol.validate();
  detail::require_square(g, "inertia");
  if (!is_hermitian(g, tol))
    throw precondition_error("inertia: matrix is not Hermitian at the working tolerance (residual " +
                             std::to_string(hermitian_residual(g)) + ")");
  const ComplexMatrix sym = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw computational_error("inertia: eigensolver failed to converge");
  const double band = std::max(tol.abs_floor, tol.rel * g.norm());
  Inertia out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()[i];
    if (lam > band)
      ++out.positive;
    else if (lam < -band)
      ++out.negative;
    else
      ++out.zero;
  }
  return out;
}

/// Smallest |eigenvalue| of a Hermitian matrix (its nonsingularity margin).
inline double min_abs_eigenvalue(const ComplexMatrix& g) {
  detail::require_square(g, "min_abs_eigenvalue");
  const ComplexMatrix sym = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw computational_error("min_abs_eigenvalue: eigensolver failed to converge");
  return es.eigenvalues().cwiseAbs().minCoeff();
}

/// Propagates x0 through x' = A x for time t, i.e. returns exp(tA) x0.
/// The exponential kernel is scaling-and-squaring with a Pade approximant.
inline ComplexVector evolve(const ComplexMatrix& a, const ComplexVector& x0, double t) {
  detail::require_square(a, "evolve");
  if (a.rows() != x0.size())
    throw dimension_error("evolve: state vector length " + std::to_string(x0.size()) +
                          " does not match generator dimension " + std::to_string(a.rows()));
  if (!std::isfinite(t)) throw precondition_error("evolve: time must be finite");
  const ComplexMatrix propagator = (t * a).exp();
  return propagator * x0;
}

}  // namespace ptkrein
