#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace ptkrein {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Base class for everything this library throws.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not line up (non-square input, size mismatch).
class dimension_error : public error {
 public:
  using error::error;
};

/// A stated precondition does not hold for the given input.
class precondition_error : public error {
 public:
  using error::error;
};

/// A numerical kernel failed to converge or produced inconsistent output.
class computational_error : public error {
 public:
  using error::error;
};

/// The computation ran but its result cannot be certified at the working
/// tolerance; retrying with a different tolerance may help.
class ill_conditioning_error : public error {
 public:
  using error::error;
};

/// The input violates the hypothesis of the theorem being applied
/// (e.g. its spectrum is not symmetric under complex conjugation).
class theorem_violation_error : public error {
 public:
  using error::error;
};

/// Conjugate eigenvalue clusters carry mismatched Jordan block sizes.
class pairing_error : public theorem_violation_error {
 public:
  using theorem_violation_error::theorem_violation_error;
};

/// Matrix file could not be read or parsed.
class io_error : public error {
 public:
  using error::error;
};

/// Tolerance policy used by every numerical comparison. `rel` scales with
/// the operand norms, `abs_floor` guards the zero-norm corner.
struct Tolerance {
  double rel = 1e-10;
  double abs_floor = 1e-14;

  void validate() const {
    if (!(rel > 0.0)) throw precondition_error("Tolerance: rel must be positive");
    if (!(abs_floor >= 0.0)) throw precondition_error("Tolerance: abs_floor must be nonnegative");
  }
};

/// Signature (p, q, z) of a Hermitian matrix: counts of positive, negative
/// and (numerically) zero eigenvalues.
struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;

  int total() const { return positive + negative + zero; }
  bool operator==(const Inertia&) const = default;
};

namespace detail {

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw dimension_error(std::string(what) + ": matrix must be square, got " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw dimension_error(std::string(what) + ": operands have mismatched shapes");
}

inline void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) throw precondition_error(std::string(what) + ": matrix has non-finite entries");
}

/// Scale for equality-as-residual checks: max(1, prod of operand norms).
inline double residual_scale(double norm_product) { return std::max(1.0, norm_product); }

inline double scaled_residual(double numerator, double norm_product) {
  return numerator / residual_scale(norm_product);
}

}  // namespace detail

}  // namespace ptkrein
