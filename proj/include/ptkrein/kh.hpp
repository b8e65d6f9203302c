#pragma once

#include <cmath>

#include "ptkrein/krein.hpp"
#include "ptkrein/types.hpp"

namespace ptkrein {

/// Parameters of the two-layer Kelvin-Helmholtz shear flow: wavenumber k,
/// layer velocities u10/u20, layer densities rho10/rho20, gravity g.
struct KHParameters {
  double k = 1.0;
  double u10 = 1.0;
  double u20 = 2.3;
  double rho10 = 2.0;
  double rho20 = 3.0;
  double g = 3.0;

  void validate() const {
    if (!(std::isfinite(k) && std::isfinite(u10) && std::isfinite(u20) && std::isfinite(rho10) &&
          std::isfinite(rho20) && std::isfinite(g)))
      throw precondition_error("KHParameters: all parameters must be finite");
    if (k == 0.0) throw precondition_error("KHParameters: wavenumber k must be nonzero");
    if (!(rho10 > 0.0) || !(rho20 > 0.0))
      throw precondition_error("KHParameters: layer densities must be positive");
  }
};

/// The closed-form metric diag(-|k|, tau) together with its (2,2) entry and a
/// singularity warning raised when tau vanishes at tolerance.
struct KHMetric {
  ComplexMatrix G;
  double tau = 0.0;
  bool singular_warning = false;
};

/// Closed-form spectral data: discriminant, eigenvalues, eigenvectors (second
/// component normalized to 1) and tau. At delta = 0 the two eigenvectors
/// coincide and `exceptional` is set instead of fabricating a generalized one.
struct KHEigensystem {
  double delta = 0.0;
  Complex a1;
  Complex a2;
  Eigen::Vector2cd phi1;
  Eigen::Vector2cd phi2;
  double tau = 0.0;
  bool exceptional = false;
};

inline double kh_tau(const KHParameters& p) {
  const double du = p.u10 - p.u20;
  return (std::abs(p.k) * du * du * p.rho20 - p.g * (p.rho20 - p.rho10)) / (p.rho10 + p.rho20);
}

/// The 2x2 Kelvin-Helmholtz Hamiltonian, entry for entry.
inline ComplexMatrix kh_hamiltonian(const KHParameters& p) {
  p.validate();
  const double rs = p.rho10 + p.rho20;
  ComplexMatrix h(2, 2);
  h(0, 0) = -p.k * (-p.u10 * p.rho10 - 2.0 * p.u20 * p.rho20 + p.u10 * p.rho20) / rs;
  h(0, 1) = Complex(0.0, -kh_tau(p));
  h(1, 0) = Complex(0.0, -std::abs(p.k));
  h(1, 1) = p.k * p.u10;
  return h;
}

/// The closed-form metric diag(-|k|, tau); tau = 0 makes it singular and the
/// warning flag is raised.
inline KHMetric kh_metric(const KHParameters& p, const Tolerance& tol = {}) {
  p.validate();
  tol.validate();
  KHMetric out;
  out.tau = kh_tau(p);
  out.G = ComplexMatrix::Zero(2, 2);
  out.G(0, 0) = -std::abs(p.k);
  out.G(1, 1) = out.tau;
  out.singular_warning = std::abs(out.tau) <= std::max(tol.abs_floor, tol.rel * out.G.norm());
  return out;
}

/// Closed-form eigenvalues and eigenvectors, validated per call against a
/// direct eigensolve of the 2x2 Hamiltonian.
inline KHEigensystem kh_eigensystem(const KHParameters& p, const Tolerance& tol = {}) {
  p.validate();
  tol.validate();
  const double rs = p.rho10 + p.rho20;
  const double du = p.u10 - p.u20;
  const double ak = std::abs(p.k);

  KHEigensystem out;
  out.tau = kh_tau(p);
  out.delta = -ak * p.g * (p.rho10 * p.rho10 - p.rho20 * p.rho20) - p.k * p.k * p.rho10 * p.rho20 * du * du;
  const double delta_scale =
      ak * std::abs(p.g) * (p.rho10 * p.rho10 + p.rho20 * p.rho20) + p.k * p.k * p.rho10 * p.rho20 * du * du;
  out.exceptional = std::abs(out.delta) <= std::max(tol.abs_floor, tol.rel * delta_scale);

  const Complex sqrt_delta =
      out.delta >= 0.0 ? Complex(std::sqrt(out.delta), 0.0) : Complex(0.0, std::sqrt(-out.delta));
  const double mean = p.k * (p.rho10 * p.u10 + p.rho20 * p.u20);
  out.a1 = (mean - sqrt_delta) / rs;
  out.a2 = (mean + sqrt_delta) / rs;
  const Complex ik_term = Complex(0.0, -p.k * p.rho20 * du);
  out.phi1 << (ik_term - Complex(0.0, 1.0) * sqrt_delta) / (ak * rs), Complex(1.0, 0.0);
  out.phi2 << (ik_term + Complex(0.0, 1.0) * sqrt_delta) / (ak * rs), Complex(1.0, 0.0);

  // Cross-check against the direct eigensolve; the permitted mismatch grows
  // near the exceptional point, where the eigenvalue condition blows up.
  const ComplexMatrix h = kh_hamiltonian(p);
  const double scale_h = std::max(1.0, h.norm());
  Eigen::ComplexEigenSolver<ComplexMatrix> es(h, false);
  if (es.info() != Eigen::Success) throw computational_error("kh_eigensystem: direct eigensolve failed");
  const Complex m1 = es.eigenvalues()(0);
  const Complex m2 = es.eigenvalues()(1);
  const double mismatch = std::min(std::max(std::abs(out.a1 - m1), std::abs(out.a2 - m2)),
                                   std::max(std::abs(out.a1 - m2), std::abs(out.a2 - m1)));
  const double sep = std::abs(out.a1 - out.a2);
  const double eig_err_bound = 1e-13 * scale_h * (1.0 + scale_h / std::max(sep, 1e-13 * scale_h));
  if (mismatch > std::max({tol.abs_floor, tol.rel * scale_h, eig_err_bound}))
    throw computational_error("kh_eigensystem: closed-form eigenvalues disagree with the direct eigensolve");
  if (!out.exceptional) {
    const double r1 = (h * out.phi1 - out.a1 * out.phi1).norm();
    const double r2 = (h * out.phi2 - out.a2 * out.phi2).norm();
    const double gate =
        std::max(tol.abs_floor, tol.rel * scale_h * std::max(1.0, std::max(out.phi1.norm(), out.phi2.norm())));
    if (r1 > gate || r2 > gate)
      throw computational_error("kh_eigensystem: closed-form eigenvectors fail the eigen-relation");
  }
  return out;
}

/// The one-parameter family in u20 with the fixed parameters of `fixed`
/// (its u20 field is ignored), consumable by krein::sweep.
struct KHFamily {
  KHParameters fixed;

  KHParameters at(double u20) const {
    KHParameters p = fixed;
    p.u20 = u20;
    return p;
  }
  MatrixFamily hamiltonian_family() const {
    return [base = fixed](double u20) {
      KHParameters p = base;
      p.u20 = u20;
      return kh_hamiltonian(p);
    };
  }
  MatrixFamily metric_family() const {
    return [base = fixed](double u20) {
      KHParameters p = base;
      p.u20 = u20;
      return kh_metric(p).G;
    };
  }
};

inline KHFamily kh_family(const KHParameters& fixed) {
  fixed.validate();
  return KHFamily{fixed};
}

}  // namespace ptkrein
