#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ptkrein/jordan.hpp"
#include "ptkrein/linalg.hpp"
#include "ptkrein/metric.hpp"
#include "ptkrein/types.hpp"

namespace ptkrein {

enum class Kind { first, second, mixed, complex_pair };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::first: return "first";
    case Kind::second: return "second";
    case Kind::mixed: return "mixed";
    case Kind::complex_pair: return "complex-pair";
  }
  return "?";
}

/// Per-eigenvalue Krein data: multiplicities, the spectrum of the metric
/// Gram matrix on the eigenspace, and the resulting kind.
struct KreinClassification {
  Complex eigenvalue;
  int alg_mult = 0;
  int geo_mult = 0;
  Kind kind = Kind::mixed;
  std::vector<double> gram_eigenvalues;  // ascending
  bool zero_action = false;              // some Gram eigenvalue inside the zero band
  int conjugate_partner = -1;            // index of the conjugate classification, complex pairs only
};

/// Multiplicity-weighted counts of definite eigenvalues, cross-checked
/// against the inertia of G. Valid only when every eigenvalue is real and
/// definite; otherwise `applicable` is false.
struct KindCount {
  bool applicable = false;
  int n_first = 0;
  int n_second = 0;
  Inertia g_inertia;
  bool matches_inertia = false;
};

struct TrajectorySample {
  Complex eigenvalue;
  Kind kind = Kind::mixed;
};

/// A detected PT-symmetry-breaking (or restoring) point: the parameter at
/// which some eigenvalue pair leaves or re-enters the real axis.
struct CollisionEvent {
  double parameter_value = 0.0;
  Complex colliding_eigenvalue;
  std::pair<Kind, Kind> kinds_before{Kind::mixed, Kind::mixed};
  bool refined = false;
};

/// Eigenvalue trajectories over a parameter grid with kind labels and the
/// refined collision events.
struct SweepReport {
  std::vector<double> parameter_grid;
  std::vector<std::vector<TrajectorySample>> trajectories;  // [grid point][trajectory]
  std::vector<CollisionEvent> collisions;
};

using MatrixFamily = std::function<ComplexMatrix(double)>;

/// Indefinite inner product x^dagger G y induced by the metric.
inline Complex krein_product(const ComplexVector& x, const ComplexVector& y, const ComplexMatrix& g,
                             const Tolerance& tol = {}) {
  detail::require_square(g, "krein_product");
  if (x.size() != g.rows() || y.size() != g.rows())
    throw dimension_error("krein_product: vector lengths do not match the metric dimension");
  if (!is_hermitian(g, tol)) throw precondition_error("krein_product: metric is not Hermitian");
  return x.adjoint() * g * y;
}

/// Self-product x^dagger G x, asserted real and returned as such.
inline double krein_action(const ComplexVector& x, const ComplexMatrix& g, const Tolerance& tol = {}) {
  const Complex value = krein_product(x, x, g, tol);
  const double scale = detail::residual_scale(x.squaredNorm() * g.norm());
  if (std::abs(value.imag()) > tol.rel * scale)
    throw computational_error("krein_action: self-product has a non-negligible imaginary part");
  return value.real();
}

namespace detail {

/// Minimal-total-distance assignment a[i] <-> b[perm[i]]; exhaustive with
/// pruning at desk scale, greedy beyond it.
inline std::vector<int> min_cost_assignment(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  const int n = static_cast<int>(a.size());
  std::vector<int> best(n), current(n);
  std::vector<char> used(n, 0);
  if (n > 9) {
    // greedy nearest-neighbour fallback for sizes the exhaustive search
    // should not attempt
    for (int i = 0; i < n; ++i) {
      int arg = -1;
      double d = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j)
        if (!used[j] && std::abs(a[i] - b[j]) < d) {
          d = std::abs(a[i] - b[j]);
          arg = j;
        }
      used[arg] = 1;
      best[i] = arg;
    }
    return best;
  }
  double best_cost = std::numeric_limits<double>::infinity();
  auto dfs = [&](auto&& self, int i, double cost) -> void {
    if (cost >= best_cost) return;
    if (i == n) {
      best_cost = cost;
      best = current;
      return;
    }
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      current[i] = j;
      self(self, i + 1, cost + std::abs(a[i] - b[j]));
      used[j] = 0;
    }
  };
  dfs(dfs, 0, 0.0);
  return best;
}

}  // namespace detail

/// Classifies every eigenvalue of a certified pair (H, G) by the signs of
/// the metric Gram matrix on its eigenspace. Real eigenvalues come out
/// first/second/mixed; non-real ones are labelled complex-pair and matched
/// to their conjugates.
inline std::vector<KreinClassification> classify_eigenvalues(const ComplexMatrix& h, const ComplexMatrix& g,
                                                             const Tolerance& tol = {}) {
  tol.validate();
  const PseudoCheckResult check = check_pseudo_with(h, g, tol);
  if (!check.ok()) {
    std::string what = "classify_eigenvalues: (H, G) is not a certified pseudo-Hermitian pair";
    for (const auto& f : check.failures)
      what += "; gate " + f.gate + ": " + std::to_string(f.value) + " vs " + std::to_string(f.threshold);
    throw precondition_error(what);
  }

  const std::vector<EigenCluster> clusters = eigen_cluster(h, tol);
  const Eigen::Index n = h.rows();
  const double band = std::max(tol.abs_floor, tol.rel * g.norm());

  std::vector<KreinClassification> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) {
    KreinClassification cl;
    cl.eigenvalue = c.center;
    cl.alg_mult = c.multiplicity;

    // Geometric eigenspace: numerical kernel of H - lambda I, with singular
    // values at the cluster-diameter scale treated as zero.
    const ComplexMatrix shifted = h - c.center * ComplexMatrix::Identity(n, n);
    Eigen::JacobiSVD<ComplexMatrix> svd(shifted, Eigen::ComputeFullV);
    const double smax = svd.singularValues()(0);
    const double theta = std::max({tol.abs_floor, tol.rel * smax, 2.0 * c.diameter});
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > theta) ++rank;
    cl.geo_mult = static_cast<int>(n) - rank;
    if (cl.geo_mult == 0) cl.geo_mult = 1;  // the trailing singular vector is the best eigenvector
    const ComplexMatrix basis = svd.matrixV().rightCols(cl.geo_mult);

    if (!c.is_real) {
      cl.kind = Kind::complex_pair;
      out.push_back(std::move(cl));
      continue;
    }

    ComplexMatrix gram = basis.adjoint() * g * basis;
    gram = 0.5 * (gram + gram.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw computational_error("classify_eigenvalues: Gram eigensolve failed");
    cl.gram_eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());

    bool all_pos = true, all_neg = true;
    for (double lam : cl.gram_eigenvalues) {
      if (!(lam > band)) all_pos = false;
      if (!(lam < -band)) all_neg = false;
      if (std::abs(lam) <= band) cl.zero_action = true;
    }
    cl.kind = all_pos ? Kind::first : (all_neg ? Kind::second : Kind::mixed);
    out.push_back(std::move(cl));
  }

  // Pair complex eigenvalues with their conjugates.
  const double pair_tol = detail::cluster_radius(h, tol);
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i].kind != Kind::complex_pair || out[i].eigenvalue.imag() <= 0.0) continue;
    for (size_t j = 0; j < out.size(); ++j) {
      if (i == j || out[j].kind != Kind::complex_pair || out[j].conjugate_partner >= 0) continue;
      if (std::abs(std::conj(out[i].eigenvalue) - out[j].eigenvalue) <= pair_tol) {
        out[i].conjugate_partner = static_cast<int>(j);
        out[j].conjugate_partner = static_cast<int>(i);
        break;
      }
    }
  }
  return out;
}

/// Multiplicity-weighted first/second counts, cross-checked against the
/// inertia of G. Returns a not-applicable marker when any eigenvalue is
/// mixed or non-real.
inline KindCount count_kinds(const std::vector<KreinClassification>& classifications, const ComplexMatrix& g,
                             const Tolerance& tol = {}) {
  KindCount out;
  for (const auto& c : classifications)
    if (c.kind != Kind::first && c.kind != Kind::second) return out;
  out.applicable = true;
  for (const auto& c : classifications) {
    if (c.kind == Kind::first)
      out.n_first += c.alg_mult;
    else
      out.n_second += c.alg_mult;
  }
  out.g_inertia = inertia(g, tol);
  out.matches_inertia = (out.n_first == out.g_inertia.positive) && (out.n_second == out.g_inertia.negative);
  return out;
}

/// True iff every eigenvalue of the certified pair is real and definite.
inline bool strong_stability(const ComplexMatrix& h, const ComplexMatrix& g, const Tolerance& tol = {}) {
  const auto classifications = classify_eigenvalues(h, g, tol);
  for (const auto& c : classifications)
    if (c.kind != Kind::first && c.kind != Kind::second) return false;
  return true;
}

namespace detail {

inline bool any_nonreal_eigenvalue(const ComplexMatrix& h, const Tolerance& tol) {
  for (const auto& c : eigen_cluster(h, tol))
    if (!c.is_real) return true;
  return false;
}

}  // namespace detail

/// Bisects the indicator "some eigenvalue is non-real" on a bracketing pair:
/// all eigenvalues real at p_lo, a non-real one present at p_hi. Returns the
/// breaking parameter to accuracy 1e-10 * max(1, |p_hi|).
inline double locate_collision(const MatrixFamily& hamiltonian, const MatrixFamily& /*metric*/, double p_lo,
                               double p_hi, const Tolerance& tol = {}) {
  tol.validate();
  if (detail::any_nonreal_eigenvalue(hamiltonian(p_lo), tol))
    throw precondition_error("locate_collision: spectrum at p_lo is not purely real (not a bracket)");
  if (!detail::any_nonreal_eigenvalue(hamiltonian(p_hi), tol))
    throw precondition_error("locate_collision: spectrum at p_hi has no non-real eigenvalue (not a bracket)");
  const double accuracy = 1e-10 * std::max(1.0, std::abs(p_hi));
  double lo = p_lo, hi = p_hi;
  while (std::abs(hi - lo) > accuracy) {
    const double mid = 0.5 * (lo + hi);
    if (detail::any_nonreal_eigenvalue(hamiltonian(mid), tol))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

/// Evaluates eigenvalues and kinds of the family over a uniform grid, tracks
/// trajectories by minimal-distance matching, and records a refined collision
/// event wherever the spectrum leaves (or re-enters) the real axis.
inline SweepReport sweep(const MatrixFamily& hamiltonian, const MatrixFamily& metric, double p_min,
                         double p_max, int steps, const Tolerance& tol = {}) {
  tol.validate();
  if (steps < 2) throw precondition_error("sweep: need at least 2 grid points");
  if (!(p_min < p_max)) throw precondition_error("sweep: p_min must be below p_max");

  SweepReport report;
  report.parameter_grid.resize(steps);
  for (int i = 0; i < steps; ++i)
    report.parameter_grid[i] = p_min + (p_max - p_min) * static_cast<double>(i) / (steps - 1);

  std::vector<std::vector<TrajectorySample>> raw(steps);
  std::vector<char> nonreal(steps, 0);
  for (int i = 0; i < steps; ++i) {
    const double p = report.parameter_grid[i];
    std::vector<KreinClassification> cls;
    try {
      cls = classify_eigenvalues(hamiltonian(p), metric(p), tol);
    } catch (const error& e) {
      throw computational_error("sweep: certification failed at parameter " + std::to_string(p) + ": " +
                                e.what());
    }
    for (const auto& c : cls) {
      for (int m = 0; m < c.alg_mult; ++m) raw[i].push_back({c.eigenvalue, c.kind});
      if (c.kind == Kind::complex_pair) nonreal[i] = 1;
    }
  }

  // Track trajectories across the grid by minimal-total-distance matching.
  const int n = static_cast<int>(raw[0].size());
  std::vector<std::vector<int>> position(steps, std::vector<int>(n));
  for (int t = 0; t < n; ++t) position[0][t] = t;
  for (int i = 0; i + 1 < steps; ++i) {
    std::vector<Complex> from(n), to(raw[i + 1].size());
    for (int t = 0; t < n; ++t) from[t] = raw[i][position[i][t]].eigenvalue;
    for (size_t j = 0; j < to.size(); ++j) to[j] = raw[i + 1][j].eigenvalue;
    const std::vector<int> match = detail::min_cost_assignment(from, to);
    for (int t = 0; t < n; ++t) position[i + 1][t] = match[t];
  }
  report.trajectories.resize(steps);
  for (int i = 0; i < steps; ++i) {
    report.trajectories[i].resize(n);
    for (int t = 0; t < n; ++t) report.trajectories[i][t] = raw[i][position[i][t]];
  }

  for (int i = 0; i + 1 < steps; ++i) {
    if (nonreal[i] == nonreal[i + 1]) continue;
    const int real_side = nonreal[i] ? i + 1 : i;
    const int complex_side = nonreal[i] ? i : i + 1;
    CollisionEvent event;
    event.parameter_value = locate_collision(hamiltonian, metric, report.parameter_grid[real_side],
                                             report.parameter_grid[complex_side], tol);
    event.refined = true;

    // The colliding eigenvalue: the (nearly) multiple cluster at the refined
    // parameter, or the closest pair if clustering kept them apart.
    const auto clusters = eigen_cluster(hamiltonian(event.parameter_value), tol);
    const EigenCluster* multiple = nullptr;
    for (const auto& c : clusters)
      if (c.multiplicity >= 2) multiple = &c;
    if (multiple) {
      event.colliding_eigenvalue = multiple->center;
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (size_t a = 0; a < clusters.size(); ++a)
        for (size_t b = a + 1; b < clusters.size(); ++b) {
          const double d = std::abs(clusters[a].center - clusters[b].center);
          if (d < best) {
            best = d;
            event.colliding_eigenvalue = 0.5 * (clusters[a].center + clusters[b].center);
          }
        }
    }

    // Kinds on the real side of the trajectories that turn complex.
    std::vector<Kind> kinds;
    for (int t = 0; t < n; ++t) {
      const Kind kr = report.trajectories[real_side][t].kind;
      const Kind kc = report.trajectories[complex_side][t].kind;
      if (kr != Kind::complex_pair && kc == Kind::complex_pair) kinds.push_back(kr);
    }
    if (kinds.size() >= 2) event.kinds_before = {kinds[0], kinds[1]};
    report.collisions.push_back(event);
  }
  return report;
}

}  // namespace ptkrein
