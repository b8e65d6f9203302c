#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "ptkrein/types.hpp"

namespace ptkrein {

/// One computed eigenvalue cluster: nearby Schur eigenvalues merged into a
/// single mathematical eigenvalue. A cluster whose centroid lies within the
/// clustering radius of the real axis is classified real and snapped onto it.
struct EigenCluster {
  Complex center;
  int multiplicity = 0;
  bool is_real = false;
  double diameter = 0.0;
};

/// Jordan structure attached to one eigenvalue: block dimensions, largest first.
struct JordanBlockSpec {
  Complex eigenvalue;
  std::vector<int> sizes;
};

/// Numerical Jordan decomposition H = Q^{-1} J Q with canonical block order.
/// `residual` is ||QH - JQ||_F / ||H||_F and `cond_q` estimates kappa(Q); both
/// must be inspected by callers that need to trust the structure.
struct JordanDecomposition {
  std::vector<JordanBlockSpec> blocks;
  ComplexMatrix Q;
  ComplexMatrix J;
  double residual = 0.0;
  double cond_q = 0.0;

  int dimension() const {
    int n = 0;
    for (const auto& b : blocks)
      for (int s : b.sizes) n += s;
    return n;
  }
};

/// Block data of a decomposition stripped of the transform, suitable for
/// similarity comparisons up to eigenvalue tolerance.
struct StructureSignature {
  std::vector<JordanBlockSpec> entries;
};

namespace detail {

/// Radius used to merge computed eigenvalues into one cluster. Defective
/// eigenvalues of multiplicity m perturb like eps^(1/m), so the window scales
/// with sqrt(rel) rather than rel.
inline double cluster_radius(const ComplexMatrix& h, const Tolerance& tol) {
  return std::max(tol.abs_floor, std::sqrt(tol.rel) * h.norm());
}

/// Canonical eigenvalue order: real (snapped) eigenvalues first, ascending;
/// then complex ones by (real part, |imag part|) with the +imag member first.
inline bool canonical_eigenvalue_less(const Complex& a, const Complex& b) {
  const bool ra = a.imag() == 0.0;
  const bool rb = b.imag() == 0.0;
  if (ra != rb) return ra;
  if (a.real() != b.real()) return a.real() < b.real();
  if (ra) return false;
  const double ia = std::abs(a.imag());
  const double ib = std::abs(b.imag());
  if (ia != ib) return ia < ib;
  return a.imag() > b.imag();
}

struct ClusterInfo {
  EigenCluster cluster;
  std::vector<int> schur_positions;
};

/// Single-linkage clustering of computed eigenvalues with link length
/// `radius`, followed by real-axis snapping and canonical ordering.
inline std::vector<ClusterInfo> cluster_schur_eigenvalues(const ComplexVector& eigs, double radius) {
  const int n = static_cast<int>(eigs.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(eigs[i] - eigs[j]) <= radius) parent[find(i)] = find(j);

  std::vector<ClusterInfo> clusters;
  std::vector<int> root_slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (root_slot[r] < 0) {
      root_slot[r] = static_cast<int>(clusters.size());
      clusters.push_back({});
    }
    clusters[root_slot[r]].schur_positions.push_back(i);
  }
  for (auto& c : clusters) {
    Complex sum = 0.0;
    for (int idx : c.schur_positions) sum += eigs[idx];
    c.cluster.multiplicity = static_cast<int>(c.schur_positions.size());
    c.cluster.center = sum / static_cast<double>(c.cluster.multiplicity);
    double diam = 0.0;
    for (int p : c.schur_positions)
      for (int q : c.schur_positions) diam = std::max(diam, std::abs(eigs[p] - eigs[q]));
    c.cluster.diameter = diam;
    if (std::abs(c.cluster.center.imag()) <= radius) {
      c.cluster.center.imag(0.0);
      c.cluster.is_real = true;
    }
  }
  std::stable_sort(clusters.begin(), clusters.end(), [](const ClusterInfo& a, const ClusterInfo& b) {
    return canonical_eigenvalue_less(a.cluster.center, b.cluster.center);
  });
  return clusters;
}

/// Unitary swap of the adjacent diagonal entries (i, i+1) of an upper
/// triangular T, accumulating the rotation into U.
inline void swap_schur_adjacent(ComplexMatrix& t, ComplexMatrix& u, Eigen::Index i) {
  const Complex a = t(i, i);
  const Complex b = t(i, i + 1);
  const Complex d = t(i + 1, i + 1);
  const double nrm = std::hypot(std::abs(b), std::abs(d - a));
  if (nrm == 0.0) return;
  Eigen::Matrix2cd z;
  z << b / nrm, -std::conj((d - a) / nrm), (d - a) / nrm, std::conj(b / nrm);
  t.block(0, i, t.rows(), 2) = (t.block(0, i, t.rows(), 2) * z).eval();
  t.block(i, 0, 2, t.cols()) = (z.adjoint() * t.block(i, 0, 2, t.cols())).eval();
  u.block(0, i, u.rows(), 2) = (u.block(0, i, u.rows(), 2) * z).eval();
  t(i + 1, i) = Complex(0.0, 0.0);
}

/// Bubbles the selected Schur positions to the leading block, so that the
/// first columns of U span the corresponding invariant subspace.
inline void reorder_schur_to_top(ComplexMatrix& t, ComplexMatrix& u, std::vector<char>& selected) {
  const Eigen::Index n = t.rows();
  Eigen::Index target = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!selected[j]) continue;
    for (Eigen::Index i = j; i > target; --i) {
      swap_schur_adjacent(t, u, i - 1);
      std::swap(selected[i - 1], selected[i]);
    }
    ++target;
  }
}

struct ClusterChains {
  std::vector<int> sizes_desc;
  // chains[c][j] is the (j+1)-th chain vector v_{j+1} in cluster coordinates;
  // chains[c][0] is the eigenvector, the last entry the chain top.
  std::vector<std::vector<ComplexVector>> chains;
};

/// Rank staircase and generalized eigenvector chains for one cluster, working
/// on the restriction Tc of H to the cluster's invariant subspace. Rank
/// decisions treat singular values at the cluster-diameter scale as zero.
inline ClusterChains cluster_chains(const ComplexMatrix& tc, const Complex& center, double diameter,
                                    const Tolerance& tol) {
  const Eigen::Index a = tc.rows();
  const ComplexMatrix mc = tc - center * ComplexMatrix::Identity(a, a);

  std::vector<int> ranks{static_cast<int>(a)};
  std::vector<ComplexMatrix> kernels;  // kernels[k-1] spans ker(mc^k)
  ComplexMatrix power = ComplexMatrix::Identity(a, a);
  while (ranks.back() > 0) {
    const int k = static_cast<int>(ranks.size());
    if (k > a)
      throw ill_conditioning_error(
          "jordan: rank staircase failed to terminate; retry with a looser or tighter tolerance");
    power = (power * mc).eval();
    Eigen::JacobiSVD<ComplexMatrix> svd(power, Eigen::ComputeFullV);
    const double sigma_max = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    const double theta =
        std::max({tol.abs_floor, tol.rel * sigma_max, std::pow(2.0 * diameter, static_cast<double>(k))});
    int r = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > theta) ++r;
    if (r > ranks.back())
      throw ill_conditioning_error(
          "jordan: rank staircase is not monotone at the working tolerance; retry with a looser or "
          "tighter tolerance");
    kernels.push_back(svd.matrixV().rightCols(a - r));
    ranks.push_back(r);
  }

  const int max_size = static_cast<int>(ranks.size()) - 1;
  std::vector<int> blocks_ge(max_size + 2, 0);  // blocks_ge[k] = #blocks of size >= k
  for (int k = 1; k <= max_size; ++k) blocks_ge[k] = ranks[k - 1] - ranks[k];
  for (int k = 1; k < max_size; ++k)
    if (blocks_ge[k + 1] > blocks_ge[k])
      throw ill_conditioning_error(
          "jordan: staircase block counts are not monotone; retry with a looser or tighter tolerance");
  if (max_size == 0 || blocks_ge[1] <= 0)
    throw ill_conditioning_error("jordan: cluster exposes no eigenvector at the working tolerance");

  ClusterChains out;
  for (int m = max_size; m >= 1; --m) {
    const int n_new = blocks_ge[m] - blocks_ge[m + 1];
    if (n_new == 0) continue;
    const ComplexMatrix& x = kernels[m - 1];  // orthonormal basis of ker(mc^m)

    // Directions already spoken for at this level: ker(mc^{m-1}) plus the
    // level-m element of every longer chain.
    std::vector<ComplexVector> obstruction;
    if (m >= 2)
      for (Eigen::Index c = 0; c < kernels[m - 2].cols(); ++c) obstruction.push_back(kernels[m - 2].col(c));
    for (const auto& chain : out.chains)
      if (static_cast<int>(chain.size()) > m) {
        ComplexVector v = chain[m - 1];
        const double nv = v.norm();
        if (nv > 0.0) v /= nv;
        obstruction.push_back(v);
      }

    ComplexMatrix tops;
    if (obstruction.empty()) {
      tops = x.leftCols(n_new);
    } else {
      ComplexMatrix b(a, static_cast<Eigen::Index>(obstruction.size()));
      for (Eigen::Index c = 0; c < b.cols(); ++c) b.col(c) = obstruction[static_cast<size_t>(c)];
      Eigen::JacobiSVD<ComplexMatrix> svd_b(b, Eigen::ComputeThinU);
      const double smax = svd_b.singularValues().size() > 0 ? svd_b.singularValues()(0) : 0.0;
      int rank_b = 0;
      for (Eigen::Index i = 0; i < svd_b.singularValues().size(); ++i)
        if (svd_b.singularValues()(i) > std::max(tol.abs_floor, tol.rel * smax)) ++rank_b;
      const ComplexMatrix borth = svd_b.matrixU().leftCols(rank_b);
      // Pick kernel combinations with the least overlap onto the obstruction:
      // trailing right singular vectors of borth^dagger x.
      Eigen::JacobiSVD<ComplexMatrix> svd_g(ComplexMatrix(borth.adjoint() * x), Eigen::ComputeFullV);
      tops = x * svd_g.matrixV().rightCols(n_new);
    }

    for (int c = 0; c < n_new; ++c) {
      std::vector<ComplexVector> chain(static_cast<size_t>(m));
      chain[static_cast<size_t>(m - 1)] = tops.col(c);
      for (int j = m - 1; j >= 1; --j) chain[static_cast<size_t>(j - 1)] = mc * chain[static_cast<size_t>(j)];
      out.chains.push_back(std::move(chain));
      out.sizes_desc.push_back(m);
    }
  }
  return out;
}

struct SchurData {
  ComplexMatrix t;
  ComplexMatrix u;
  std::vector<ClusterInfo> clusters;
};

inline SchurData schur_with_clusters(const ComplexMatrix& h, const Tolerance& tol, double radius_override,
                                     bool compute_u) {
  tol.validate();
  require_square(h, "jordan");
  require_finite(h, "jordan");
  Eigen::ComplexSchur<ComplexMatrix> schur(h, compute_u);
  if (schur.info() != Eigen::Success)
    throw computational_error("jordan: Schur reduction failed to converge");
  SchurData out;
  out.t = schur.matrixT();
  if (compute_u) out.u = schur.matrixU();
  const double radius = radius_override > 0.0 ? radius_override : cluster_radius(h, tol);
  out.clusters = cluster_schur_eigenvalues(out.t.diagonal(), radius);
  return out;
}

inline JordanDecomposition jordan_decompose_impl(const ComplexMatrix& h, const Tolerance& tol,
                                                 double radius_override) {
  SchurData sd = schur_with_clusters(h, tol, radius_override, true);
  const Eigen::Index n = h.rows();

  ComplexMatrix v(n, n);  // columns: generalized eigenvector chains, H V = V J
  ComplexMatrix j = ComplexMatrix::Zero(n, n);
  std::vector<JordanBlockSpec> blocks;
  Eigen::Index col = 0;

  for (const auto& info : sd.clusters) {
    const Eigen::Index a = info.cluster.multiplicity;
    // Rotate this cluster's eigenvalues to the leading Schur block; the first
    // a columns of U then span its invariant subspace.
    ComplexMatrix t = sd.t;
    ComplexMatrix u = sd.u;
    std::vector<char> selected(static_cast<size_t>(n), 0);
    for (int p : info.schur_positions) selected[static_cast<size_t>(p)] = 1;
    reorder_schur_to_top(t, u, selected);
    const ComplexMatrix w = u.leftCols(a);
    const ComplexMatrix tc = t.topLeftCorner(a, a);

    ClusterChains chains = cluster_chains(tc, info.cluster.center, info.cluster.diameter, tol);

    JordanBlockSpec spec;
    spec.eigenvalue = info.cluster.center;
    spec.sizes = chains.sizes_desc;
    blocks.push_back(spec);

    for (const auto& chain : chains.chains) {
      const int m = static_cast<int>(chain.size());
      std::vector<ComplexVector> lifted(chain.size());
      for (int jj = 0; jj < m; ++jj) lifted[static_cast<size_t>(jj)] = w * chain[static_cast<size_t>(jj)];
      // Deterministic per-chain phase: largest entry of the eigenvector made
      // real positive. A chain may only be rescaled as a whole.
      Eigen::Index imax = 0;
      lifted[0].cwiseAbs().maxCoeff(&imax);
      const Complex pivot = lifted[0](imax);
      if (std::abs(pivot) > 0.0) {
        const Complex phase = pivot / std::abs(pivot);
        for (auto& vec : lifted) vec /= phase;
      }
      for (int jj = 0; jj < m; ++jj) {
        v.col(col + jj) = lifted[static_cast<size_t>(jj)];
        j(col + jj, col + jj) = info.cluster.center;
        if (jj + 1 < m) j(col + jj, col + jj + 1) = 1.0;
      }
      col += m;
    }
  }
  if (col != n) throw computational_error("jordan: chain columns do not fill the space");

  Eigen::JacobiSVD<ComplexMatrix> svd_v(v);
  const double smax = svd_v.singularValues()(0);
  const double smin = svd_v.singularValues()(svd_v.singularValues().size() - 1);
  if (!(smin > tol.abs_floor * std::max(1.0, smax)))
    throw ill_conditioning_error("jordan: generalized eigenvector basis is numerically singular");

  JordanDecomposition out;
  out.blocks = std::move(blocks);
  out.J = std::move(j);
  out.Q = v.inverse();
  out.cond_q = smax / smin;
  const double hnorm = h.norm();
  out.residual = (out.Q * h - out.J * out.Q).norm() / (hnorm > 0.0 ? hnorm : 1.0);
  return out;
}

}  // namespace detail

/// Groups the computed eigenvalues of H into clusters and returns centroids
/// with algebraic multiplicities, in canonical order.
inline std::vector<EigenCluster> eigen_cluster(const ComplexMatrix& h, const Tolerance& tol = {}) {
  detail::SchurData sd = detail::schur_with_clusters(h, tol, 0.0, false);
  std::vector<EigenCluster> out;
  out.reserve(sd.clusters.size());
  for (const auto& c : sd.clusters) out.push_back(c.cluster);
  return out;
}

/// Numerical Jordan decomposition H = Q^{-1} J Q via Schur reduction,
/// eigenvalue clustering, a per-cluster rank staircase and generalized
/// eigenvector chains. Deterministic: identical input gives identical output.
inline JordanDecomposition jordan_decompose(const ComplexMatrix& h, const Tolerance& tol = {}) {
  return detail::jordan_decompose_impl(h, tol, 0.0);
}

/// Block data of `d` in canonical order, stripped of the transform.
inline StructureSignature structure_signature(const JordanDecomposition& d) {
  StructureSignature sig;
  sig.entries = d.blocks;
  return sig;
}

/// Signature with every eigenvalue conjugated, re-canonicalized.
inline StructureSignature conjugate_signature(const StructureSignature& sig) {
  StructureSignature out = sig;
  for (auto& e : out.entries) e.eigenvalue = std::conj(e.eigenvalue);
  std::stable_sort(out.entries.begin(), out.entries.end(), [](const JordanBlockSpec& a, const JordanBlockSpec& b) {
    return detail::canonical_eigenvalue_less(a.eigenvalue, b.eigenvalue);
  });
  return out;
}

/// Matches the entries of two signatures up to eigenvalue distance
/// `eig_tol`; both block-size multisets must agree exactly. Returns the
/// pairing (indices into a and b) or nullopt when no matching exists.
inline std::optional<std::vector<std::pair<int, int>>> match_signatures(const StructureSignature& a,
                                                                        const StructureSignature& b,
                                                                        double eig_tol) {
  if (a.entries.size() != b.entries.size()) return std::nullopt;
  const int k = static_cast<int>(a.entries.size());
  std::vector<char> used(static_cast<size_t>(k), 0);
  std::vector<std::pair<int, int>> pairing;
  for (int i = 0; i < k; ++i) {
    int best = -1;
    double best_dist = eig_tol;
    for (int jj = 0; jj < k; ++jj) {
      if (used[static_cast<size_t>(jj)]) continue;
      if (a.entries[static_cast<size_t>(i)].sizes != b.entries[static_cast<size_t>(jj)].sizes) continue;
      const double dist = std::abs(a.entries[static_cast<size_t>(i)].eigenvalue -
                                   b.entries[static_cast<size_t>(jj)].eigenvalue);
      if (dist <= best_dist) {
        best_dist = dist;
        best = jj;
      }
    }
    if (best < 0) return std::nullopt;
    used[static_cast<size_t>(best)] = 1;
    pairing.emplace_back(i, best);
  }
  return pairing;
}

}  // namespace ptkrein
