#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mwc/error.hpp"
#include "mwc/graph.hpp"
#include "mwc/matalg.hpp"
#include "mwc/switching.hpp"

namespace mwc {

inline constexpr double kDefaultNullSpaceEqTol = 1e-8;
inline constexpr double kDefaultClusterTol = 1e-6;
inline constexpr double kContractionMargin = 1e-6;

/// Basis of the intersection of null(L_i). For PSD L_i that is null(sum L_i).
inline NullSpaceBasis null_intersection(const std::vector<BlockLaplacian>& laplacians,
                                        double eig_tol = kDefaultEigTol) {
  if (laplacians.empty()) throw Error(ErrorCode::InvalidArgument, "null_intersection of nothing");
  const auto order = laplacians.front().matrix.order();
  Matrix sum = Matrix::Zero(order, order);
  for (const auto& l : laplacians) {
    if (l.matrix.order() != order) throw Error(ErrorCode::DimensionMismatch, "Laplacians differ in order");
    const SymEigen eig = SymEigen::of(l.matrix);
    require_psd(eig, eig_tol, "null_intersection");
    sum += l.matrix.matrix();
  }
  return null_space(SymMatrix::symmetrized(sum), eig_tol);
}

enum class ConsensusKind { AsymptoticStability, Consensus, BipartiteConsensus, ClusterConsensus };

inline const char* to_string(ConsensusKind k) {
  switch (k) {
    case ConsensusKind::AsymptoticStability: return "asymptotic_stability";
    case ConsensusKind::Consensus: return "consensus";
    case ConsensusKind::BipartiteConsensus: return "bipartite_consensus";
    case ConsensusKind::ClusterConsensus: return "cluster_consensus";
  }
  return "?";
}

/// Groups agents whose d-blocks agree within tol * max(1, largest block norm).
/// Clusters are listed in order of their lowest member.
inline std::vector<std::vector<int>> extract_clusters(const Vector& x, int n, int d,
                                                      double cluster_tol = kDefaultClusterTol) {
  if (x.size() != n * d) throw Error(ErrorCode::DimensionMismatch, "extract_clusters");
  double scale = 1.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, x.segment(i * d, d).norm());
  const double tol = cluster_tol * scale;
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) {
    auto hit = std::find_if(clusters.begin(), clusters.end(), [&](const auto& c) {
      return (x.segment(i * d, d) - x.segment(c.front() * d, d)).norm() <= tol;
    });
    if (hit == clusters.end()) {
      clusters.push_back({i});
    } else {
      hit->push_back(i);
    }
  }
  return clusters;
}

struct ConsensusPrediction {
  NullSpaceBasis basis;
  Vector steady_state;
  ConsensusKind kind = ConsensusKind::AsymptoticStability;
  std::vector<std::vector<int>> clusters;  // 0-based agents

  int cluster_count() const { return static_cast<int>(clusters.size()); }
};

/// x* = P x0 with P the projector onto span(basis), then cluster extraction.
inline ConsensusPrediction predict_steady_state(const NullSpaceBasis& basis, const Vector& x0, int d,
                                                double cluster_tol = kDefaultClusterTol) {
  if (x0.size() != basis.ambient_dim) {
    throw Error(ErrorCode::DimensionMismatch, "x0 has length " + std::to_string(x0.size()) + ", basis lives in R^" +
                                                   std::to_string(basis.ambient_dim));
  }
  if (d < 1 || basis.ambient_dim % d != 0) throw Error(ErrorCode::DimensionMismatch, "d does not divide dn");
  const int n = static_cast<int>(basis.ambient_dim / d);
  ConsensusPrediction p;
  p.basis = basis;
  p.steady_state = basis.vectors * (basis.vectors.transpose() * x0);
  p.clusters = extract_clusters(p.steady_state, n, d, cluster_tol);
  if (basis.empty()) {
    p.steady_state = Vector::Zero(x0.size());
    p.kind = ConsensusKind::AsymptoticStability;
  } else if (p.cluster_count() == 1) {
    p.kind = ConsensusKind::Consensus;
  } else if (p.cluster_count() == 2) {
    double scale = 1.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, p.steady_state.segment(i * d, d).norm());
    const int a = p.clusters[0].front();
    const int b = p.clusters[1].front();
    const bool opposite =
        (p.steady_state.segment(a * d, d) + p.steady_state.segment(b * d, d)).norm() <= cluster_tol * scale;
    p.kind = opposite ? ConsensusKind::BipartiteConsensus : ConsensusKind::ClusterConsensus;
  } else {
    p.kind = ConsensusKind::ClusterConsensus;
  }
  return p;
}

/// (m+1)-th largest eigenvalue of Phi^T Phi.
inline double mu_m_plus_1(const Matrix& phi, int m) {
  if (m < 0 || m >= phi.cols()) {
    throw Error(ErrorCode::IndexOutOfRange, "m = " + std::to_string(m) + " with dn = " + std::to_string(phi.cols()));
  }
  const SymEigen eig = SymEigen::of(SymMatrix::symmetrized(phi.transpose() * phi));
  return eig.values(eig.values.size() - 1 - m);
}

inline double mu_m_plus_1(const StateTransition& phi, int m) { return mu_m_plus_1(phi.matrix, m); }

struct CertifyOptions {
  double eig_tol = kDefaultEigTol;
  double ns_eq_tol = kDefaultNullSpaceEqTol;
};

struct WindowCertificate {
  IntegralNetwork integral;
  NullSpaceBasis basis;
  double mu = 0.0;
  double distance_to_previous = 0.0;  // projector distance, 0 for the first window
  bool pn_spanning_tree = false;
};

struct CertificationReport {
  std::vector<WindowCertificate> windows;
  bool window_nullspaces_equal = false;
  int m = 0;
  std::vector<double> mu;
  double q_estimate = 0.0;
  bool certified = false;
  std::optional<Bipartition> balance;
  bool pn_spanning_tree = false;

  /// Null space shared by the windows (the first window's basis).
  const NullSpaceBasis& basis() const { return windows.front().basis; }
};

/**
 * Checks the cluster-consensus conditions on a contiguous window partition:
 * every window's averaged Laplacian has the same null space, and each
 * window's transition matrix contracts the complement by mu_{m+1} <= q < 1.
 *
 * When the integral Laplacian vanishes (m = dn) there is nothing to contract
 * and mu is reported as 0.
 */
inline CertificationReport certify_cluster_consensus(const SwitchingSchedule& s, const std::vector<Window>& windows,
                                                     const CertifyOptions& opt = {}) {
  if (windows.empty()) throw Error(ErrorCode::EmptyWindow, "no windows to certify");
  if (windows.front().start != 0) {
    throw Error(ErrorCode::WindowsNotContiguous, "first window must start at segment 0");
  }
  for (std::size_t l = 1; l < windows.size(); ++l) {
    if (windows[l].start != windows[l - 1].end) {
      throw Error(ErrorCode::WindowsNotContiguous,
                  "window " + std::to_string(l) + " starts at " + std::to_string(windows[l].start) +
                      ", previous ends at " + std::to_string(windows[l - 1].end));
    }
  }
  const LaplacianCache cache(s, opt.eig_tol);
  CertificationReport r;
  r.window_nullspaces_equal = true;
  r.pn_spanning_tree = true;
  for (const Window& w : windows) {
    WindowCertificate c{integral_network(s, cache, w), {}, 0.0, 0.0, false};
    c.basis = null_space(c.integral.laplacian.matrix, opt.eig_tol);
    const auto m = static_cast<int>(c.basis.dim());
    const StateTransition phi = state_transition(s, cache, w);
    c.mu = m < s.order() ? mu_m_plus_1(phi, m) : 0.0;
    c.pn_spanning_tree = has_positive_negative_spanning_tree(c.integral.graph, opt.eig_tol).exists;
    if (!r.windows.empty()) {
      c.distance_to_previous = projector_distance(r.windows.back().basis, c.basis);
      if (c.distance_to_previous > opt.ns_eq_tol) r.window_nullspaces_equal = false;
    }
    r.pn_spanning_tree = r.pn_spanning_tree && c.pn_spanning_tree;
    r.mu.push_back(c.mu);
    r.windows.push_back(std::move(c));
  }
  r.m = static_cast<int>(r.windows.front().basis.dim());
  r.q_estimate = *std::max_element(r.mu.begin(), r.mu.end());
  r.certified = r.window_nullspaces_equal && r.q_estimate <= 1.0 - kContractionMargin;
  r.balance = simultaneous_structural_balance(s.graphs(), opt.eig_tol);
  return r;
}

/**
 * Closed-form bipartite limit C (1_n (x) (1/n) Psi Psi^T sum_i sigma_i x0_i),
 * where the columns of psi are orthonormal d-vectors. With psi = I_d this is
 * the gauge average of the initial states mapped back through C.
 */
inline Vector bipartite_steady_state(const Bipartition& b, const Matrix& psi, const Vector& x0) {
  const int n = b.n();
  const auto d = psi.rows();
  if (x0.size() != n * d) throw Error(ErrorCode::DimensionMismatch, "x0 does not have length d*n");
  const Matrix gram = psi.transpose() * psi;
  if ((gram - Matrix::Identity(psi.cols(), psi.cols())).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorCode::NonOrthonormalPsi, "psi columns are not orthonormal");
  }
  Vector gauge_avg = Vector::Zero(d);
  for (int i = 0; i < n; ++i) gauge_avg += b.sigma[i] * x0.segment(i * d, d);
  gauge_avg /= n;
  const Vector agreed = psi * (psi.transpose() * gauge_avg);
  Vector x(n * d);
  for (int i = 0; i < n; ++i) x.segment(i * d, d) = b.sigma[i] * agreed;
  return x;
}

inline double spectral_norm(const SymMatrix& m) { return SymEigen::of(m).max_abs(); }

/// True iff ||L_i x|| <= 1e-6 (1 + ||L_i||) ||x|| for every Laplacian.
inline bool verify_necessary_condition(const Vector& x, const std::vector<BlockLaplacian>& laplacians) {
  for (const auto& l : laplacians) {
    if (l.matrix.order() != x.size()) throw Error(ErrorCode::DimensionMismatch, "verify_necessary_condition");
    const double residual = (l.matrix.matrix() * x).norm();
    if (residual > 1e-6 * (1.0 + spectral_norm(l.matrix)) * x.norm()) return false;
  }
  return true;
}

}  // namespace mwc
