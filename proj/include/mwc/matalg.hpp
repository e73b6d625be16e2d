#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "mwc/error.hpp"

namespace mwc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultSymTol = 1e-12;
inline constexpr double kDefaultEigTol = 1e-9;
inline constexpr double kAbsoluteEigFloor = 1e-12;

/**
 * A real symmetric matrix. Symmetry is checked once at construction, so every
 * routine taking a SymMatrix can hand it straight to a self-adjoint solver.
 */
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(Matrix entries, double sym_tol = kDefaultSymTol) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "matrix is " + std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()));
    }
    const double asym = m_.size() == 0 ? 0.0 : (m_ - m_.transpose()).cwiseAbs().maxCoeff();
    if (asym > sym_tol) {
      throw Error(ErrorCode::NonSymmetric, "max |M_pq - M_qp| = " + std::to_string(asym));
    }
  }

  /// Averages M with its transpose; for products that are symmetric only up to rounding.
  static SymMatrix symmetrized(const Matrix& m) {
    SymMatrix s;
    s.m_ = 0.5 * (m + m.transpose());
    return s;
  }

  static SymMatrix zero(Eigen::Index order) { return SymMatrix(Matrix::Zero(order, order)); }
  static SymMatrix identity(Eigen::Index order) { return SymMatrix(Matrix::Identity(order, order)); }

  Eigen::Index order() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Eigen::Index p, Eigen::Index q) const { return m_(p, q); }

  friend SymMatrix operator*(double s, const SymMatrix& a) {
    SymMatrix r;
    r.m_ = s * a.m_;
    return r;
  }
  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    if (a.order() != b.order()) throw Error(ErrorCode::DimensionMismatch, "SymMatrix sum");
    SymMatrix r;
    r.m_ = a.m_ + b.m_;
    return r;
  }
  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.order() == b.order() && a.m_ == b.m_;
  }

 private:
  Matrix m_;
};

enum class Definiteness {
  PositiveDefinite,
  PositiveSemiDefinite,
  NegativeDefinite,
  NegativeSemiDefinite,
  Zero,
  Indefinite,
};

inline const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite: return "PD";
    case Definiteness::PositiveSemiDefinite: return "PSD";
    case Definiteness::NegativeDefinite: return "ND";
    case Definiteness::NegativeSemiDefinite: return "NSD";
    case Definiteness::Zero: return "Zero";
    case Definiteness::Indefinite: return "Indefinite";
  }
  return "?";
}

inline bool is_definite(Definiteness d) {
  return d == Definiteness::PositiveDefinite || d == Definiteness::NegativeDefinite;
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
struct SymEigen {
  Vector values;
  Matrix vectors;

  static SymEigen of(const SymMatrix& m) {
    if (m.order() == 0) return {Vector(0), Matrix(0, 0)};
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix());
    return {solver.eigenvalues(), solver.eigenvectors()};
  }

  double min() const { return values.size() ? values(0) : 0.0; }
  double max() const { return values.size() ? values(values.size() - 1) : 0.0; }
  double max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

/// Zero threshold used for PSD matrices: eig_tol * max(1, lambda_max).
inline double psd_zero_threshold(const SymEigen& eig, double eig_tol) {
  return eig_tol * std::max(1.0, eig.max());
}

inline void require_psd(const SymEigen& eig, double eig_tol, const char* what) {
  const double thr = psd_zero_threshold(eig, eig_tol);
  if (eig.min() < -thr) {
    throw Error(ErrorCode::NotPSD, std::string(what) + ": eigenvalue " + std::to_string(eig.min()));
  }
}

inline Definiteness classify_definiteness(const SymEigen& eig, double eig_tol = kDefaultEigTol) {
  const double tol = std::max(eig_tol * eig.max_abs(), kAbsoluteEigFloor);
  const double lo = eig.min();
  const double hi = eig.max();
  if (lo >= -tol && hi <= tol) return Definiteness::Zero;
  if (lo > tol) return Definiteness::PositiveDefinite;
  if (hi < -tol) return Definiteness::NegativeDefinite;
  if (lo >= -tol) return Definiteness::PositiveSemiDefinite;
  if (hi <= tol) return Definiteness::NegativeSemiDefinite;
  return Definiteness::Indefinite;
}

inline Definiteness classify_definiteness(const SymMatrix& m, double eig_tol = kDefaultEigTol) {
  return classify_definiteness(SymEigen::of(m), eig_tol);
}

inline int sign_of(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite:
    case Definiteness::PositiveSemiDefinite: return 1;
    case Definiteness::NegativeDefinite:
    case Definiteness::NegativeSemiDefinite: return -1;
    case Definiteness::Zero: return 0;
    case Definiteness::Indefinite: break;
  }
  throw Error(ErrorCode::IndefiniteWeight, "sign of an indefinite matrix is undefined");
}

inline int matrix_sign(const SymMatrix& m, double eig_tol = kDefaultEigTol) {
  return sign_of(classify_definiteness(m, eig_tol));
}

/// |M| = sgn(M) M for sign-definite M. Indefinite inputs are rejected.
inline SymMatrix matrix_abs(const SymMatrix& m, double eig_tol = kDefaultEigTol) {
  return static_cast<double>(matrix_sign(m, eig_tol)) * m;
}

/// Orthonormal basis of a subspace of R^ambient_dim, stored as matrix columns.
struct NullSpaceBasis {
  Eigen::Index ambient_dim = 0;
  Matrix vectors;  // ambient_dim x dim
  double tol_used = 0.0;

  Eigen::Index dim() const { return vectors.cols(); }
  bool empty() const { return vectors.cols() == 0; }
  Vector vector(Eigen::Index k) const { return vectors.col(k); }

  static NullSpaceBasis from_columns(Matrix columns, double tol_used = 0.0) {
    NullSpaceBasis b;
    b.ambient_dim = columns.rows();
    b.vectors = std::move(columns);
    b.tol_used = tol_used;
    return b;
  }
};

inline NullSpaceBasis null_space(const SymEigen& eig, double eig_tol = kDefaultEigTol) {
  require_psd(eig, eig_tol, "null_space");
  const double thr = psd_zero_threshold(eig, eig_tol);
  Eigen::Index count = 0;
  // Ties at the threshold count as zero.
  while (count < eig.values.size() && eig.values(count) <= thr) ++count;
  NullSpaceBasis b;
  b.ambient_dim = eig.values.size();
  b.vectors = eig.vectors.leftCols(count);
  b.tol_used = thr;
  return b;
}

inline NullSpaceBasis null_space(const SymMatrix& m, double eig_tol = kDefaultEigTol) {
  return null_space(SymEigen::of(m), eig_tol);
}

/// P = sum_i eta_i eta_i^T.
inline SymMatrix projector(const NullSpaceBasis& b) {
  return SymMatrix::symmetrized(b.vectors * b.vectors.transpose());
}

/// e^{-L tau} from a precomputed decomposition of a PSD L. Tiny negative
/// eigenvalues from rounding are clamped so the result never expands.
inline SymMatrix matrix_exp_neg(const SymEigen& eig, double tau) {
  if (tau < 0) throw Error(ErrorCode::InvalidArgument, "matrix_exp_neg: tau < 0");
  const Vector beta = (-(eig.values.cwiseMax(0.0)) * tau).array().exp().matrix();
  return SymMatrix::symmetrized(eig.vectors * beta.asDiagonal() * eig.vectors.transpose());
}

inline SymMatrix matrix_exp_neg(const SymMatrix& l, double tau, double eig_tol = kDefaultEigTol) {
  const SymEigen eig = SymEigen::of(l);
  require_psd(eig, eig_tol, "matrix_exp_neg");
  return matrix_exp_neg(eig, tau);
}

/// Frobenius distance between two orthogonal projectors; zero iff the subspaces coincide.
inline double projector_distance(const NullSpaceBasis& a, const NullSpaceBasis& b) {
  if (a.ambient_dim != b.ambient_dim) throw Error(ErrorCode::DimensionMismatch, "projector_distance");
  return (projector(a).matrix() - projector(b).matrix()).norm();
}

}  // namespace mwc
