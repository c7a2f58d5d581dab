#pragma once

// Dense real kernels shared by every solver: symmetry test, symmetric spectral
// decomposition, real diagonalizability with clustered eigen-bases, rank and
// null space, congruence and linear solves.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "sdc/errors.hpp"

namespace sdc {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Relative thresholds. The defaults separate small-integer fixtures from
/// double rounding noise; every one of them is scaled by a matrix norm at the
/// point of use.
template <typename Scalar>
struct Tolerances {
  Scalar sym = Scalar(1e-10);
  Scalar eig_cluster = Scalar(1e-8);
  Scalar rank = Scalar(1e-10);
  Scalar residual = Scalar(1e-8);

  void validate() const {
    auto in_range = [](Scalar v) { return v > Scalar(0) && v < Scalar(1); };
    if (!in_range(sym) || !in_range(eig_cluster) || !in_range(rank) || !in_range(residual)) {
      throw PreconditionError("tolerances must lie strictly between 0 and 1");
    }
  }
};

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw ShapeError(std::string(what) + ": expected a non-empty square matrix, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) throw PreconditionError(std::string(what) + ": matrix has NaN or Inf entries");
}

template <typename Derived>
bool exactly_diagonal(const Eigen::MatrixBase<Derived>& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != typename Derived::Scalar(0)) return false;
  return true;
}

}  // namespace detail

/// Largest entry of |M - M^T|.
template <typename Derived>
typename Derived::Scalar asymmetry(const Eigen::MatrixBase<Derived>& m) {
  detail::require_square(m, "asymmetry");
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

/// Frobenius norm of the strictly off-diagonal part.
template <typename Derived>
typename Derived::Scalar off_diagonal_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> off = m;
  off.diagonal().setZero();
  return off.norm();
}

template <typename Derived>
Vector<typename Derived::Scalar> singular_values(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> dense = m;
  Eigen::JacobiSVD<Matrix<Scalar>> svd(dense);
  return svd.singularValues();
}

/// Smallest singular value strictly above `tol.rank` times the largest.
template <typename Derived>
bool is_nonsingular(const Eigen::MatrixBase<Derived>& m,
                    const Tolerances<typename Derived::Scalar>& tol) {
  detail::require_square(m, "is_nonsingular");
  const auto sv = singular_values(m);
  const auto largest = sv(0);
  return largest > 0 && sv(sv.size() - 1) > tol.rank * largest;
}

template <typename Derived>
bool check_symmetric(const Eigen::MatrixBase<Derived>& m,
                     const Tolerances<typename Derived::Scalar>& tol) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(m, "check_symmetric");
  const Scalar asym = asymmetry(m);
  return asym <= tol.sym * std::max(Scalar(1), m.norm());
}

// ---------------------------------------------------------------------------
// Symmetric spectral decomposition

template <typename Scalar>
struct SpectralDecomposition {
  Matrix<Scalar> orthogonal_factor;
  /// Sorted by decreasing magnitude; equal magnitudes put the positive value first.
  Vector<Scalar> eigenvalues;
};

/// S = U diag(lambda) U^T. Each column of U is signed so its largest entry is
/// positive, and a diagonal input yields a permutation matrix.
template <typename Derived>
SpectralDecomposition<typename Derived::Scalar> spectral_decompose(
    const Eigen::MatrixBase<Derived>& s, const Tolerances<typename Derived::Scalar>& tol) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(s, "spectral_decompose");
  detail::require_finite(s, "spectral_decompose");
  if (!check_symmetric(s, tol)) throw PreconditionError("spectral_decompose: input is not symmetric");

  const Index n = s.rows();
  const Matrix<Scalar> sym = (s + s.transpose()) / Scalar(2);
  Matrix<Scalar> vectors;
  Vector<Scalar> values;
  if (detail::exactly_diagonal(sym)) {
    vectors = Matrix<Scalar>::Identity(n, n);
    values = sym.diagonal();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(sym);
    if (solver.info() != Eigen::Success) {
      throw NumericalFailure("spectral_decompose: symmetric eigensolver did not converge");
    }
    vectors = solver.eigenvectors();
    values = solver.eigenvalues();
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const Scalar ma = std::abs(values(a)), mb = std::abs(values(b));
    if (ma != mb) return ma > mb;
    return values(a) > values(b);
  });

  SpectralDecomposition<Scalar> out{Matrix<Scalar>(n, n), Vector<Scalar>(n)};
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = values(src);
    auto column = out.orthogonal_factor.col(k);
    column = vectors.col(src);
    Index pivot = 0;
    column.cwiseAbs().maxCoeff(&pivot);
    if (column(pivot) < Scalar(0)) column = -column;
  }

  const Matrix<Scalar>& u = out.orthogonal_factor;
  const Scalar orthogonality =
      (u.transpose() * u - Matrix<Scalar>::Identity(n, n)).cwiseAbs().maxCoeff();
  const Scalar reconstruction =
      (u * out.eigenvalues.asDiagonal() * u.transpose() - sym).norm();
  if (!(orthogonality <= tol.residual) || !(reconstruction <= tol.residual * sym.norm())) {
    throw NumericalFailure("spectral_decompose: decomposition residual above tolerance");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rank and null space

template <typename Scalar>
struct RankDecomposition {
  Index rank = 0;
  /// Orthonormal columns spanning the numerical null space.
  Matrix<Scalar> null_basis;
};

/// Singular values above `tol.rank * reference` count toward the rank.
/// `reference` defaults to the largest singular value of `m`; callers that
/// test shifted matrices pass the scale of the unshifted operator instead.
template <typename Derived>
RankDecomposition<typename Derived::Scalar> rank_with_nullspace(
    const Eigen::MatrixBase<Derived>& m, const Tolerances<typename Derived::Scalar>& tol,
    std::optional<typename Derived::Scalar> reference = std::nullopt) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(m, "rank_with_nullspace");
  const Matrix<Scalar> dense = m;
  Eigen::JacobiSVD<Matrix<Scalar>> svd(dense, Eigen::ComputeFullV);
  const Vector<Scalar>& sv = svd.singularValues();
  const Scalar largest = sv.size() > 0 ? sv(0) : Scalar(0);
  const Scalar threshold = tol.rank * reference.value_or(largest);

  RankDecomposition<Scalar> out;
  if (largest > Scalar(0)) {
    for (Index k = 0; k < sv.size(); ++k)
      if (sv(k) > threshold) ++out.rank;
  }
  out.null_basis = svd.matrixV().rightCols(dense.cols() - out.rank);
  return out;
}

// ---------------------------------------------------------------------------
// Real diagonalizability

enum class Diagonalizability { Diagonalizable, ComplexPair, Defective, GrayZone };

inline const char* to_string(Diagonalizability d) {
  switch (d) {
    case Diagonalizability::Diagonalizable: return "diagonalizable";
    case Diagonalizability::ComplexPair: return "complex_pair";
    case Diagonalizability::Defective: return "defective";
    case Diagonalizability::GrayZone: return "gray_zone";
  }
  return "unknown";
}

template <typename Scalar>
struct EigenCluster {
  Scalar eigenvalue;
  Index multiplicity;
  /// First column of this cluster inside EigenClusterBasis::basis.
  Index offset;
};

template <typename Scalar>
struct EigenClusterBasis {
  std::vector<EigenCluster<Scalar>> clusters;
  Matrix<Scalar> basis;
};

template <typename Scalar>
struct DiagonalizabilityReport {
  Diagonalizability verdict = Diagonalizability::Diagonalizable;
  std::optional<EigenClusterBasis<Scalar>> basis;
  /// Real part of the offending eigenvalue when not diagonalizable.
  Scalar eigenvalue = 0;
  /// Imaginary part (complex pair), missing null-space dimension (defective),
  /// or conditioning ratio of the near-coalescent eigenvectors (gray zone).
  Scalar measure = 0;
};

/// Decides real diagonalizability of a square matrix.
///
/// Eigenvalues come from the Hessenberg/QR solver. They must be real up to
/// `eig_cluster * max|lambda|`; the real parts are then grouped by single
/// linkage with the same gap. A cluster of multiplicity k is accepted when
/// A - lambda I has exactly k singular values at or below `rank * ||A||`, and
/// the null spaces supply the basis columns, cluster by cluster, in decreasing
/// eigenvalue order.
///
/// Clusters separated by less than sqrt(eig_cluster) of the spectral scale are
/// inspected once more: a perturbed Jordan block splits into such nearby
/// eigenvalues whose eigenvectors are almost parallel. When those columns are
/// conditioned worse than sqrt(eig_cluster) the verdict is GrayZone and no basis
/// is returned.
template <typename Derived>
DiagonalizabilityReport<typename Derived::Scalar> analyze_diagonalizability(
    const Eigen::MatrixBase<Derived>& a_in, const Tolerances<typename Derived::Scalar>& tol) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(a_in, "real_diagonalizing_basis");
  detail::require_finite(a_in, "real_diagonalizing_basis");
  const Matrix<Scalar> a = a_in;
  const Index n = a.rows();

  Eigen::EigenSolver<Matrix<Scalar>> solver(a, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("real_diagonalizing_basis: eigenvalue iteration did not converge");
  }
  const auto& spectrum = solver.eigenvalues();
  const Scalar spectral_scale = spectrum.cwiseAbs().maxCoeff();
  const Scalar operator_scale = singular_values(a)(0);

  DiagonalizabilityReport<Scalar> report;
  for (Index k = 0; k < n; ++k) {
    if (std::abs(spectrum(k).imag()) > tol.eig_cluster * spectral_scale) {
      report.verdict = Diagonalizability::ComplexPair;
      report.eigenvalue = spectrum(k).real();
      report.measure = std::abs(spectrum(k).imag());
      return report;
    }
  }

  std::vector<Scalar> reals(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) reals[static_cast<std::size_t>(k)] = spectrum(k).real();
  std::sort(reals.begin(), reals.end(), std::greater<>());

  // Single-linkage clusters over the sorted real parts: [first, last) ranges.
  const Scalar fine_gap = tol.eig_cluster * spectral_scale;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t k = 0; k < reals.size(); ++k) {
    if (k == 0 || reals[k - 1] - reals[k] > fine_gap) ranges.emplace_back(k, k + 1);
    else ranges.back().second = k + 1;
  }

  EigenClusterBasis<Scalar> result;
  result.basis.resize(n, n);
  Index filled = 0;
  for (const auto& [first, last] : ranges) {
    const auto multiplicity = static_cast<Index>(last - first);
    Scalar lambda = 0;
    for (std::size_t k = first; k < last; ++k) lambda += reals[k];
    lambda /= static_cast<Scalar>(multiplicity);

    const Matrix<Scalar> shifted = a - lambda * Matrix<Scalar>::Identity(n, n);
    const auto rank = rank_with_nullspace(shifted, tol, operator_scale);
    const Index nullity = n - rank.rank;
    if (nullity != multiplicity) {
      report.verdict = nullity < multiplicity ? Diagonalizability::Defective
                                              : Diagonalizability::GrayZone;
      report.eigenvalue = lambda;
      report.measure = static_cast<Scalar>(std::abs(multiplicity - nullity));
      return report;
    }
    result.clusters.push_back({lambda, multiplicity, filled});
    result.basis.middleCols(filled, multiplicity) = rank.null_basis;
    filled += multiplicity;
  }

  const auto conditioning = [](const Matrix<Scalar>& cols) {
    const auto sv = singular_values(cols);
    return sv(sv.size() - 1) / sv(0);
  };
  if (!(conditioning(result.basis) > tol.rank)) {
    report.verdict = Diagonalizability::GrayZone;
    report.eigenvalue = result.clusters.front().eigenvalue;
    report.measure = conditioning(result.basis);
    return report;
  }

  const Scalar coarse = std::sqrt(tol.eig_cluster);
  std::size_t group_start = 0;
  for (std::size_t c = 1; c <= result.clusters.size(); ++c) {
    const bool boundary =
        c == result.clusters.size() ||
        result.clusters[c - 1].eigenvalue - result.clusters[c].eigenvalue > coarse * spectral_scale;
    if (!boundary) continue;
    if (c - group_start >= 2) {
      const Index offset = result.clusters[group_start].offset;
      const Index width = result.clusters[c - 1].offset + result.clusters[c - 1].multiplicity - offset;
      const Scalar ratio = conditioning(result.basis.middleCols(offset, width));
      if (ratio <= coarse) {
        report.verdict = Diagonalizability::GrayZone;
        report.eigenvalue = result.clusters[group_start].eigenvalue;
        report.measure = ratio;
        return report;
      }
    }
    group_start = c;
  }

  report.basis = std::move(result);
  return report;
}

template <typename Derived>
std::optional<EigenClusterBasis<typename Derived::Scalar>> real_diagonalizing_basis(
    const Eigen::MatrixBase<Derived>& a, const Tolerances<typename Derived::Scalar>& tol) {
  return analyze_diagonalizability(a, tol).basis;
}

// ---------------------------------------------------------------------------
// Congruence and solves

/// Q^T C Q, symmetrized explicitly.
template <typename DerivedC, typename DerivedQ>
Matrix<typename DerivedC::Scalar> congruence_transform(const Eigen::MatrixBase<DerivedC>& c,
                                                       const Eigen::MatrixBase<DerivedQ>& q) {
  using Scalar = typename DerivedC::Scalar;
  detail::require_square(c, "congruence_transform");
  if (q.rows() != c.rows()) {
    throw ShapeError("congruence_transform: transform has " + std::to_string(q.rows()) +
                     " rows, matrix has " + std::to_string(c.rows()));
  }
  const Matrix<Scalar> product = q.transpose() * c * q;
  return (product + product.transpose()) / Scalar(2);
}

/// X with A X = B. Refuses numerically singular A.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> solve_linear(const Eigen::MatrixBase<DerivedA>& a,
                                               const Eigen::MatrixBase<DerivedB>& b,
                                               const Tolerances<typename DerivedA::Scalar>& tol) {
  using Scalar = typename DerivedA::Scalar;
  detail::require_square(a, "solve_linear");
  if (b.rows() != a.rows()) throw ShapeError("solve_linear: right-hand side row count mismatch");
  const Matrix<Scalar> dense = a;
  const auto sv = singular_values(dense);
  const Scalar smallest = sv(sv.size() - 1);
  if (!(sv(0) > Scalar(0)) || !(smallest > tol.rank * sv(0))) {
    throw SingularMatrixError("solve_linear: coefficient matrix is numerically singular",
                              static_cast<double>(smallest));
  }
  return dense.colPivHouseholderQr().solve(b);
}

/// Block-diagonal assembly diag(B_1, ..., B_k).
template <typename Scalar>
Matrix<Scalar> block_diagonal(const std::vector<Matrix<Scalar>>& blocks) {
  Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix<Scalar> out = Matrix<Scalar>::Zero(rows, cols);
  Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

/// Rescales every non-zero column to unit Euclidean norm.
template <typename Scalar>
Matrix<Scalar> normalize_columns(Matrix<Scalar> m) {
  for (Index j = 0; j < m.cols(); ++j) {
    const Scalar norm = m.col(j).norm();
    if (norm > Scalar(0)) m.col(j) /= norm;
  }
  return m;
}

}  // namespace sdc
