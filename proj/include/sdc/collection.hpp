#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sdc/kernel.hpp"

namespace sdc {

/// An ordered family of n x n real symmetric matrices sharing one tolerance set.
/// Members are symmetrized on construction; inputs must already be symmetric
/// within `tol.sym`.
template <typename Scalar>
class MatrixCollection {
 public:
  explicit MatrixCollection(std::vector<Matrix<Scalar>> matrices, Tolerances<Scalar> tol = {})
      : matrices_(std::move(matrices)), tol_(tol) {
    tol_.validate();
    if (matrices_.empty()) throw PreconditionError("MatrixCollection: at least one matrix required");
    const Index n = matrices_.front().rows();
    for (std::size_t i = 0; i < matrices_.size(); ++i) {
      auto& c = matrices_[i];
      const std::string where = "MatrixCollection: matrix " + std::to_string(i);
      detail::require_square(c, where.c_str());
      if (c.rows() != n) throw ShapeError(where + " has dimension " + std::to_string(c.rows()) +
                                          ", expected " + std::to_string(n));
      detail::require_finite(c, where.c_str());
      if (!check_symmetric(c, tol_)) throw PreconditionError(where + " is not symmetric");
      c = (c + c.transpose()) / Scalar(2);
    }
  }

  std::size_t size() const noexcept { return matrices_.size(); }
  Index dimension() const noexcept { return matrices_.front().rows(); }
  const Matrix<Scalar>& operator[](std::size_t i) const { return matrices_.at(i); }
  const std::vector<Matrix<Scalar>>& matrices() const noexcept { return matrices_; }
  const Tolerances<Scalar>& tolerances() const noexcept { return tol_; }

  /// The members at `indices`, in that order.
  MatrixCollection subset(std::span<const std::size_t> indices) const {
    std::vector<Matrix<Scalar>> picked;
    picked.reserve(indices.size());
    for (auto i : indices) picked.push_back(matrices_.at(i));
    return MatrixCollection(std::move(picked), tol_);
  }

  /// Every member replaced by T^T C T.
  MatrixCollection congruent(const Matrix<Scalar>& t) const {
    std::vector<Matrix<Scalar>> moved;
    moved.reserve(matrices_.size());
    for (const auto& c : matrices_) moved.push_back(congruence_transform(c, t));
    return MatrixCollection(std::move(moved), tol_);
  }

 private:
  std::vector<Matrix<Scalar>> matrices_;
  Tolerances<Scalar> tol_;
};

enum class CertificateKind {
  NotDiagonalizable,
  SymmetryViolation,
  CouplingNonzero,
  NorthwestNotSDC,
  NoNonsingularAnchor,
};

inline const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::NotDiagonalizable: return "NotDiagonalizable";
    case CertificateKind::SymmetryViolation: return "SymmetryViolation";
    case CertificateKind::CouplingNonzero: return "CouplingNonzero";
    case CertificateKind::NorthwestNotSDC: return "NorthwestNotSDC";
    case CertificateKind::NoNonsingularAnchor: return "NoNonsingularAnchor";
  }
  return "Unknown";
}

/// Witness of a failed SDC condition. Matrix indices are 0-based positions in
/// the collection the certificate was issued for.
///
///   NotDiagonalizable   anchor^-1 * C[first] is not real diagonalizable. With
///                       `in_block` set the failure surfaced inside a refined
///                       block while splitting on C[first].
///   SymmetryViolation   C[second] * anchor^-1 * C[first] is not symmetric;
///                       `residual` is its largest asymmetric entry.
///   CouplingNonzero     stage `stage` of the singular reduction left a coupling
///                       block of norm `residual`.
///   NorthwestNotSDC     with `inner`: the north-west collection at stage `stage`
///                       is not SDC, for the reason in `inner`. Without `inner`:
///                       a refined block stayed inconsistent while splitting on
///                       C[stage] (numerically inconsistent input).
///   NoNonsingularAnchor no member is nonsingular.
template <typename Scalar>
struct Certificate {
  CertificateKind kind = CertificateKind::NotDiagonalizable;
  std::size_t anchor = 0;
  std::size_t first = 0;
  std::size_t second = 0;
  std::size_t stage = 0;
  Scalar residual = 0;
  Scalar threshold = 0;
  Diagonalizability verdict = Diagonalizability::Diagonalizable;
  bool in_block = false;
  std::shared_ptr<const Certificate> inner;
};

template <typename Scalar>
struct SdcSolution {
  Matrix<Scalar> P;
  /// diag(P^T C^i P) for every member, in input order.
  std::vector<Vector<Scalar>> diagonals;
  /// Off-diagonal Frobenius norm of P^T C^i P over max(1, ||C^i||).
  Vector<Scalar> residuals;
};

template <typename Scalar>
class CongruenceResult {
 public:
  CongruenceResult(SdcSolution<Scalar> solution) : value_(std::move(solution)) {}
  CongruenceResult(Certificate<Scalar> certificate) : value_(std::move(certificate)) {}

  bool is_sdc() const noexcept { return std::holds_alternative<SdcSolution<Scalar>>(value_); }
  const SdcSolution<Scalar>& solution() const { return std::get<SdcSolution<Scalar>>(value_); }
  const Certificate<Scalar>& certificate() const { return std::get<Certificate<Scalar>>(value_); }

 private:
  std::variant<SdcSolution<Scalar>, Certificate<Scalar>> value_;
};

/// Builds the SDC payload for a candidate congruence, normalizing its columns,
/// and enforces the soundness bound before anything is reported.
template <typename Scalar>
SdcSolution<Scalar> make_solution(const MatrixCollection<Scalar>& c, const Matrix<Scalar>& transform) {
  const auto& tol = c.tolerances();
  SdcSolution<Scalar> out;
  out.P = normalize_columns(transform);
  out.residuals.resize(static_cast<Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Matrix<Scalar> d = congruence_transform(c[i], out.P);
    out.diagonals.push_back(d.diagonal());
    out.residuals(static_cast<Index>(i)) = off_diagonal_norm(d) / std::max(Scalar(1), c[i].norm());
  }
  if (!(out.residuals.maxCoeff() <= tol.residual)) {
    throw NumericalFailure("congruence residual " + std::to_string(double(out.residuals.maxCoeff())) +
                           " exceeds the residual tolerance");
  }
  if (!is_nonsingular(out.P, tol)) throw NumericalFailure("congruence matrix is numerically singular");
  return out;
}

}  // namespace sdc
