#pragma once

// Re-checks solver claims from the raw collection. verify_congruence uses
// kernel primitives only; certificate validation recomputes the violated
// condition, replaying the singular reduction where the claim depends on it.

#include <cstddef>
#include <string>

#include "sdc/collection.hpp"
#include "sdc/kernel.hpp"
#include "sdc/nonsingular.hpp"
#include "sdc/singular.hpp"

namespace sdc {

template <typename Scalar>
struct VerificationReport {
  /// Off-diagonal Frobenius norm of P^T C^i P over max(1, ||C^i||).
  Vector<Scalar> per_matrix_offdiag;
  Scalar p_min_singular = 0;
  Scalar p_max_singular = 0;
  bool passed = false;
};

template <typename Scalar>
VerificationReport<Scalar> verify_congruence(const MatrixCollection<Scalar>& c, const Matrix<Scalar>& p,
                                             const Tolerances<Scalar>& tol) {
  if (p.rows() != c.dimension() || p.cols() != c.dimension()) {
    throw ShapeError("verify_congruence: P must be " + std::to_string(c.dimension()) + "x" +
                     std::to_string(c.dimension()));
  }
  VerificationReport<Scalar> report;
  report.per_matrix_offdiag.resize(static_cast<Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Matrix<Scalar> d = congruence_transform(c[i], p);
    report.per_matrix_offdiag(static_cast<Index>(i)) = off_diagonal_norm(d) / std::max(Scalar(1), c[i].norm());
  }
  const auto sv = singular_values(p);
  report.p_max_singular = sv(0);
  report.p_min_singular = sv(sv.size() - 1);
  report.passed = report.per_matrix_offdiag.maxCoeff() <= tol.residual &&
                  report.p_max_singular > Scalar(0) && report.p_min_singular > tol.rank * report.p_max_singular;
  return report;
}

namespace detail {

template <typename Scalar>
void require_index(const MatrixCollection<Scalar>& c, std::size_t i, const char* field) {
  if (i >= c.size()) {
    throw MalformedCertificate(std::string("certificate field '") + field + "' = " + std::to_string(i) +
                               " is out of range for a collection of " + std::to_string(c.size()));
  }
}

template <typename Scalar>
bool same_claim(const Certificate<Scalar>& a, const Certificate<Scalar>& b) {
  return a.kind == b.kind && a.anchor == b.anchor && a.first == b.first && a.stage == b.stage &&
         a.in_block == b.in_block;
}

}  // namespace detail

template <typename Scalar>
bool validate_certificate(const MatrixCollection<Scalar>& c, const Certificate<Scalar>& cert,
                          const Tolerances<Scalar>& tol);

namespace detail {

/// Failures found inside refined blocks are reproduced by re-running the
/// nonsingular solver from the same anchor.
template <typename Scalar>
bool replay_nonsingular(const MatrixCollection<Scalar>& c, const Certificate<Scalar>& cert,
                        const Tolerances<Scalar>& tol) {
  require_index(c, cert.anchor, "anchor");
  require_index(c, cert.first, "first");
  require_index(c, cert.stage, "stage");
  if (!is_nonsingular(c[cert.anchor], tol)) return false;
  const auto replay = diagonalize_nonsingular(MatrixCollection<Scalar>(c.matrices(), tol), cert.anchor);
  return !replay.is_sdc() && same_claim(replay.certificate(), cert);
}

/// Advances the singular reduction to the named stage, then checks the
/// coupling block there or recurses into the north-west collection.
template <typename Scalar>
bool replay_singular(const MatrixCollection<Scalar>& c, const Certificate<Scalar>& cert,
                     const Tolerances<Scalar>& tol) {
  require_index(c, cert.stage, "stage");
  for (const auto& m : c.matrices())
    if (is_nonsingular(m, tol)) return false;
  SingularReducer<Scalar> reducer(MatrixCollection<Scalar>(c.matrices(), tol));
  while (!reducer.done() && reducer.next_stage() < cert.stage) {
    if (reducer.advance()) return false;
  }
  if (reducer.done() || reducer.next_stage() != cert.stage) return false;
  const auto step = reducer.canonicalize();
  const Scalar coupling = step.form.coupling_norm();
  const Scalar threshold = reducer.coupling_threshold(reducer.current_next());
  if (cert.kind == CertificateKind::CouplingNonzero) {
    return coupling > threshold && coupling >= cert.residual / Scalar(2);
  }
  if (coupling > threshold) return false;
  return validate_certificate(reducer.northwest_collection(step), *cert.inner, tol);
}

}  // namespace detail

/// Recomputes the violation a certificate claims for `c`.
template <typename Scalar>
bool validate_certificate(const MatrixCollection<Scalar>& c, const Certificate<Scalar>& cert,
                          const Tolerances<Scalar>& tol) {
  switch (cert.kind) {
    case CertificateKind::NoNonsingularAnchor:
      for (const auto& m : c.matrices())
        if (is_nonsingular(m, tol)) return false;
      return true;

    case CertificateKind::SymmetryViolation: {
      detail::require_index(c, cert.anchor, "anchor");
      detail::require_index(c, cert.first, "first");
      detail::require_index(c, cert.second, "second");
      if (!is_nonsingular(c[cert.anchor], tol)) return false;
      const Matrix<Scalar> product = c[cert.second] * solve_linear(c[cert.anchor], c[cert.first], tol);
      return asymmetry(product) >= cert.residual / Scalar(2) && !check_symmetric(product, tol);
    }

    case CertificateKind::NotDiagonalizable:
      if (cert.in_block) return detail::replay_nonsingular(c, cert, tol);
      detail::require_index(c, cert.anchor, "anchor");
      detail::require_index(c, cert.first, "first");
      if (!is_nonsingular(c[cert.anchor], tol)) return false;
      return !real_diagonalizing_basis(solve_linear(c[cert.anchor], c[cert.first], tol), tol).has_value();

    case CertificateKind::NorthwestNotSDC:
      if (!cert.inner) return detail::replay_nonsingular(c, cert, tol);
      return detail::replay_singular(c, cert, tol);

    case CertificateKind::CouplingNonzero:
      return detail::replay_singular(c, cert, tol);
  }
  return false;
}

}  // namespace sdc
