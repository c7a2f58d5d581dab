#pragma once

// SDC for collections in which every member is singular. Each stage moves the
// next matrix into the canonical form
//
//     [ C_1    0    C_5 ]
//     [ 0      C_6  0   ]
//     [ C_5^T  0    0   ]
//
// relative to the accumulated basis, rejects a non-zero coupling block C_5,
// and otherwise solves the north-west p x p blocks with the nonsingular
// solver, anchored on the running combination diag(alpha).

#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "sdc/collection.hpp"
#include "sdc/kernel.hpp"
#include "sdc/nonsingular.hpp"

namespace sdc {

template <typename Scalar>
struct InitialReduction {
  Matrix<Scalar> transform;
  Vector<Scalar> alpha;
  Index p = 0;
  Index r = 0;
};

/// Orthogonal Q with Q^T C1 Q = diag(alpha_1, ..., alpha_p, 0_r).
template <typename Derived>
InitialReduction<typename Derived::Scalar> initial_reduce(const Eigen::MatrixBase<Derived>& c1,
                                                          const Tolerances<typename Derived::Scalar>& tol) {
  using Scalar = typename Derived::Scalar;
  const auto spectral = spectral_decompose(c1, tol);
  const Scalar threshold = tol.rank * c1.norm();
  InitialReduction<Scalar> out;
  out.transform = spectral.orthogonal_factor;
  while (out.p < spectral.eigenvalues.size() && std::abs(spectral.eigenvalues(out.p)) > threshold) ++out.p;
  out.alpha = spectral.eigenvalues.head(out.p);
  out.r = c1.rows() - out.p;
  return out;
}

template <typename Scalar>
struct SingularCanonicalForm {
  Index p = 0;
  Index s = 0;
  Index r = 0;
  /// C_1 = M_1 - C_4 C_6^-1 C_4^T.
  Matrix<Scalar> northwest;
  /// C_5, absent when s == r.
  std::optional<Matrix<Scalar>> coupling;
  /// Diagonal of C_6.
  Vector<Scalar> core6;

  Scalar coupling_norm() const { return coupling ? coupling->norm() : Scalar(0); }
};

template <typename Scalar>
struct CanonicalStep {
  Matrix<Scalar> transform;
  SingularCanonicalForm<Scalar> form;
};

/// Brings a matrix already expressed in the current basis into canonical form.
/// The trailing (n-p) x (n-p) block is rotated to diag(C_6, 0), then a unit
/// lower-triangular eliminator removes the C_4 coupling against C_6. Matrices of
/// the form diag(X, 0_{n-p}) are left unchanged by the returned transform.
template <typename Derived>
CanonicalStep<typename Derived::Scalar> canonicalize_next(const Eigen::MatrixBase<Derived>& current, Index p,
                                                          const Tolerances<typename Derived::Scalar>& tol) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(current, "canonicalize_next");
  const Index n = current.rows();
  if (p < 0 || p > n) throw PreconditionError("canonicalize_next: p outside [0, n]");
  const Index r = n - p;

  CanonicalStep<Scalar> out;
  out.transform = Matrix<Scalar>::Identity(n, n);
  auto& form = out.form;
  form.p = p;
  form.r = r;
  const Matrix<Scalar> m1 = current.topLeftCorner(p, p);
  if (r == 0) {
    form.northwest = m1;
    return out;
  }

  const Matrix<Scalar> m2 = current.topRightCorner(p, r);
  const auto spectral = spectral_decompose(Matrix<Scalar>(current.bottomRightCorner(r, r)), tol);
  const Scalar threshold = tol.rank * current.norm();
  while (form.s < r && std::abs(spectral.eigenvalues(form.s)) > threshold) ++form.s;
  const Index s = form.s;

  const Matrix<Scalar>& rotation = spectral.orthogonal_factor;
  const Matrix<Scalar> rotated = m2 * rotation;
  const Matrix<Scalar> c4 = rotated.leftCols(s);
  form.core6 = spectral.eigenvalues.head(s);
  const Vector<Scalar> inverse6 = form.core6.cwiseInverse();

  Matrix<Scalar> u1 = Matrix<Scalar>::Identity(n, n);
  u1.bottomRightCorner(r, r) = rotation;
  Matrix<Scalar> u2 = Matrix<Scalar>::Identity(n, n);
  u2.block(p, 0, s, p) = -(inverse6.asDiagonal() * c4.transpose());
  out.transform = u1 * u2;

  const Matrix<Scalar> nw = m1 - c4 * inverse6.asDiagonal() * c4.transpose();
  form.northwest = (nw + nw.transpose()) / Scalar(2);
  if (s < r) form.coupling = rotated.rightCols(r - s);
  return out;
}

/// max_j |beta_j / alpha_j| + 1, so that mu * alpha + beta keeps every entry
/// at least as large as alpha in magnitude. An empty alpha gives 1.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar compute_mu(const Eigen::MatrixBase<DerivedA>& alpha,
                                     const Eigen::MatrixBase<DerivedB>& beta) {
  using Scalar = typename DerivedA::Scalar;
  if (alpha.size() != beta.size()) throw ShapeError("compute_mu: alpha and beta lengths differ");
  Scalar mu = 1;
  for (Index j = 0; j < alpha.size(); ++j) {
    if (alpha(j) == Scalar(0) || !std::isfinite(alpha(j))) {
      throw PreconditionError("compute_mu: alpha has a zero entry");
    }
    mu = std::max(mu, std::abs(beta(j) / alpha(j)) + Scalar(1));
  }
  return mu;
}

template <typename Scalar>
struct Accumulation {
  Vector<Scalar> alpha;
  Index p = 0;
  Index r = 0;
};

/// alpha' = (mu * alpha + beta, C_6 diagonal) where beta is the diagonal of the
/// (already diagonalized) north-west block; p' = p + s.
template <typename Scalar>
Accumulation<Scalar> accumulate(const Vector<Scalar>& alpha, const SingularCanonicalForm<Scalar>& form, Scalar mu,
                                const Tolerances<Scalar>& tol) {
  if (alpha.size() != form.p || form.northwest.rows() != form.p) {
    throw ShapeError("accumulate: alpha length must equal the north-west size");
  }
  if (!(off_diagonal_norm(form.northwest) <= tol.residual * std::max(Scalar(1), form.northwest.norm()))) {
    throw PreconditionError("accumulate: north-west block is not diagonal");
  }
  Accumulation<Scalar> out;
  out.p = form.p + form.s;
  out.r = form.r - form.s;
  out.alpha.resize(out.p);
  out.alpha.head(form.p) = mu * alpha + form.northwest.diagonal();
  out.alpha.tail(form.s) = form.core6;
  for (Index j = 0; j < out.p; ++j) {
    if (!(out.alpha(j) != Scalar(0))) throw NumericalFailure("accumulate: combination became singular");
  }
  return out;
}

template <typename Scalar>
struct StageRecord {
  std::size_t matrix = 0;
  /// p and r before the stage, s of the stage's canonical form.
  Index p = 0;
  Index s = 0;
  Index r = 0;
  Scalar coupling_norm = 0;
  /// mu computed after the stage; absent on the last stage.
  std::optional<Scalar> mu;
  /// North-west block C^i_1 before the inner nonsingular solve.
  Matrix<Scalar> northwest;
};

template <typename Scalar>
struct ReductionTrace {
  Matrix<Scalar> transform;
  /// (mu_1, ..., mu_k, 1).
  std::vector<Scalar> mu;
  /// Index of the last matrix processed.
  std::size_t stage = 0;
  /// Leading all-zero members dropped before the first reduction.
  std::vector<std::size_t> dropped;
  std::vector<StageRecord<Scalar>> stages;
};

/// Stage-by-stage driver. Certificate validation replays it up to a named
/// stage, so every stage is reproducible from the collection alone.
template <typename Scalar>
class SingularReducer {
 public:
  explicit SingularReducer(MatrixCollection<Scalar> c) : c_(std::move(c)) {
    const auto& tol = c_.tolerances();
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (is_nonsingular(c_[i], tol)) {
        throw PreconditionError("diagonalize_singular: member " + std::to_string(i) + " is nonsingular");
      }
    }
    const Index n = c_.dimension();
    q_ = Matrix<Scalar>::Identity(n, n);
    r_ = n;
    for (; next_ < c_.size(); ++next_) {
      auto init = initial_reduce(c_[next_], tol);
      if (init.p == 0) {
        trace_.dropped.push_back(next_);
        continue;
      }
      q_ = init.transform;
      alpha_ = init.alpha;
      p_ = init.p;
      r_ = init.r;
      processed_.push_back(next_);
      trace_.stage = next_;
      ++next_;
      break;
    }
    if (done()) trace_.mu.push_back(Scalar(1));
    trace_.transform = q_;
  }

  bool done() const noexcept { return next_ >= c_.size(); }
  std::size_t next_stage() const noexcept { return next_; }
  Index p() const noexcept { return p_; }
  const Vector<Scalar>& alpha() const noexcept { return alpha_; }
  const Matrix<Scalar>& transform() const noexcept { return q_; }
  const ReductionTrace<Scalar>& trace() const noexcept { return trace_; }
  const MatrixCollection<Scalar>& collection() const noexcept { return c_; }

  /// Coupling threshold for a matrix expressed in the current basis.
  Scalar coupling_threshold(const Matrix<Scalar>& current) const {
    return c_.tolerances().residual * std::max(Scalar(1), current.norm());
  }

  /// Canonical form of the next matrix in the current basis.
  CanonicalStep<Scalar> canonicalize() const {
    return canonicalize_next(current_next(), p_, c_.tolerances());
  }

  Matrix<Scalar> current_next() const { return congruence_transform(c_[next_], q_); }

  /// {diag(alpha), C^k_1 for every processed k, C^next_1}: the nonsingular
  /// problem solved at the next stage, anchored at index 0.
  MatrixCollection<Scalar> northwest_collection(const CanonicalStep<Scalar>& step) const {
    std::vector<Matrix<Scalar>> members;
    members.push_back(Matrix<Scalar>(alpha_.asDiagonal()));
    for (auto k : processed_) members.push_back(congruence_transform(c_[k], q_).topLeftCorner(p_, p_));
    members.push_back(step.form.northwest);
    return MatrixCollection<Scalar>(std::move(members), c_.tolerances());
  }

  /// Runs one stage. Returns a certificate when the collection is shown not SDC.
  std::optional<Certificate<Scalar>> advance() {
    if (done()) throw PreconditionError("SingularReducer: no stage left");
    const auto& tol = c_.tolerances();
    const std::size_t i = next_;
    const Matrix<Scalar> current = current_next();
    auto step = canonicalize_next(current, p_, tol);

    StageRecord<Scalar> record;
    record.matrix = i;
    record.p = p_;
    record.s = step.form.s;
    record.r = r_;
    record.coupling_norm = step.form.coupling_norm();
    record.northwest = step.form.northwest;
    trace_.stages.push_back(record);

    const Scalar threshold = coupling_threshold(current);
    if (record.coupling_norm > threshold) {
      Certificate<Scalar> cert;
      cert.kind = CertificateKind::CouplingNonzero;
      cert.stage = i;
      cert.residual = record.coupling_norm;
      cert.threshold = threshold;
      return cert;
    }

    const auto inner = diagonalize_nonsingular(northwest_collection(step), std::size_t{0});
    if (!inner.is_sdc()) {
      Certificate<Scalar> cert;
      cert.kind = CertificateKind::NorthwestNotSDC;
      cert.stage = i;
      cert.inner = std::make_shared<const Certificate<Scalar>>(inner.certificate());
      return cert;
    }
    const auto& solved = inner.solution();
    const Index n = c_.dimension();
    Matrix<Scalar> embed = Matrix<Scalar>::Identity(n, n);
    embed.topLeftCorner(p_, p_) = solved.P;
    q_ = q_ * step.transform * embed;
    processed_.push_back(i);
    trace_.stage = i;
    trace_.transform = q_;
    ++next_;

    if (done()) {
      trace_.mu.push_back(Scalar(1));
      return std::nullopt;
    }

    const Vector<Scalar> alpha_now = solved.diagonals.front();
    step.form.northwest = congruence_transform(step.form.northwest, solved.P);
    const Scalar mu = compute_mu(alpha_now, Vector<Scalar>(step.form.northwest.diagonal()));
    const auto acc = accumulate(alpha_now, step.form, mu, tol);
    const Scalar before = alpha_now.size() ? alpha_now.cwiseAbs().minCoeff() : Scalar(0);
    const Scalar after = p_ ? acc.alpha.head(p_).cwiseAbs().minCoeff() : Scalar(0);
    if (after < before * (Scalar(1) - tol.residual)) {
      throw NumericalFailure("singular reduction: mu-combination lost magnitude");
    }
    alpha_ = acc.alpha;
    p_ = acc.p;
    r_ = acc.r;
    trace_.mu.push_back(mu);
    trace_.stages.back().mu = mu;
    return std::nullopt;
  }

 private:
  MatrixCollection<Scalar> c_;
  Matrix<Scalar> q_;
  Vector<Scalar> alpha_;
  Index p_ = 0;
  Index r_ = 0;
  std::size_t next_ = 0;
  std::vector<std::size_t> processed_;
  ReductionTrace<Scalar> trace_;
};

template <typename Scalar>
struct SingularRun {
  CongruenceResult<Scalar> result;
  ReductionTrace<Scalar> trace;
};

template <typename Scalar>
SingularRun<Scalar> run_singular(const MatrixCollection<Scalar>& c) {
  SingularReducer<Scalar> reducer(c);
  while (!reducer.done()) {
    if (auto cert = reducer.advance()) return {*cert, reducer.trace()};
  }
  return {make_solution(c, reducer.transform()), reducer.trace()};
}

template <typename Scalar>
CongruenceResult<Scalar> diagonalize_singular(const MatrixCollection<Scalar>& c) {
  return run_singular(c).result;
}

}  // namespace sdc
