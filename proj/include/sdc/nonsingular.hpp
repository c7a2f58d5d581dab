#pragma once

// SDC for collections with at least one nonsingular member: the symmetric
// product test, repeated block splitting until every block is a scalar
// multiple of its anchor block, then a spectral finish per block.

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "sdc/collection.hpp"
#include "sdc/kernel.hpp"

namespace sdc {

template <typename T, typename Scalar>
using Outcome = std::variant<T, Certificate<Scalar>>;

/// The scalar alpha with C = alpha * A, if one exists within tolerance.
/// alpha is the Frobenius projection <A, C> / <A, A>.
template <typename DerivedA, typename DerivedC>
std::optional<typename DerivedA::Scalar> column_match(const Eigen::MatrixBase<DerivedA>& a,
                                                      const Eigen::MatrixBase<DerivedC>& c,
                                                      const Tolerances<typename DerivedA::Scalar>& tol) {
  using Scalar = typename DerivedA::Scalar;
  if (a.rows() != c.rows() || a.cols() != c.cols()) throw ShapeError("column_match: block sizes differ");
  const Scalar a_norm = a.norm();
  if (!(a_norm > Scalar(0))) throw PreconditionError("column_match: anchor block is zero");
  const Scalar alpha = a.cwiseProduct(c).sum() / (a_norm * a_norm);
  const Scalar misfit = (c - alpha * a).norm();
  if (misfit <= tol.residual * std::max(Scalar(1), std::abs(alpha)) * a_norm) return alpha;
  return std::nullopt;
}

/// Block-diagonal bookkeeping for R^T C^i R = diag(C^i_1, ..., C^i_r) with
/// anchor blocks A_t = C^anchor_t.
template <typename Scalar>
struct BlockDiagonalState {
  std::size_t anchor = 0;
  std::vector<Index> partition;
  std::vector<Matrix<Scalar>> anchors;
  /// coeffs[i][t] holds alpha^i_t once block t of matrix i equals alpha^i_t * A_t.
  std::vector<std::vector<std::optional<Scalar>>> coeffs;
  /// pending[i][t] is block t of R^T C^i R while it is not yet a multiple of A_t.
  std::vector<std::vector<Matrix<Scalar>>> pending;
  Matrix<Scalar> transform;
  std::size_t splits = 0;
  /// The first split already produced n blocks of size one.
  bool fast_path = false;

  std::size_t blocks() const noexcept { return partition.size(); }

  bool matched(std::size_t i) const {
    for (const auto& c : coeffs.at(i))
      if (!c) return false;
    return true;
  }

  bool all_matched() const {
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      if (!matched(i)) return false;
    return true;
  }

  /// diag(alpha^i_1 A_1, ..., alpha^i_r A_r), with pending blocks used verbatim.
  Matrix<Scalar> reconstruct(std::size_t i) const {
    std::vector<Matrix<Scalar>> parts;
    for (std::size_t t = 0; t < blocks(); ++t) {
      parts.push_back(coeffs[i][t] ? Matrix<Scalar>(*coeffs[i][t] * anchors[t]) : pending[i][t]);
    }
    return block_diagonal(parts);
  }
};

template <typename Scalar>
BlockDiagonalState<Scalar> initial_block_state(const MatrixCollection<Scalar>& c, std::size_t anchor) {
  const auto& tol = c.tolerances();
  const Index n = c.dimension();
  BlockDiagonalState<Scalar> state;
  state.anchor = anchor;
  state.partition = {n};
  state.anchors = {c[anchor]};
  state.transform = Matrix<Scalar>::Identity(n, n);
  state.coeffs.resize(c.size());
  state.pending.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto alpha = i == anchor ? std::optional<Scalar>(Scalar(1)) : column_match(c[anchor], c[i], tol);
    state.coeffs[i] = {alpha};
    state.pending[i] = {alpha ? Matrix<Scalar>() : c[i]};
  }
  return state;
}

template <typename Scalar>
std::optional<std::size_t> first_nonsingular(const MatrixCollection<Scalar>& c) {
  for (std::size_t i = 0; i < c.size(); ++i)
    if (is_nonsingular(c[i], c.tolerances())) return i;
  return std::nullopt;
}

/// Step 1 of the nonsingular algorithm: every anchor^-1 C^i must be real
/// diagonalizable and every C^j anchor^-1 C^i (i < j) symmetric. Returns the
/// first violation, or nothing when both conditions hold.
template <typename Scalar>
std::optional<Certificate<Scalar>> necessary_conditions_check(const MatrixCollection<Scalar>& c,
                                                              std::size_t anchor) {
  const auto& tol = c.tolerances();
  if (anchor >= c.size() || !is_nonsingular(c[anchor], tol)) {
    throw PreconditionError("necessary_conditions_check: anchor is not a nonsingular member");
  }
  // Multiples of the anchor (including numerically zero members) satisfy both
  // conditions outright; their noisy quotients are not inspected.
  std::vector<bool> trivial(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) trivial[i] = i == anchor || column_match(c[anchor], c[i], tol).has_value();

  std::vector<Matrix<Scalar>> quotients(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (trivial[i]) continue;
    quotients[i] = solve_linear(c[anchor], c[i], tol);
    const auto report = analyze_diagonalizability(quotients[i], tol);
    if (!report.basis) {
      Certificate<Scalar> cert;
      cert.kind = CertificateKind::NotDiagonalizable;
      cert.anchor = anchor;
      cert.first = i;
      cert.verdict = report.verdict;
      cert.residual = report.measure;
      return cert;
    }
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (trivial[i]) continue;
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      if (trivial[j]) continue;
      const Matrix<Scalar> product = c[j] * quotients[i];
      if (!check_symmetric(product, tol)) {
        Certificate<Scalar> cert;
        cert.kind = CertificateKind::SymmetryViolation;
        cert.anchor = anchor;
        cert.first = i;
        cert.second = j;
        cert.residual = asymmetry(product);
        cert.threshold = tol.sym * std::max(Scalar(1), product.norm());
        return cert;
      }
    }
  }
  return std::nullopt;
}

namespace detail {

template <typename Scalar>
Scalar off_block_norm(const Matrix<Scalar>& m, const std::vector<EigenCluster<Scalar>>& clusters) {
  Matrix<Scalar> off = m;
  for (const auto& cl : clusters) off.block(cl.offset, cl.offset, cl.multiplicity, cl.multiplicity).setZero();
  return off.norm();
}

template <typename Scalar>
Certificate<Scalar> inconsistent_block(std::size_t anchor, std::size_t splitter, std::size_t matrix,
                                       Scalar residual, Scalar threshold) {
  Certificate<Scalar> cert;
  cert.kind = CertificateKind::NorthwestNotSDC;
  cert.anchor = anchor;
  cert.stage = splitter;
  cert.first = matrix;
  cert.residual = residual;
  cert.threshold = threshold;
  return cert;
}

}  // namespace detail

/// Splits every block on which `splitter` is not yet a multiple of the anchor
/// block. For such a block, the eigenbasis Q_t of A_t^-1 C^splitter_t makes
/// every Q_t^T C^i_t Q_t block diagonal along the eigenvalue clusters; the
/// splitter's new blocks are multiples of the new anchor blocks. Blocks already
/// matched for `splitter` keep Q_t = I. The transform is right-multiplied by
/// diag(Q_1, ..., Q_r).
template <typename Scalar>
Outcome<BlockDiagonalState<Scalar>, Scalar> block_decompose_step(const BlockDiagonalState<Scalar>& state,
                                                                 std::size_t splitter,
                                                                 const Tolerances<Scalar>& tol) {
  const std::size_t m = state.coeffs.size();
  if (splitter >= m) throw PreconditionError("block_decompose_step: splitter out of range");

  BlockDiagonalState<Scalar> next;
  next.anchor = state.anchor;
  next.coeffs.resize(m);
  next.pending.resize(m);
  next.splits = state.splits + 1;
  std::vector<Matrix<Scalar>> factors;

  for (std::size_t t = 0; t < state.blocks(); ++t) {
    if (state.coeffs[splitter][t]) {
      next.partition.push_back(state.partition[t]);
      next.anchors.push_back(state.anchors[t]);
      for (std::size_t i = 0; i < m; ++i) {
        next.coeffs[i].push_back(state.coeffs[i][t]);
        next.pending[i].push_back(state.pending[i][t]);
      }
      factors.push_back(Matrix<Scalar>::Identity(state.partition[t], state.partition[t]));
      continue;
    }

    const Matrix<Scalar>& anchor_block = state.anchors[t];
    const Matrix<Scalar> quotient = solve_linear(anchor_block, state.pending[splitter][t], tol);
    const auto report = analyze_diagonalizability(quotient, tol);
    if (!report.basis) {
      Certificate<Scalar> cert;
      cert.kind = CertificateKind::NotDiagonalizable;
      cert.anchor = state.anchor;
      cert.first = splitter;
      cert.stage = splitter;
      cert.in_block = true;
      cert.verdict = report.verdict;
      cert.residual = report.measure;
      return cert;
    }
    const auto& clusters = report.basis->clusters;
    const Matrix<Scalar>& q = report.basis->basis;

    const Matrix<Scalar> new_anchor = congruence_transform(anchor_block, q);
    std::vector<Matrix<Scalar>> moved(m);
    {
      const Scalar off = detail::off_block_norm(new_anchor, clusters);
      if (!(off <= tol.residual * new_anchor.norm())) {
        return detail::inconsistent_block(state.anchor, splitter, state.anchor, off,
                                          tol.residual * new_anchor.norm());
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (state.coeffs[i][t]) continue;
      moved[i] = congruence_transform(state.pending[i][t], q);
      const Scalar off = detail::off_block_norm(moved[i], clusters);
      const Scalar bound = tol.residual * std::max(moved[i].norm(), new_anchor.norm());
      if (!(off <= bound)) return detail::inconsistent_block(state.anchor, splitter, i, off, bound);
    }

    for (const auto& cl : clusters) {
      const Matrix<Scalar> sub_anchor = new_anchor.block(cl.offset, cl.offset, cl.multiplicity, cl.multiplicity);
      next.partition.push_back(cl.multiplicity);
      next.anchors.push_back(sub_anchor);
      for (std::size_t i = 0; i < m; ++i) {
        if (state.coeffs[i][t]) {
          next.coeffs[i].push_back(state.coeffs[i][t]);
          next.pending[i].emplace_back();
          continue;
        }
        const Matrix<Scalar> block = moved[i].block(cl.offset, cl.offset, cl.multiplicity, cl.multiplicity);
        const auto alpha = column_match(sub_anchor, block, tol);
        if (i == splitter && !alpha) {
          return detail::inconsistent_block(state.anchor, splitter, splitter, (block - cl.eigenvalue * sub_anchor).norm(),
                                            tol.residual * sub_anchor.norm());
        }
        next.coeffs[i].push_back(alpha);
        next.pending[i].push_back(alpha ? Matrix<Scalar>() : block);
      }
    }
    factors.push_back(q);
  }

  next.transform = state.transform * block_diagonal(factors);
  return next;
}

/// Drives block_decompose_step over the splitters in input order (skipping the
/// anchor and splitters that are already matched everywhere) until every block
/// of every matrix is a multiple of its anchor block.
/// Expects necessary_conditions_check to have passed.
template <typename Scalar>
Outcome<BlockDiagonalState<Scalar>, Scalar> find_R(const MatrixCollection<Scalar>& c, std::size_t anchor) {
  const auto& tol = c.tolerances();
  auto state = initial_block_state(c, anchor);
  for (std::size_t j = 0; j < c.size() && !state.all_matched(); ++j) {
    if (j == anchor || state.matched(j)) continue;
    auto step = block_decompose_step(state, j, tol);
    if (auto* cert = std::get_if<Certificate<Scalar>>(&step)) return *cert;
    state = std::move(std::get<BlockDiagonalState<Scalar>>(step));
    if (state.splits == 1 && state.blocks() == static_cast<std::size_t>(c.dimension())) state.fast_path = true;
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (state.matched(i)) continue;
    // Unreachable in exact arithmetic: the split on C^i matches all its blocks.
    return detail::inconsistent_block(anchor, i, i, Scalar(0), Scalar(0));
  }
  return state;
}

/// Full nonsingular solver. Without an explicit anchor the first nonsingular
/// member is used. Member indices in the result follow the input order.
template <typename Scalar>
CongruenceResult<Scalar> diagonalize_nonsingular(const MatrixCollection<Scalar>& c,
                                                 std::optional<std::size_t> anchor = std::nullopt) {
  const auto& tol = c.tolerances();
  if (!anchor) anchor = first_nonsingular(c);
  if (!anchor) throw PreconditionError("diagonalize_nonsingular: no nonsingular member");
  if (*anchor >= c.size() || !is_nonsingular(c[*anchor], tol)) {
    throw PreconditionError("diagonalize_nonsingular: requested anchor is singular");
  }

  if (auto cert = necessary_conditions_check(c, *anchor)) return *cert;

  auto reduced = find_R(c, *anchor);
  if (auto* cert = std::get_if<Certificate<Scalar>>(&reduced)) return *cert;
  const auto& state = std::get<BlockDiagonalState<Scalar>>(reduced);

  std::vector<Matrix<Scalar>> rotations;
  rotations.reserve(state.blocks());
  for (const auto& a : state.anchors) rotations.push_back(spectral_decompose(a, tol).orthogonal_factor);
  return make_solution(c, Matrix<Scalar>(state.transform * block_diagonal(rotations)));
}

/// Two-matrix criterion: C1, C2 with C1 nonsingular are SDC exactly when
/// C1^-1 C2 is real diagonalizable.
template <typename DerivedA, typename DerivedB>
bool pair_sdc_check(const Eigen::MatrixBase<DerivedA>& c1, const Eigen::MatrixBase<DerivedB>& c2,
                    const Tolerances<typename DerivedA::Scalar>& tol) {
  if (!is_nonsingular(c1, tol)) throw PreconditionError("pair_sdc_check: first matrix is singular");
  if (!check_symmetric(c1, tol) || !check_symmetric(c2, tol)) {
    throw PreconditionError("pair_sdc_check: inputs must be symmetric");
  }
  return real_diagonalizing_basis(solve_linear(c1, c2, tol), tol).has_value();
}

}  // namespace sdc
