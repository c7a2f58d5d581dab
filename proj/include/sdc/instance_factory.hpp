#pragma once

// Seeded SDC and non-SDC collections with known ground truth.
//
// Randomness comes from std::mt19937_64 mapped to doubles and integers by hand,
// so a seed produces bit-identical collections on every standard library.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sdc/collection.hpp"
#include "sdc/kernel.hpp"

namespace sdc {

struct GenSpec {
  Index n = 3;
  std::size_t m = 2;
  std::uint64_t seed = 1;
  /// Per-matrix rank caps; all below n makes every member singular with a
  /// shared null coordinate.
  std::optional<std::vector<Index>> singular_ranks;
  /// Diagonal entries are integers in [-entry_range, entry_range].
  int entry_range = 3;
  /// Bound on the condition number of the mixing matrix.
  double cond_cap = 1e3;

  void validate() const {
    if (n < 1 || m < 1) throw PreconditionError("GenSpec: n and m must be at least 1");
    if (!(cond_cap > 1)) throw PreconditionError("GenSpec: cond_cap must exceed 1");
    if (entry_range < 1) throw PreconditionError("GenSpec: entry_range must be at least 1");
    if (singular_ranks) {
      if (singular_ranks->size() != m) throw PreconditionError("GenSpec: need one rank cap per matrix");
      for (auto r : *singular_ranks)
        if (r < 0 || r > n) throw PreconditionError("GenSpec: rank cap outside [0, n]");
    }
  }
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  std::int64_t nonzero_integer(std::int64_t range) {
    const auto k = integer(1, range);
    return integer(0, 1) ? k : -k;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(integer(0, i - 1))]);
  }

 private:
  std::mt19937_64 engine_;
};

template <typename Scalar>
Matrix<Scalar> random_orthogonal(Index n, Rng& rng) {
  Matrix<Scalar> a(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) a(i, j) = Scalar(rng.uniform(-1, 1));
  Eigen::HouseholderQR<Matrix<Scalar>> qr(a);
  Matrix<Scalar> q = qr.householderQ();
  const Matrix<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < Scalar(0)) q.col(j) = -q.col(j);
  return q;
}

/// O1 * diag(sigma) * O2 with sigma in [1, sqrt(cond_cap)].
template <typename Scalar>
Matrix<Scalar> random_mixing(Index n, double cond_cap, Rng& rng) {
  constexpr int budget = 64;
  for (int attempt = 0; attempt < budget; ++attempt) {
    Vector<Scalar> sigma(n);
    for (Index k = 0; k < n; ++k) sigma(k) = Scalar(rng.uniform(1, std::sqrt(cond_cap)));
    const Matrix<Scalar> b = random_orthogonal<Scalar>(n, rng) * sigma.asDiagonal() * random_orthogonal<Scalar>(n, rng);
    const auto sv = singular_values(b);
    if (sv(0) <= Scalar(cond_cap) * sv(sv.size() - 1)) return b;
  }
  throw GenerationError("random_mixing: no matrix within the condition cap");
}

/// Symmetric matrix with integer entries in [-range, range].
template <typename Scalar>
Matrix<Scalar> random_symmetric(Index n, int range, Rng& rng) {
  Matrix<Scalar> s(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) s(i, j) = s(j, i) = Scalar(rng.integer(-range, range));
  return s;
}

/// Rank caps in [1, n - 1], one per matrix, for an all-singular spec.
inline std::vector<Index> random_rank_caps(Index n, std::size_t m, std::uint64_t seed) {
  if (n < 2) throw PreconditionError("random_rank_caps: n must be at least 2");
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Index> caps(m);
  for (auto& r : caps) r = static_cast<Index>(rng.integer(1, n - 1));
  return caps;
}

template <typename Scalar>
struct GeneratedInstance {
  MatrixCollection<Scalar> collection;
  Matrix<Scalar> ground_truth_P;
};

namespace detail {

template <typename Scalar>
Matrix<Scalar> congruence_from_diagonal(const Matrix<Scalar>& b, const Vector<Scalar>& d) {
  return congruence_transform(Matrix<Scalar>(d.asDiagonal()), b);
}

}  // namespace detail

/// C^i = B^T D^i B with integer diagonals D^i; the ground truth is P = B^-1.
template <typename Scalar = double>
GeneratedInstance<Scalar> gen_sdc(const GenSpec& spec, const Tolerances<Scalar>& tol = {}) {
  spec.validate();
  Rng rng(spec.seed);
  const Index n = spec.n;
  const Matrix<Scalar> b = random_mixing<Scalar>(n, spec.cond_cap, rng);

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  rng.shuffle(order);
  Index shared_zeros = 0;
  if (spec.singular_ranks) {
    Index widest = 0;
    for (auto r : *spec.singular_ranks) widest = std::max(widest, r);
    shared_zeros = n - widest;
  }

  std::vector<Matrix<Scalar>> members;
  for (std::size_t i = 0; i < spec.m; ++i) {
    Vector<Scalar> d(n);
    for (Index k = 0; k < n; ++k) d(k) = Scalar(rng.nonzero_integer(spec.entry_range));
    if (spec.singular_ranks) {
      for (Index k = 0; k < shared_zeros; ++k) d(order[static_cast<std::size_t>(k)]) = 0;
      std::vector<Index> rest(order.begin() + shared_zeros, order.end());
      rng.shuffle(rest);
      const Index extra = n - (*spec.singular_ranks)[i] - shared_zeros;
      for (Index k = 0; k < extra; ++k) d(rest[static_cast<std::size_t>(k)]) = 0;
    }
    members.push_back(detail::congruence_from_diagonal(b, d));
  }
  return {MatrixCollection<Scalar>(std::move(members), tol), b.inverse()};
}

/// A pair whose quotient C1^-1 C2 carries the nilpotent Jordan block of
/// {[[0,1],[1,0]], [[1,0],[0,0]]}. For n > 2 the pattern is padded with a
/// random diagonal pair and mixed by a random congruence.
template <typename Scalar = double>
MatrixCollection<Scalar> gen_defective_pair(Index n, std::uint64_t seed, const Tolerances<Scalar>& tol = {}) {
  if (n < 2) throw PreconditionError("gen_defective_pair: n must be at least 2");
  Matrix<Scalar> c1 = Matrix<Scalar>::Zero(n, n);
  Matrix<Scalar> c2 = Matrix<Scalar>::Zero(n, n);
  c1(0, 1) = c1(1, 0) = 1;
  c2(0, 0) = 1;
  if (n > 2) {
    Rng rng(seed);
    for (Index k = 2; k < n; ++k) {
      c1(k, k) = Scalar(rng.nonzero_integer(3));
      c2(k, k) = Scalar(rng.integer(-3, 3));
    }
    const Matrix<Scalar> t = random_mixing<Scalar>(n, 1e2, rng);
    c1 = congruence_transform(c1, t);
    c2 = congruence_transform(c2, t);
  }
  return MatrixCollection<Scalar>({c1, c2}, tol);
}

/// C1 = I with non-commuting integer C2, C3 and random symmetric remainder.
/// With C1 = I, SDC would force every pair to commute.
template <typename Scalar = double>
MatrixCollection<Scalar> gen_symmetry_violation(Index n, std::size_t m, std::uint64_t seed,
                                                const Tolerances<Scalar>& tol = {}) {
  if (n < 2 || m < 3) throw PreconditionError("gen_symmetry_violation: need n >= 2 and m >= 3");
  constexpr int budget = 1000;
  Rng rng(seed);
  for (int attempt = 0; attempt < budget; ++attempt) {
    Matrix<Scalar> c2 = random_symmetric<Scalar>(n, 3, rng);
    Matrix<Scalar> c3 = random_symmetric<Scalar>(n, 3, rng);
    const Scalar commutator = (c2 * c3 - c3 * c2).norm();
    if (!(commutator > tol.sym * std::max(Scalar(1), c2.norm() * c3.norm()))) continue;
    std::vector<Matrix<Scalar>> members{Matrix<Scalar>::Identity(n, n), std::move(c2), std::move(c3)};
    while (members.size() < m) members.push_back(random_symmetric<Scalar>(n, 3, rng));
    return MatrixCollection<Scalar>(std::move(members), tol);
  }
  throw GenerationError("gen_symmetry_violation: commuting samples only");
}

}  // namespace sdc
