#pragma once

#include <cstddef>
#include <optional>

#include "sdc/collection.hpp"
#include "sdc/nonsingular.hpp"
#include "sdc/singular.hpp"

namespace sdc {

enum class SolverPath { Nonsingular, Singular };

inline const char* to_string(SolverPath p) { return p == SolverPath::Nonsingular ? "nonsingular" : "singular"; }

template <typename Scalar>
struct Diagnosis {
  SolverPath path;
  /// Anchor of the nonsingular path.
  std::optional<std::size_t> anchor;
  CongruenceResult<Scalar> result;
  /// Stage trace of the singular path.
  std::optional<ReductionTrace<Scalar>> trace;
};

/// Any member of full numerical rank sends the collection down the
/// nonsingular path with the first such member as anchor; otherwise the
/// singular reduction runs.
template <typename Scalar>
Diagnosis<Scalar> diagonalize(const MatrixCollection<Scalar>& c) {
  if (auto anchor = first_nonsingular(c)) {
    return {SolverPath::Nonsingular, anchor, diagonalize_nonsingular(c, anchor), std::nullopt};
  }
  auto run = run_singular(c);
  return {SolverPath::Singular, std::nullopt, std::move(run.result), std::move(run.trace)};
}

}  // namespace sdc
