#include <algorithm>
#include <set>
#include <utility>

#include "doctest.h"
#include "fixtures.hpp"
#include "sdc/instance_factory.hpp"
#include "sdc/nonsingular.hpp"

using namespace sdc;
using fixtures::mat;

namespace {

const Tolerances<double> tol;

MatrixCollection<double> collection(std::vector<Matrix<double>> m) { return MatrixCollection<double>(std::move(m)); }

// (block size, coefficient) pairs of matrix i, sorted.
std::vector<std::pair<Index, double>> size_coeff_pairs(const BlockDiagonalState<double>& s, std::size_t i) {
  std::vector<std::pair<Index, double>> out;
  for (std::size_t t = 0; t < s.blocks(); ++t) out.emplace_back(s.partition[t], s.coeffs[i][t].value());
  std::sort(out.begin(), out.end());
  return out;
}

void check_pairs(const std::vector<std::pair<Index, double>>& got, std::vector<std::pair<Index, double>> want) {
  std::sort(want.begin(), want.end());
  REQUIRE(got.size() == want.size());
  for (std::size_t k = 0; k < got.size(); ++k) {
    CHECK(got[k].first == want[k].first);
    CHECK(got[k].second == doctest::Approx(want[k].second).epsilon(1e-9));
  }
}

std::multiset<Index> sizes(const BlockDiagonalState<double>& s) { return {s.partition.begin(), s.partition.end()}; }

}  // namespace

TEST_CASE("column_match") {
  CHECK(column_match(mat(2, {1, 0, 0, 3}), Matrix<double>::Zero(2, 2), tol).value() == 0);
  CHECK(column_match(mat(2, {2, 4, 4, 10}), mat(2, {1, 2, 2, 5}), tol).value() == doctest::Approx(0.5));
  CHECK_FALSE(column_match(Matrix<double>::Identity(2, 2), mat(2, {1, 0, 0, 2}), tol));
}

TEST_CASE("necessary_conditions_check") {
  CHECK_FALSE(necessary_conditions_check(collection(fixtures::five_by_five()), 0));

  const auto sym = necessary_conditions_check(collection(fixtures::noncommuting_triple()), 0);
  REQUIRE(sym);
  CHECK(sym->kind == CertificateKind::SymmetryViolation);
  CHECK(sym->first == 1);
  CHECK(sym->second == 2);
  // C^3 (C^1)^-1 C^2 = [[0,2],[1,0]]: largest asymmetric entry 1.
  CHECK(sym->residual == doctest::Approx(1));

  const auto nd = necessary_conditions_check(collection(fixtures::jordan_pair()), 0);
  REQUIRE(nd);
  CHECK(nd->kind == CertificateKind::NotDiagonalizable);
  CHECK(nd->first == 1);
  CHECK_FALSE(nd->in_block);

  CHECK_THROWS_AS(necessary_conditions_check(collection(fixtures::coupled_pair()), 0), PreconditionError);
}

TEST_CASE("block_decompose_step on the 5x5 example") {
  const auto c = collection(fixtures::five_by_five());
  auto state = initial_block_state(c, 0);
  CHECK(state.partition == std::vector<Index>{5});

  auto first = block_decompose_step(state, 1, tol);
  REQUIRE(std::holds_alternative<BlockDiagonalState<double>>(first));
  state = std::get<BlockDiagonalState<double>>(first);
  CHECK(sizes(state) == std::multiset<Index>{4, 1});
  check_pairs(size_coeff_pairs(state, 1), {{4, 2.5}, {1, 5.0 / 3}});

  auto second = block_decompose_step(state, 2, tol);
  REQUIRE(std::holds_alternative<BlockDiagonalState<double>>(second));
  state = std::get<BlockDiagonalState<double>>(second);
  CHECK(sizes(state) == std::multiset<Index>{3, 1, 1});
  check_pairs(size_coeff_pairs(state, 2), {{3, -0.5}, {1, 2}, {1, 4.0 / 3}});
}

TEST_CASE("block_decompose_step with a scalar multiple of the anchor") {
  const Matrix<double> a = mat(3, {2, 1, 0, 1, 3, 1, 0, 1, 4});
  const Matrix<double> b = mat(3, {1, 0, 0, 0, 2, 0, 0, 0, 3});
  const auto c = collection({a, 3 * a, b});
  const auto state = initial_block_state(c, 0);
  CHECK(state.coeffs[1][0].value() == doctest::Approx(3));
  auto step = block_decompose_step(state, 1, tol);
  const auto& next = std::get<BlockDiagonalState<double>>(step);
  CHECK(next.partition == std::vector<Index>{3});
  CHECK(next.coeffs[1][0].value() == doctest::Approx(3));
}

TEST_CASE("find_R on the 5x5 example") {
  const auto c = collection(fixtures::five_by_five());
  auto out = find_R(c, 0);
  REQUIRE(std::holds_alternative<BlockDiagonalState<double>>(out));
  const auto& state = std::get<BlockDiagonalState<double>>(out);
  CHECK(sizes(state) == std::multiset<Index>{1, 1, 1, 2});
  check_pairs(size_coeff_pairs(state, 1), {{1, 2.5}, {2, 2.5}, {1, 2.5}, {1, 5.0 / 3}});
  check_pairs(size_coeff_pairs(state, 2), {{1, -0.5}, {2, -0.5}, {1, 2}, {1, 4.0 / 3}});
  check_pairs(size_coeff_pairs(state, 3), {{1, 3.5}, {2, 0.5}, {1, 0}, {1, 7.0 / 3}});
  CHECK(state.splits <= c.size() - 1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Matrix<double> moved = congruence_transform(c[i], state.transform);
    CHECK((moved - state.reconstruct(i)).norm() <= tol.residual * c[i].norm());
  }
}

TEST_CASE("find_R on diagonal matrices") {
  const auto c = collection({mat(3, {1, 0, 0, 0, 2, 0, 0, 0, 3}), mat(3, {4, 0, 0, 0, 4, 0, 0, 0, 5}),
                             mat(3, {1, 0, 0, 0, 6, 0, 0, 0, 1})});
  const auto reduced = find_R(c, 0);
  const auto& state = std::get<BlockDiagonalState<double>>(reduced);
  CHECK(sizes(state) == std::multiset<Index>{1, 1, 1});
  const auto result = diagonalize_nonsingular(c);
  REQUIRE(result.is_sdc());
  CHECK(result.solution().residuals.maxCoeff() == 0);
}

TEST_CASE("find_R: telescoping partitions") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    GenSpec spec{.n = 6, .m = 4, .seed = seed};
    const auto inst = gen_sdc<double>(spec);
    const auto& c = inst.collection;
    auto state = initial_block_state(c, 0);
    std::size_t previous = state.blocks();
    for (std::size_t j = 1; j < c.size() && !state.all_matched(); ++j) {
      if (state.matched(j)) continue;
      auto step = block_decompose_step(state, j, tol);
      REQUIRE(std::holds_alternative<BlockDiagonalState<double>>(step));
      state = std::get<BlockDiagonalState<double>>(step);
      CHECK(state.blocks() >= previous);
      CHECK(state.blocks() <= 6);
      previous = state.blocks();
    }
    CHECK(state.all_matched());
  }
}

TEST_CASE("diagonalize_nonsingular") {
  SUBCASE("5x5 example") {
    const auto c = collection(fixtures::five_by_five());
    const auto result = diagonalize_nonsingular(c);
    REQUIRE(result.is_sdc());
    const auto& sol = result.solution();
    for (Index i = 0; i < 4; ++i) CHECK(sol.residuals(i) <= 1e-8);
    // Each column of P carries one generalized eigenvalue per member.
    std::multiset<long> ratios;
    for (Index k = 0; k < 5; ++k) ratios.insert(std::lround(1e6 * sol.diagonals[3](k) / sol.diagonals[0](k)));
    CHECK(ratios == std::multiset<long>{3500000, 500000, 500000, 0, 2333333});
  }
  SUBCASE("single matrix") {
    const auto result = diagonalize_nonsingular(collection({mat(2, {1, 2, 2, 1})}));
    REQUIRE(result.is_sdc());
    CHECK(result.solution().residuals(0) <= 1e-15);
  }
  SUBCASE("non-commuting triple") {
    const auto result = diagonalize_nonsingular(collection(fixtures::noncommuting_triple()));
    REQUIRE_FALSE(result.is_sdc());
    CHECK(result.certificate().kind == CertificateKind::SymmetryViolation);
  }
  SUBCASE("explicit anchor") {
    const auto c = collection(fixtures::five_by_five());
    CHECK(diagonalize_nonsingular(c, 1).is_sdc());
    CHECK_THROWS_AS(diagonalize_nonsingular(collection(fixtures::coupled_pair())), PreconditionError);
  }
}

TEST_CASE("pair_sdc_check") {
  CHECK(pair_sdc_check(Matrix<double>::Identity(2, 2), mat(2, {1, 7, 7, -3}), tol));
  CHECK_FALSE(pair_sdc_check(mat(2, {0, 1, 1, 0}), mat(2, {1, 0, 0, 0}), tol));
  const auto c = fixtures::five_by_five();
  CHECK(pair_sdc_check(c[0], c[1], tol));
  CHECK_THROWS_AS(pair_sdc_check(mat(2, {1, 0, 0, 0}), mat(2, {1, 0, 0, 0}), tol), PreconditionError);
}

TEST_CASE("properties on generated collections") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    Rng rng(seed + 1000);
    GenSpec spec{.n = static_cast<Index>(rng.integer(2, 8)), .m = static_cast<std::size_t>(rng.integer(2, 5)),
                 .seed = seed};
    const auto inst = gen_sdc<double>(spec);
    const auto& c = inst.collection;
    CAPTURE(seed);
    const auto result = diagonalize_nonsingular(c);
    REQUIRE(result.is_sdc());
    const auto& p = result.solution().P;
    const auto sv = singular_values(p);
    CHECK(sv(sv.size() - 1) > tol.rank * sv(0));

    // Anchor invariance.
    for (std::size_t a = 0; a < c.size(); ++a)
      if (is_nonsingular(c[a], tol)) CHECK(diagonalize_nonsingular(c, a).is_sdc());

    // Sub-collections.
    for (std::size_t drop = 0; drop < c.size(); ++drop) {
      std::vector<std::size_t> keep;
      for (std::size_t i = 0; i < c.size(); ++i)
        if (i != drop) keep.push_back(i);
      const auto sub = c.subset(keep);
      if (first_nonsingular(sub)) CHECK(diagonalize_nonsingular(sub).is_sdc());
    }

    // Pair oracle.
    const auto pair = c.subset(std::vector<std::size_t>{0, 1});
    CHECK(diagonalize_nonsingular(pair, 0).is_sdc() == pair_sdc_check(c[0], c[1], tol));
  }
}
