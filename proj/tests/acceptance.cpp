// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fixtures.hpp"
#include "sdc/diagonalize.hpp"
#include "sdc/instance_factory.hpp"
#include "sdc/verifier.hpp"

using namespace sdc;

namespace {

using Clock = std::chrono::steady_clock;
const Tolerances<double> tol;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

// Example 1: partition and coefficient multisets, residuals, runtime.
Verdict ac1() {
  Verdict o;
  const auto start = Clock::now();
  const MatrixCollection<double> c(fixtures::five_by_five());
  const auto d = diagonalize(c);
  const double elapsed = seconds_since(start);
  if (d.path != SolverPath::Nonsingular) o.fail("dispatched to the singular path");
  if (!d.result.is_sdc()) {
    o.fail("reported NOT_SDC");
    return o;
  }
  const auto reduced = find_R(c, *d.anchor);
  const auto& state = std::get<BlockDiagonalState<double>>(reduced);
  std::multiset<Index> sizes(state.partition.begin(), state.partition.end());
  if (sizes != std::multiset<Index>{1, 1, 1, 2}) o.fail("partition is not {1,1,1,2}");

  const std::vector<std::vector<std::pair<Index, double>>> expected{
      {{1, 2.5}, {1, 2.5}, {1, 5.0 / 3}, {2, 2.5}},
      {{1, -0.5}, {1, 2}, {1, 4.0 / 3}, {2, -0.5}},
      {{1, 0}, {1, 7.0 / 3}, {1, 3.5}, {2, 0.5}},
  };
  for (std::size_t i = 1; i < 4; ++i) {
    std::vector<std::pair<Index, double>> got;
    for (std::size_t t = 0; t < state.blocks(); ++t) got.emplace_back(state.partition[t], *state.coeffs[i][t]);
    std::sort(got.begin(), got.end());
    auto want = expected[i - 1];
    std::sort(want.begin(), want.end());
    for (std::size_t k = 0; k < want.size() && k < got.size(); ++k) {
      if (got[k].first != want[k].first || !close(got[k].second, want[k].second, 1e-9)) {
        o.fail("coefficient row " + std::to_string(i + 1) + " differs");
      }
    }
  }
  const auto report = verify_congruence(c, d.result.solution().P, tol);
  if (!report.passed || report.per_matrix_offdiag.maxCoeff() > 1e-8) o.fail("verify_congruence residual above 1e-8");
  if (elapsed >= 1.0) o.fail("runtime " + std::to_string(elapsed) + " s");
  if (o.pass) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "max residual %.2e, %.3f ms", report.per_matrix_offdiag.maxCoeff(), 1e3 * elapsed);
    o.detail = buf;
  }
  return o;
}

// Example 2: singular path with its stage trace.
Verdict ac2() {
  Verdict o;
  const MatrixCollection<double> c(fixtures::four_by_four());
  const auto d = diagonalize(c);
  if (d.path != SolverPath::Singular || !d.trace) {
    o.fail("not dispatched to the singular path");
    return o;
  }
  if (!d.result.is_sdc()) {
    o.fail("reported NOT_SDC");
    return o;
  }
  const auto& trace = *d.trace;
  if (trace.stages.size() != 2) {
    o.fail("expected two reduction stages");
    return o;
  }
  if (trace.stages[0].mu != 1.0) o.fail("mu != 1");
  if (trace.stages[0].p != 1 || trace.stages[1].p != 3) o.fail("p-sequence is not 1 -> 3");
  if (trace.stages[0].s != 2 || trace.stages[1].s != 1) o.fail("s-sequence is not 2 -> 1");
  if (trace.stages[1].northwest != fixtures::mat(3, {4, 0, 0, 0, 1, 1, 0, 1, 1}))
    o.fail("stage-3 north-west block differs");
  const auto report = verify_congruence(c, d.result.solution().P, tol);
  if (!report.passed || report.per_matrix_offdiag.maxCoeff() > 1e-12) o.fail("residuals above 1e-12");
  if (o.pass) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "max residual %.2e", report.per_matrix_offdiag.maxCoeff());
    o.detail = buf;
  }
  return o;
}

Verdict ac3() {
  Verdict o;
  const std::vector<std::pair<std::vector<Matrix<double>>, CertificateKind>> cases{
      {fixtures::jordan_pair(), CertificateKind::NotDiagonalizable},
      {fixtures::noncommuting_triple(), CertificateKind::SymmetryViolation},
      {fixtures::coupled_pair(), CertificateKind::CouplingNonzero},
  };
  for (const auto& [members, kind] : cases) {
    const MatrixCollection<double> c(members);
    const auto d = diagonalize(c);
    if (d.result.is_sdc()) {
      o.fail(std::string("expected ") + to_string(kind) + ", got SDC");
      continue;
    }
    const auto& cert = d.result.certificate();
    if (cert.kind != kind) o.fail(std::string("expected ") + to_string(kind) + ", got " + to_string(cert.kind));
    if (!validate_certificate(c, cert, tol)) o.fail(std::string(to_string(kind)) + " certificate did not validate");
  }
  if (o.pass) o.detail = "3/3 certificates validated";
  return o;
}

Verdict ac4() {
  Verdict o;
  constexpr std::uint64_t count = 500;
  const auto start = Clock::now();
  double worst = 0;
  std::size_t singular = 0;
  for (std::uint64_t seed = 1; seed <= count; ++seed) {
    Rng rng(seed * 7919);
    const Index n = static_cast<Index>(rng.integer(2, 10));
    const auto m = static_cast<std::size_t>(rng.integer(2, 6));
    GenSpec spec{.n = n, .m = m, .seed = seed, .cond_cap = 1e3};
    if (seed % 2 == 0) {
      spec.singular_ranks = random_rank_caps(n, m, seed);
      ++singular;
    }
    try {
      const auto inst = gen_sdc<double>(spec);
      const auto d = diagonalize(inst.collection);
      if (!d.result.is_sdc()) {
        o.fail("seed " + std::to_string(seed) + " reported NOT_SDC (" + to_string(d.result.certificate().kind) + ")");
        continue;
      }
      const auto report = verify_congruence(inst.collection, d.result.solution().P, tol);
      worst = std::max(worst, report.per_matrix_offdiag.maxCoeff());
      if (report.per_matrix_offdiag.maxCoeff() > 1e-6) o.fail("seed " + std::to_string(seed) + " residual above 1e-6");
    } catch (const std::exception& e) {
      o.fail("seed " + std::to_string(seed) + " threw: " + e.what());
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 60) o.fail("runtime " + std::to_string(elapsed) + " s");
  if (o.pass) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%llu instances (%zu singular), worst residual %.2e, %.2f s",
                  static_cast<unsigned long long>(count), singular, worst, elapsed);
    o.detail = buf;
  }
  return o;
}

Verdict ac5() {
  Verdict o;
  std::size_t total = 0;
  auto run = [&](const MatrixCollection<double>& c, const std::string& label) {
    ++total;
    try {
      const auto d = diagonalize(c);
      if (d.result.is_sdc()) {
        o.fail(label + " reported SDC");
      } else if (!validate_certificate(c, d.result.certificate(), tol)) {
        o.fail(label + " certificate did not validate");
      }
    } catch (const std::exception& e) {
      o.fail(label + " threw: " + e.what());
    }
  };
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(seed * 104729);
    const Index n = static_cast<Index>(rng.integer(2, 8));
    run(gen_defective_pair<double>(n, seed), "defective seed " + std::to_string(seed));
    const auto m = static_cast<std::size_t>(rng.integer(3, 6));
    run(gen_symmetry_violation<double>(n, m, seed), "noncommuting seed " + std::to_string(seed));
  }
  if (o.pass) o.detail = std::to_string(total) + " instances NOT_SDC with valid certificates";
  return o;
}

Verdict ac6() {
  Verdict o;
  std::size_t sdc_count = 0, not_count = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    Rng rng(seed * 15485863);
    const Index n = static_cast<Index>(rng.integer(2, 8));
    std::vector<Matrix<double>> pair;
    switch (seed % 3) {
      case 0: pair = gen_sdc<double>(GenSpec{.n = n, .m = 2, .seed = seed}).collection.matrices(); break;
      case 1: pair = gen_defective_pair<double>(n, seed).matrices(); break;
      default: {
        Matrix<double> a = random_symmetric<double>(n, 3, rng);
        while (!is_nonsingular(a, tol)) a = random_symmetric<double>(n, 3, rng);
        pair = {a, random_symmetric<double>(n, 3, rng)};
      }
    }
    const MatrixCollection<double> c(pair);
    if (!is_nonsingular(c[0], tol)) {
      o.fail("seed " + std::to_string(seed) + " produced a singular first matrix");
      continue;
    }
    try {
      const bool solver = diagonalize_nonsingular(c, 0).is_sdc();
      const bool oracle = pair_sdc_check(c[0], c[1], tol);
      (solver ? sdc_count : not_count)++;
      if (solver != oracle) o.fail("seed " + std::to_string(seed) + " disagrees with the pair criterion");
    } catch (const std::exception& e) {
      o.fail("seed " + std::to_string(seed) + " threw: " + e.what());
    }
  }
  if (sdc_count == 0 || not_count == 0) o.fail("pairs were not mixed");
  if (o.pass) o.detail = std::to_string(sdc_count) + " SDC / " + std::to_string(not_count) + " NOT_SDC, all agree";
  return o;
}

Verdict ac7() {
  Verdict o;
  std::size_t subsets = 0, reanchored = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed * 32452843);
    const Index n = static_cast<Index>(rng.integer(2, 7));
    const auto m = static_cast<std::size_t>(rng.integer(2, 5));
    GenSpec spec{.n = n, .m = m, .seed = seed};
    if (seed % 2 == 0) spec.singular_ranks = random_rank_caps(n, m, seed);
    const std::string label = "seed " + std::to_string(seed);
    try {
      const auto c = gen_sdc<double>(spec).collection;
      if (!diagonalize(c).result.is_sdc()) {
        o.fail(label + " reported NOT_SDC");
        continue;
      }
      // (a) congruence by a random nonsingular T.
      const Matrix<double> t = random_mixing<double>(n, 1e2, rng);
      if (!diagonalize(c.congruent(t)).result.is_sdc()) o.fail(label + " changed status under congruence");
      // (b) every nonsingular member as anchor.
      for (std::size_t a = 0; a < c.size(); ++a) {
        if (!is_nonsingular(c[a], tol)) continue;
        ++reanchored;
        if (!diagonalize_nonsingular(c, a).is_sdc()) o.fail(label + " changed status with anchor " + std::to_string(a));
      }
      // (c) every non-empty sub-collection.
      for (unsigned mask = 1; mask < (1u << c.size()); ++mask) {
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < c.size(); ++i)
          if (mask & (1u << i)) keep.push_back(i);
        ++subsets;
        if (!diagonalize(c.subset(keep)).result.is_sdc()) o.fail(label + " has a non-SDC sub-collection");
      }
    } catch (const std::exception& e) {
      o.fail(label + " threw: " + e.what());
    }
  }
  if (o.pass) {
    o.detail = "50 instances, " + std::to_string(reanchored) + " re-anchored runs, " + std::to_string(subsets) +
               " sub-collections";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"AC1 5x5 worked example", ac1},       {"AC2 4x4 singular worked example", ac2},
      {"AC3 negative fixtures", ac3},        {"AC4 round-trip suite", ac4},
      {"AC5 negative suite", ac5},           {"AC6 pair criterion agreement", ac6},
      {"AC7 invariance suite", ac7},
  };
  bool all = true;
  for (const auto& [name, check] : criteria) {
    Verdict o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("threw: ") + e.what());
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
