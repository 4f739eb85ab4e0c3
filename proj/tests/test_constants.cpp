#include <doctest.h>

#include <cmath>

#include "dtl/constants.hpp"
#include "dtl/error.hpp"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace dtl;
using testing::close;
using testing::cube;

namespace {

// Only the fields the constant scans read; bypasses the full profile checks
// so single-exponent examples can be posed directly.
ExponentProfile bare_profile(int n, double alpha, double beta, double p) {
  ExponentProfile prof;
  prof.m = 1;
  prof.n = n;
  prof.alpha = alpha;
  prof.beta = beta;
  prof.p_vec = {p};
  prof.p = p;
  return prof;
}

const RootSpec kLine{1, 3};

}  // namespace

TEST_CASE("Adams constant") {
  CHECK(close(adams_constant(TreeAggregate::of(LeafMeasure::lebesgue(kLine)), 0.5).value, 1.0));
  const auto atom = adams_constant(TreeAggregate::of(LeafMeasure::atomic(kLine, {{0, 1.0}})), 0.5);
  CHECK(close(atom.value, std::pow(2.0, 1.5)));
  REQUIRE(atom.witnesses.size() == 1);
  CHECK(atom.witnesses[0] == cube(3, {0}));
  CHECK(adams_constant(TreeAggregate::of(LeafField::constant(kLine, 0.0)), 0.5).value == 0.0);
  CHECK(atom.mode == "exact-scan");
}

TEST_CASE("Kerman-Sawyer testing constant") {
  CHECK(close(ks_testing_constant(TreeAggregate::of(LeafMeasure::lebesgue(kLine)), 0.5, 2.0).value, 1.0));
  const auto atom = ks_testing_constant(TreeAggregate::of(LeafMeasure::atomic(kLine, {{0, 1.0}})), 0.5, 2.0);
  CHECK(close(atom.value, std::sqrt(2.5)));
  CHECK(atom.witnesses[0] == cube(0, {0}));
  CHECK(ks_testing_constant(TreeAggregate::of(LeafField::constant(kLine, 0.0)), 0.5, 2.0).value == 0.0);
}

TEST_CASE("A0 constants") {
  const auto prof = bare_profile(1, 0.5, 0.5, 2.0);
  CHECK(close(a0_constant(LeafMeasure::lebesgue(kLine), prof, A0Form::weight_a).value, 1.0));
  const auto atom = a0_constant(LeafMeasure::atomic(kLine, {{0, 1.0}}), prof, A0Form::weight_a);
  CHECK(close(atom.value, 1.0));
  CHECK(atom.witnesses[0] == cube(0, {0}));
  CHECK(close(a0_constant(LeafMeasure::lebesgue(kLine), prof, A0Form::bump_b, std::nullopt, 3.0).value, 1.0));
  CHECK_THROWS_AS(a0_constant(LeafMeasure::atomic(kLine, {{0, 1.0}}), prof, A0Form::bump_b, std::nullopt, 2.0),
                  Error);
  CHECK_THROWS_AS(a0_constant(LeafMeasure::lebesgue(kLine), prof, A0Form::bump_b), Error);
  CHECK(parse_a0_form(to_string(A0Form::sparse_b)) == A0Form::sparse_b);
  CHECK_THROWS_AS(parse_a0_form("weight-z"), Error);
}

TEST_CASE("exact-scan constants match naive oracles") {
  for (const int n : {1, 2}) {
    for (int depth = 0; depth <= 3; ++depth) {
      const RootSpec root{n, depth};
      for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto mu = testing::random_measure(root, seed);
        const auto agg = TreeAggregate::of(mu);
        const double beta = 0.4 * n;
        CHECK(close(adams_constant(agg, beta).value, oracle::adams(mu, beta)));
        CHECK(close(ks_testing_constant(agg, beta, 1.8).value, oracle::ks_testing(mu, beta, 1.8)));
        const auto prof = bare_profile(n, 0.6 * n, beta, 1.8);
        CHECK(close(a0_constant(mu, prof, A0Form::weight_a).value, oracle::weight_a(mu, beta, 1.8)));
        // With the canonical kernel the sparse form is the weight form at order alpha.
        CHECK(close(a0_constant(mu, prof, A0Form::sparse_a).value, oracle::weight_a(mu, 0.6 * n, 1.8)));
        if (mu.kind() == MeasureKind::density) {
          const auto& w = mu.density_field();
          CHECK(close(ap_characteristic(w, 2.0).value, oracle::ap(w, 2.0)));
          CHECK(close(ap_characteristic(w, 3.5).value, oracle::ap(w, 3.5)));
          CHECK(close(a0_constant(mu, prof, A0Form::bump_b, std::nullopt, 2.0).value,
                      oracle::weight_a(mu.power(2.0), beta, 3.6)));
        }
      }
    }
  }
}

TEST_CASE("A_p characteristic") {
  CHECK(close(ap_characteristic(LeafField::constant(kLine, 1.0), 2.0).value, 1.0));
  CHECK(close(ap_characteristic(LeafField::constant(kLine, 1.0), std::nullopt).value, 1.0));
  const auto step = LeafField::ingest({1, 1}, {2.0, 1.0});
  const auto rep = ap_characteristic(step, 2.0);
  CHECK(close(rep.value, 1.125));
  CHECK(rep.witnesses[0] == cube(0, {0}));
  CHECK(std::isinf(ap_characteristic(testing::indicator(kLine, {0, 1, 2}), 2.0).value));
  CHECK_THROWS_AS(ap_characteristic(step, 1.0), Error);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto w = testing::random_field({2, 3}, seed);
    double prev = INFINITY;
    for (const double p : {1.5, 2.0, 4.0, 16.0, 64.0}) {
      const double a = ap_characteristic(w, p).value;
      CHECK(a >= 1.0 - 1e-12);
      CHECK(a <= prev * (1 + 1e-12));
      prev = a;
    }
  }
}

TEST_CASE("C_Q on a single cube and for a given family") {
  const RootSpec point{1, 0};
  const auto k = KernelWeight::canonical(0.5, 1, 1);
  const auto dx = TreeAggregate::of(LeafMeasure::lebesgue(point));
  for (const auto mode : {CqMode::greedy, CqMode::exhaustive}) {
    CHECK(close(cq_constant(dx, k, 2.0, cube(0, {0}), mode).value, 1.0));
  }

  const Grid grid(kLine);
  const auto mu = TreeAggregate::of(testing::random_measure(kLine, 2));
  const double p = 2.0;
  const double pc = 2.0;
  for (CubeId q = 0; q < grid.cube_count(); ++q) {
    if (!(mu.sum(q) > 0.0)) continue;
    const auto addr = grid.addr(q);
    double inner = 0.0;
    for (CubeId r = 0; r < grid.cube_count(); ++r) {
      if (!grid.contains(q, r)) continue;
      const int lv = grid.level_of(r);
      inner += k.at(lv) * grid.volume(lv) * mu.sum(r);
    }
    const double want = std::pow(mu.sum(q), -1.0 / pc) * std::pow(grid.volume(addr.level), -1.0 / p) * inner;
    const std::vector<CubeAddr> family{addr};
    CHECK(close(cq_constant(mu, k, p, addr, CqMode::given, family).value, want));
  }
}

TEST_CASE("C_Q hierarchy: greedy <= exhaustive <= constant * bound") {
  const Grid grid(kLine);
  const auto k = KernelWeight::canonical(0.5, 1, 1);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto mu = TreeAggregate::of(testing::random_measure(kLine, seed));
    for (CubeId q = 0; q < grid.cube_count(); ++q) {
      if (!(mu.sum(q) > 0.0)) continue;
      const auto addr = grid.addr(q);
      const double greedy = cq_constant(mu, k, 2.0, addr, CqMode::greedy).value;
      const double exhaustive = cq_constant(mu, k, 2.0, addr, CqMode::exhaustive).value;
      const auto bound = cq_constant(mu, k, 2.0, addr, CqMode::bound);
      CHECK(greedy <= exhaustive * (1 + 1e-12));
      REQUIRE(bound.bound_constant.has_value());
      CHECK(exhaustive <= *bound.bound_constant * bound.value * (1 + 1e-12));
      worst = std::max(worst, exhaustive / bound.value);
    }
  }
  CHECK(worst <= 10.0);

  const auto dx = TreeAggregate::of(LeafMeasure::lebesgue({1, 4}));
  try {
    cq_constant(dx, k, 2.0, cube(0, {0}), CqMode::exhaustive);
    FAIL("expected a refusal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ComplexityRefusal);
  }
  const auto empty = TreeAggregate::of(LeafMeasure::atomic(kLine, {{0, 1.0}}));
  try {
    cq_constant(empty, k, 2.0, cube(1, {1}), CqMode::greedy);
    FAIL("expected ZeroMeasure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroMeasure);
  }
}

TEST_CASE("greedy families are certified sparse") {
  const Grid grid({2, 3});
  std::vector<double> weight(grid.cube_count());
  for (CubeId q = 0; q < weight.size(); ++q) weight[q] = 1.0 + static_cast<double>(q % 7);
  const auto rep = sparse_sum_functional(grid, weight, 2.0, 0, CqMode::greedy);
  std::vector<CubeAddr> fam = rep.witnesses;
  CHECK(verify_sparse(grid.root(), fam).is_sparse);
}

TEST_CASE("condition D") {
  const Grid grid({1, 3});
  const auto k = KernelWeight::canonical(0.5, 2, 1);
  CHECK(condition_d_ratio(grid, k, 2, 1.5, 0) == 0.0);
  CHECK(close(condition_d_series(2, 1.0, 1.5, 5), 2.6354915763973046, 1e-12));
  double s = 0.0;
  for (int d = 1; d <= 5; ++d) s += std::pow(2.0, -d / 3.0);
  CHECK(close(condition_d_series(2, 1.0, 1.5, 5), s));

  for (const int n : {1, 2}) {
    const RootSpec root{n, 5};
    const Grid g(root);
    const double alpha = 0.5 * n;
    const double p0 = 1.5;
    const auto kc = KernelWeight::canonical(alpha, 2, n);
    for (CubeId q = 0; q < g.cube_count(); q += 7) {
      const double ratio = condition_d_ratio(g, kc, 2, p0, q);
      CHECK(close(ratio, oracle::condition_d(n, 2, alpha, p0, g.level_of(q))));
      CHECK(close(ratio, condition_d_series(n, alpha, p0, g.level_of(q))));
      CHECK(ratio <= condition_d_bound(n, alpha, p0));
    }
  }
}

TEST_CASE("constant reports serialize with their mode") {
  const auto rep = cq_supremum(TreeAggregate::of(LeafMeasure::lebesgue(kLine)), KernelWeight::canonical(0.5, 1, 1),
                               2.0, CqMode::greedy);
  const auto doc = rep.to_json();
  CHECK(doc.at("mode") == "greedy");
  CHECK(doc.contains("witnesses"));
  CHECK(to_string(CqMode::bound) == "closed-form-bound");
  CHECK(parse_cq_mode("exhaustive") == CqMode::exhaustive);
}
