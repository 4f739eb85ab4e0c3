#include <doctest.h>

#include <cmath>

#include "dtl/error.hpp"
#include "dtl/norms.hpp"
#include "dtl/profile.hpp"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace dtl;
using testing::close;
using testing::cube;

TEST_CASE("exponent profiles") {
  const auto h = hedberg_exponents(2, 1.0, 0.5, 1.2, 1.5);
  CHECK(close(h.theta, 2.5));
  CHECK(close(h.q, 3.0));
  CHECK(close(h.q0, 3.75));

  const auto prof = ExponentProfile::make(2, 2, 1.0, 0.5, {2.4, 2.4}, 1.5);
  CHECK(close(prof.p, 1.2));
  CHECK(close(prof.theta, 2.5));
  CHECK(close(prof.p_conjugate(), 6.0));
  const auto back = ExponentProfile::from_json(prof.to_json());
  CHECK(back.p_vec == prof.p_vec);
  CHECK(back.q0 == prof.q0);

  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoFailure;
  };
  CHECK(kind_of([] { ExponentProfile::make(1, 1, 0.5, 0.6, {2.0}, 1.5); }) == ErrorKind::BadExponent);  // beta > alpha
  CHECK(kind_of([] { ExponentProfile::make(1, 1, 0.5, 0.5, {1.0}, 1.5); }) == ErrorKind::BadExponent);  // p_i = 1
  CHECK(kind_of([] { ExponentProfile::make(1, 1, 0.5, 0.5, {2.0}, 1.5); }) == ErrorKind::BadExponent);  // p > p0
  CHECK(kind_of([] { ExponentProfile::make(1, 1, 0.5, 0.5, {2.0}, 2.0); }) == ErrorKind::BadExponent);  // p0 = n / alpha
  CHECK(kind_of([] { ExponentProfile::make(1, 1, 1.0, 0.5, {2.0}, 2.0); }) == ErrorKind::BadExponent);  // alpha = m n
  CHECK(kind_of([] { conjugate(1.0); }) == ErrorKind::BadExponent);
  CHECK(kind_of([] { ExponentProfile::from_json({{"n", 1}, {"alpha", 0.5}}); }) == ErrorKind::BadExponent);
}

TEST_CASE("Lebesgue norms") {
  CHECK(lebesgue_norm(LeafField::constant({1, 2}, 1.0), 2.0) == 1.0);
  CHECK(close(lebesgue_norm(testing::indicator({1, 2}, {0}), 2.0), 0.5));
  CHECK(lebesgue_norm(LeafField::constant({1, 3}, 1.0), 2.0, LeafMeasure::atomic({1, 3}, {{0, 1.0}})) == 1.0);
}

TEST_CASE("Morrey norms on simple data") {
  const auto one = morrey_norm(LeafField::constant({2, 3}, 1.0), 2.0, 3.0);
  CHECK(close(one.value, 1.0));
  CHECK(one.witness == cube(0, {0, 0}));

  const auto spike = morrey_norm(testing::indicator({1, 3}, {0}), 2.0, 4.0);
  CHECK(close(spike.value, std::pow(2.0, -0.75)));
  CHECK(close(spike.value, 0.59460355750136051));
  CHECK(spike.witness == cube(3, {0}));

  const auto f = testing::random_field({2, 3}, 9);
  const auto same = morrey_norm(f, 2.5, 2.5);
  CHECK(close(same.value, lebesgue_norm(f, 2.5)));
  CHECK(same.witness == cube(0, {0, 0}));
  CHECK_THROWS_AS(morrey_norm(f, 3.0, 2.0), Error);
}

TEST_CASE("norms match exhaustive cube scans") {
  for (const int n : {1, 2}) {
    for (int depth = 0; depth <= 3; ++depth) {
      const RootSpec root{n, depth};
      for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto f = testing::random_field(root, seed, 0.25);
        const auto g = testing::random_field(root, seed + 100, 0.25);
        const auto mu = testing::random_measure(root, seed);
        CHECK(close(lebesgue_norm(f, 1.7), oracle::lebesgue(f, 1.7)));
        CHECK(close(morrey_norm(f, 1.5, 2.5).value, oracle::morrey(f, 1.5, 2.5)));
        const std::vector<LeafField> fs{f, g};
        const std::vector<double> p_vec{3.0, 4.0};
        CHECK(close(product_morrey_norm(fs, p_vec, 2.0).value, oracle::product_morrey(fs, p_vec, 2.0)));
        CHECK(close(radon_morrey_norm(g, 2.0, 3.0, mu).value, oracle::radon_morrey(g, 2.0, 3.0, mu)));
        CHECK(close(modified_morrey_norm(f, 2.0, 0.5 * n).value, oracle::modified_morrey(f, 2.0, 0.5 * n)));
      }
    }
  }
}

TEST_CASE("product Morrey special cases") {
  const RootSpec root{1, 3};
  const std::vector<LeafField> ones{LeafField::constant(root, 1.0), LeafField::constant(root, 1.0)};
  const std::vector<double> p2{2.0, 2.0};
  CHECK(close(product_morrey_norm(ones, p2, 1.5).value, 1.0));
  const auto f = testing::random_field(root, 31);
  const std::vector<LeafField> single{f};
  const std::vector<double> p1{1.8};
  CHECK(close(product_morrey_norm(single, p1, 2.6).value, morrey_norm(f, 1.8, 2.6).value));
}

TEST_CASE("Radon-Morrey and modified Morrey special cases") {
  const RootSpec root{1, 3};
  const auto one = LeafField::constant(root, 1.0);
  CHECK(close(radon_morrey_norm(one, 2.0, 2.0, LeafMeasure::atomic(root, {{3, 1.0}})).value, 1.0));
  CHECK(close(radon_morrey_norm(one, 2.0, 2.0, LeafMeasure::lebesgue(root)).value, 1.0));
  CHECK(close(modified_morrey_norm(one, 2.0, 0.5).value, 1.0));
  CHECK(modified_morrey_norm(LeafField::constant(root, 0.0), 2.0, 0.5).value == 0.0);
  CHECK_THROWS_AS(modified_morrey_norm(one, 2.0, 1.0), Error);
}

TEST_CASE("Morrey norms decrease in p and the modified norm dominates") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto f = testing::random_field({1, 4}, seed, 0.3);
    CHECK(morrey_norm(f, 1.5, 4.0).value <= morrey_norm(f, 3.0, 4.0).value * (1 + 1e-12));
    CHECK(morrey_norm(f, 2.0, 2.0).value <= modified_morrey_norm(f, 2.0, 0.5).value * (1 + 1e-12));
  }
}
