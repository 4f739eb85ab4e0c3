#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "dtl/field.hpp"
#include "dtl/grid.hpp"

namespace testing {

/// Relative closeness used for every floating comparison against an oracle.
inline bool close(double a, double b, double rel = 1e-12) {
  if (a == b) return true;
  return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

inline dtl::LeafField random_field(dtl::RootSpec root, std::uint64_t seed, double zero_fraction = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::uint64_t n = std::uint64_t{1} << (root.dim * root.depth);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng) < zero_fraction ? 0.0 : 0.05 + 3.0 * u(rng);
  return dtl::LeafField::ingest(root, std::move(v));
}

inline dtl::LeafMeasure random_measure(dtl::RootSpec root, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  if (seed % 2 == 0) return dtl::LeafMeasure::density(random_field(root, seed + 17));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::uint64_t n = std::uint64_t{1} << (root.dim * root.depth);
  std::vector<dtl::Atom> atoms;
  const int count = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < count; ++i) atoms.push_back({rng() % n, 0.2 + u(rng)});
  return dtl::LeafMeasure::atomic(root, std::move(atoms));
}

inline dtl::LeafField indicator(dtl::RootSpec root, std::vector<std::uint64_t> on) {
  const std::uint64_t n = std::uint64_t{1} << (root.dim * root.depth);
  std::vector<double> v(n, 0.0);
  for (const auto x : on) v[x] = 1.0;
  return dtl::LeafField::ingest(root, std::move(v));
}

/// Owning copy of leaf values; safe to iterate when the field is a temporary.
inline std::vector<double> vals(const dtl::LeafField& f) { return {f.values().begin(), f.values().end()}; }

inline dtl::CubeAddr cube(int level, std::vector<std::uint32_t> index) { return {level, std::move(index)}; }

}  // namespace testing
