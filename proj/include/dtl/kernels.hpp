#pragma once

// Tree passes shared by every operator, norm and constant. The functions in
// dtl::kernels are OpenMP-parallel; dtl::kernels::reference holds serial
// formulations of the same passes. Both combine terms in the canonical tree
// order (children left to right, chains root first), so their outputs are
// bit-identical and tests compare them with ==.

#include <cstdint>
#include <span>
#include <vector>

#include "dtl/grid.hpp"

namespace dtl::kernels {

enum class Combine { sum, max };

/// Relative slack under which two scan values count as tied; ties go to the
/// smaller cube id (smallest level, then smallest index).
inline constexpr double kTieTolerance = 1e-13;

struct ScanMax {
  double value = 0.0;
  CubeId witness = 0;
};

/// l_k^exponent = 2^{-k * exponent} for k = 0..depth.
std::vector<double> level_powers(const Grid& grid, double exponent);

/// Cube sums of leaf masses, one entry per cube id.
std::vector<double> reduce_up(const Grid& grid, std::span<const double> leaf_masses);

/// acc[Q] = acc[parent(Q)] (+ or max) terms[Q]; returns the leaf slice.
std::vector<double> accumulate_down(const Grid& grid, std::span<const double> terms, Combine combine);

/// For every cube Q, the integral over Q of
///   x -> ( max over R with x in R, R inside Q, of l_R^{order-n} sums[R] )^power.
std::vector<double> localized_energy(const Grid& grid, std::span<const double> sums, double order, double power);

/// Serial argmax over cube ids with the tie rule above.
ScanMax scan_max(std::span<const double> values);

template <class F>
std::vector<double> map_cubes(const Grid& grid, F&& f) {
  std::vector<double> out(grid.cube_count());
  const auto count = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = f(static_cast<CubeId>(i));
  return out;
}

template <class F>
std::vector<double> map_leaves(const Grid& grid, F&& f) {
  std::vector<double> out(grid.leaf_count());
  const auto count = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = f(static_cast<std::uint64_t>(i));
  return out;
}

namespace reference {

std::vector<double> reduce_up(const Grid& grid, std::span<const double> leaf_masses);
std::vector<double> accumulate_down(const Grid& grid, std::span<const double> terms, Combine combine);
std::vector<double> localized_energy(const Grid& grid, std::span<const double> sums, double order, double power);

}  // namespace reference

}  // namespace dtl::kernels
