#include "dtl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace dtl::kernels {

namespace {

double combine_pair(Combine combine, double acc, double term) {
  return combine == Combine::sum ? acc + term : std::max(acc, term);
}

double pow_nonneg(double v, double power) { return v == 0.0 ? 0.0 : std::pow(v, power); }

// Subtree energy below R given the running max over the chain above it.
double subtree_energy(const Grid& grid, std::span<const double> sums, const std::vector<double>& factor,
                      double power, CubeId r, double running) {
  const int k = grid.level_of(r);
  const double v = std::max(running, factor[static_cast<std::size_t>(k)] * sums[r]);
  if (k == grid.depth()) return pow_nonneg(v, power) * grid.leaf_volume();
  double s = 0.0;
  for (std::uint64_t c = 0; c < grid.children_per_cube(); ++c) {
    s += subtree_energy(grid, sums, factor, power, grid.child(r, c), v);
  }
  return s;
}

}  // namespace

std::vector<double> level_powers(const Grid& grid, double exponent) {
  std::vector<double> out(static_cast<std::size_t>(grid.depth()) + 1);
  for (int k = 0; k <= grid.depth(); ++k) out[static_cast<std::size_t>(k)] = std::exp2(-k * exponent);
  return out;
}

std::vector<double> reduce_up(const Grid& grid, std::span<const double> leaf_masses) {
  std::vector<double> sums(grid.cube_count(), 0.0);
  std::copy(leaf_masses.begin(), leaf_masses.end(),
            sums.begin() + static_cast<std::ptrdiff_t>(grid.level_offset(grid.depth())));
  const std::uint64_t fan = grid.children_per_cube();
  for (int k = grid.depth() - 1; k >= 0; --k) {
    const auto first = static_cast<std::int64_t>(grid.level_offset(k));
    const auto last = first + static_cast<std::int64_t>(grid.level_size(k));
#pragma omp parallel for schedule(static)
    for (std::int64_t id = first; id < last; ++id) {
      double s = 0.0;
      for (std::uint64_t c = 0; c < fan; ++c) s += sums[grid.child(static_cast<CubeId>(id), c)];
      sums[static_cast<std::size_t>(id)] = s;
    }
  }
  return sums;
}

std::vector<double> accumulate_down(const Grid& grid, std::span<const double> terms, Combine combine) {
  std::vector<double> acc(grid.cube_count());
  acc[0] = terms[0];
  for (int k = 1; k <= grid.depth(); ++k) {
    const auto first = static_cast<std::int64_t>(grid.level_offset(k));
    const auto last = first + static_cast<std::int64_t>(grid.level_size(k));
#pragma omp parallel for schedule(static)
    for (std::int64_t id = first; id < last; ++id) {
      const auto q = static_cast<CubeId>(id);
      acc[q] = combine_pair(combine, acc[grid.ancestor_at(q, k - 1)], terms[q]);
    }
  }
  const auto leaf0 = static_cast<std::ptrdiff_t>(grid.level_offset(grid.depth()));
  return {acc.begin() + leaf0, acc.end()};
}

std::vector<double> localized_energy(const Grid& grid, std::span<const double> sums, double order, double power) {
  const std::vector<double> factor = level_powers(grid, order - grid.dim());
  std::vector<double> out(grid.cube_count());
  const auto count = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t id = 0; id < count; ++id) {
    out[static_cast<std::size_t>(id)] = subtree_energy(grid, sums, factor, power, static_cast<CubeId>(id), 0.0);
  }
  return out;
}

ScanMax scan_max(std::span<const double> values) {
  ScanMax best;
  bool seen = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!seen || v > best.value + kTieTolerance * best.value) {
      best = {v, static_cast<CubeId>(i)};
      seen = true;
    }
  }
  return best;
}

namespace reference {

std::vector<double> reduce_up(const Grid& grid, std::span<const double> leaf_masses) {
  std::vector<double> sums(grid.cube_count(), 0.0);
  std::function<double(CubeId)> visit = [&](CubeId q) -> double {
    double s;
    if (grid.is_leaf(q)) {
      s = leaf_masses[q - grid.level_offset(grid.depth())];
    } else {
      s = 0.0;
      for (const CubeId c : grid.children(q)) s += visit(c);
    }
    sums[q] = s;
    return s;
  };
  visit(grid.root_id());
  return sums;
}

std::vector<double> accumulate_down(const Grid& grid, std::span<const double> terms, Combine combine) {
  std::vector<double> out(grid.leaf_count());
  for (std::uint64_t leaf = 0; leaf < out.size(); ++leaf) {
    const CubeId id = grid.leaf_id(leaf);
    double acc = terms[grid.ancestor_at(id, 0)];
    for (int k = 1; k <= grid.depth(); ++k) acc = combine_pair(combine, acc, terms[grid.ancestor_at(id, k)]);
    out[leaf] = acc;
  }
  return out;
}

std::vector<double> localized_energy(const Grid& grid, std::span<const double> sums, double order, double power) {
  const std::vector<double> factor = level_powers(grid, order - grid.dim());
  std::vector<double> out(grid.cube_count());
  std::vector<double> contribution(grid.leaf_count());
  for (CubeId q = 0; q < grid.cube_count(); ++q) {
    const int kq = grid.level_of(q);
    // Per-leaf maximal value, found by walking each leaf's chain up to Q.
    for (const std::uint64_t leaf : grid.leaves_of(q)) {
      const CubeId id = grid.leaf_id(leaf);
      double v = 0.0;
      for (int k = kq; k <= grid.depth(); ++k) {
        v = std::max(v, factor[static_cast<std::size_t>(k)] * sums[grid.ancestor_at(id, k)]);
      }
      contribution[leaf] = pow_nonneg(v, power) * grid.leaf_volume();
    }
    std::function<double(CubeId)> tree_sum = [&](CubeId r) -> double {
      if (grid.is_leaf(r)) return contribution[r - grid.level_offset(grid.depth())];
      double s = 0.0;
      for (const CubeId c : grid.children(r)) s += tree_sum(c);
      return s;
    };
    out[q] = tree_sum(q);
  }
  return out;
}

}  // namespace reference

}  // namespace dtl::kernels
