#include "dtl/aggregate.hpp"

#include <algorithm>

#include "dtl/error.hpp"
#include "dtl/kernels.hpp"

namespace dtl {

TreeAggregate TreeAggregate::from_leaf_masses(RootSpec root, std::span<const double> masses, Source source) {
  Grid grid(root);
  if (masses.size() != grid.leaf_count()) throw Error(ErrorKind::ShapeMismatch, "leaf mass count mismatch");
  auto sums = kernels::reduce_up(grid, masses);
  return TreeAggregate(std::move(grid), std::move(sums), source);
}

TreeAggregate TreeAggregate::of(const LeafField& f) {
  const auto masses = f.leaf_masses();
  return from_leaf_masses(f.root(), masses, Source::field);
}

TreeAggregate TreeAggregate::of(const LeafMeasure& mu) {
  const auto masses = mu.leaf_masses();
  return from_leaf_masses(mu.root(), masses, Source::measure);
}

std::span<const double> TreeAggregate::leaf_masses() const noexcept {
  return std::span<const double>(sums_).subspan(grid_.level_offset(grid_.depth()));
}

CubeStats cube_stats(const TreeAggregate& agg, const CubeAddr& q) {
  const CubeId id = agg.grid().id(q);
  CubeStats stats;
  stats.sum = agg.sum(id);
  stats.average = stats.sum / agg.grid().volume(q.level);
  if (agg.source() == TreeAggregate::Source::measure) stats.mass = stats.sum;
  return stats;
}

double enlarged_sum(const LeafField& f, const CubeAddr& q, int factor) {
  const Grid grid(f.root());
  grid.id(q);  // validates
  if (factor < 1 || factor % 2 == 0) throw Error(ErrorKind::BadExponent, "enlargement factor must be odd and positive");
  const int shift = grid.depth() - q.level;
  const std::int64_t span = std::int64_t{1} << shift;
  const std::int64_t limit = std::int64_t{1} << grid.depth();
  const std::int64_t reach = span * (factor - 1) / 2;
  const auto n = static_cast<std::size_t>(grid.dim());

  std::vector<std::int64_t> lo(n), hi(n);
  for (std::size_t d = 0; d < n; ++d) {
    const std::int64_t start = static_cast<std::int64_t>(q.index[d]) * span;
    lo[d] = std::max<std::int64_t>(0, start - reach);
    hi[d] = std::min<std::int64_t>(limit, start + span + reach);
  }

  const double vol = grid.leaf_volume();
  std::vector<std::int64_t> cur = lo;
  std::vector<std::uint32_t> comps(n);
  double s = 0.0;
  while (true) {
    for (std::size_t d = 0; d < n; ++d) comps[d] = static_cast<std::uint32_t>(cur[d]);
    s += f[grid.leaf_from_components(comps)] * vol;
    std::size_t d = n;
    while (d > 0) {
      --d;
      if (++cur[d] < hi[d]) break;
      cur[d] = lo[d];
      if (d == 0) return s;
    }
  }
}

}  // namespace dtl
