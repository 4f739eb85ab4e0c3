#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dtl/field.hpp"
#include "dtl/grid.hpp"

namespace dtl {

/// Every cube integral of one function (f dx) or one measure, for all cubes
/// of levels 0..L. Built bottom-up; parent entries are the left-to-right sum
/// of their children.
class TreeAggregate {
 public:
  enum class Source { field, measure };

  static TreeAggregate of(const LeafField& f);
  static TreeAggregate of(const LeafMeasure& mu);
  static TreeAggregate from_leaf_masses(RootSpec root, std::span<const double> masses, Source source);

  const Grid& grid() const noexcept { return grid_; }
  const RootSpec& root() const noexcept { return grid_.root(); }
  Source source() const noexcept { return source_; }

  std::span<const double> sums() const noexcept { return sums_; }
  double sum(CubeId q) const noexcept { return sums_[q]; }
  double total() const noexcept { return sums_[0]; }
  /// Per-leaf masses (the bottom level of the table).
  std::span<const double> leaf_masses() const noexcept;

 private:
  TreeAggregate(Grid grid, std::vector<double> sums, Source source)
      : grid_(std::move(grid)), sums_(std::move(sums)), source_(source) {}

  Grid grid_;
  std::vector<double> sums_;
  Source source_;
};

struct CubeStats {
  double sum = 0.0;
  double average = 0.0;
  /// Present when the aggregate was built from a measure.
  std::optional<double> mass;
};

CubeStats cube_stats(const TreeAggregate& agg, const CubeAddr& q);

/// Integral of f over 3Q clipped to the root cube, by a leaf loop over the
/// clipped index box in row-major order.
double enlarged_sum(const LeafField& f, const CubeAddr& q, int factor = 3);

}  // namespace dtl
