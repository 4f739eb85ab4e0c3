#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace dtl {

/// Flat cube id: level-major, row-major over the index vector within a level.
/// Level k occupies ids [level_offset(k), level_offset(k) + 2^{nk}).
using CubeId = std::uint64_t;

struct WorkCaps {
  std::uint64_t leaf_cap = std::uint64_t{1} << 24;
  std::uint64_t kernel_evaluations = 100'000'000;
};

/// Defaults, or both caps replaced by the value of DTL_WORK_CAP when set.
WorkCaps work_caps();

/// The root cube [0,1)^dim refined `depth` times.
struct RootSpec {
  int dim = 1;
  int depth = 0;

  friend bool operator==(const RootSpec&, const RootSpec&) = default;
};

struct CubeAddr {
  int level = 0;
  std::vector<std::uint32_t> index;

  friend auto operator<=>(const CubeAddr&, const CubeAddr&) = default;
  friend bool operator==(const CubeAddr&, const CubeAddr&) = default;
};

std::string to_string(const CubeAddr& q);

/// Index arithmetic over the truncated dyadic tree of a RootSpec.
class Grid {
 public:
  explicit Grid(RootSpec root);

  const RootSpec& root() const noexcept { return root_; }
  int dim() const noexcept { return root_.dim; }
  int depth() const noexcept { return root_.depth; }

  std::uint64_t leaf_count() const noexcept { return level_size(root_.depth); }
  std::uint64_t cube_count() const noexcept { return offsets_.back(); }
  std::uint64_t level_size(int level) const noexcept {
    return std::uint64_t{1} << (static_cast<unsigned>(root_.dim) * static_cast<unsigned>(level));
  }
  std::uint64_t level_offset(int level) const noexcept { return offsets_[static_cast<std::size_t>(level)]; }
  std::uint64_t children_per_cube() const noexcept { return std::uint64_t{1} << root_.dim; }

  /// Side length 2^{-level} and volume 2^{-n level}; both exact.
  double side(int level) const noexcept;
  double volume(int level) const noexcept;
  double leaf_volume() const noexcept { return volume(root_.depth); }

  CubeId id(const CubeAddr& q) const;  // throws OutOfRangeCube
  CubeAddr addr(CubeId id) const;
  int level_of(CubeId id) const noexcept;
  std::uint64_t local_of(CubeId id) const noexcept { return id - level_offset(level_of(id)); }

  CubeId root_id() const noexcept { return 0; }
  CubeId leaf_id(std::uint64_t leaf) const noexcept { return level_offset(root_.depth) + leaf; }
  bool is_leaf(CubeId id) const noexcept { return id >= level_offset(root_.depth); }

  CubeId parent(CubeId id) const;  // throws NoParent at the root
  /// Children in canonical order (row-major over the offset bits).
  std::vector<CubeId> children(CubeId id) const;
  CubeId child(CubeId id, std::uint64_t ordinal) const noexcept;
  CubeId ancestor_at(CubeId id, int level) const noexcept;
  bool contains(CubeId outer, CubeId inner) const noexcept;

  std::vector<double> center(CubeId id) const;

  /// Leaf ids (canonical leaf order) covered by `id`, in row-major order.
  std::vector<std::uint64_t> leaves_of(CubeId id) const;
  /// Component index of a leaf along dimension d.
  std::uint32_t leaf_component(std::uint64_t leaf, int d) const noexcept;
  std::uint64_t leaf_from_components(const std::vector<std::uint32_t>& comps) const noexcept;

 private:
  std::uint64_t relevel(std::uint64_t local, int from, int to) const noexcept;

  RootSpec root_;
  std::vector<std::uint64_t> offsets_;
};

/// Navigation helpers; all returned sets are in canonical id order except
/// `ancestors`, which runs from the parent up to the root.
CubeAddr parent_of(const Grid& grid, const CubeAddr& q);
std::vector<CubeAddr> children_of(const Grid& grid, const CubeAddr& q);
std::vector<CubeAddr> ancestors_of(const Grid& grid, const CubeAddr& q);
std::vector<CubeAddr> restriction(const Grid& grid, const std::vector<CubeAddr>& family, const CubeAddr& q);

}  // namespace dtl
