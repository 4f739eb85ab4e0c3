#include "dtl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "dtl/error.hpp"

namespace dtl {

WorkCaps work_caps() {
  WorkCaps caps;
  if (const char* env = std::getenv("DTL_WORK_CAP")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end != env && value > 0) {
      caps.leaf_cap = value;
      caps.kernel_evaluations = value;
    }
  }
  return caps;
}

std::string to_string(const CubeAddr& q) {
  std::ostringstream out;
  out << "(" << q.level << ";";
  for (std::size_t d = 0; d < q.index.size(); ++d) out << (d ? "," : "") << q.index[d];
  out << ")";
  return out.str();
}

Grid::Grid(RootSpec root) : root_(root) {
  if (root.dim < 1 || root.depth < 0) {
    throw Error(ErrorKind::InvalidRoot, "dim must be >= 1 and depth >= 0");
  }
  if (root.dim * root.depth > 60) {
    throw Error(ErrorKind::ComplexityRefusal, "leaf count exceeds 2^60");
  }
  const std::uint64_t leaves = level_size(root.depth);
  if (leaves > work_caps().leaf_cap) {
    throw Error(ErrorKind::ComplexityRefusal,
                "leaf count " + std::to_string(leaves) + " exceeds cap " + std::to_string(work_caps().leaf_cap));
  }
  offsets_.resize(static_cast<std::size_t>(root.depth) + 2);
  offsets_[0] = 0;
  for (int k = 0; k <= root.depth; ++k) {
    offsets_[static_cast<std::size_t>(k) + 1] = offsets_[static_cast<std::size_t>(k)] + level_size(k);
  }
}

double Grid::side(int level) const noexcept { return std::ldexp(1.0, -level); }

double Grid::volume(int level) const noexcept { return std::ldexp(1.0, -level * root_.dim); }

CubeId Grid::id(const CubeAddr& q) const {
  if (q.level < 0 || q.level > root_.depth || q.index.size() != static_cast<std::size_t>(root_.dim)) {
    throw Error(ErrorKind::OutOfRangeCube, "cube " + to_string(q) + " is not in the tree");
  }
  const std::uint64_t side_count = std::uint64_t{1} << q.level;
  std::uint64_t local = 0;
  for (const auto c : q.index) {
    if (c >= side_count) throw Error(ErrorKind::OutOfRangeCube, "cube " + to_string(q) + " is not in the tree");
    local = (local << q.level) | c;
  }
  return level_offset(q.level) + local;
}

int Grid::level_of(CubeId id) const noexcept {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), id);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

CubeAddr Grid::addr(CubeId id) const {
  CubeAddr q;
  q.level = level_of(id);
  q.index.resize(static_cast<std::size_t>(root_.dim));
  const std::uint64_t local = id - level_offset(q.level);
  const std::uint64_t mask = (std::uint64_t{1} << q.level) - 1;
  for (int d = 0; d < root_.dim; ++d) {
    q.index[static_cast<std::size_t>(d)] =
        static_cast<std::uint32_t>((local >> (q.level * (root_.dim - 1 - d))) & mask);
  }
  return q;
}

std::uint64_t Grid::relevel(std::uint64_t local, int from, int to) const noexcept {
  const std::uint64_t mask = (std::uint64_t{1} << from) - 1;
  const int shift = from - to;
  std::uint64_t out = 0;
  for (int d = 0; d < root_.dim; ++d) {
    const std::uint64_t comp = (local >> (from * (root_.dim - 1 - d))) & mask;
    out = (out << to) | (comp >> shift);
  }
  return out;
}

CubeId Grid::parent(CubeId id) const {
  const int k = level_of(id);
  if (k == 0) throw Error(ErrorKind::NoParent, "the root cube has no parent");
  return level_offset(k - 1) + relevel(id - level_offset(k), k, k - 1);
}

CubeId Grid::ancestor_at(CubeId id, int level) const noexcept {
  const int k = level_of(id);
  return level_offset(level) + relevel(id - level_offset(k), k, level);
}

bool Grid::contains(CubeId outer, CubeId inner) const noexcept {
  const int ko = level_of(outer);
  const int ki = level_of(inner);
  return ko <= ki && ancestor_at(inner, ko) == outer;
}

CubeId Grid::child(CubeId id, std::uint64_t ordinal) const noexcept {
  const int k = level_of(id);
  const std::uint64_t local = id - level_offset(k);
  const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
  std::uint64_t out = 0;
  for (int d = 0; d < root_.dim; ++d) {
    const std::uint64_t comp = k == 0 ? 0 : (local >> (k * (root_.dim - 1 - d))) & mask;
    const std::uint64_t bit = (ordinal >> (root_.dim - 1 - d)) & 1U;
    out = (out << (k + 1)) | ((comp << 1) | bit);
  }
  return level_offset(k + 1) + out;
}

std::vector<CubeId> Grid::children(CubeId id) const {
  if (level_of(id) == root_.depth) return {};
  std::vector<CubeId> out(children_per_cube());
  for (std::uint64_t c = 0; c < out.size(); ++c) out[c] = child(id, c);
  return out;
}

std::vector<double> Grid::center(CubeId id) const {
  const CubeAddr q = addr(id);
  std::vector<double> c(q.index.size());
  const double s = side(q.level);
  for (std::size_t d = 0; d < c.size(); ++d) c[d] = (q.index[d] + 0.5) * s;
  return c;
}

std::uint32_t Grid::leaf_component(std::uint64_t leaf, int d) const noexcept {
  const int L = root_.depth;
  const std::uint64_t mask = (std::uint64_t{1} << L) - 1;
  return static_cast<std::uint32_t>((leaf >> (L * (root_.dim - 1 - d))) & mask);
}

std::uint64_t Grid::leaf_from_components(const std::vector<std::uint32_t>& comps) const noexcept {
  std::uint64_t leaf = 0;
  for (const auto c : comps) leaf = (leaf << root_.depth) | c;
  return leaf;
}

std::vector<std::uint64_t> Grid::leaves_of(CubeId id) const {
  const CubeAddr q = addr(id);
  const int shift = root_.depth - q.level;
  const std::uint32_t span = std::uint32_t{1} << shift;
  const auto n = static_cast<std::size_t>(root_.dim);
  std::vector<std::uint32_t> lo(n), cur(n);
  for (std::size_t d = 0; d < n; ++d) lo[d] = cur[d] = q.index[d] << shift;

  std::vector<std::uint64_t> out;
  out.reserve(std::size_t{1} << (shift * root_.dim));
  while (true) {
    out.push_back(leaf_from_components(cur));
    std::size_t d = n;
    while (d > 0) {
      --d;
      if (++cur[d] < lo[d] + span) break;
      cur[d] = lo[d];
      if (d == 0) return out;
    }
  }
}

CubeAddr parent_of(const Grid& grid, const CubeAddr& q) { return grid.addr(grid.parent(grid.id(q))); }

std::vector<CubeAddr> children_of(const Grid& grid, const CubeAddr& q) {
  std::vector<CubeAddr> out;
  for (const CubeId c : grid.children(grid.id(q))) out.push_back(grid.addr(c));
  return out;
}

std::vector<CubeAddr> ancestors_of(const Grid& grid, const CubeAddr& q) {
  std::vector<CubeAddr> out;
  CubeId id = grid.id(q);
  while (grid.level_of(id) > 0) {
    id = grid.parent(id);
    out.push_back(grid.addr(id));
  }
  return out;
}

std::vector<CubeAddr> restriction(const Grid& grid, const std::vector<CubeAddr>& family, const CubeAddr& q) {
  const CubeId outer = grid.id(q);
  std::vector<CubeId> ids;
  for (const auto& member : family) {
    const CubeId id = grid.id(member);
    if (grid.contains(outer, id)) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<CubeAddr> out;
  for (const CubeId id : ids) out.push_back(grid.addr(id));
  return out;
}

}  // namespace dtl
