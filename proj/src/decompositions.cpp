#include "dtl/decompositions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "dtl/error.hpp"
#include "dtl/operators.hpp"

namespace dtl {

namespace {

nlohmann::json addr_json(const Grid& grid, CubeId q) {
  const CubeAddr a = grid.addr(q);
  return {{"level", a.level}, {"index", a.index}};
}

nlohmann::json root_json(const RootSpec& root) { return {{"dim", root.dim}, {"depth", root.depth}}; }

nlohmann::json id_list(const Grid& grid, const std::vector<CubeId>& ids) {
  auto out = nlohmann::json::array();
  for (const CubeId q : ids) out.push_back(addr_json(grid, q));
  return out;
}

// Product of the averages of every field over q.
double product_average(const Grid& grid, std::span<const TreeAggregate> fields, CubeId q) {
  const double vol = grid.volume(grid.level_of(q));
  double x = 1.0;
  for (const auto& f : fields) x *= f.sum(q) / vol;
  return x;
}

}  // namespace

std::vector<CubeAddr> SparseFamily::addresses() const {
  const Grid grid(root);
  std::vector<CubeAddr> out;
  out.reserve(cubes.size());
  for (const CubeId q : cubes) out.push_back(grid.addr(q));
  return out;
}

nlohmann::json SparseFamily::to_json() const {
  const Grid grid(root);
  auto members = nlohmann::json::array();
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    nlohmann::json m = addr_json(grid, cubes[i]);
    m["parent"] = parent[i] ? addr_json(grid, cubes[*parent[i]]) : nlohmann::json(nullptr);
    m["e_leaves"] = e_leaves[i];
    m["e_volume"] = e_volume[i];
    members.push_back(std::move(m));
  }
  return {{"root", root_json(root)}, {"cubes", members}, {"carleson", carleson}, {"is_sparse", is_sparse}};
}

SparseFamily verify_sparse(RootSpec root, std::span<const CubeAddr> cubes) {
  const Grid grid(root);
  std::vector<CubeId> ids;
  ids.reserve(cubes.size());
  for (const auto& c : cubes) ids.push_back(grid.id(c));
  return verify_sparse(grid, ids);
}

SparseFamily verify_sparse(const Grid& grid, std::span<const CubeId> cubes) {
  SparseFamily fam;
  fam.root = grid.root();
  fam.cubes.assign(cubes.begin(), cubes.end());
  std::sort(fam.cubes.begin(), fam.cubes.end());
  fam.cubes.erase(std::unique(fam.cubes.begin(), fam.cubes.end()), fam.cubes.end());
  for (const CubeId q : fam.cubes) {
    if (q >= grid.cube_count()) throw Error(ErrorKind::OutOfRangeCube, "family cube outside the tree");
  }

  std::vector<std::int64_t> index_of(grid.cube_count(), -1);
  for (std::size_t i = 0; i < fam.cubes.size(); ++i) index_of[fam.cubes[i]] = static_cast<std::int64_t>(i);

  const std::size_t count = fam.cubes.size();
  fam.parent.assign(count, std::nullopt);
  for (std::size_t i = 0; i < count; ++i) {
    const CubeId s = fam.cubes[i];
    for (int k = grid.level_of(s) - 1; k >= 0; --k) {
      const std::int64_t j = index_of[grid.ancestor_at(s, k)];
      if (j >= 0) {
        fam.parent[i] = static_cast<std::size_t>(j);
        break;
      }
    }
  }

  // Each leaf belongs to the E set of the deepest member containing it.
  fam.e_leaves.assign(count, {});
  for (std::uint64_t leaf = 0; leaf < grid.leaf_count(); ++leaf) {
    const CubeId id = grid.leaf_id(leaf);
    for (int k = grid.depth(); k >= 0; --k) {
      const std::int64_t j = index_of[grid.ancestor_at(id, k)];
      if (j >= 0) {
        fam.e_leaves[static_cast<std::size_t>(j)].push_back(leaf);
        break;
      }
    }
  }

  fam.e_volume.resize(count);
  std::vector<double> below(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const int level = grid.level_of(fam.cubes[i]);
    const auto e_count = static_cast<std::uint64_t>(fam.e_leaves[i].size());
    fam.e_volume[i] = static_cast<double>(e_count) * grid.leaf_volume();
    const std::uint64_t cells = std::uint64_t{1} << (static_cast<unsigned>(grid.dim()) * (grid.depth() - level));
    if (2 * e_count < cells) fam.is_sparse = false;
    const double vol = grid.volume(level);
    for (std::optional<std::size_t> j = i; j; j = fam.parent[*j]) below[*j] += vol;
  }
  for (std::size_t i = 0; i < count; ++i) {
    fam.carleson = std::max(fam.carleson, below[i] / grid.volume(grid.level_of(fam.cubes[i])));
  }
  return fam;
}

SparseFamily build_sparse_family(std::span<const TreeAggregate> fields, const CubeAddr& q0) {
  if (fields.empty()) throw Error(ErrorKind::ShapeMismatch, "at least one input is required");
  for (const auto& f : fields) require_same_root(fields[0].root(), f.root());
  const Grid& grid = fields[0].grid();
  const double fan = std::ldexp(1.0, static_cast<int>(fields.size()));

  std::vector<CubeId> members;
  std::function<void(CubeId)> grow = [&](CubeId s) {
    members.push_back(s);
    const double threshold = fan * product_average(grid, fields, s);
    std::function<void(CubeId)> search = [&](CubeId r) {
      if (product_average(grid, fields, r) > threshold) {
        grow(r);
      } else if (!grid.is_leaf(r)) {
        for (const CubeId c : grid.children(r)) search(c);
      }
    };
    if (!grid.is_leaf(s)) {
      for (const CubeId c : grid.children(s)) search(c);
    }
  };
  grow(grid.id(q0));
  return verify_sparse(grid, members);
}

SparseDomination sparse_dominate(std::span<const TreeAggregate> fields, double alpha) {
  if (fields.empty()) throw Error(ErrorKind::ShapeMismatch, "at least one input is required");
  const Grid& grid = fields[0].grid();
  SparseDomination out;
  out.family = build_sparse_family(fields, CubeAddr{0, std::vector<std::uint32_t>(static_cast<std::size_t>(grid.dim()), 0)});
  const auto k = KernelWeight::canonical(alpha, static_cast<int>(fields.size()), grid.dim());
  const auto full = dyadic_integral_operator(fields, k);
  const auto family = out.family.addresses();
  const auto sparse = sparse_integral_operator(fields, k, family);
  for (std::uint64_t x = 0; x < grid.leaf_count(); ++x) {
    double r = 0.0;
    if (full[x] > 0.0) r = sparse[x] > 0.0 ? full[x] / sparse[x] : HUGE_VAL;
    if (r > out.constant) {
      out.constant = r;
      out.witness_leaf = x;
    }
  }
  return out;
}

std::size_t CoronaForest::member(CubeId q) const {
  if (q >= index_of.size() || index_of[q] < 0) throw Error(ErrorKind::NotAPrincipalCube, "cube is not in the forest");
  return static_cast<std::size_t>(index_of[q]);
}

nlohmann::json CoronaForest::to_json() const {
  const Grid grid(root);
  auto members = nlohmann::json::array();
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    nlohmann::json m = addr_json(grid, cubes[i]);
    m["generation"] = generation[i];
    m["parent"] = parent[i] ? addr_json(grid, cubes[*parent[i]]) : nlohmann::json(nullptr);
    m["e_leaves"] = e_leaves[i];
    m["mass"] = mass[i];
    m["e_mass"] = e_mass[i];
    m["average"] = average[i];
    members.push_back(std::move(m));
  }
  return {{"root", root_json(root)}, {"top", addr_json(grid, top)}, {"measure", uses_measure ? "mu" : "dx"},
          {"cubes", members}};
}

double pair_average(const Grid& grid, const TreeAggregate& h_nu, const TreeAggregate& nu, CubeId q) {
  (void)grid;
  const double mass = nu.sum(q);
  return mass > 0.0 ? h_nu.sum(q) / mass : 0.0;
}

CoronaForest build_principal_cubes(const LeafField& h, const std::optional<LeafMeasure>& mu, const CubeAddr& q0) {
  const Grid grid(h.root());
  if (mu) require_same_root(h.root(), mu->root());
  const auto nu_mass = mu ? mu->leaf_masses() : LeafMeasure::lebesgue(h.root()).leaf_masses();
  std::vector<double> weighted(nu_mass.size());
  for (std::size_t i = 0; i < weighted.size(); ++i) weighted[i] = h[i] * nu_mass[i];
  const auto source = mu ? TreeAggregate::Source::measure : TreeAggregate::Source::field;
  const auto nu = TreeAggregate::from_leaf_masses(h.root(), nu_mass, TreeAggregate::Source::measure);
  const auto h_nu = TreeAggregate::from_leaf_masses(h.root(), weighted, source);

  CoronaForest forest;
  forest.root = h.root();
  forest.top = grid.id(q0);
  forest.uses_measure = mu.has_value();
  forest.index_of.assign(grid.cube_count(), -1);
  if (!(nu.sum(forest.top) > 0.0)) throw Error(ErrorKind::ZeroMeasure, "the pair's measure vanishes on the top cube");

  auto add = [&](CubeId q, int gen, std::optional<std::size_t> parent) {
    forest.index_of[q] = static_cast<std::int64_t>(forest.cubes.size());
    forest.cubes.push_back(q);
    forest.generation.push_back(gen);
    forest.parent.push_back(parent);
    forest.children.emplace_back();
    forest.mass.push_back(nu.sum(q));
    forest.average.push_back(pair_average(grid, h_nu, nu, q));
  };

  add(forest.top, 0, std::nullopt);
  std::vector<std::size_t> current{0};
  for (int gen = 0; !current.empty(); ++gen) {
    std::vector<std::pair<CubeId, std::size_t>> found;
    for (const std::size_t f : current) {
      const CubeId top = forest.cubes[f];
      const double threshold = 2.0 * forest.average[f];
      std::function<void(CubeId)> search = [&](CubeId r) {
        if (nu.sum(r) > 0.0 && pair_average(grid, h_nu, nu, r) > threshold) {
          found.emplace_back(r, f);
        } else if (!grid.is_leaf(r)) {
          for (const CubeId c : grid.children(r)) search(c);
        }
      };
      if (!grid.is_leaf(top)) {
        for (const CubeId c : grid.children(top)) search(c);
      }
    }
    std::sort(found.begin(), found.end());
    std::vector<std::size_t> next;
    for (const auto& [q, f] : found) {
      forest.children[f].push_back(forest.cubes.size());
      next.push_back(forest.cubes.size());
      add(q, gen + 1, f);
    }
    current = std::move(next);
  }

  const std::size_t count = forest.cubes.size();
  forest.e_leaves.assign(count, {});
  forest.e_mass.assign(count, 0.0);
  for (const std::uint64_t leaf : grid.leaves_of(forest.top)) {
    const CubeId id = grid.leaf_id(leaf);
    for (int k = grid.depth(); k >= 0; --k) {
      const std::int64_t j = forest.index_of[grid.ancestor_at(id, k)];
      if (j >= 0) {
        forest.e_leaves[static_cast<std::size_t>(j)].push_back(leaf);
        forest.e_mass[static_cast<std::size_t>(j)] += nu_mass[leaf];
        break;
      }
    }
  }
  return forest;
}

CubeId stopping_parent(const Grid& grid, const CoronaForest& forest, CubeId q) {
  if (q >= grid.cube_count() || !grid.contains(forest.top, q)) {
    throw Error(ErrorKind::OutsideRoot, "cube lies outside the forest's top cube");
  }
  for (int k = grid.level_of(q); k >= 0; --k) {
    const CubeId a = grid.ancestor_at(q, k);
    if (forest.index_of[a] >= 0) return a;
  }
  return forest.top;  // unreachable: the top cube is a member
}

CubeAddr stopping_parent(const CoronaForest& forest, const CubeAddr& q) {
  const Grid grid(forest.root);
  return grid.addr(stopping_parent(grid, forest, grid.id(q)));
}

nlohmann::json ChildClassification::to_json(const Grid& grid) const {
  auto pairs = nlohmann::json::array();
  for (const auto& [child, q] : witnesses) pairs.push_back({{"child", addr_json(grid, child)}, {"witness", addr_json(grid, q)}});
  return {{"g", addr_json(grid, g)},
          {"ch1", id_list(grid, ch1)},
          {"ch2", id_list(grid, ch2)},
          {"ch3", id_list(grid, ch3)},
          {"remainder", id_list(grid, remainder)},
          {"witnesses", pairs}};
}

ChildClassification classify_children(const CoronaForest& g_forest, const CoronaForest& f_forest, const CubeAddr& g) {
  require_same_root(g_forest.root, f_forest.root);
  if (g_forest.top != f_forest.top) throw Error(ErrorKind::RootMismatch, "forests have different top cubes");
  const Grid grid(g_forest.root);
  ChildClassification cls;
  cls.g = grid.id(g);
  const std::size_t gi = g_forest.member(cls.g);

  for (const std::size_t ci : g_forest.children[gi]) {
    const CubeId child = g_forest.cubes[ci];
    std::optional<CubeId> witness;
    for (int k = grid.level_of(child) - 1; k >= grid.level_of(cls.g); --k) {
      const CubeId q = grid.ancestor_at(child, k);
      if (stopping_parent(grid, g_forest, q) == cls.g) {
        witness = q;
        break;
      }
    }
    if (!witness) {
      cls.remainder.push_back(child);
      continue;
    }
    cls.witnesses.emplace_back(child, *witness);
    const CubeId pf = stopping_parent(grid, f_forest, child);
    const CubeId pg = stopping_parent(grid, g_forest, pf);
    if (pg == child) {
      cls.ch1.push_back(child);
    } else if (pg == cls.g) {
      cls.ch2.push_back(child);
    } else if (pf != cls.g && grid.contains(pf, cls.g)) {
      cls.ch3.push_back(child);
    } else {
      cls.remainder.push_back(child);
    }
  }
  return cls;
}

LeafField corona_projection(const LeafField& f, const CoronaForest& g_forest, const ChildClassification& cls) {
  require_same_root(f.root(), g_forest.root);
  const Grid grid(f.root());
  const std::size_t gi = g_forest.member(cls.g);
  const auto agg = TreeAggregate::of(f);
  std::vector<double> out(grid.leaf_count(), 0.0);
  for (const std::uint64_t leaf : g_forest.e_leaves[gi]) out[leaf] = f[leaf];
  for (const auto* list : {&cls.ch1, &cls.ch2, &cls.ch3}) {
    for (const CubeId c : *list) {
      const double avg = agg.sum(c) / grid.volume(grid.level_of(c));
      for (const std::uint64_t leaf : grid.leaves_of(c)) out[leaf] = avg;
    }
  }
  return LeafField::ingest(f.root(), std::move(out));
}

double descendant_volume(const Grid& grid, const CoronaForest& forest, std::size_t member) {
  double total = grid.volume(grid.level_of(forest.cubes[member]));
  for (const std::size_t c : forest.children[member]) total += descendant_volume(grid, forest, c);
  return total;
}

}  // namespace dtl
