#include "dtl/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtl/error.hpp"
#include "dtl/kernels.hpp"

namespace dtl {

namespace {

double pow0(double x, double e) { return x == 0.0 ? 0.0 : std::pow(x, e); }

nlohmann::json addr_json(const CubeAddr& a) { return {{"level", a.level}, {"index", a.index}}; }

ConstantReport scan_report(const std::string& name, const Grid& grid, std::span<const double> values) {
  const auto best = scan_cubes(grid, values);
  ConstantReport rep;
  rep.name = name;
  rep.value = best.value;
  rep.witnesses = {best.witness};
  return rep;
}

// T[S] = sum of weight over the subtree of S; own weight first, then the
// children left to right.
std::vector<double> subtree_totals(const Grid& grid, std::span<const double> weight) {
  std::vector<double> t(weight.begin(), weight.end());
  for (int k = grid.depth() - 1; k >= 0; --k) {
    const CubeId first = grid.level_offset(k);
    for (CubeId s = first; s < first + grid.level_size(k); ++s) {
      double below = 0.0;
      for (std::uint64_t c = 0; c < grid.children_per_cube(); ++c) below += t[grid.child(s, c)];
      t[s] = weight[s] + below;
    }
  }
  return t;
}

struct SparseSumTables {
  std::vector<double> term;  // (|S|^{-1/p} T[S])^{p'}
  double p_conj = 2.0;
};

SparseSumTables sparse_sum_tables(const Grid& grid, std::span<const double> weight, double p) {
  SparseSumTables tab;
  tab.p_conj = conjugate(p);
  const auto t = subtree_totals(grid, weight);
  const auto shrink = kernels::level_powers(grid, -grid.dim() / p);  // |S|^{-1/p}
  tab.term.resize(t.size());
  for (CubeId s = 0; s < t.size(); ++s) {
    tab.term[s] = pow0(shrink[static_cast<std::size_t>(grid.level_of(s))] * t[s], tab.p_conj);
  }
  return tab;
}

std::vector<CubeId> subtree_of(const Grid& grid, CubeId q) {
  std::vector<CubeId> out;
  for (int k = grid.level_of(q); k <= grid.depth(); ++k) {
    const CubeId first = grid.level_offset(k);
    for (CubeId c = first; c < first + grid.level_size(k); ++c) {
      if (grid.contains(q, c)) out.push_back(c);
    }
  }
  return out;
}

double family_sum(const SparseSumTables& tab, const std::vector<CubeId>& family) {
  double s = 0.0;
  for (const CubeId c : family) s += tab.term[c];
  return pow0(s, 1.0 / tab.p_conj);
}

std::vector<CubeId> greedy_family(const Grid& grid, const SparseSumTables& tab, CubeId q) {
  auto candidates = subtree_of(grid, q);
  candidates.erase(std::remove_if(candidates.begin(), candidates.end(), [&](CubeId c) { return !(tab.term[c] > 0.0); }),
                   candidates.end());
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](CubeId a, CubeId b) { return tab.term[a] > tab.term[b]; });
  std::vector<CubeId> family;
  for (const CubeId c : candidates) {
    family.push_back(c);
    if (!verify_sparse(grid, family).is_sparse) family.pop_back();
  }
  std::sort(family.begin(), family.end());
  return family;
}

std::vector<CubeId> exhaustive_family(const Grid& grid, const SparseSumTables& tab, CubeId q) {
  const auto cubes = subtree_of(grid, q);
  if (cubes.size() > kExhaustiveCubeLimit) {
    throw Error(ErrorKind::ComplexityRefusal,
                "exhaustive enumeration needs a subtree of at most " + std::to_string(kExhaustiveCubeLimit) + " cubes");
  }
  const std::size_t s = cubes.size();
  // chains[leaf] lists local cube indices from q down to the leaf.
  std::vector<std::vector<std::size_t>> chains;
  std::vector<std::uint64_t> cells(s);
  for (std::size_t i = 0; i < s; ++i) {
    cells[i] = std::uint64_t{1} << (static_cast<unsigned>(grid.dim()) * (grid.depth() - grid.level_of(cubes[i])));
  }
  for (std::size_t i = 0; i < s; ++i) {
    if (!grid.is_leaf(cubes[i])) continue;
    std::vector<std::size_t> chain;
    for (std::size_t j = 0; j < s; ++j) {
      if (grid.contains(cubes[j], cubes[i])) chain.push_back(j);
    }
    std::sort(chain.begin(), chain.end(),
              [&](std::size_t a, std::size_t b) { return grid.level_of(cubes[a]) < grid.level_of(cubes[b]); });
    chains.push_back(std::move(chain));
  }

  std::uint32_t best_mask = 0;
  double best = 0.0;
  std::vector<std::uint64_t> owned(s);
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << s); ++mask) {
    std::fill(owned.begin(), owned.end(), 0);
    for (const auto& chain : chains) {
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        if (mask & (std::uint32_t{1} << *it)) {
          ++owned[*it];
          break;
        }
      }
    }
    bool sparse = true;
    double sum = 0.0;
    for (std::size_t j = 0; j < s && sparse; ++j) {
      if (!(mask & (std::uint32_t{1} << j))) continue;
      sparse = 2 * owned[j] >= cells[j];
      sum += tab.term[cubes[j]];
    }
    if (sparse && sum > best) {
      best = sum;
      best_mask = mask;
    }
  }
  std::vector<CubeId> family;
  for (std::size_t j = 0; j < s; ++j) {
    if (best_mask & (std::uint32_t{1} << j)) family.push_back(cubes[j]);
  }
  return family;
}

std::vector<CubeId> choose_family(const Grid& grid, const SparseSumTables& tab, CubeId q, CqMode mode,
                                  const std::vector<CubeId>& given) {
  switch (mode) {
    case CqMode::given: {
      std::vector<CubeId> inside;
      for (const CubeId c : given) {
        if (grid.contains(q, c)) inside.push_back(c);
      }
      std::sort(inside.begin(), inside.end());
      inside.erase(std::unique(inside.begin(), inside.end()), inside.end());
      return inside;
    }
    case CqMode::greedy:
      return greedy_family(grid, tab, q);
    case CqMode::exhaustive:
      return exhaustive_family(grid, tab, q);
    case CqMode::bound:
      break;
  }
  throw Error(ErrorKind::BadKind, "bound mode has no family");
}

std::vector<double> cq_weights(const TreeAggregate& mu, const KernelWeight& k) {
  const Grid& grid = mu.grid();
  const auto kw = k.per_level(grid);
  const auto vol_m = kernels::level_powers(grid, static_cast<double>(grid.dim()) * k.m());
  std::vector<double> w(grid.cube_count());
  for (CubeId c = 0; c < w.size(); ++c) {
    const auto level = static_cast<std::size_t>(grid.level_of(c));
    w[c] = kw[level] * vol_m[level] * mu.sum(c);
  }
  return w;
}

double bound_multiplier(double alpha, double p) { return std::pow(2.0, 1.0 / conjugate(p)) / (1.0 - std::exp2(-alpha)); }

void require_canonical(const KernelWeight& k) {
  if (!k.is_canonical()) throw Error(ErrorKind::BadExponent, "bound mode needs the canonical kernel");
  if (!(k.alpha() > 0.0)) throw Error(ErrorKind::BadExponent, "bound mode needs alpha > 0");
}

}  // namespace

nlohmann::json ConstantReport::to_json() const {
  auto wit = nlohmann::json::array();
  for (const auto& w : witnesses) wit.push_back(addr_json(w));
  return {{"name", name},
          {"value", value},
          {"witnesses", wit},
          {"mode", mode},
          {"profile", profile},
          {"bound_constant", bound_constant ? nlohmann::json(*bound_constant) : nlohmann::json(nullptr)}};
}

ConstantReport adams_constant(const TreeAggregate& mu, double beta) {
  const Grid& grid = mu.grid();
  if (!(beta > 0.0 && beta <= grid.dim())) throw Error(ErrorKind::BadExponent, "beta must lie in (0, n]");
  const auto inv_side = kernels::level_powers(grid, -beta);
  const auto values =
      kernels::map_cubes(grid, [&](CubeId q) { return mu.sum(q) * inv_side[static_cast<std::size_t>(grid.level_of(q))]; });
  auto rep = scan_report("adams", grid, values);
  rep.profile = {{"beta", beta}};
  return rep;
}

ConstantReport ks_testing_constant(const TreeAggregate& mu, double beta, double p, Exec exec) {
  const Grid& grid = mu.grid();
  if (!(beta > 0.0 && beta < grid.dim())) throw Error(ErrorKind::BadExponent, "beta must lie in (0, n)");
  const double pc = conjugate(p);
  const auto energy = exec == Exec::parallel ? kernels::localized_energy(grid, mu.sums(), beta, pc)
                                             : kernels::reference::localized_energy(grid, mu.sums(), beta, pc);
  const auto values = kernels::map_cubes(grid, [&](CubeId q) {
    const double mass = mu.sum(q);
    return mass > 0.0 ? pow0(energy[q] / mass, 1.0 / pc) : 0.0;
  });
  auto rep = scan_report("ks-testing", grid, values);
  rep.profile = {{"beta", beta}, {"p", p}};
  return rep;
}

A0Form parse_a0_form(const std::string& name) {
  if (name == "weight-a") return A0Form::weight_a;
  if (name == "bump-b") return A0Form::bump_b;
  if (name == "sparse-a") return A0Form::sparse_a;
  if (name == "sparse-b") return A0Form::sparse_b;
  throw Error(ErrorKind::BadKind, "unknown A0 form '" + name + "'");
}

std::string to_string(A0Form form) {
  switch (form) {
    case A0Form::weight_a:
      return "weight-a";
    case A0Form::bump_b:
      return "bump-b";
    case A0Form::sparse_a:
      return "sparse-a";
    case A0Form::sparse_b:
      return "sparse-b";
  }
  return "?";
}

ConstantReport a0_constant(const LeafMeasure& mu, const ExponentProfile& profile, A0Form form,
                           const std::optional<KernelWeight>& k, std::optional<double> r) {
  const Grid grid(mu.root());
  if (profile.n != grid.dim()) throw Error(ErrorKind::BadExponent, "profile dimension differs from the grid");
  const bool bump = form == A0Form::bump_b || form == A0Form::sparse_b;
  const bool sparse = form == A0Form::sparse_a || form == A0Form::sparse_b;
  if (!r) r = profile.r;
  double exponent = 1.0 / profile.p;
  std::optional<TreeAggregate> agg;
  if (bump) {
    if (!r || !(*r > 1.0)) throw Error(ErrorKind::BadExponent, "bump forms need r > 1");
    agg = TreeAggregate::of(mu.power(*r));
    exponent /= *r;
  } else {
    agg = TreeAggregate::of(mu);
  }

  std::vector<double> scale(static_cast<std::size_t>(grid.depth()) + 1);
  if (sparse) {
    const KernelWeight kw = k ? *k : KernelWeight::canonical(profile.alpha, profile.m, profile.n);
    const auto per_level = kw.per_level(grid);
    const auto vol_m = kernels::level_powers(grid, static_cast<double>(grid.dim()) * kw.m());
    for (std::size_t i = 0; i < scale.size(); ++i) scale[i] = per_level[i] * vol_m[i];
  } else {
    scale = kernels::level_powers(grid, profile.beta);
  }
  const auto inv_vol = kernels::level_powers(grid, -static_cast<double>(grid.dim()));
  const auto values = kernels::map_cubes(grid, [&](CubeId q) {
    const auto level = static_cast<std::size_t>(grid.level_of(q));
    return scale[level] * pow0(agg->sum(q) * inv_vol[level], exponent);
  });
  auto rep = scan_report("a0:" + to_string(form), grid, values);
  rep.profile = profile.to_json();
  if (bump) rep.profile["r"] = *r;
  return rep;
}

ConstantReport embedding_constant(std::span<const LeafMeasure> sigmas, const KernelWeight& k,
                                  std::span<const double> p_vec, const SparseFamily& family, std::optional<double> r) {
  if (sigmas.empty() || sigmas.size() != p_vec.size()) throw Error(ErrorKind::ShapeMismatch, "need one p_i per weight");
  if (r && !(*r > 1.0)) throw Error(ErrorKind::BadExponent, "bump exponent r must exceed 1");
  const Grid grid(sigmas[0].root());
  std::vector<TreeAggregate> aggs;
  double inv = 0.0;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    require_same_root(sigmas[0].root(), sigmas[i].root());
    inv += 1.0 / p_vec[i];
    aggs.push_back(r ? TreeAggregate::of(sigmas[i].power(*r)) : TreeAggregate::of(sigmas[i]));
  }
  const double m = static_cast<double>(sigmas.size());
  std::vector<double> values(grid.cube_count(), 0.0);
  for (const CubeId s : family.cubes) {
    const int level = grid.level_of(s);
    const double vol = grid.volume(level);
    double v = k.at(level) * std::exp2(-grid.dim() * level * (m - inv));
    for (std::size_t i = 0; i < aggs.size(); ++i) {
      const double e = 1.0 / conjugate(p_vec[i]) / (r ? *r : 1.0);
      v *= pow0(aggs[i].sum(s) / vol, e);
    }
    values[s] = v;
  }
  auto rep = scan_report(r ? "embedding-b" : "embedding-a", grid, values);
  rep.profile = {{"p_vec", std::vector<double>(p_vec.begin(), p_vec.end())}};
  if (r) rep.profile["r"] = *r;
  return rep;
}

CqMode parse_cq_mode(const std::string& name) {
  if (name == "given") return CqMode::given;
  if (name == "greedy") return CqMode::greedy;
  if (name == "exhaustive") return CqMode::exhaustive;
  if (name == "bound" || name == "closed-form-bound") return CqMode::bound;
  throw Error(ErrorKind::BadKind, "unknown C_Q mode '" + name + "'");
}

std::string to_string(CqMode mode) {
  switch (mode) {
    case CqMode::given:
      return "given";
    case CqMode::greedy:
      return "greedy";
    case CqMode::exhaustive:
      return "exhaustive";
    case CqMode::bound:
      return "closed-form-bound";
  }
  return "?";
}

ConstantReport sparse_sum_functional(const Grid& grid, std::span<const double> weight, double p, CubeId q, CqMode mode,
                                     const std::vector<CubeId>& family) {
  if (weight.size() != grid.cube_count()) throw Error(ErrorKind::ShapeMismatch, "one weight per cube is required");
  const auto tab = sparse_sum_tables(grid, weight, p);
  const auto chosen = choose_family(grid, tab, q, mode, family);
  ConstantReport rep;
  rep.name = "sparse-sum";
  rep.mode = to_string(mode);
  rep.value = family_sum(tab, chosen);
  for (const CubeId c : chosen) rep.witnesses.push_back(grid.addr(c));
  rep.profile = {{"p", p}};
  return rep;
}

ConstantReport cq_constant(const TreeAggregate& mu, const KernelWeight& k, double p, const CubeAddr& q, CqMode mode,
                           const std::vector<CubeAddr>& family) {
  const Grid& grid = mu.grid();
  const CubeId qid = grid.id(q);
  const double mass = mu.sum(qid);
  if (!(mass > 0.0)) throw Error(ErrorKind::ZeroMeasure, "mu(Q) = 0");
  const double pc = conjugate(p);
  ConstantReport rep;
  rep.name = "cq";
  rep.mode = to_string(mode);
  rep.profile = {{"p", p}, {"q", {{"level", q.level}, {"index", q.index}}}};
  if (mode == CqMode::bound) {
    require_canonical(k);
    const auto energy = kernels::localized_energy(grid, mu.sums(), k.alpha(), pc);
    rep.value = pow0(energy[qid] / mass, 1.0 / pc);
    rep.bound_constant = bound_multiplier(k.alpha(), p);
    rep.witnesses = {q};
    return rep;
  }
  std::vector<CubeId> ids;
  for (const auto& c : family) ids.push_back(grid.id(c));
  const auto inner = sparse_sum_functional(grid, cq_weights(mu, k), p, qid, mode, ids);
  rep.value = std::pow(mass, -1.0 / pc) * inner.value;
  rep.witnesses = inner.witnesses;
  return rep;
}

ConstantReport cq_supremum(const TreeAggregate& mu, const KernelWeight& k, double p, CqMode mode) {
  const Grid& grid = mu.grid();
  const double pc = conjugate(p);
  std::vector<double> values(grid.cube_count(), 0.0);
  if (mode == CqMode::bound) {
    require_canonical(k);
    const auto energy = kernels::localized_energy(grid, mu.sums(), k.alpha(), pc);
    for (CubeId q = 0; q < values.size(); ++q) {
      if (mu.sum(q) > 0.0) values[q] = pow0(energy[q] / mu.sum(q), 1.0 / pc);
    }
  } else {
    if (mode == CqMode::given) throw Error(ErrorKind::BadKind, "the supremum needs a search mode");
    const auto tab = sparse_sum_tables(grid, cq_weights(mu, k), p);
    for (CubeId q = 0; q < values.size(); ++q) {
      if (!(mu.sum(q) > 0.0)) continue;
      values[q] = std::pow(mu.sum(q), -1.0 / pc) * family_sum(tab, choose_family(grid, tab, q, mode, {}));
    }
  }
  auto rep = scan_report("cq-sup", grid, values);
  rep.mode = to_string(mode);
  rep.profile = {{"p", p}};
  if (mode == CqMode::bound) rep.bound_constant = bound_multiplier(k.alpha(), p);
  return rep;
}

ConstantReport ap_characteristic(const LeafField& w, std::optional<double> p, double p_star) {
  const double exponent = p ? *p : p_star;
  if (!(exponent > 1.0) || !std::isfinite(exponent)) throw Error(ErrorKind::BadExponent, "A_p needs 1 < p < inf");
  const Grid grid(w.root());
  const double dual_power = -1.0 / (exponent - 1.0);
  std::vector<double> mass(grid.leaf_count()), dual(grid.leaf_count());
  for (std::uint64_t i = 0; i < mass.size(); ++i) {
    mass[i] = w[i] * grid.leaf_volume();
    dual[i] = w[i] > 0.0 ? std::pow(w[i], dual_power) * grid.leaf_volume() : std::numeric_limits<double>::infinity();
  }
  const auto sw = kernels::reduce_up(grid, mass);
  const auto sd = kernels::reduce_up(grid, dual);
  const auto inv_vol = kernels::level_powers(grid, -static_cast<double>(grid.dim()));
  const auto values = kernels::map_cubes(grid, [&](CubeId q) {
    if (std::isinf(sd[q])) return std::numeric_limits<double>::infinity();
    const double iv = inv_vol[static_cast<std::size_t>(grid.level_of(q))];
    return sw[q] * iv * std::pow(sd[q] * iv, exponent - 1.0);
  });
  auto rep = scan_report(p ? "a_p" : "a_inf-estimate", grid, values);
  rep.profile = {{"p", exponent}};
  return rep;
}

double condition_d_ratio(const Grid& grid, const KernelWeight& k, int m, double p0, CubeId q) {
  const int level = grid.level_of(q);
  const double e = grid.dim() * (m - 1.0 / p0);  // |Q|^{m - 1/p0} = 2^{-level e}
  double above = 0.0;
  for (int j = 0; j < level; ++j) above += k.at(j) * std::exp2(-j * e);
  return above / (k.at(level) * std::exp2(-level * e));
}

double condition_d_ratio(const KernelWeight& k, const ExponentProfile& profile, RootSpec root, const CubeAddr& q) {
  const Grid grid(root);
  return condition_d_ratio(grid, k, profile.m, profile.p0, grid.id(q));
}

double condition_d_series(int n, double alpha, double p0, int level) {
  double s = 0.0;
  for (int d = 1; d <= level; ++d) s += std::exp2(-d * (n / p0 - alpha));
  return s;
}

double condition_d_bound(int n, double alpha, double p0) {
  const double x = std::exp2(alpha - n / p0);
  if (!(x < 1.0)) return std::numeric_limits<double>::infinity();
  return x / (1.0 - x);
}

}  // namespace dtl
