#include "dtl/harness/suites.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include "dtl/aggregate.hpp"
#include "dtl/constants.hpp"
#include "dtl/decompositions.hpp"
#include "dtl/error.hpp"
#include "dtl/harness/generators.hpp"
#include "dtl/harness/registry.hpp"
#include "dtl/norms.hpp"
#include "dtl/operators.hpp"
#include "dtl/profile.hpp"

namespace dtl::harness {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

double rel_error(double a, double b) {
  if (a == b) return 0.0;
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) / scale;
}

// Bitwise mismatch count between two leaf fields.
double mismatches(const LeafField& a, const LeafField& b) {
  double count = 0.0;
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) count += 1.0;
  }
  return count;
}

class Checks {
 public:
  SuiteCheck& operator()(const std::string& name, double limit) {
    auto it = index_.find(name);
    if (it == index_.end()) {
      it = index_.emplace(name, checks_.size()).first;
      checks_.push_back(SuiteCheck{name, limit});
    }
    return checks_[it->second];
  }
  std::vector<SuiteCheck> take() { return {checks_.begin(), checks_.end()}; }

 private:
  std::deque<SuiteCheck> checks_;  // stable references
  std::map<std::string, std::size_t> index_;
};

const std::vector<GeneratorKind> kFieldKinds{GeneratorKind::uniform, GeneratorKind::power_spike,
                                             GeneratorKind::sparse_spikes, GeneratorKind::constant};
const std::vector<GeneratorKind> kMeasureKinds{GeneratorKind::density_measure, GeneratorKind::atom_measure};

GeneratorKind rotate(const std::vector<GeneratorKind>& kinds, std::uint64_t t) { return kinds[t % kinds.size()]; }

std::uint64_t instance_seed(std::uint64_t seed, RootSpec root, std::uint64_t trial, std::uint64_t role) {
  return derive_seed(seed, static_cast<std::uint64_t>(root.dim) * 1000 + static_cast<std::uint64_t>(root.depth), trial,
                     role);
}

LeafField trial_field(RootSpec root, std::uint64_t seed, std::uint64_t t, std::uint64_t role) {
  GeneratorOptions opts;
  opts.gamma = 0.4 * root.dim;
  return generate_field(rotate(kFieldKinds, t + role), root, instance_seed(seed, root, t, role), opts);
}

LeafMeasure trial_measure(RootSpec root, std::uint64_t seed, std::uint64_t t, std::uint64_t role) {
  return generate_measure(rotate(kMeasureKinds, t), root, instance_seed(seed, root, t, role));
}

// exact -----------------------------------------------------------------

void exact_suite(Checks& checks, RootSpec root, int trials, std::uint64_t seed) {
  const std::vector<std::string> ids{"morrey-nesting", "morrey-identity", "eq1.4-left",
                                     "eq4.1",          "eq4.1-identity",  "packing"};
  for (const auto& id : ids) {
    const auto& ineq = lookup(id);
    auto& c = checks(id, 1.0 + kExactSlack);
    for (int t = 0; t < trials; ++t) {
      const auto inst = make_instance(ineq, ineq.defaults, root, seed, static_cast<std::uint64_t>(t), TrialKinds{});
      c.record(inequality_ratio(ineq, ineq.defaults, inst).ratio);
    }
  }

  auto& bits = checks("parallel-serial-identical", 0.0);
  const int n = root.dim;
  for (int t = 0; t < trials; ++t) {
    const auto ut = static_cast<std::uint64_t>(t);
    const std::vector<LeafField> fs{trial_field(root, seed, ut, 1), trial_field(root, seed, ut, 2)};
    const std::vector<TreeAggregate> aggs{TreeAggregate::of(fs[0]), TreeAggregate::of(fs[1])};
    const auto mu = TreeAggregate::of(trial_measure(root, seed, ut, 100));
    const auto k = KernelWeight::canonical(0.5 * n, 2, n);
    double diff = 0.0;
    diff += mismatches(multilinear_maximal(aggs, 0.5 * n, Exec::parallel), multilinear_maximal(aggs, 0.5 * n, Exec::serial));
    diff += mismatches(dyadic_integral_operator(aggs, k, Exec::parallel), dyadic_integral_operator(aggs, k, Exec::serial));
    diff += mismatches(fractional_maximal(mu, 0.5, {}, Exec::parallel), fractional_maximal(mu, 0.5, {}, Exec::serial));
    diff += mismatches(mu_maximal(fs[0], mu, Exec::parallel), mu_maximal(fs[0], mu, Exec::serial));
    diff += mismatches(discretization_majorant(fs, 0.5, Exec::parallel), discretization_majorant(fs, 0.5, Exec::serial));
    const auto mp = modified_morrey_norm(fs[0], 2.0, 0.5, Exec::parallel);
    const auto ms = modified_morrey_norm(fs[0], 2.0, 0.5, Exec::serial);
    diff += (mp.value == ms.value && mp.witness == ms.witness) ? 0.0 : 1.0;
    const double kp = ks_testing_constant(mu, 0.5, 2.0, Exec::parallel).value;
    const double ks = ks_testing_constant(mu, 0.5, 2.0, Exec::serial).value;
    diff += kp == ks ? 0.0 : 1.0;
    bits.record(diff);
  }
}

// sparse ----------------------------------------------------------------

void sparse_suite(Checks& checks, RootSpec root, int trials, std::uint64_t seed) {
  const Grid grid(root);
  auto& packing = checks("sparse-packing", 1.0);
  auto& children = checks("sparse-child-packing", 1.0);
  auto& carleson = checks("sparse-carleson", 2.0);
  auto& certified = checks("sparse-certificate", 0.0);
  auto& stopping = checks("sparse-stopping", 0.0);
  auto& maximal = checks("sparse-maximality", 0.0);
  auto& domination = checks("sparse-domination-finite", 0.0);

  for (int t = 0; t < trials; ++t) {
    const auto ut = static_cast<std::uint64_t>(t);
    const int m = 1 + t % 2;
    std::vector<TreeAggregate> aggs;
    for (int i = 0; i < m; ++i) aggs.push_back(TreeAggregate::of(trial_field(root, seed, ut, 1 + i)));
    const auto fam = build_sparse_family(aggs, grid.addr(grid.root_id()));
    const double fan = std::ldexp(1.0, m);
    auto xbar = [&](CubeId q) {
      double x = 1.0;
      for (const auto& a : aggs) x *= a.sum(q) / grid.volume(grid.level_of(q));
      return x;
    };

    double worst_pack = 0.0;
    std::vector<double> child_volume(fam.cubes.size(), 0.0);
    for (std::size_t i = 0; i < fam.cubes.size(); ++i) {
      const auto cells = static_cast<double>(grid.leaves_of(fam.cubes[i]).size());
      const auto owned = static_cast<double>(fam.e_leaves[i].size());
      worst_pack = std::max(worst_pack, owned > 0.0 ? cells / (2.0 * owned) : kInf);
      if (fam.parent[i]) child_volume[*fam.parent[i]] += grid.volume(grid.level_of(fam.cubes[i]));
    }
    packing.record(worst_pack);
    double worst_children = 0.0;
    for (std::size_t i = 0; i < fam.cubes.size(); ++i) {
      worst_children = std::max(worst_children, child_volume[i] / (0.5 * grid.volume(grid.level_of(fam.cubes[i]))));
    }
    children.record(worst_children);
    carleson.record(fam.carleson);

    const auto again = verify_sparse(grid, fam.cubes);
    certified.record((again.is_sparse && fam.is_sparse && again.e_leaves == fam.e_leaves) ? 0.0 : 1.0);

    double stop_bad = 0.0, max_bad = 0.0;
    for (std::size_t i = 0; i < fam.cubes.size(); ++i) {
      if (!fam.parent[i]) continue;
      const CubeId s = fam.cubes[*fam.parent[i]];
      const CubeId child = fam.cubes[i];
      const double threshold = fan * xbar(s);
      if (!(xbar(child) > threshold)) stop_bad += 1.0;
      const CubeId up = grid.parent(child);
      if (up != s && xbar(up) > threshold) max_bad += 1.0;
    }
    stopping.record(stop_bad);
    maximal.record(max_bad);

    const double alpha = 0.5 * m * root.dim;
    const auto dom = sparse_dominate(aggs, alpha);
    domination.record(std::isfinite(dom.constant) ? 0.0 : 1.0);
  }
}

// corona ----------------------------------------------------------------

struct PairData {
  TreeAggregate h_nu;
  TreeAggregate nu;
};

PairData pair_data(const LeafField& h, const std::optional<LeafMeasure>& mu) {
  const auto nu_mass = mu ? mu->leaf_masses() : LeafMeasure::lebesgue(h.root()).leaf_masses();
  std::vector<double> weighted(nu_mass.size());
  for (std::size_t i = 0; i < weighted.size(); ++i) weighted[i] = h[i] * nu_mass[i];
  return {TreeAggregate::from_leaf_masses(h.root(), weighted, TreeAggregate::Source::measure),
          TreeAggregate::from_leaf_masses(h.root(), nu_mass, TreeAggregate::Source::measure)};
}

// Stopping-parent bound for every cube, maximality of every stopping child
// and the forest packing |E(F)| >= |F| / 2 (in nu-mass for the mu pair).
void forest_checks(Checks& checks, const std::string& tag, const Grid& grid, const CoronaForest& forest,
                   const PairData& pd) {
  auto avg = [&](CubeId q) { return pair_average(grid, pd.h_nu, pd.nu, q); };
  double worst_parent = 0.0;
  for (CubeId q = 0; q < grid.cube_count(); ++q) {
    const double top = 2.0 * avg(stopping_parent(grid, forest, q));
    const double a = avg(q);
    worst_parent = std::max(worst_parent, a == 0.0 ? 0.0 : (top > 0.0 ? a / top : kInf));
  }
  checks(tag + "-stopping-parent", 1.0).record(worst_parent);

  double stop_bad = 0.0;
  for (std::size_t i = 0; i < forest.cubes.size(); ++i) {
    if (!forest.parent[i]) continue;
    const double threshold = 2.0 * forest.average[*forest.parent[i]];
    const CubeId child = forest.cubes[i];
    if (!(avg(child) > threshold)) stop_bad += 1.0;
    const CubeId up = grid.parent(child);
    if (up != forest.cubes[*forest.parent[i]] && pd.nu.sum(up) > 0.0 && avg(up) > threshold) stop_bad += 1.0;
  }
  checks(tag + "-maximality", 0.0).record(stop_bad);

  double worst_pack = 0.0;
  if (!forest.uses_measure) {
    for (std::size_t i = 0; i < forest.cubes.size(); ++i) {
      const auto cells = static_cast<double>(grid.leaves_of(forest.cubes[i]).size());
      const auto owned = static_cast<double>(forest.e_leaves[i].size());
      worst_pack = std::max(worst_pack, owned > 0.0 ? cells / (2.0 * owned) : kInf);
    }
    checks(tag + "-packing", 1.0).record(worst_pack);
    double worst_desc = 0.0;
    for (std::size_t i = 0; i < forest.cubes.size(); ++i) {
      worst_desc = std::max(worst_desc, descendant_volume(grid, forest, i) /
                                            (2.0 * grid.volume(grid.level_of(forest.cubes[i]))));
    }
    checks(tag + "-descendants", 1.0).record(worst_desc);
  } else {
    for (std::size_t i = 0; i < forest.cubes.size(); ++i) {
      if (forest.mass[i] > 0.0) worst_pack = std::max(worst_pack, forest.mass[i] / (2.0 * forest.e_mass[i]));
    }
    checks(tag + "-packing", 1.0 + kExactSlack).record(worst_pack);
  }
}

void corona_suite(Checks& checks, RootSpec root, int trials, std::uint64_t seed) {
  const Grid grid(root);
  const auto top = grid.addr(grid.root_id());
  // Pairwise sums of equal values are exact in one dimension only.
  const double preserve_limit = root.dim == 1 ? 0.0 : 1e-12;
  auto& partition = checks("classification-partition", 0.0);
  auto& remainder = checks("classification-remainder", kInf);
  auto& preserve = checks("projection-preserves-integrals", preserve_limit);
  std::uint64_t remainder_total = 0;
  std::uint64_t list_total[3] = {0, 0, 0};

  for (int t = 0; t < trials; ++t) {
    const auto ut = static_cast<std::uint64_t>(t);
    const auto g = trial_field(root, seed, ut, 200);
    const auto mu = trial_measure(root, seed, ut, 100);
    const auto g_forest = build_principal_cubes(g, mu, top);
    forest_checks(checks, "g-forest", grid, g_forest, pair_data(g, mu));

    for (std::uint64_t i = 1; i <= 2; ++i) {
      const auto f = trial_field(root, seed, ut, i);
      const auto f_forest = build_principal_cubes(f, std::nullopt, top);
      forest_checks(checks, "f-forest", grid, f_forest, pair_data(f, std::nullopt));
      const auto f_agg = TreeAggregate::of(f);

      for (std::size_t gi = 0; gi < g_forest.cubes.size(); ++gi) {
        const CubeId gid = g_forest.cubes[gi];
        const auto cls = classify_children(g_forest, f_forest, grid.addr(gid));

        std::vector<CubeId> expected;
        for (const auto c : g_forest.children[gi]) expected.push_back(g_forest.cubes[c]);
        std::vector<CubeId> listed;
        for (const auto* list : {&cls.ch1, &cls.ch2, &cls.ch3, &cls.remainder}) {
          listed.insert(listed.end(), list->begin(), list->end());
        }
        std::sort(expected.begin(), expected.end());
        std::sort(listed.begin(), listed.end());
        double bad = listed == expected ? 0.0 : 1.0;
        std::set<CubeId> witnessed;
        for (const auto& [child, q] : cls.witnesses) {
          witnessed.insert(child);
          if (!(grid.contains(q, child) && q != child)) bad += 1.0;
        }
        for (const auto* list : {&cls.ch1, &cls.ch2, &cls.ch3}) {
          for (const auto c : *list) {
            if (!witnessed.count(c)) bad += 1.0;
          }
        }
        for (const auto c : cls.remainder) {
          if (witnessed.count(c)) bad += 1.0;
        }
        partition.record(bad);
        remainder.record(static_cast<double>(cls.remainder.size()));
        remainder_total += cls.remainder.size();
        list_total[0] += cls.ch1.size();
        list_total[1] += cls.ch2.size();
        list_total[2] += cls.ch3.size();

        const auto fg = corona_projection(f, g_forest, cls);
        const auto fg_agg = TreeAggregate::of(fg);
        double worst = 0.0;
        for (CubeId q = 0; q < grid.cube_count(); ++q) {
          if (stopping_parent(grid, g_forest, q) != gid) continue;
          worst = std::max(worst, rel_error(f_agg.sum(q), fg_agg.sum(q)));
        }
        preserve.record(worst);
      }
    }
  }
  remainder.notes["remainder_total"] = remainder_total;
  partition.notes["ch1_total"] = list_total[0];
  partition.notes["ch2_total"] = list_total[1];
  partition.notes["ch3_total"] = list_total[2];
}

// constants -------------------------------------------------------------

void constants_suite(Checks& checks, RootSpec root, int trials, std::uint64_t seed) {
  const int n = root.dim;

  // C_Q hierarchy on the largest tree exhaustive enumeration accepts.
  const RootSpec small{1, std::min(root.depth, 3)};
  const Grid sgrid(small);
  const auto k1 = KernelWeight::canonical(0.5, 1, 1);
  auto& order = checks("cq-greedy-le-exhaustive", 1.0 + kExactSlack);
  auto& bounded = checks("cq-exhaustive-over-bound", 10.0);
  for (int t = 0; t < trials; ++t) {
    const auto mu = TreeAggregate::of(trial_measure(small, seed, static_cast<std::uint64_t>(t), 100));
    for (CubeId q = 0; q < sgrid.cube_count(); ++q) {
      if (!(mu.sum(q) > 0.0)) continue;
      const auto addr = sgrid.addr(q);
      const double greedy = cq_constant(mu, k1, 2.0, addr, CqMode::greedy).value;
      const double exhaustive = cq_constant(mu, k1, 2.0, addr, CqMode::exhaustive).value;
      const auto bound = cq_constant(mu, k1, 2.0, addr, CqMode::bound);
      order.record(score_ratio(greedy, exhaustive));
      bounded.record(score_ratio(exhaustive, bound.value));
      if (bound.bound_constant) bounded.notes["bound_constant"] = *bound.bound_constant;
    }
  }

  // Condition D against its geometric closed form.
  const Grid grid(root);
  const double alpha = 0.5 * n;
  const double p0 = 1.5;
  const auto k2 = KernelWeight::canonical(alpha, 2, n);
  auto& formula = checks("condition-d-formula", 1e-12);
  auto& geometric = checks("condition-d-bound", 1.0 + kExactSlack);
  const double cap = condition_d_bound(n, alpha, p0);
  for (CubeId q = 0; q < grid.cube_count(); ++q) {
    const double ratio = condition_d_ratio(grid, k2, 2, p0, q);
    const double series = condition_d_series(n, alpha, p0, grid.level_of(q));
    formula.record(rel_error(ratio, series));
    geometric.record(ratio / cap);
  }

  // A_p characteristics of positive weights.
  auto& ap_floor = checks("ap-at-least-one", 0.0);
  auto& ap_mono = checks("ap-nonincreasing", 1.0 + kExactSlack);
  const std::vector<double> ps{1.5, 2.0, 3.0, 4.0, 8.0, 64.0};
  for (int t = 0; t < trials; ++t) {
    const auto ut = static_cast<std::uint64_t>(t);
    const auto kind = t % 2 == 0 ? GeneratorKind::density_measure : GeneratorKind::power_spike;
    const auto w = generate_field(kind, root, instance_seed(seed, root, ut, 400));
    double prev = kInf;
    double below = 0.0, worst_mono = 0.0;
    for (const double p : ps) {
      const double a = ap_characteristic(w, p).value;
      if (a < 1.0 - kExactSlack) below += 1.0;
      worst_mono = std::max(worst_mono, std::isinf(prev) ? 0.0 : a / prev);
      prev = a;
    }
    ap_floor.record(below);
    ap_mono.record(worst_mono);
  }

  // Comparison chain and its identity, through the registry.
  for (const auto* id : {"eq4.1", "eq4.1-identity"}) {
    const auto& ineq = lookup(id);
    auto& c = checks(id, 1.0 + kExactSlack);
    for (int t = 0; t < trials; ++t) {
      const auto inst = make_instance(ineq, ineq.defaults, root, seed, static_cast<std::uint64_t>(t), TrialKinds{});
      c.record(inequality_ratio(ineq, ineq.defaults, inst).ratio);
    }
  }

  // Hedberg exponents on a hand-computed case.
  const auto h = hedberg_exponents(2, 1.0, 0.5, 1.2, 1.5);
  auto& hedberg = checks("hedberg-exponents", 1e-12);
  hedberg.record(std::max({rel_error(h.theta, 2.5), rel_error(h.q, 3.0), rel_error(h.q0, 3.75)}));
}

}  // namespace

void SuiteCheck::record(double score) {
  ++instances;
  if (instances == 1 || score > worst || std::isnan(score)) worst = score;
  if (!(score <= limit)) ++failures;
}

json SuiteCheck::to_json() const {
  return {{"name", name},   {"limit", limit},         {"worst", worst}, {"instances", instances},
          {"failures", failures}, {"pass", pass()}, {"notes", notes}};
}

bool SuiteReport::pass() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.pass(); });
}

const SuiteCheck& SuiteReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw Error(ErrorKind::RegistryMiss, "no check named '" + name + "'");
}

json SuiteReport::to_json() const {
  auto arr = json::array();
  for (const auto& c : checks) arr.push_back(c.to_json());
  return {{"suite", suite}, {"dim", root.dim}, {"depth", root.depth}, {"trials", trials},
          {"seed", seed},   {"checks", arr},   {"pass", pass()}};
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"exact", "sparse", "corona", "constants"};
  return names;
}

SuiteReport run_suite(const std::string& suite, RootSpec root, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorKind::InvalidRoot, "need at least one trial");
  Grid probe(root);
  (void)probe;
  Checks checks;
  if (suite == "exact") {
    exact_suite(checks, root, trials, seed);
  } else if (suite == "sparse") {
    sparse_suite(checks, root, trials, seed);
  } else if (suite == "corona") {
    corona_suite(checks, root, trials, seed);
  } else if (suite == "constants") {
    constants_suite(checks, root, trials, seed);
  } else {
    throw Error(ErrorKind::BadKind, "unknown suite '" + suite + "'");
  }
  SuiteReport report;
  report.suite = suite;
  report.root = root;
  report.trials = trials;
  report.seed = seed;
  report.checks = checks.take();
  return report;
}

}  // namespace dtl::harness
