// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if all pass.

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dtl/aggregate.hpp"
#include "dtl/constants.hpp"
#include "dtl/error.hpp"
#include "dtl/harness/registry.hpp"
#include "dtl/harness/report.hpp"
#include "dtl/harness/suites.hpp"
#include "dtl/harness/sweep.hpp"
#include "dtl/norms.hpp"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace dtl;
using namespace dtl::harness;
using nlohmann::json;

namespace {

struct Criterion {
  Criterion(int num, std::string label) : number(num), name(std::move(label)) {}

  int number = 0;
  std::string name;
  bool pass = false;
  json detail = json::object();
  std::string summary;
};

double rel_err(double got, double want) {
  if (got == want) return 0.0;
  if (!std::isfinite(got) || !std::isfinite(want)) return std::numeric_limits<double>::infinity();
  return std::fabs(got - want) / std::max(std::fabs(got), std::fabs(want));
}

// Worst relative error per quantity over all oracle comparisons.
class ErrorTable {
 public:
  void add(const std::string& what, double got, double want) {
    auto& w = worst_[what];
    w = std::max(w, rel_err(got, want));
    ++count_;
  }
  double worst() const {
    double w = 0.0;
    for (const auto& [k, v] : worst_) w = std::max(w, v);
    return w;
  }
  json to_json() const { return {{"comparisons", count_}, {"worst_rel_err", worst_}}; }

 private:
  std::map<std::string, double> worst_;
  std::uint64_t count_ = 0;
};

// 100 seeds at every dimension 1..2 and depth 0..4.
Criterion oracle_equivalence(std::uint64_t base) {
  ErrorTable errs;
  std::uint64_t instances = 0;
  for (const int n : {1, 2}) {
    for (std::uint64_t s = 0; s < 500; ++s) {
      const RootSpec root{n, static_cast<int>(s / 100)};
      const std::uint64_t seed = base * 1000 + s * 2 + static_cast<std::uint64_t>(n);
      const auto f = testing::random_field(root, seed, 0.2);
      const auto f2 = testing::random_field(root, seed + 500, 0.1);
      const auto mu = testing::random_measure(root, seed);
      const auto fa = TreeAggregate::of(f);
      const auto ma = TreeAggregate::of(mu);
      const Grid grid(root);
      for (CubeId q = 0; q < grid.cube_count(); ++q) {
        const auto addr = grid.addr(q);
        const auto st = cube_stats(fa, addr);
        errs.add("cube_stats.sum", st.sum, oracle::integral(f, addr));
        errs.add("cube_stats.average", st.average, oracle::integral(f, addr) / oracle::volume(root, addr.level));
        errs.add("cube_stats.mass", cube_stats(ma, addr).mass.value_or(-1.0), oracle::mass(mu, addr));
      }
      const double p = 1.2 + 0.3 * static_cast<double>(s % 4);
      const double p0 = p + 0.7;
      const double alpha = 0.4 * n;
      errs.add("lebesgue", lebesgue_norm(f, p), oracle::lebesgue(f, p));
      errs.add("morrey", morrey_norm(f, p, p0).value, oracle::morrey(f, p, p0));
      const std::vector<LeafField> fs{f, f2};
      const std::vector<double> pv{2.0 * p, 2.0 * p};
      errs.add("product_morrey", product_morrey_norm(fs, pv, p0).value, oracle::product_morrey(fs, pv, p0));
      errs.add("radon_morrey", radon_morrey_norm(f, p, p0, mu).value, oracle::radon_morrey(f, p, p0, mu));
      errs.add("modified_morrey", modified_morrey_norm(f, p, alpha).value, oracle::modified_morrey(f, p, alpha));

      const double beta = 0.3 * n;
      errs.add("adams", adams_constant(ma, beta).value, oracle::adams(mu, beta));
      errs.add("ks_testing", ks_testing_constant(ma, beta, p).value, oracle::ks_testing(mu, beta, p));
      ExponentProfile prof;
      prof.n = n;
      prof.alpha = alpha;
      prof.beta = beta;
      prof.p_vec = {p};
      prof.p = p;
      errs.add("a0.weight_a", a0_constant(mu, prof, A0Form::weight_a).value, oracle::weight_a(mu, beta, p));
      errs.add("a0.sparse_a", a0_constant(mu, prof, A0Form::sparse_a).value, oracle::weight_a(mu, alpha, p));
      if (mu.kind() == MeasureKind::density) {
        const auto& w = mu.density_field();
        errs.add("a0.bump_b", a0_constant(mu, prof, A0Form::bump_b, std::nullopt, 2.0).value,
                 oracle::weight_a(mu.power(2.0), beta, 2.0 * p));
        errs.add("ap", ap_characteristic(w, p + 0.5).value, oracle::ap(w, p + 0.5));
        errs.add("a_inf", ap_characteristic(w, std::nullopt).value, oracle::ap(w, 64.0));
      }
      ++instances;
    }
  }
  Criterion c{1, "oracle-equivalence"};
  c.pass = errs.worst() <= 1e-12;
  c.summary = "worst_rel_err=" + format_number(errs.worst());
  c.detail = errs.to_json();
  c.detail["instances"] = instances;
  return c;
}

bool all_pass(const SuiteReport& rep, const std::vector<std::string>& names, json& detail) {
  bool ok = true;
  for (const auto& name : names) {
    const auto& chk = rep.check(name);
    ok = ok && chk.pass();
    detail[rep.suite + "/" + std::to_string(rep.root.dim) + "/" + name] = {
        {"worst", chk.worst}, {"failures", chk.failures}, {"instances", chk.instances}};
  }
  return ok;
}

struct Runner {
  std::uint64_t seed;
  json suites = json::array();
  json sweeps = json::array();

  SuiteReport suite(const std::string& name, RootSpec root, int trials) {
    auto rep = run_suite(name, root, trials, seed);
    suites.push_back(rep.to_json());
    return rep;
  }

  SweepResult run_sweep(ExperimentSpec spec) {
    spec.seed = seed;
    auto res = sweep(spec);
    sweeps.push_back(res.to_json());
    return res;
  }

  Criterion packing() {
    Criterion c{2, "exact-packing"};
    c.pass = true;
    for (const RootSpec root : {RootSpec{1, 5}, RootSpec{2, 3}}) {
      const auto sp = suite("sparse", root, 200);
      const auto co = suite("corona", root, 200);
      c.pass = all_pass(sp, {"sparse-packing", "sparse-child-packing", "sparse-stopping", "sparse-maximality"},
                        c.detail) &&
               c.pass;
      c.pass = all_pass(co, {"g-forest-packing", "g-forest-stopping-parent", "f-forest-packing",
                             "f-forest-stopping-parent", "f-forest-maximality", "g-forest-maximality"},
                        c.detail) &&
               c.pass;
    }
    return c;
  }

  Criterion exact() {
    Criterion c{3, "exact-inequalities"};
    c.pass = true;
    for (const RootSpec root : {RootSpec{1, 4}, RootSpec{2, 3}}) {
      const auto rep = suite("exact", root, 200);
      c.pass = all_pass(rep, {"morrey-nesting", "morrey-identity", "eq1.4-left", "eq4.1", "eq4.1-identity"},
                        c.detail) &&
               c.pass;
    }
    return c;
  }

  Criterion corona() {
    Criterion c{4, "corona"};
    c.pass = true;
    for (int depth = 1; depth <= 4; ++depth) {
      const auto rep = suite("corona", {1, depth}, 100);
      json d;
      c.pass = all_pass(rep, {"classification-partition", "classification-remainder", "projection-preserves-integrals"},
                        d) &&
               c.pass;
      c.detail["depth" + std::to_string(depth)] = d;
      c.detail["depth" + std::to_string(depth)]["counts"] = rep.check("classification-partition").notes;
      c.detail["depth" + std::to_string(depth)]["remainder"] = rep.check("classification-remainder").notes;
    }
    return c;
  }

  // Sweep pass rule, plus the depth-3 anchored growth check when asked.
  bool judge(const SweepResult& res, json& detail, const std::string& label, int anchor = -1) {
    bool ok = res.pass;
    for (const auto& d : res.dims) {
      json row = {{"slope", d.slope}, {"pass", d.pass}};
      double first = 0.0;
      double last = 0.0;
      for (const auto& r : res.rows) {
        if (r.dim != d.dim) continue;
        row["max_ratio"][std::to_string(r.depth)] = r.max_ratio;
        ok = ok && std::isfinite(r.max_ratio);
        if (r.depth == anchor) first = r.max_ratio;
        last = r.max_ratio;
      }
      if (anchor >= 0) {
        const bool grow = last <= kMaxGrowth * first;
        row["last_over_anchor"] = first > 0.0 ? last / first : 0.0;
        ok = ok && grow;
      }
      detail[label + "/n" + std::to_string(d.dim)] = row;
    }
    return ok;
  }

  Criterion sparse_domination() {
    Criterion c{5, "sparse-domination"};
    c.pass = true;
    for (const int m : {1, 2}) {
      ExperimentSpec spec;
      spec.id = "sparse-domination";
      spec.params = lookup(spec.id).defaults;
      if (m == 2) spec.params = ProblemParams::from_json({{"m", 2}, {"p_vec", {2, 2}}, {"alpha", 1.5}, {"beta", 1.5}},
                                                         spec.params);
      spec.dims = {1};
      spec.depths = {2, 3, 4, 5, 6, 7};
      spec.trials = 50;
      c.pass = judge(run_sweep(spec), c.detail, "m" + std::to_string(m), 3) && c.pass;
    }
    return c;
  }

  Criterion main_theorems() {
    Criterion c{6, "main-theorems"};
    c.pass = true;
    for (const auto* id : {"thm1.1a", "thm1.1b", "thm1.2a", "thm1.2b"}) {
      ExperimentSpec spec;
      spec.id = id;
      spec.params = lookup(id).defaults;
      spec.dims = {2};
      spec.depths = {1, 2, 3, 4};
      spec.trials = 12;
      c.pass = judge(run_sweep(spec), c.detail, id) && c.pass;
      c.detail[std::string(id) + "/n2"]["atomic_mu"] = !lookup(id).weight_only;
    }
    return c;
  }

  Criterion hedberg() {
    Criterion c{7, "hedberg-pointwise"};
    ExperimentSpec spec;
    spec.id = "hedberg-pointwise";
    spec.params = lookup(spec.id).defaults;
    spec.dims = {1, 2};
    spec.depths = {2, 3, 4, 5};
    spec.trials = 20;
    c.pass = judge(run_sweep(spec), c.detail, spec.id);
    return c;
  }

  Criterion cq_hierarchy() {
    Criterion c{8, "cq-hierarchy"};
    c.pass = true;
    double worst_bound = 0.0;
    for (int depth = 1; depth <= 3; ++depth) {
      const auto rep = suite("constants", {1, depth}, 100);
      c.pass = all_pass(rep, {"cq-greedy-le-exhaustive", "cq-exhaustive-over-bound"}, c.detail) && c.pass;
      worst_bound = std::max(worst_bound, rep.check("cq-exhaustive-over-bound").worst);
      c.detail["depth" + std::to_string(depth)] = rep.check("cq-exhaustive-over-bound").worst;
    }
    c.detail["max_exhaustive_over_bound"] = worst_bound;
    c.summary = "max_exhaustive_over_bound=" + format_number(worst_bound);
    return c;
  }

  Criterion condition_d() {
    Criterion c{9, "condition-d"};
    c.pass = true;
    for (const int n : {1, 2}) {
      const auto rep = suite("constants", {n, 4}, 10);
      c.pass = all_pass(rep, {"condition-d-formula", "condition-d-bound"}, c.detail) && c.pass;
    }
    return c;
  }
};

json run_all(std::uint64_t seed, std::vector<Criterion>& out) {
  Runner run{seed};
  out.push_back(run.packing());
  out.push_back(run.exact());
  out.push_back(run.corona());
  out.push_back(run.sparse_domination());
  out.push_back(run.main_theorems());
  out.push_back(run.hedberg());
  out.push_back(run.cq_hierarchy());
  out.push_back(run.condition_d());
  json crit = json::array();
  for (const auto& c : out) crit.push_back({{"criterion", c.number}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return {{"seed", seed}, {"criteria", crit}, {"suites", run.suites}, {"sweeps", run.sweeps}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::uint64_t seed = 20240601;
  std::string report_path;
  app.add_option("--seed", seed, "base seed");
  app.add_option("--report", report_path, "write the full JSON report here");
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<Criterion> results;
    results.push_back(oracle_equivalence(seed));
    std::vector<Criterion> first;
    const auto report = canonical_dump(run_all(seed, first));
    results.insert(results.end(), first.begin(), first.end());

    std::vector<Criterion> second;
    const auto again = canonical_dump(run_all(seed, second));
    Criterion det{10, "determinism"};
    det.pass = report == again;
    det.detail = {{"bytes", report.size()}};
    results.push_back(det);

    bool ok = true;
    for (const auto& c : results) {
      ok = ok && c.pass;
      std::printf("criterion %d %s %s%s%s\n", c.number, c.pass ? "PASS" : "FAIL", c.name.c_str(),
                  c.summary.empty() ? "" : " ", c.summary.c_str());
      if (!c.pass) std::printf("  %s\n", c.detail.dump().c_str());
    }
    if (!report_path.empty()) {
      json doc = json::parse(report);
      json crit = json::array();
      for (const auto& c : results) crit.push_back({{"criterion", c.number}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
      doc["criteria"] = crit;
      write_text(report_path, canonical_dump(doc));
    }
    return ok ? 0 : 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "acceptance: %s\n", e.what());
    return 2;
  }
}
