#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dtl/aggregate.hpp"
#include "dtl/constants.hpp"
#include "dtl/decompositions.hpp"
#include "dtl/error.hpp"
#include "dtl/field.hpp"
#include "dtl/harness/registry.hpp"
#include "dtl/harness/report.hpp"
#include "dtl/harness/suites.hpp"
#include "dtl/harness/sweep.hpp"
#include "dtl/operators.hpp"
#include "dtl/profile.hpp"

namespace {

using nlohmann::json;
using namespace dtl;
using namespace dtl::harness;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

LeafField as_field(const json& doc) {
  auto data = ingest_json(doc);
  if (auto* f = std::get_if<LeafField>(&data)) return *f;
  const auto& mu = std::get<LeafMeasure>(data);
  return mu.density_field();
}

LeafMeasure as_measure(const json& doc) {
  auto data = ingest_json(doc);
  if (auto* mu = std::get_if<LeafMeasure>(&data)) return *mu;
  return LeafMeasure::density(std::get<LeafField>(data));
}

CubeAddr read_addr(const json& doc) {
  return {doc.at("level").get<int>(), doc.at("index").get<std::vector<std::uint32_t>>()};
}

json addr_json(const CubeAddr& q) { return {{"level", q.level}, {"index", q.index}}; }

// verify ----------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "exact";
  int dim = 1;
  int depth = 4;
  int trials = 20;
  std::uint64_t seed = 1;
  std::string out = "-";
};

int run_verify(const VerifyArgs& a) {
  const auto report = run_suite(a.suite, RootSpec{a.dim, a.depth}, a.trials, a.seed);
  write_text(a.out, canonical_dump(report.to_json()));
  for (const auto& c : report.checks) {
    std::cerr << (c.pass() ? "PASS " : "FAIL ") << c.name << " worst=" << format_number(c.worst)
              << " limit=" << format_number(c.limit) << " instances=" << c.instances << '\n';
  }
  return report.pass() ? 0 : 1;
}

// sweep -----------------------------------------------------------------

struct SweepArgs {
  std::string ineq;
  std::string dims = "1";
  std::string depths = "2..5";
  int trials = 10;
  std::uint64_t seed = 1;
  std::string profile;
  std::string fields;
  std::string measures;
  std::string out = "-";
  std::string witness;
};

int run_sweep(const SweepArgs& a) {
  const auto& ineq = lookup(a.ineq);
  ExperimentSpec spec;
  spec.id = ineq.id;
  spec.dims = parse_int_list(a.dims);
  spec.depths = parse_int_list(a.depths);
  spec.trials = a.trials;
  spec.seed = a.seed;
  spec.params = a.profile.empty() ? ineq.defaults : ProblemParams::from_json(read_json(a.profile), ineq.defaults);
  if (!a.fields.empty()) spec.kinds.fields = parse_generator_list(a.fields);
  if (!a.measures.empty()) spec.kinds.measures = parse_generator_list(a.measures);

  const auto res = sweep(spec);
  write_text(a.out, ends_with(a.out, ".json") ? canonical_dump(res.to_json()) : res.to_csv());
  if (!a.witness.empty()) {
    auto w = json::array();
    for (const auto& row : res.rows) {
      w.push_back({{"dim", row.dim},
                   {"depth", row.depth},
                   {"trial", row.witness_trial},
                   {"max_ratio", row.max_ratio},
                   {"inputs", row.witness_inputs}});
    }
    write_text(a.witness, canonical_dump(w));
  }
  for (const auto& d : res.dims) {
    std::cerr << (d.pass ? "PASS " : "FAIL ") << spec.id << " dim=" << d.dim << " slope=" << format_number(d.slope)
              << (d.reason.empty() ? "" : " (" + d.reason + ")") << '\n';
  }
  return res.pass ? 0 : 1;
}

// constants -------------------------------------------------------------

struct ConstantsArgs {
  std::string measure;
  std::string profile;
  std::string format = "json";
  std::string cq_mode = "greedy";
  std::string out = "-";
};

std::vector<ConstantReport> constant_table(const LeafMeasure& mu, const ExponentProfile& prof, CqMode cq_mode) {
  std::vector<ConstantReport> out;
  const auto agg = TreeAggregate::of(mu);
  const auto k = KernelWeight::canonical(prof.alpha, prof.m, prof.n);
  const double adams_order = prof.n - prof.beta * prof.p;
  if (adams_order > 0.0 && adams_order <= prof.n) out.push_back(adams_constant(agg, adams_order));
  out.push_back(a0_constant(mu, prof, A0Form::weight_a));
  out.push_back(a0_constant(mu, prof, A0Form::sparse_a));
  if (prof.r && mu.kind() == MeasureKind::density) {
    out.push_back(a0_constant(mu, prof, A0Form::bump_b));
    out.push_back(a0_constant(mu, prof, A0Form::sparse_b));
  }
  if (prof.p > 1.0) {
    out.push_back(ks_testing_constant(agg, prof.beta, prof.p));
    if (agg.total() > 0.0) {
      out.push_back(cq_supremum(agg, k, prof.p, cq_mode));
      if (prof.alpha > 0.0 && cq_mode != CqMode::bound) out.push_back(cq_supremum(agg, k, prof.p, CqMode::bound));
    }
  }
  if (mu.kind() == MeasureKind::density) {
    out.push_back(ap_characteristic(mu.density_field(), 2.0));
    out.push_back(ap_characteristic(mu.density_field(), std::nullopt));
  }
  return out;
}

int run_constants(const ConstantsArgs& a) {
  const auto mu = as_measure(read_json(a.measure));
  auto pdoc = read_json(a.profile);
  if (!pdoc.contains("n")) pdoc["n"] = mu.root().dim;
  const auto prof = ExponentProfile::from_json(pdoc);
  const auto table = constant_table(mu, prof, parse_cq_mode(a.cq_mode));

  // Condition D at the deepest cube, where the ancestor sum is longest.
  const Grid grid(mu.root());
  const auto deepest = grid.addr(grid.cube_count() - 1);
  const double cond_d = condition_d_ratio(KernelWeight::canonical(prof.alpha, prof.m, prof.n), prof, mu.root(), deepest);

  if (a.format == "csv") {
    std::ostringstream os;
    os << "name,value,mode,bound_constant\n";
    for (const auto& r : table) {
      os << r.name << ',' << format_number(r.value) << ',' << r.mode << ','
         << (r.bound_constant ? format_number(*r.bound_constant) : "") << '\n';
    }
    os << "condition_d," << format_number(cond_d) << ",exact-scan,\n";
    write_text(a.out, os.str());
  } else if (a.format == "json") {
    auto reports = json::array();
    for (const auto& r : table) reports.push_back(r.to_json());
    write_text(a.out, canonical_dump({{"reports", reports},
                                      {"profile", prof.to_json()},
                                      {"condition_d", {{"cube", addr_json(deepest)}, {"ratio", cond_d}}},
                                      {"sup_scope", "tree-sup"}}));
  } else {
    throw Error(ErrorKind::BadKind, "unknown format '" + a.format + "'");
  }
  return 0;
}

// decompose -------------------------------------------------------------

struct DecomposeArgs {
  std::string kind;
  std::string input;
  std::string out = "-";
};

// A bare leaf-data document or {"fields": [...], "g": ..., "mu": ..., "q0": ..., "alpha": ...}.
struct DecomposeInput {
  std::vector<LeafField> fields;
  std::optional<LeafField> g;
  std::optional<LeafMeasure> mu;
  std::optional<CubeAddr> q0;
  std::optional<double> alpha;
};

DecomposeInput read_decompose_input(const json& doc) {
  DecomposeInput in;
  if (doc.contains("fields")) {
    for (const auto& f : doc.at("fields")) in.fields.push_back(as_field(f));
    if (doc.contains("g")) in.g = as_field(doc.at("g"));
    if (doc.contains("mu")) in.mu = as_measure(doc.at("mu"));
    if (doc.contains("q0")) in.q0 = read_addr(doc.at("q0"));
    if (doc.contains("alpha")) in.alpha = doc.at("alpha").get<double>();
  } else {
    in.fields.push_back(as_field(doc));
  }
  if (in.fields.empty()) throw Error(ErrorKind::ShapeMismatch, "decompose needs at least one field");
  for (const auto& f : in.fields) require_same_root(in.fields.front().root(), f.root());
  return in;
}

int run_decompose(const DecomposeArgs& a) {
  const auto in = read_decompose_input(read_json(a.input));
  const RootSpec root = in.fields.front().root();
  const Grid grid(root);
  const CubeAddr q0 = in.q0.value_or(grid.addr(grid.root_id()));
  json out;
  if (a.kind == "sparse") {
    std::vector<TreeAggregate> aggs;
    for (const auto& f : in.fields) aggs.push_back(TreeAggregate::of(f));
    out["family"] = build_sparse_family(aggs, q0).to_json();
    if (in.alpha) {
      const auto dom = sparse_dominate(aggs, *in.alpha);
      out["domination"] = {{"alpha", *in.alpha}, {"constant", dom.constant}, {"witness_leaf", dom.witness_leaf}};
    }
  } else if (a.kind == "corona") {
    std::vector<CoronaForest> forests;
    auto fj = json::array();
    for (const auto& f : in.fields) {
      forests.push_back(build_principal_cubes(f, std::nullopt, q0));
      fj.push_back(forests.back().to_json());
    }
    out["f_forests"] = fj;
    if (in.g) {
      const auto g_forest = build_principal_cubes(*in.g, in.mu, q0);
      out["g_forest"] = g_forest.to_json();
      auto cls = json::array();
      for (std::size_t i = 0; i < forests.size(); ++i) {
        for (const CubeId gid : g_forest.cubes) {
          auto entry = classify_children(g_forest, forests[i], grid.addr(gid)).to_json(grid);
          entry["field"] = i;
          cls.push_back(std::move(entry));
        }
      }
      out["classifications"] = cls;
    }
  } else {
    throw Error(ErrorKind::BadKind, "decompose expects 'sparse' or 'corona'");
  }
  write_text(a.out, canonical_dump(out));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dtl: dyadic trace-inequality laboratory"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run a property suite");
  verify->add_option("--suite", va.suite, "exact | sparse | corona | constants")
      ->check(CLI::IsMember(suite_names()));
  verify->add_option("--dim", va.dim, "dimension n")->check(CLI::Range(1, 3));
  verify->add_option("--depth", va.depth, "tree depth L")->check(CLI::Range(0, 24));
  verify->add_option("--trials", va.trials, "random instances per check")->check(CLI::PositiveNumber);
  verify->add_option("--seed", va.seed, "base seed");
  verify->add_option("--out", va.out, "report path or -");

  SweepArgs sa;
  auto* sweep_cmd = app.add_subcommand("sweep", "depth sweep of one registry inequality");
  sweep_cmd->add_option("--ineq", sa.ineq, "registry id")->required();
  sweep_cmd->add_option("--dims", sa.dims, "e.g. 1,2");
  sweep_cmd->add_option("--depths", sa.depths, "e.g. 2..7");
  sweep_cmd->add_option("--trials", sa.trials, "trials per depth")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", sa.seed, "base seed");
  sweep_cmd->add_option("--profile", sa.profile, "exponent profile JSON");
  sweep_cmd->add_option("--fields", sa.fields, "field generator kinds, comma separated");
  sweep_cmd->add_option("--measures", sa.measures, "measure generator kinds, comma separated");
  sweep_cmd->add_option("--out", sa.out, "CSV path, .json for the full report, or -");
  sweep_cmd->add_option("--witness", sa.witness, "write per-depth witness inputs here");

  ConstantsArgs ca;
  auto* consts = app.add_subcommand("constants", "constant table of a measure");
  consts->add_option("--measure", ca.measure, "measure JSON")->required();
  consts->add_option("--profile", ca.profile, "exponent profile JSON")->required();
  consts->add_option("--format", ca.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  consts->add_option("--cq-mode", ca.cq_mode, "greedy | exhaustive | bound");
  consts->add_option("--out", ca.out, "output path or -");

  DecomposeArgs da;
  auto* decomp = app.add_subcommand("decompose", "stopping-time decompositions");
  decomp->add_option("kind", da.kind, "sparse | corona")->required()->check(CLI::IsMember({"sparse", "corona"}));
  decomp->add_option("--input", da.input, "input JSON")->required();
  decomp->add_option("--out", da.out, "output path or -");

  auto* list = app.add_subcommand("list", "list registry ids");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) return run_verify(va);
    if (*sweep_cmd) return run_sweep(sa);
    if (*consts) return run_constants(ca);
    if (*decomp) return run_decompose(da);
    if (*list) {
      for (const auto& ineq : registry()) {
        std::cout << ineq.id << '\t' << to_string(ineq.check) << '\t' << ineq.summary << '\n';
      }
      return 0;
    }
  } catch (const dtl::Error& e) {
    std::cerr << "dtl: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "dtl: malformed JSON: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
